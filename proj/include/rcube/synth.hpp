#pragma once

#include <vector>

#include "rcube/scene.hpp"
#include "rcube/tensor.hpp"

namespace rcube {

// De-chirped (beat) samples of one frame: [samples x chirps x physical rx],
// plus the Tx that fired each chirp (round-robin schedule).
struct RawFrame {
    Tensor<cplx> samples;
    std::vector<std::size_t> tx_schedule;
};

// Accumulated per-target Doppler phase, so a multi-frame simulation keeps
// each target phase-continuous across the frame boundary. Entries are keyed
// by target position in the frame's target list.
struct ChirpPhaseState {
    std::vector<double> accumulated;

    double phase_for(std::size_t idx) const {
        return idx < accumulated.size() ? accumulated[idx] : 0.0;
    }

    void advance(const RadarConfig& cfg, const std::vector<PointTarget>& targets) {
        if (accumulated.size() < targets.size()) accumulated.resize(targets.size(), 0.0);
        for (std::size_t i = 0; i < targets.size(); ++i) {
            // One frame period of Doppler rotation: 4*pi*v*(1/frame_rate)/lambda.
            accumulated[i] += cfg.doppler_phase_shift(targets[i].radial_velocity) /
                              (cfg.frame_rate * cfg.chirp_duration);
        }
    }
};

// Beat-signal model for one frame. Per target at (r, theta, v, A):
//
//   s(i, k, q) = A * exp(j * (2*pi*(fc*tau + S*(i/fs)*tau - S*tau^2/2
//                              + p*d*sin(theta)/lambda) + k*dphi_v + phi0))
//
// with tau = 2r/c, p the virtual element index tx*num_rx + q for the Tx that
// fired chirp k, and dphi_v the per-chirp Doppler phase advance. The
// quadratic residual video phase term -S*tau^2/2 is kept as-is. Noise, when
// requested, is circularly symmetric complex Gaussian added per sample in
// flat index order, so output bytes are a pure function of the seed.
inline RawFrame synthesize_frame(const RadarConfig& cfg,
                                 const std::vector<PointTarget>& targets,
                                 const ChirpPhaseState* state = nullptr,
                                 double noise_sigma = 0.0,
                                 Rng* rng = nullptr) {
    const std::size_t ns = cfg.samples_per_chirp;
    const std::size_t nc = cfg.chirps_per_frame;
    const std::size_t nq = cfg.num_rx_physical;

    RawFrame out;
    out.samples = Tensor<cplx>({ns, nc, nq});
    out.tx_schedule.resize(nc);
    for (std::size_t k = 0; k < nc; ++k) out.tx_schedule[k] = cfg.tx_of_chirp(k);

    const double lambda = cfg.wavelength();
    const double d = cfg.element_spacing();

    for (std::size_t ti = 0; ti < targets.size(); ++ti) {
        const PointTarget& t = targets[ti];
        t.validate(cfg);
        const double tau = 2.0 * t.range / kSpeedOfLight;
        const double dphi = cfg.doppler_phase_shift(t.radial_velocity);
        const double phi0 = 2.0 * kPi * (cfg.carrier_freq * tau - 0.5 * cfg.sweep_slope * tau * tau) +
                            (state ? state->phase_for(ti) : 0.0);
        const double beat_step = 2.0 * kPi * cfg.sweep_slope * tau / cfg.sampling_freq;
        const double steer_step = 2.0 * kPi * d * std::sin(t.azimuth) / lambda;

        // Fast-time phasors are shared by every chirp and receiver.
        std::vector<cplx> fast(ns);
        for (std::size_t i = 0; i < ns; ++i) {
            const double ph = phi0 + beat_step * static_cast<double>(i);
            fast[i] = t.amplitude * cplx{std::cos(ph), std::sin(ph)};
        }

        for (std::size_t k = 0; k < nc; ++k) {
            const std::size_t tx = out.tx_schedule[k];
            const double chirp_ph = dphi * static_cast<double>(k);
            for (std::size_t q = 0; q < nq; ++q) {
                const double p = static_cast<double>(tx * nq + q);
                const double ph = chirp_ph + steer_step * p;
                const cplx rot{std::cos(ph), std::sin(ph)};
                for (std::size_t i = 0; i < ns; ++i) out.samples(i, k, q) += fast[i] * rot;
            }
        }
    }

    if (noise_sigma > 0.0) {
        if (!rng) throw domain_error("noise requested without a random source");
        for (std::size_t flat = 0; flat < out.samples.size(); ++flat)
            out.samples[flat] += rng->complex_gaussian(noise_sigma);
    }

    return out;
}

}  // namespace rcube
