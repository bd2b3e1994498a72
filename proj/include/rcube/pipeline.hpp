#pragma once

#include <algorithm>
#include <vector>

#include "rcube/fft.hpp"
#include "rcube/synth.hpp"

namespace rcube {

// Range spectrum per chirp and receiver: [fft_range x chirps x physical rx].
// Fast-time samples are windowed, zero-padded and transformed; bin m holds
// beat frequency m * fs / fft_range.
inline Tensor<cplx> range_fft(const RadarConfig& cfg, const RawFrame& frame) {
    const std::size_t ns = cfg.samples_per_chirp;
    const std::size_t nc = cfg.chirps_per_frame;
    const std::size_t nq = cfg.num_rx_physical;
    if (frame.samples.rank() != 3 || frame.samples.dim(0) != ns || frame.samples.dim(1) != nc ||
        frame.samples.dim(2) != nq)
        throw domain_error("raw frame shape does not match the config");

    const std::size_t mr = cfg.fft_range;
    Tensor<cplx> out({mr, nc, nq});
    std::vector<cplx> buf(ns);
    for (std::size_t k = 0; k < nc; ++k) {
        for (std::size_t q = 0; q < nq; ++q) {
            for (std::size_t i = 0; i < ns; ++i)
                buf[i] = frame.samples(i, k, q) * window_value(cfg.window.range, i, ns);
            auto spec = fft(buf, mr);
            for (std::size_t m = 0; m < mr; ++m) out(m, k, q) = spec[m];
        }
    }
    return out;
}

// Doppler spectrum per range bin and virtual element:
// [fft_range x fft_velocity x virtual rx], velocity axis centered (v=0 at
// fft_velocity/2). Chirps are de-interleaved per Tx; under round-robin TDM
// the per-Tx streams may differ in length by one and are zero-padded (or
// truncated) to the velocity FFT size. Virtual element tx*num_rx+q carries
// the spectrum of Tx tx's stream at receiver q.
inline Tensor<cplx> velocity_fft(const RadarConfig& cfg, const Tensor<cplx>& range_profile) {
    const std::size_t mr = cfg.fft_range;
    const std::size_t nc = cfg.chirps_per_frame;
    const std::size_t nq = cfg.num_rx_physical;
    if (range_profile.rank() != 3 || range_profile.dim(0) != mr || range_profile.dim(1) != nc ||
        range_profile.dim(2) != nq)
        throw domain_error("range profile shape does not match the config");

    const std::size_t mv = cfg.fft_velocity;
    const std::size_t np = cfg.num_rx_virtual();
    Tensor<cplx> out({mr, mv, np});

    for (std::size_t tx = 0; tx < cfg.num_tx; ++tx) {
        const std::size_t len = std::min(cfg.chirps_for_tx(tx), mv);
        std::vector<cplx> buf(len);
        for (std::size_t m = 0; m < mr; ++m) {
            for (std::size_t q = 0; q < nq; ++q) {
                for (std::size_t s = 0; s < len; ++s) {
                    const std::size_t k = s * cfg.num_tx + tx;
                    buf[s] = range_profile(m, k, q) * window_value(cfg.window.velocity, s, len);
                }
                auto spec = fft(buf, mv);
                const std::size_t p = tx * nq + q;
                for (std::size_t b = 0; b < mv; ++b) out(m, fftshift_index(b, mv), p) = spec[b];
            }
        }
    }
    return out;
}

// Non-coherent power map over the virtual array: [fft_range x fft_velocity].
inline Tensor<double> rv_power(const Tensor<cplx>& rv_spectrum) {
    if (rv_spectrum.rank() != 3) throw domain_error("rv spectrum must be rank 3");
    const std::size_t mr = rv_spectrum.dim(0), mv = rv_spectrum.dim(1), np = rv_spectrum.dim(2);
    Tensor<double> out({mr, mv});
    for (std::size_t m = 0; m < mr; ++m)
        for (std::size_t b = 0; b < mv; ++b) {
            double acc = 0;
            for (std::size_t p = 0; p < np; ++p) acc += std::norm(rv_spectrum(m, b, p));
            out(m, b) = acc;
        }
    return out;
}

struct CfarDetection {
    std::size_t range_bin = 0;
    std::size_t velocity_bin = 0;
    double magnitude = 0;    // cell power
    double noise_level = 0;  // training-cell mean
};

// Two-dimensional cell-averaging CFAR on a non-negative power map. The
// training ring is clipped at the map edges and the average taken over the
// cells that remain. Returns at most max_detections cells, strongest first.
inline std::vector<CfarDetection> ca_cfar_2d(const Tensor<double>& power, const CfarParams& params) {
    params.validate();
    if (power.rank() != 2) throw domain_error("cfar input must be rank 2");
    const long long nr = static_cast<long long>(power.dim(0));
    const long long nv = static_cast<long long>(power.dim(1));
    const long long er = params.guard_range + params.train_range;
    const long long ev = params.guard_velocity + params.train_velocity;
    if (nr < 2 * er + 1 || nv < 2 * ev + 1)
        throw domain_error("cfar window does not fit inside the spectrum");

    const double alpha = params.scale_factor();
    std::vector<CfarDetection> hits;
    for (long long r = 0; r < nr; ++r) {
        for (long long v = 0; v < nv; ++v) {
            double sum = 0;
            std::size_t count = 0;
            const long long r0 = std::max(0ll, r - er), r1 = std::min(nr - 1, r + er);
            const long long v0 = std::max(0ll, v - ev), v1 = std::min(nv - 1, v + ev);
            for (long long rr = r0; rr <= r1; ++rr) {
                for (long long vv = v0; vv <= v1; ++vv) {
                    if (std::llabs(rr - r) <= params.guard_range &&
                        std::llabs(vv - v) <= params.guard_velocity)
                        continue;
                    sum += power(static_cast<std::size_t>(rr), static_cast<std::size_t>(vv));
                    ++count;
                }
            }
            const double noise = sum / static_cast<double>(count);
            const double cell = power(static_cast<std::size_t>(r), static_cast<std::size_t>(v));
            if (cell > alpha * noise && cell > 0.0)
                hits.push_back({static_cast<std::size_t>(r), static_cast<std::size_t>(v), cell, noise});
        }
    }
    std::stable_sort(hits.begin(), hits.end(), [](const CfarDetection& a, const CfarDetection& b) {
        return a.magnitude > b.magnitude;
    });
    if (hits.size() > params.max_detections) hits.resize(params.max_detections);
    return hits;
}

// Phase step per de-interleaved (per-Tx) slow-time sample that a centered
// velocity bin represents.
inline double stream_phase_of_bin(const RadarConfig& cfg, std::size_t velocity_bin) {
    const long long half = static_cast<long long>(cfg.fft_velocity) / 2;
    const long long signed_bin = static_cast<long long>(velocity_bin) - half;
    return 2.0 * kPi * static_cast<double>(signed_bin) / static_cast<double>(cfg.fft_velocity);
}

// Undo the inter-Tx Doppler rotation at detected cells. A Tx that fires m
// chirp slots after Tx0 accrues m/num_tx of the per-stream Doppler phase, so
// its virtual elements are rotated back by that amount. Cells without a
// detection are left untouched.
inline Tensor<cplx> doppler_compensate(const RadarConfig& cfg, const Tensor<cplx>& rv_spectrum,
                                       const std::vector<CfarDetection>& detections) {
    Tensor<cplx> out = rv_spectrum;
    const std::size_t nq = cfg.num_rx_physical;
    for (const auto& det : detections) {
        const double stream_phase = stream_phase_of_bin(cfg, det.velocity_bin);
        for (std::size_t tx = 1; tx < cfg.num_tx; ++tx) {
            const double corr = -stream_phase * static_cast<double>(tx) / static_cast<double>(cfg.num_tx);
            const cplx rot{std::cos(corr), std::sin(corr)};
            for (std::size_t q = 0; q < nq; ++q)
                out(det.range_bin, det.velocity_bin, tx * nq + q) *= rot;
        }
    }
    return out;
}

// Angle spectrum across the virtual array:
// [fft_range x fft_velocity x fft_angle], angle axis centered (boresight at
// fft_angle/2).
inline Tensor<cplx> angle_fft(const RadarConfig& cfg, const Tensor<cplx>& rv_spectrum) {
    const std::size_t mr = cfg.fft_range, mv = cfg.fft_velocity, np = cfg.num_rx_virtual();
    if (rv_spectrum.rank() != 3 || rv_spectrum.dim(0) != mr || rv_spectrum.dim(1) != mv ||
        rv_spectrum.dim(2) != np)
        throw domain_error("rv spectrum shape does not match the config");

    const std::size_t ma = cfg.fft_angle;
    Tensor<cplx> out({mr, mv, ma});
    std::vector<cplx> buf(np);
    for (std::size_t m = 0; m < mr; ++m) {
        for (std::size_t b = 0; b < mv; ++b) {
            for (std::size_t p = 0; p < np; ++p)
                buf[p] = rv_spectrum(m, b, p) * window_value(cfg.window.angle, p, np);
            auto spec = fft(buf, ma);
            for (std::size_t a = 0; a < ma; ++a) out(m, b, fftshift_index(a, ma)) = spec[a];
        }
    }
    return out;
}

// Everything the per-frame chain produces that later stages want back.
struct ProcessedFrame {
    Tensor<cplx> cube;           // [range x velocity x angle], axes centered
    Tensor<cplx> range_profile;  // [range x chirps x physical rx]
    Tensor<cplx> rv_spectrum;    // compensated, [range x velocity x virtual rx]
    Tensor<double> power;        // [range x velocity]
    std::vector<CfarDetection> detections;
};

struct ProcessOptions {
    bool compensate = true;
};

// Full frame chain: range FFT, per-Tx Doppler FFT, CFAR, inter-Tx phase
// correction at detections, angle FFT.
inline ProcessedFrame process_frame(const RadarConfig& cfg, const RawFrame& frame,
                                    const ProcessOptions& opt = {}) {
    ProcessedFrame out;
    out.range_profile = range_fft(cfg, frame);
    Tensor<cplx> rv = velocity_fft(cfg, out.range_profile);
    out.power = rv_power(rv);
    out.detections = ca_cfar_2d(out.power, cfg.cfar);
    out.rv_spectrum = opt.compensate ? doppler_compensate(cfg, rv, out.detections) : std::move(rv);
    out.cube = angle_fft(cfg, out.rv_spectrum);
    return out;
}

struct ViewSet {
    Tensor<cplx> ra;    // [range x angle], complex
    Tensor<double> rv;  // [range x velocity], power
    Tensor<double> va;  // [velocity x angle], power
};

// Condensed 2-D views of one processed frame.
//
// RV and VA are power marginals of the cube. RA is rebuilt from one TDM
// cycle of the range profile (chirp_pick picks the cycle): for each range
// bin that holds CFAR detections, the second-and-later Tx elements are
// rotated back using the strongest detection's velocity at that bin, then
// the virtual array is transformed to angle.
inline ViewSet slice_views(const RadarConfig& cfg, const ProcessedFrame& frame,
                           std::size_t chirp_pick = 0) {
    const std::size_t mr = cfg.fft_range, mv = cfg.fft_velocity, ma = cfg.fft_angle;
    const std::size_t nq = cfg.num_rx_physical;
    const std::size_t cycles = cfg.chirps_per_frame / cfg.num_tx;
    if (chirp_pick >= cycles) throw domain_error("chirp_pick outside the frame's TDM cycles");

    ViewSet views;
    views.rv = Tensor<double>({mr, mv});
    views.va = Tensor<double>({mv, ma});
    for (std::size_t m = 0; m < mr; ++m)
        for (std::size_t b = 0; b < mv; ++b)
            for (std::size_t a = 0; a < ma; ++a) {
                const double pw = std::norm(frame.cube(m, b, a));
                views.rv(m, b) += pw;
                views.va(b, a) += pw;
            }

    // Strongest detected velocity per range bin, if any.
    std::vector<long long> best_bin(mr, -1);
    std::vector<double> best_mag(mr, 0.0);
    for (const auto& det : frame.detections) {
        if (best_bin[det.range_bin] < 0 || det.magnitude > best_mag[det.range_bin]) {
            best_bin[det.range_bin] = static_cast<long long>(det.velocity_bin);
            best_mag[det.range_bin] = det.magnitude;
        }
    }

    views.ra = Tensor<cplx>({mr, ma});
    std::vector<cplx> buf(cfg.num_rx_virtual());
    for (std::size_t m = 0; m < mr; ++m) {
        for (std::size_t tx = 0; tx < cfg.num_tx; ++tx) {
            const std::size_t k = chirp_pick * cfg.num_tx + tx;
            cplx rot{1.0, 0.0};
            if (best_bin[m] >= 0 && tx > 0) {
                const double phase = stream_phase_of_bin(cfg, static_cast<std::size_t>(best_bin[m]));
                const double corr = -phase * static_cast<double>(tx) / static_cast<double>(cfg.num_tx);
                rot = {std::cos(corr), std::sin(corr)};
            }
            for (std::size_t q = 0; q < nq; ++q)
                buf[tx * nq + q] = frame.range_profile(m, k, q) * rot *
                                   window_value(cfg.window.angle, tx * nq + q, cfg.num_rx_virtual());
        }
        auto spec = fft(buf, ma);
        for (std::size_t a = 0; a < ma; ++a) views.ra(m, fftshift_index(a, ma)) = spec[a];
    }
    return views;
}

// Simulate and process the first num_frames frames of a scene.
inline std::vector<ViewSet> process_sequence(const RadarConfig& cfg, const Scene& scene,
                                             std::size_t num_frames, double noise_sigma = 0.0,
                                             std::uint64_t seed = 0, std::size_t chirp_pick = 0) {
    if (num_frames > scene.num_frames()) throw domain_error("scene has fewer frames than requested");
    Rng rng(seed);
    ChirpPhaseState state;
    std::vector<ViewSet> out;
    out.reserve(num_frames);
    for (std::size_t f = 0; f < num_frames; ++f) {
        RawFrame raw = synthesize_frame(cfg, scene.frames[f], &state, noise_sigma,
                                        noise_sigma > 0 ? &rng : nullptr);
        state.advance(cfg, scene.frames[f]);
        ProcessedFrame proc = process_frame(cfg, raw);
        out.push_back(slice_views(cfg, proc, chirp_pick));
    }
    return out;
}

}  // namespace rcube
