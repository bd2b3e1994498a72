#include <catch2/catch_amalgamated.hpp>

#include "rcube/synth.hpp"

#include "reference_dft.hpp"

using rcube::cplx;
using Catch::Matchers::WithinAbs;

namespace {

const rcube::RadarConfig cfg = rcube::RadarConfig::awr1843();

// Lattice coordinates: values whose range/velocity/angle land exactly on
// grid cells, so spectra peak without scalloping ambiguity.
double lattice_range(long long bin) {
    return static_cast<double>(bin) * cfg.max_range() / static_cast<double>(cfg.fft_range);
}

double lattice_velocity(long long signed_bin) { return cfg.velocity_of_bin(signed_bin); }

double lattice_azimuth(long long signed_bin) {
    return std::asin(static_cast<double>(signed_bin) * cfg.wavelength() /
                     (static_cast<double>(cfg.fft_angle) * cfg.element_spacing()));
}

rcube::PointTarget make_target(double r, double az, double v, double amp) {
    rcube::PointTarget t;
    t.range = r;
    t.azimuth = az;
    t.radial_velocity = v;
    t.amplitude = amp;
    t.cls = rcube::TargetClass::car;
    return t;
}

}  // namespace

TEST_CASE("frame shape and schedule", "[synth]") {
    auto frame = rcube::synthesize_frame(cfg, {});
    REQUIRE(frame.samples.rank() == 3);
    CHECK(frame.samples.dim(0) == 128);
    CHECK(frame.samples.dim(1) == 255);
    CHECK(frame.samples.dim(2) == 4);
    for (std::size_t k = 0; k < 255; ++k) CHECK(frame.tx_schedule[k] == k % 2);
    for (std::size_t i = 0; i < frame.samples.size(); ++i) CHECK(frame.samples[i] == cplx{});
}

TEST_CASE("target contributions superpose exactly", "[synth]") {
    auto a = make_target(10.0, 0.2, 1.0, 1.0);
    auto b = make_target(17.0, -0.4, -2.0, 0.5);
    auto fa = rcube::synthesize_frame(cfg, {a});
    auto fb = rcube::synthesize_frame(cfg, {b});
    auto fab = rcube::synthesize_frame(cfg, {a, b});
    bool equal = true;
    for (std::size_t i = 0; i < fab.samples.size(); ++i)
        if (fab.samples[i] != fa.samples[i] + fb.samples[i]) equal = false;
    CHECK(equal);
}

TEST_CASE("amplitude scales every sample", "[synth]") {
    auto t1 = make_target(12.0, 0.3, 0.7, 1.0);
    auto t2 = t1;
    t2.amplitude = 2.0;
    auto f1 = rcube::synthesize_frame(cfg, {t1});
    auto f2 = rcube::synthesize_frame(cfg, {t2});
    bool equal = true;
    for (std::size_t i = 0; i < f1.samples.size(); ++i)
        if (f2.samples[i] != 2.0 * f1.samples[i]) equal = false;
    CHECK(equal);
}

TEST_CASE("static boresight target: beat tone at the range bin, receivers in phase", "[synth]") {
    const double r = lattice_range(44);
    auto frame = rcube::synthesize_frame(cfg, {make_target(r, 0.0, 0.0, 1.0)});

    // All receivers identical at boresight.
    bool in_phase = true;
    for (std::size_t i = 0; i < 128; ++i)
        for (std::size_t q = 1; q < 4; ++q)
            if (frame.samples(i, 0, q) != frame.samples(i, 0, 0)) in_phase = false;
    CHECK(in_phase);

    // Reference transform of chirp 0, receiver 0 peaks at the range bin.
    std::vector<cplx> chirp(128);
    for (std::size_t i = 0; i < 128; ++i) chirp[i] = frame.samples(i, 0, 0);
    auto spec = testref::dft(chirp);
    std::size_t peak = 0;
    for (std::size_t m = 1; m < 128; ++m)
        if (std::abs(spec[m]) > std::abs(spec[peak])) peak = m;
    CHECK(peak == static_cast<std::size_t>(cfg.range_bin_of(r)));
}

TEST_CASE("per-chirp phase advances by the Doppler shift", "[synth]") {
    const double v = lattice_velocity(10);
    auto frame = rcube::synthesize_frame(cfg, {make_target(lattice_range(40), 0.0, v, 1.0)});
    const double dphi = cfg.doppler_phase_shift(v);

    // Consecutive chirps at boresight differ by exactly one chirp of Doppler
    // rotation (the Tx swap contributes no steering at zero azimuth).
    for (std::size_t k : {std::size_t{0}, std::size_t{10}, std::size_t{100}}) {
        const cplx a = frame.samples(5, k, 2);
        const cplx b = frame.samples(5, k + 1, 2);
        CHECK_THAT(std::arg(b / a), WithinAbs(std::remainder(dphi, 2 * rcube::kPi), 1e-9));
    }
    // Same-Tx stride of num_tx chirps: twice the shift.
    const cplx a = frame.samples(7, 20, 1);
    const cplx b = frame.samples(7, 22, 1);
    CHECK_THAT(std::arg(b / a), WithinAbs(std::remainder(2 * dphi, 2 * rcube::kPi), 1e-9));
}

TEST_CASE("alternate-Tx chirps continue the virtual array", "[synth]") {
    const double az = lattice_azimuth(10);
    auto frame = rcube::synthesize_frame(cfg, {make_target(lattice_range(30), az, 0.0, 1.0)});
    const double step = 2.0 * rcube::kPi * cfg.element_spacing() * std::sin(az) / cfg.wavelength();
    // Static target: chirp 1 comes from Tx 1, so receiver q sits at virtual
    // position 4 + q, four steering steps past chirp 0's element q.
    for (std::size_t q = 0; q < 4; ++q) {
        const cplx a = frame.samples(11, 0, q);
        const cplx b = frame.samples(11, 1, q);
        CHECK_THAT(std::arg(b / a), WithinAbs(std::remainder(4.0 * step, 2 * rcube::kPi), 1e-9));
    }
}

TEST_CASE("noise is seeded and reproducible", "[synth]") {
    rcube::Rng rng1(99), rng2(99), rng3(100);
    auto f1 = rcube::synthesize_frame(cfg, {}, nullptr, 0.5, &rng1);
    auto f2 = rcube::synthesize_frame(cfg, {}, nullptr, 0.5, &rng2);
    auto f3 = rcube::synthesize_frame(cfg, {}, nullptr, 0.5, &rng3);
    CHECK(f1.samples == f2.samples);
    CHECK_FALSE(f1.samples == f3.samples);

    cplx mean{};
    for (std::size_t i = 0; i < f1.samples.size(); ++i) mean += f1.samples[i];
    mean /= static_cast<double>(f1.samples.size());
    CHECK(std::abs(mean) < 0.01);

    CHECK_THROWS_AS(rcube::synthesize_frame(cfg, {}, nullptr, 0.5, nullptr), rcube::domain_error);
}

TEST_CASE("accumulated phase keeps frames continuous", "[synth]") {
    const double v = 2.5;
    auto target = make_target(15.0, 0.0, v, 1.0);
    rcube::ChirpPhaseState state;
    auto f0 = rcube::synthesize_frame(cfg, {target}, &state);
    state.advance(cfg, {target});
    auto f1 = rcube::synthesize_frame(cfg, {target}, &state);
    const double expected =
        cfg.doppler_phase_shift(v) / (cfg.frame_rate * cfg.chirp_duration);
    const cplx a = f0.samples(3, 0, 0);
    const cplx b = f1.samples(3, 0, 0);
    CHECK_THAT(std::arg(b / a), WithinAbs(std::remainder(expected, 2 * rcube::kPi), 1e-9));
}

TEST_CASE("targets outside the observable domain are rejected", "[synth]") {
    CHECK_THROWS_AS(rcube::synthesize_frame(cfg, {make_target(40.0, 0.0, 0.0, 1.0)}),
                    rcube::domain_error);
    CHECK_THROWS_AS(rcube::synthesize_frame(cfg, {make_target(10.0, 0.0, 9.0, 1.0)}),
                    rcube::domain_error);
    CHECK_THROWS_AS(rcube::synthesize_frame(cfg, {make_target(-1.0, 0.0, 0.0, 1.0)}),
                    rcube::domain_error);
}
