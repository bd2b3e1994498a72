#include <catch2/catch_amalgamated.hpp>

#include "rcube/config.hpp"

using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {
const rcube::RadarConfig cfg = rcube::RadarConfig::awr1843();
}

TEST_CASE("derived quantities land on the quoted hardware numbers", "[config]") {
    // Values quoted for the 77 GHz automotive part this preset models.
    CHECK_THAT(cfg.range_resolution(), WithinRel(0.23, 0.05));
    CHECK_THAT(cfg.velocity_resolution(), WithinRel(0.065, 0.05));
    CHECK_THAT(rcube::rad_to_deg(cfg.angle_resolution_at(0.0)), WithinRel(15.0, 0.05));
    CHECK_THAT(cfg.max_range(), WithinRel(28.5, 0.05));
    CHECK_THAT(cfg.max_velocity(), WithinRel(8.3, 0.05));
    CHECK_THAT(rcube::rad_to_deg(cfg.max_angle()), WithinRel(90.0, 0.05));
}

TEST_CASE("beat frequency is proportional to range", "[config]") {
    CHECK_THAT(cfg.beat_frequency(10.0), WithinRel(1.4e6, 1e-3));
    CHECK_THAT(cfg.beat_frequency(0.0), WithinAbs(0.0, 0.0));
    // Linearity in r.
    CHECK_THAT(cfg.beat_frequency(20.0), WithinRel(2.0 * cfg.beat_frequency(10.0), 1e-12));
}

TEST_CASE("per-chirp phase advance for unit velocity", "[config]") {
    CHECK_THAT(cfg.doppler_phase_shift(1.0), WithinAbs(0.3873, 1e-3));
    // At the unambiguous edge the advance is exactly half a cycle.
    CHECK_THAT(cfg.doppler_phase_shift(cfg.max_velocity()), WithinRel(rcube::kPi, 1e-12));
    CHECK_THAT(cfg.doppler_phase_shift(-1.0), WithinRel(-cfg.doppler_phase_shift(1.0), 1e-12));
}

TEST_CASE("range bin map", "[config]") {
    CHECK(cfg.range_bin_of(10.0) == 44);
    CHECK(cfg.range_bin_of(0.0) == 0);
    // The last representable range clamps onto the grid.
    CHECK(cfg.range_bin_of(cfg.max_range()) == 127);
}

TEST_CASE("range bin map agrees with the beat-frequency route", "[config]") {
    rcube::Rng rng(11);
    for (int i = 0; i < 1000; ++i) {
        const double r = rng.uniform(0.0, cfg.max_range());
        const long long via_beat = rcube::floor_bin(static_cast<double>(cfg.fft_range) *
                                                    cfg.beat_frequency(r) / cfg.sampling_freq);
        CHECK(cfg.range_bin_of(r) == std::clamp(via_beat, 0ll, 127ll));
    }
}

TEST_CASE("angle bin map", "[config]") {
    CHECK(cfg.angle_bin_of(rcube::deg_to_rad(30.0)) == 32);
    CHECK(cfg.angle_bin_of(rcube::deg_to_rad(-30.0)) == -32);
    CHECK(cfg.angle_bin_of(0.0) == 0);
    CHECK(cfg.angle_bin_centered(0.0) == 64);
    CHECK(cfg.angle_bin_centered(rcube::deg_to_rad(30.0)) == 96);
}

TEST_CASE("angle bin map is odd up to the floor offset", "[config]") {
    rcube::Rng rng(13);
    for (int i = 0; i < 1000; ++i) {
        const double theta = rng.uniform(-1.4, 1.4);
        const long long pos = cfg.angle_bin_of(theta);
        const long long neg = cfg.angle_bin_of(-theta);
        const bool ok = neg == -pos || neg == -pos - 1;
        INFO("theta = " << theta << " pos = " << pos << " neg = " << neg);
        CHECK(ok);
    }
}

TEST_CASE("velocity axis spacing is close to the frame-long resolution", "[config]") {
    // Per-Tx streams halve the chirp count but the FFT pads 127 -> 128, so
    // the bin spacing stays within a percent of lambda/(2*Nc*Tc).
    CHECK_THAT(cfg.velocity_bin_spacing(), WithinRel(cfg.velocity_resolution(), 0.01));
    CHECK(cfg.velocity_bin_centered(0.0) == 64);
    CHECK(cfg.velocity_of_bin(0) == 0.0);
    CHECK_THAT(cfg.velocity_of_bin(4), WithinRel(4.0 * cfg.velocity_bin_spacing(), 1e-12));
}

TEST_CASE("chirp period packed from the frame rate", "[config]") {
    CHECK_THAT(rcube::RadarConfig::chirp_duration_from_frame_rate(255, 30.0),
               WithinRel(1.307e-4, 1e-3));
}

TEST_CASE("TDM bookkeeping with an odd chirp count", "[config]") {
    CHECK(cfg.num_rx_virtual() == 8);
    CHECK(cfg.tx_of_chirp(0) == 0);
    CHECK(cfg.tx_of_chirp(1) == 1);
    CHECK(cfg.chirps_for_tx(0) == 128);
    CHECK(cfg.chirps_for_tx(1) == 127);
}

TEST_CASE("config JSON round trip", "[config]") {
    auto j = rcube::config_to_json(cfg);
    auto back = rcube::config_from_json(j);
    CHECK(back.carrier_freq == cfg.carrier_freq);
    CHECK(back.sweep_bandwidth == cfg.sweep_bandwidth);
    CHECK(back.sweep_slope == cfg.sweep_slope);
    CHECK(back.sampling_freq == cfg.sampling_freq);
    CHECK(back.chirps_per_frame == cfg.chirps_per_frame);
    CHECK(back.samples_per_chirp == cfg.samples_per_chirp);
    CHECK(back.chirp_duration == cfg.chirp_duration);
    CHECK(back.num_tx == cfg.num_tx);
    CHECK(back.num_rx_physical == cfg.num_rx_physical);
    CHECK(back.frame_rate == cfg.frame_rate);
    CHECK(back.fft_range == cfg.fft_range);
    CHECK(back.fft_velocity == cfg.fft_velocity);
    CHECK(back.fft_angle == cfg.fft_angle);
    CHECK(back.cfar.pfa == cfg.cfar.pfa);
}

TEST_CASE("bad configs are rejected", "[config]") {
    auto broken = cfg;
    broken.carrier_freq = 0;
    CHECK_THROWS_AS(broken.validate(), rcube::domain_error);

    broken = cfg;
    broken.samples_per_chirp = 200;  // exceeds the range FFT size
    CHECK_THROWS_AS(broken.validate(), rcube::domain_error);

    broken = cfg;
    broken.fft_angle = 127;  // centered axes need even sizes
    CHECK_THROWS_AS(broken.validate(), rcube::domain_error);

    broken = cfg;
    broken.cfar.pfa = 1.5;
    CHECK_THROWS_AS(broken.validate(), rcube::domain_error);

    auto j = rcube::config_to_json(cfg);
    j.erase("carrier_freq");
    CHECK_THROWS_AS(rcube::config_from_json(j), rcube::schema_error);

    j = rcube::config_to_json(cfg);
    j["carrier_freq"] = "fast";
    CHECK_THROWS_AS(rcube::config_from_json(j), rcube::schema_error);
}

TEST_CASE("window tapers", "[config]") {
    CHECK(rcube::window_value(rcube::Window::rect, 3, 16) == 1.0);
    CHECK_THAT(rcube::window_value(rcube::Window::hann, 0, 16), WithinAbs(0.0, 1e-15));
    CHECK_THAT(rcube::window_value(rcube::Window::hann, 8, 16), WithinAbs(1.0, 1e-15));
}

TEST_CASE("cfar scale factor from the false-alarm budget", "[config]") {
    rcube::CfarParams p;
    CHECK(p.training_cell_count() == 416);
    // N * (pfa^(-1/N) - 1) for N = 416, pfa = 1e-3.
    CHECK_THAT(p.scale_factor(), WithinAbs(6.97, 0.01));
    p.scale_override = 3.5;
    CHECK(p.scale_factor() == 3.5);
}
