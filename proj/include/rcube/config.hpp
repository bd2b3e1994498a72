#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "rcube/common.hpp"

namespace rcube {

enum class Window { rect, hann };

inline Window window_from_string(const std::string& s) {
    if (s == "rect" || s == "rectangular") return Window::rect;
    if (s == "hann") return Window::hann;
    throw schema_error("unknown window '" + s + "' (expected rect or hann)");
}

inline std::string window_to_string(Window w) {
    return w == Window::rect ? "rect" : "hann";
}

// Taper value for sample i of an N-point window (periodic Hann).
inline double window_value(Window w, std::size_t i, std::size_t n) {
    if (w == Window::rect || n <= 1) return 1.0;
    return 0.5 * (1.0 - std::cos(2.0 * kPi * static_cast<double>(i) / static_cast<double>(n)));
}

struct WindowSet {
    Window range = Window::rect;
    Window velocity = Window::rect;
    Window angle = Window::rect;
};

// Cell-averaging CFAR settings. Guard and training extents are half-widths
// per axis: the training region is the ring between the guard box and the
// (guard + train) box around the cell under test.
struct CfarParams {
    int guard_range = 2;
    int guard_velocity = 2;
    int train_range = 8;
    int train_velocity = 8;
    double pfa = 1e-3;
    std::size_t max_detections = 64;
    std::optional<double> scale_override;

    int training_cell_count() const {
        const int outer = (2 * (guard_range + train_range) + 1) * (2 * (guard_velocity + train_velocity) + 1);
        const int inner = (2 * guard_range + 1) * (2 * guard_velocity + 1);
        return outer - inner;
    }

    // Threshold multiplier on the training mean. Classic cell-averaging form
    // for exponentially distributed power cells: N * (Pfa^(-1/N) - 1).
    double scale_factor() const {
        if (scale_override) return *scale_override;
        const double n = static_cast<double>(training_cell_count());
        return n * (std::pow(pfa, -1.0 / n) - 1.0);
    }

    void validate() const {
        if (guard_range < 0 || guard_velocity < 0 || train_range < 1 || train_velocity < 1)
            throw domain_error("cfar window extents invalid");
        if (pfa <= 0.0 || pfa >= 1.0) throw domain_error("cfar pfa must lie in (0, 1)");
        if (max_detections == 0) throw domain_error("cfar max_detections must be positive");
    }
};

// FMCW chirp-sequence radar description plus processing grid sizes.
// Quantities are SI throughout (Hz, s, m, rad).
struct RadarConfig {
    double carrier_freq = 0;        // Hz
    double sweep_bandwidth = 0;     // Hz swept per chirp
    double sweep_slope = 0;         // Hz/s
    double sampling_freq = 0;       // complex samples per second
    std::size_t chirps_per_frame = 0;
    std::size_t samples_per_chirp = 0;
    double chirp_duration = 0;      // s, chirp-to-chirp period
    std::size_t num_tx = 1;
    std::size_t num_rx_physical = 1;
    std::optional<double> spacing; // m; defaults to lambda/2 when unset
    double frame_rate = 0;          // frames/s

    std::size_t fft_range = 128;
    std::size_t fft_velocity = 128;
    std::size_t fft_angle = 128;

    WindowSet window;
    CfarParams cfar;

    double wavelength() const { return kSpeedOfLight / carrier_freq; }
    double element_spacing() const { return spacing ? *spacing : wavelength() / 2.0; }
    std::size_t num_rx_virtual() const { return num_tx * num_rx_physical; }

    // Chirp period implied by packing all chirps evenly into one frame.
    static double chirp_duration_from_frame_rate(std::size_t chirps_per_frame, double frame_rate) {
        if (chirps_per_frame == 0 || frame_rate <= 0) throw domain_error("invalid chirp count or frame rate");
        return 1.0 / (static_cast<double>(chirps_per_frame) * frame_rate);
    }

    double range_resolution() const { return kSpeedOfLight / (2.0 * sweep_bandwidth); }

    double velocity_resolution() const {
        return wavelength() / (2.0 * static_cast<double>(chirps_per_frame) * chirp_duration);
    }

    // Angular resolution of the virtual aperture near direction theta.
    double angle_resolution_at(double theta) const {
        const double c = std::cos(theta);
        if (c <= 0.0) throw domain_error("angle resolution undefined at or beyond +-90deg");
        return wavelength() / (static_cast<double>(num_rx_virtual()) * element_spacing() * c);
    }

    double max_range() const { return sampling_freq * kSpeedOfLight / (2.0 * sweep_slope); }

    double max_velocity() const { return wavelength() / (4.0 * chirp_duration); }

    double max_angle() const {
        const double s = wavelength() / (2.0 * element_spacing());
        return std::asin(std::min(1.0, s));
    }

    // De-chirped beat frequency of a scatterer at range r.
    double beat_frequency(double r) const { return 2.0 * sweep_slope * r / kSpeedOfLight; }

    // Phase advance between consecutive chirps for radial velocity v
    // (positive v = range increasing).
    double doppler_phase_shift(double v) const {
        return 4.0 * kPi * v * chirp_duration / wavelength();
    }

    // Range FFT bin of a scatterer at range r, clamped to the grid.
    long long range_bin_of(double r) const {
        const double u = 2.0 * static_cast<double>(fft_range) * sweep_slope * r /
                         (kSpeedOfLight * sampling_freq);
        long long m = floor_bin(u);
        return std::clamp(m, 0ll, static_cast<long long>(fft_range) - 1);
    }

    // Signed angle FFT bin (0 = boresight); callers add fft_angle/2 for the
    // centered axis position.
    long long angle_bin_of(double theta) const {
        const double u = static_cast<double>(fft_angle) * element_spacing() * std::sin(theta) / wavelength();
        long long m = floor_bin(u);
        const long long half = static_cast<long long>(fft_angle) / 2;
        return std::clamp(m, -half, half - 1);
    }

    std::size_t angle_bin_centered(double theta) const {
        return static_cast<std::size_t>(angle_bin_of(theta) + static_cast<long long>(fft_angle) / 2);
    }

    // Velocity axis: the Doppler FFT runs per Tx over chirps spaced
    // num_tx * chirp_duration apart, so that product sets the bin spacing.
    double velocity_bin_spacing() const {
        return wavelength() /
               (2.0 * static_cast<double>(fft_velocity) * static_cast<double>(num_tx) * chirp_duration);
    }

    double velocity_of_bin(long long signed_bin) const {
        return static_cast<double>(signed_bin) * velocity_bin_spacing();
    }

    std::size_t velocity_bin_centered(double v) const {
        long long b = round_half_away(v / velocity_bin_spacing());
        const long long half = static_cast<long long>(fft_velocity) / 2;
        b = std::clamp(b, -half, half - 1);
        return static_cast<std::size_t>(b + half);
    }

    std::size_t tx_of_chirp(std::size_t chirp) const { return chirp % num_tx; }

    // Chirps a given Tx fires in one frame under round-robin scheduling.
    std::size_t chirps_for_tx(std::size_t tx) const {
        return (chirps_per_frame - tx + num_tx - 1) / num_tx;
    }

    void validate() const {
        if (carrier_freq <= 0) throw domain_error("carrier_freq must be positive");
        if (sweep_bandwidth <= 0) throw domain_error("sweep_bandwidth must be positive");
        if (sweep_slope <= 0) throw domain_error("sweep_slope must be positive");
        if (sampling_freq <= 0) throw domain_error("sampling_freq must be positive");
        if (chirps_per_frame == 0) throw domain_error("chirps_per_frame must be positive");
        if (samples_per_chirp == 0) throw domain_error("samples_per_chirp must be positive");
        if (chirp_duration <= 0) throw domain_error("chirp_duration must be positive");
        if (num_tx == 0 || num_rx_physical == 0) throw domain_error("antenna counts must be positive");
        if (spacing && *spacing <= 0) throw domain_error("element_spacing must be positive");
        if (frame_rate <= 0) throw domain_error("frame_rate must be positive");
        if (fft_range == 0 || fft_velocity == 0 || fft_angle == 0)
            throw domain_error("fft sizes must be positive");
        if (fft_velocity % 2 != 0 || fft_angle % 2 != 0)
            throw domain_error("centered fft axes (velocity, angle) need even sizes");
        if (samples_per_chirp > fft_range)
            throw domain_error("samples_per_chirp exceeds range fft size");
        if (num_rx_virtual() > fft_angle)
            throw domain_error("virtual array exceeds angle fft size");
        if (num_tx > chirps_per_frame)
            throw domain_error("fewer chirps than transmitters");
        if (static_cast<double>(samples_per_chirp) / sampling_freq > chirp_duration + 1e-12)
            throw domain_error("sampling window longer than the chirp");
        cfar.validate();
    }

    // TI AWR1843-style preset used by the bundled sample inputs.
    static RadarConfig awr1843() {
        RadarConfig c;
        c.carrier_freq = 77e9;
        c.sweep_bandwidth = 670e6;
        c.sweep_slope = 21e6 / 1e-6;  // 21 MHz/us
        c.sampling_freq = 4e6;
        c.chirps_per_frame = 255;
        c.samples_per_chirp = 128;
        c.chirp_duration = 120e-6;
        c.num_tx = 2;
        c.num_rx_physical = 4;
        c.frame_rate = 30.0;
        return c;
    }
};

namespace detail {

inline const nlohmann::json& require_key(const nlohmann::json& j, const std::string& key) {
    if (!j.contains(key)) throw schema_error("config missing required key '" + key + "'");
    return j.at(key);
}

inline double require_number(const nlohmann::json& j, const std::string& key) {
    const auto& v = require_key(j, key);
    if (!v.is_number()) throw schema_error("config key '" + key + "' must be a number");
    return v.get<double>();
}

inline std::size_t require_count(const nlohmann::json& j, const std::string& key) {
    const auto& v = require_key(j, key);
    if (!v.is_number_unsigned()) throw schema_error("config key '" + key + "' must be a non-negative integer");
    return v.get<std::size_t>();
}

}  // namespace detail

inline RadarConfig config_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw schema_error("config document must be a JSON object");
    RadarConfig c;
    c.carrier_freq = detail::require_number(j, "carrier_freq");
    c.sweep_bandwidth = detail::require_number(j, "sweep_bandwidth");
    c.sweep_slope = detail::require_number(j, "sweep_slope");
    c.sampling_freq = detail::require_number(j, "sampling_freq");
    c.chirps_per_frame = detail::require_count(j, "chirps_per_frame");
    c.samples_per_chirp = detail::require_count(j, "samples_per_chirp");
    c.chirp_duration = detail::require_number(j, "chirp_duration");
    c.num_tx = detail::require_count(j, "num_tx");
    c.num_rx_physical = detail::require_count(j, "num_rx_physical");
    c.frame_rate = detail::require_number(j, "frame_rate");
    if (j.contains("element_spacing")) {
        if (!j.at("element_spacing").is_number())
            throw schema_error("config key 'element_spacing' must be a number");
        c.spacing = j.at("element_spacing").get<double>();
    }
    if (j.contains("fft_points")) {
        const auto& f = j.at("fft_points");
        if (!f.is_object()) throw schema_error("config key 'fft_points' must be an object");
        c.fft_range = detail::require_count(f, "range");
        c.fft_velocity = detail::require_count(f, "velocity");
        c.fft_angle = detail::require_count(f, "angle");
    }
    if (j.contains("window")) {
        const auto& w = j.at("window");
        if (!w.is_object()) throw schema_error("config key 'window' must be an object");
        if (w.contains("range")) c.window.range = window_from_string(w.at("range").get<std::string>());
        if (w.contains("velocity")) c.window.velocity = window_from_string(w.at("velocity").get<std::string>());
        if (w.contains("angle")) c.window.angle = window_from_string(w.at("angle").get<std::string>());
    }
    if (j.contains("cfar")) {
        const auto& f = j.at("cfar");
        if (!f.is_object()) throw schema_error("config key 'cfar' must be an object");
        if (f.contains("guard")) {
            const auto& g = f.at("guard");
            if (!g.is_array() || g.size() != 2) throw schema_error("cfar guard must be [range, velocity]");
            c.cfar.guard_range = g.at(0).get<int>();
            c.cfar.guard_velocity = g.at(1).get<int>();
        }
        if (f.contains("train")) {
            const auto& t = f.at("train");
            if (!t.is_array() || t.size() != 2) throw schema_error("cfar train must be [range, velocity]");
            c.cfar.train_range = t.at(0).get<int>();
            c.cfar.train_velocity = t.at(1).get<int>();
        }
        if (f.contains("pfa")) c.cfar.pfa = f.at("pfa").get<double>();
        if (f.contains("max_detections")) c.cfar.max_detections = f.at("max_detections").get<std::size_t>();
        if (f.contains("scale")) c.cfar.scale_override = f.at("scale").get<double>();
    }
    c.validate();
    return c;
}

inline nlohmann::json config_to_json(const RadarConfig& c) {
    nlohmann::json j{
        {"carrier_freq", c.carrier_freq},
        {"sweep_bandwidth", c.sweep_bandwidth},
        {"sweep_slope", c.sweep_slope},
        {"sampling_freq", c.sampling_freq},
        {"chirps_per_frame", c.chirps_per_frame},
        {"samples_per_chirp", c.samples_per_chirp},
        {"chirp_duration", c.chirp_duration},
        {"num_tx", c.num_tx},
        {"num_rx_physical", c.num_rx_physical},
        {"frame_rate", c.frame_rate},
        {"fft_points", {{"range", c.fft_range}, {"velocity", c.fft_velocity}, {"angle", c.fft_angle}}},
        {"window",
         {{"range", window_to_string(c.window.range)},
          {"velocity", window_to_string(c.window.velocity)},
          {"angle", window_to_string(c.window.angle)}}},
        {"cfar",
         {{"guard", {c.cfar.guard_range, c.cfar.guard_velocity}},
          {"train", {c.cfar.train_range, c.cfar.train_velocity}},
          {"pfa", c.cfar.pfa},
          {"max_detections", c.cfar.max_detections}}},
    };
    if (c.spacing) j["element_spacing"] = *c.spacing;
    if (c.cfar.scale_override) j["cfar"]["scale"] = *c.cfar.scale_override;
    return j;
}

}  // namespace rcube
