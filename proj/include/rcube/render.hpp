#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "rcube/tensor.hpp"

namespace rcube {

struct RenderSpec {
    std::string colormap = "viridis";  // or "gray"
    double db_floor = -60.0;           // values this far below the peak clip to the bottom color
};

namespace detail {

struct Rgb {
    unsigned char r, g, b;
};

// Compact viridis approximation: anchor colors, linearly interpolated.
inline Rgb viridis(double t) {
    static constexpr double anchors[9][3] = {
        {0.267, 0.005, 0.329}, {0.283, 0.141, 0.458}, {0.254, 0.265, 0.530},
        {0.207, 0.372, 0.553}, {0.164, 0.471, 0.558}, {0.128, 0.567, 0.551},
        {0.135, 0.659, 0.518}, {0.478, 0.821, 0.318}, {0.993, 0.906, 0.144},
    };
    t = std::clamp(t, 0.0, 1.0) * 8.0;
    const std::size_t i = std::min(static_cast<std::size_t>(t), std::size_t{7});
    const double f = t - static_cast<double>(i);
    auto mixc = [&](int ch) {
        return static_cast<unsigned char>(
            std::lround(255.0 * (anchors[i][ch] * (1 - f) + anchors[i + 1][ch] * f)));
    };
    return {mixc(0), mixc(1), mixc(2)};
}

inline Rgb gray(double t) {
    const auto v = static_cast<unsigned char>(std::lround(255.0 * std::clamp(t, 0.0, 1.0)));
    return {v, v, v};
}

}  // namespace detail

// Render a non-negative magnitude map as a binary PPM (P6) image, dB-scaled
// relative to the map peak. Row 0 of the tensor is the top image row. An
// all-zero map renders as a uniform bottom-color image.
inline std::vector<unsigned char> render_ppm(const Tensor<double>& mag, const RenderSpec& spec = {}) {
    if (mag.rank() != 2) throw domain_error("render input must be rank 2");
    if (spec.db_floor >= 0) throw domain_error("db_floor must be negative");
    const bool use_gray = spec.colormap == "gray";
    if (!use_gray && spec.colormap != "viridis")
        throw domain_error("unknown colormap '" + spec.colormap + "'");

    const std::size_t h = mag.dim(0), w = mag.dim(1);
    double peak = 0;
    for (std::size_t i = 0; i < mag.size(); ++i) {
        if (mag[i] < 0) throw domain_error("render input must be non-negative");
        peak = std::max(peak, mag[i]);
    }

    std::string header = "P6\n" + std::to_string(w) + " " + std::to_string(h) + "\n255\n";
    std::vector<unsigned char> out(header.begin(), header.end());
    out.reserve(out.size() + 3 * w * h);
    for (std::size_t i = 0; i < mag.size(); ++i) {
        double t = 0.0;
        if (peak > 0 && mag[i] > 0) {
            const double db = 20.0 * std::log10(mag[i] / peak);
            t = std::clamp(1.0 - db / spec.db_floor, 0.0, 1.0);
        }
        const detail::Rgb c = use_gray ? detail::gray(t) : detail::viridis(t);
        out.push_back(c.r);
        out.push_back(c.g);
        out.push_back(c.b);
    }
    return out;
}

inline void write_ppm(const std::string& path, const Tensor<double>& mag, const RenderSpec& spec = {}) {
    const auto bytes = render_ppm(mag, spec);
    std::ofstream os(path, std::ios::binary);
    if (!os) throw io_error("cannot open '" + path + "' for writing");
    os.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!os) throw io_error("write failed for '" + path + "'");
}

}  // namespace rcube
