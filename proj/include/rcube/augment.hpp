#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include <json.hpp>

#include "rcube/fft.hpp"
#include "rcube/tensor.hpp"
#include "rcube/config.hpp"

namespace rcube {

// Antenna gain versus azimuth, sampled uniformly over [-pi/2, pi/2] and
// linearly interpolated. Amplitude ratios G(theta')/G(theta) rescale
// translated targets.
struct GainProfile {
    std::vector<double> gains;

    static GainProfile uniform() { return GainProfile{{1.0, 1.0}}; }

    // Smooth cos^2 taper with a small floor so ratios stay finite at the ends.
    static GainProfile cosine_squared(std::size_t samples = 181) {
        GainProfile g;
        g.gains.resize(samples);
        for (std::size_t i = 0; i < samples; ++i) {
            const double theta = -kPi / 2 + kPi * static_cast<double>(i) / static_cast<double>(samples - 1);
            g.gains[i] = std::max(std::cos(theta) * std::cos(theta), 1e-4);
        }
        return g;
    }

    double at(double theta) const {
        if (gains.size() < 2) throw domain_error("gain profile needs at least two samples");
        for (double v : gains)
            if (v <= 0) throw domain_error("gain profile must be positive");
        const double t = std::clamp((theta + kPi / 2) / kPi, 0.0, 1.0) *
                         static_cast<double>(gains.size() - 1);
        const std::size_t i = std::min(static_cast<std::size_t>(t), gains.size() - 2);
        const double frac = t - static_cast<double>(i);
        return gains[i] * (1.0 - frac) + gains[i + 1] * frac;
    }
};

// A transformed cube plus the cells the transform vacated (1 = blank).
struct AugmentResult {
    Tensor<cplx> cube;
    Tensor<std::uint8_t> blanks;
};

inline Tensor<std::uint8_t> no_blanks(const Tensor<cplx>& cube) {
    return Tensor<std::uint8_t>(cube.dims(), 0);
}

// Mirror a centered angle axis about boresight. Modular reversal keeps the
// lone -max edge bin fixed (it has no positive twin) and is an involution.
template <class T>
Tensor<T> flip_angle_axis(const Tensor<T>& t, std::size_t axis) {
    if (axis >= t.rank()) throw domain_error("flip axis out of range");
    const std::size_t n = t.dim(axis);
    std::size_t inner = 1, outer = 1;
    for (std::size_t a = 0; a < axis; ++a) outer *= t.dim(a);
    for (std::size_t a = axis + 1; a < t.rank(); ++a) inner *= t.dim(a);

    Tensor<T> out(t.dims());
    for (std::size_t o = 0; o < outer; ++o)
        for (std::size_t j = 0; j < n; ++j) {
            const std::size_t src = (n - j) % n;  // reversal about the center bin
            const T* sp = t.data() + (o * n + src) * inner;
            T* dp = out.data() + (o * n + j) * inner;
            std::copy(sp, sp + inner, dp);
        }
    return out;
}

// Left-right scene mirror of a range-velocity-angle cube.
inline Tensor<cplx> flip_horizontal(const Tensor<cplx>& cube) {
    if (cube.rank() != 3) throw domain_error("cube must be rank 3");
    return flip_angle_axis(cube, 2);
}

namespace detail {

// Half-width of the range/angle support slab a point target owns.
inline constexpr long long kSupportHalfWidth = 2;

// Rotate a centered axis to natural FFT order (even lengths: same rotation
// both directions).
inline std::vector<cplx> uncenter(const std::vector<cplx>& v) { return fftshift(v); }

// Remap one element-domain (pre-angle-FFT) row: scale magnitudes by
// amp_ratio and the accumulated phase by phase_ratio. Phases are unwrapped
// along the element axis first — the remap scales the physical phase, of
// which arg() only shows the principal branch, and a wrapped branch would
// tear the steering ramp apart. Scaling the unwrapped ramp moves it exactly
// onto the displaced target's direction (valid for a single coherent ramp
// per row, which is what the per-target masking guarantees).
inline void remap_row(std::vector<cplx>& elems, double amp_ratio, double phase_ratio) {
    double prev = 0.0;
    bool have_prev = false;
    for (auto& z : elems) {
        const double mag = std::abs(z);
        if (mag == 0.0) {
            z = {};
            continue;
        }
        double ph = std::arg(z);
        if (have_prev) ph = prev + std::remainder(ph - prev, 2.0 * kPi);
        prev = ph;
        have_prev = true;
        const double scaled = ph * phase_ratio;
        z = amp_ratio * mag * cplx{std::cos(scaled), std::sin(scaled)};
    }
}

}  // namespace detail

// Move every listed target outward/inward in range by delta_r on the cube's
// range axis (Mr cells spanning [0, max_range)). Each target owns a slab of
// rows around its range bin; rows are shifted by the cell-rounded equivalent
// of delta_r, amplitudes scaled by (r/(r+delta_r))^2 and phases by
// r/(r+delta_r) in the element domain. Vacated rows come back blank.
inline AugmentResult translate_range(const RadarConfig& cfg, const Tensor<cplx>& cube,
                                     const Tensor<std::uint8_t>& blanks, double delta_r,
                                     const std::vector<double>& target_ranges) {
    const std::size_t mr = cfg.fft_range, mv = cfg.fft_velocity, ma = cfg.fft_angle;
    if (cube.rank() != 3 || cube.dim(0) != mr || cube.dim(1) != mv || cube.dim(2) != ma)
        throw domain_error("cube shape does not match the config");
    if (blanks.dims() != cube.dims()) throw domain_error("blank mask shape mismatch");
    if (target_ranges.empty()) throw domain_error("translate_range needs at least one target range");

    const double cells = 2.0 * static_cast<double>(mr) * cfg.sweep_slope * delta_r /
                         (kSpeedOfLight * cfg.sampling_freq);
    const long long shift = round_half_away(cells);

    for (double r : target_ranges) {
        if (r <= 0 || r > cfg.max_range()) throw domain_error("target range outside (0, max_range]");
        const double moved = r + delta_r;
        if (moved <= 0 || moved > cfg.max_range())
            throw domain_error("translate_range pushes a target outside (0, max_range]");
    }

    AugmentResult out{cube, blanks};

    // Blank every source slab first, then rewrite destinations from the
    // original data, so overlapping source/destination rows settle cleanly.
    std::vector<std::pair<long long, long long>> slabs;
    for (double r : target_ranges) {
        const long long m = cfg.range_bin_of(r);
        const long long lo = std::max(0ll, m - detail::kSupportHalfWidth);
        const long long hi = std::min(static_cast<long long>(mr) - 1, m + detail::kSupportHalfWidth);
        slabs.emplace_back(lo, hi);
        for (long long row = lo; row <= hi; ++row)
            for (std::size_t b = 0; b < mv; ++b)
                for (std::size_t a = 0; a < ma; ++a) {
                    out.cube(static_cast<std::size_t>(row), b, a) = cplx{};
                    out.blanks(static_cast<std::size_t>(row), b, a) = 1;
                }
    }

    std::vector<cplx> row(ma);
    for (std::size_t ti = 0; ti < target_ranges.size(); ++ti) {
        const double r = target_ranges[ti];
        const double amp_ratio = (r / (r + delta_r)) * (r / (r + delta_r));
        const double phase_ratio = r / (r + delta_r);
        for (long long src = slabs[ti].first; src <= slabs[ti].second; ++src) {
            const long long dst = src + shift;
            if (dst < 0 || dst >= static_cast<long long>(mr))
                throw domain_error("translate_range pushes a target off the range grid");
            for (std::size_t b = 0; b < mv; ++b) {
                for (std::size_t a = 0; a < ma; ++a)
                    row[a] = cube(static_cast<std::size_t>(src), b, a);
                // Element domain round trip: uncenter, inverse FFT, remap the
                // element row, forward FFT, recenter.
                auto elems = ifft(detail::uncenter(row), ma);
                detail::remap_row(elems, amp_ratio, phase_ratio);
                auto spec = fft(std::move(elems), ma);
                for (std::size_t a = 0; a < ma; ++a) {
                    out.cube(static_cast<std::size_t>(dst), b, fftshift_index(a, ma)) = spec[a];
                    out.blanks(static_cast<std::size_t>(dst), b, fftshift_index(a, ma)) =
                        blanks(static_cast<std::size_t>(src), b, fftshift_index(a, ma));
                }
            }
        }
    }
    return out;
}

// Target reference for angle translation: where the target sits now.
struct TargetRef {
    double range = 0;
    double azimuth = 0;
};

// Rotate listed targets in azimuth by delta_theta. The shift on the angle
// axis is the cell-rounded change in Mtheta*d*sin(theta)/lambda, and the
// amplitude picks up the gain ratio G(theta')/G(theta). A range row owned by
// a single target shifts whole; rows shared by several targets move only
// each target's +-2-bin angular window. Cells shifted in from beyond the
// axis edge are blank.
inline AugmentResult translate_angle(const RadarConfig& cfg, const Tensor<cplx>& cube,
                                     const Tensor<std::uint8_t>& blanks, double delta_theta,
                                     const std::vector<TargetRef>& targets,
                                     const GainProfile& gain = GainProfile::uniform()) {
    const std::size_t mr = cfg.fft_range, mv = cfg.fft_velocity, ma = cfg.fft_angle;
    if (cube.rank() != 3 || cube.dim(0) != mr || cube.dim(1) != mv || cube.dim(2) != ma)
        throw domain_error("cube shape does not match the config");
    if (blanks.dims() != cube.dims()) throw domain_error("blank mask shape mismatch");
    if (targets.empty()) throw domain_error("translate_angle needs at least one target");

    struct Move {
        long long shift;
        double gain_ratio;
        long long row_lo, row_hi;
        long long peak;  // centered angle bin before the move
    };
    std::vector<Move> moves;
    for (const auto& t : targets) {
        const double theta2 = t.azimuth + delta_theta;
        if (std::abs(t.azimuth) >= cfg.max_angle() || std::abs(theta2) >= cfg.max_angle())
            throw domain_error("translate_angle moves a target outside +-max_angle");
        const double cells = static_cast<double>(ma) * cfg.element_spacing() *
                             (std::sin(t.azimuth) - std::sin(theta2)) / cfg.wavelength();
        Move mv_rec;
        mv_rec.shift = round_half_away(cells);
        mv_rec.gain_ratio = gain.at(theta2) / gain.at(t.azimuth);
        const long long m = cfg.range_bin_of(t.range);
        mv_rec.row_lo = std::max(0ll, m - detail::kSupportHalfWidth);
        mv_rec.row_hi = std::min(static_cast<long long>(mr) - 1, m + detail::kSupportHalfWidth);
        mv_rec.peak = static_cast<long long>(cfg.angle_bin_centered(t.azimuth));
        moves.push_back(mv_rec);
    }

    AugmentResult out{cube, blanks};
    for (long long row = 0; row < static_cast<long long>(mr); ++row) {
        std::vector<std::size_t> owners;
        for (std::size_t i = 0; i < moves.size(); ++i)
            if (row >= moves[i].row_lo && row <= moves[i].row_hi) owners.push_back(i);
        if (owners.empty()) continue;
        const std::size_t m = static_cast<std::size_t>(row);

        if (owners.size() == 1) {
            const Move& mov = moves[owners[0]];
            for (std::size_t b = 0; b < mv; ++b)
                for (std::size_t a = 0; a < ma; ++a) {
                    const long long src = static_cast<long long>(a) + mov.shift;
                    if (src >= 0 && src < static_cast<long long>(ma)) {
                        out.cube(m, b, a) = mov.gain_ratio * cube(m, b, static_cast<std::size_t>(src));
                        out.blanks(m, b, a) = blanks(m, b, static_cast<std::size_t>(src));
                    } else {
                        out.cube(m, b, a) = cplx{};
                        out.blanks(m, b, a) = 1;
                    }
                }
            continue;
        }

        // Shared row: move each owner's angular window separately.
        for (std::size_t oi : owners) {
            const Move& mov = moves[oi];
            const long long w_lo = mov.peak - detail::kSupportHalfWidth;
            const long long w_hi = mov.peak + detail::kSupportHalfWidth;
            for (long long a = w_lo; a <= w_hi; ++a)
                if (a >= 0 && a < static_cast<long long>(ma))
                    for (std::size_t b = 0; b < mv; ++b) {
                        out.cube(m, b, static_cast<std::size_t>(a)) = cplx{};
                        out.blanks(m, b, static_cast<std::size_t>(a)) = 1;
                    }
        }
        for (std::size_t oi : owners) {
            const Move& mov = moves[oi];
            for (long long src = mov.peak - detail::kSupportHalfWidth;
                 src <= mov.peak + detail::kSupportHalfWidth; ++src) {
                const long long dst = src - mov.shift;
                if (src < 0 || src >= static_cast<long long>(ma) || dst < 0 ||
                    dst >= static_cast<long long>(ma))
                    continue;
                for (std::size_t b = 0; b < mv; ++b) {
                    out.cube(m, b, static_cast<std::size_t>(dst)) =
                        mov.gain_ratio * cube(m, b, static_cast<std::size_t>(src));
                    out.blanks(m, b, static_cast<std::size_t>(dst)) =
                        blanks(m, b, static_cast<std::size_t>(src));
                }
            }
        }
    }
    return out;
}

// Fill blank cells with plausible environment noise: magnitudes resampled
// (with replacement) from the quietest 5% of surviving cells, phases uniform.
inline AugmentResult interpolate_blanks(const Tensor<cplx>& cube, const Tensor<std::uint8_t>& blanks,
                                        Rng& rng) {
    if (blanks.dims() != cube.dims()) throw domain_error("blank mask shape mismatch");
    std::vector<double> mags;
    mags.reserve(cube.size());
    for (std::size_t i = 0; i < cube.size(); ++i)
        if (!blanks[i]) mags.push_back(std::abs(cube[i]));
    if (mags.size() < 20) throw domain_error("too few cells to build a noise pool");
    std::sort(mags.begin(), mags.end());
    const std::size_t pool = std::max<std::size_t>(1, mags.size() / 20);

    AugmentResult out{cube, Tensor<std::uint8_t>(cube.dims(), 0)};
    for (std::size_t i = 0; i < cube.size(); ++i) {
        if (!blanks[i]) continue;
        const double mag = mags[rng.index(pool)];
        const double ph = rng.uniform(0.0, 2.0 * kPi);
        out.cube[i] = mag * cplx{std::cos(ph), std::sin(ph)};
    }
    return out;
}

// Element-wise sum of two cubes from the same grid.
inline Tensor<cplx> mix(const Tensor<cplx>& a, const Tensor<cplx>& b) {
    if (!a.same_shape(b)) throw domain_error("mix inputs must share a shape");
    Tensor<cplx> out = a;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += b[i];
    return out;
}

// ---------------------------------------------------------------------------
// Polar <-> Cartesian resampling of magnitude maps (rendering / geometry aid).

struct CartesianMap {
    Tensor<double> values;  // [ny x nx], row 0 nearest the radar
    double x_min = 0, x_max = 0;
    double y_min = 0, y_max = 0;
};

namespace detail {

inline double bilinear(const Tensor<double>& img, double fi, double fj) {
    const double ni = static_cast<double>(img.dim(0)), nj = static_cast<double>(img.dim(1));
    if (fi < 0 || fj < 0 || fi > ni - 1 || fj > nj - 1) return 0.0;
    const std::size_t i0 = static_cast<std::size_t>(fi), j0 = static_cast<std::size_t>(fj);
    const std::size_t i1 = std::min(i0 + 1, img.dim(0) - 1), j1 = std::min(j0 + 1, img.dim(1) - 1);
    const double di = fi - static_cast<double>(i0), dj = fj - static_cast<double>(j0);
    return img(i0, j0) * (1 - di) * (1 - dj) + img(i1, j0) * di * (1 - dj) +
           img(i0, j1) * (1 - di) * dj + img(i1, j1) * di * dj;
}

}  // namespace detail

// Resample a range-angle magnitude map onto a uniform x/y grid. x is
// cross-range (positive right), y is down-range. Cells outside the radar's
// field map to zero.
inline CartesianMap polar_to_cartesian(const RadarConfig& cfg, const Tensor<double>& ra) {
    if (ra.rank() != 2 || ra.dim(0) != cfg.fft_range || ra.dim(1) != cfg.fft_angle)
        throw domain_error("range-angle map shape does not match the config");
    const double r_max = cfg.max_range();
    const std::size_t ny = cfg.fft_range;
    const std::size_t nx = 2 * cfg.fft_range;
    CartesianMap out;
    out.values = Tensor<double>({ny, nx});
    out.x_min = -r_max;
    out.x_max = r_max;
    out.y_min = 0;
    out.y_max = r_max;

    const double r_cell = r_max / static_cast<double>(cfg.fft_range);
    const double sin_cell = cfg.wavelength() / (static_cast<double>(cfg.fft_angle) * cfg.element_spacing());
    for (std::size_t iy = 0; iy < ny; ++iy) {
        const double y = (static_cast<double>(iy) + 0.5) * (out.y_max - out.y_min) / static_cast<double>(ny);
        for (std::size_t ix = 0; ix < nx; ++ix) {
            const double x = out.x_min +
                             (static_cast<double>(ix) + 0.5) * (out.x_max - out.x_min) / static_cast<double>(nx);
            const double r = std::hypot(x, y);
            if (r >= r_max || r == 0.0) continue;
            const double s = x / r;  // sin(azimuth), y >= 0 in this grid
            const double fi = r / r_cell;
            const double fj = s / sin_cell + static_cast<double>(cfg.fft_angle) / 2.0;
            out.values(iy, ix) = detail::bilinear(ra, fi, fj);
        }
    }
    return out;
}

// Inverse resampling back onto the radar's polar grid.
inline Tensor<double> cartesian_to_polar(const RadarConfig& cfg, const CartesianMap& cart) {
    const std::size_t mr = cfg.fft_range, ma = cfg.fft_angle;
    Tensor<double> out({mr, ma});
    const double r_max = cfg.max_range();
    const double r_cell = r_max / static_cast<double>(mr);
    const double sin_cell = cfg.wavelength() / (static_cast<double>(ma) * cfg.element_spacing());
    const std::size_t ny = cart.values.dim(0), nx = cart.values.dim(1);
    for (std::size_t i = 0; i < mr; ++i) {
        const double r = static_cast<double>(i) * r_cell;
        for (std::size_t j = 0; j < ma; ++j) {
            const double s = (static_cast<double>(j) - static_cast<double>(ma) / 2.0) * sin_cell;
            if (std::abs(s) > 1.0) continue;
            const double x = r * s;
            const double y = r * std::sqrt(1.0 - s * s);
            const double fi = (y - cart.y_min) / (cart.y_max - cart.y_min) * static_cast<double>(ny) - 0.5;
            const double fj = (x - cart.x_min) / (cart.x_max - cart.x_min) * static_cast<double>(nx) - 0.5;
            out(i, j) = detail::bilinear(cart.values, fi, fj);
        }
    }
    return out;
}

}  // namespace rcube
