#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

namespace rcube {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s
inline constexpr double kPi = 3.141592653589793238462643383279502884;

using cplx = std::complex<double>;

// Guard against representation error when a physical coordinate sits exactly
// on a bin boundary (e.g. sin(30deg) computed as 0.49999999999999994).
inline constexpr double kBinEpsilon = 1e-9;

// Errors are split by how the CLI reports them: malformed input documents,
// out-of-domain values, and filesystem trouble.
struct schema_error : std::runtime_error {
    explicit schema_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct domain_error : std::runtime_error {
    explicit domain_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct io_error : std::runtime_error {
    explicit io_error(const std::string& msg) : std::runtime_error(msg) {}
};

inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }
inline double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

// Round half away from zero: 2.5 -> 3, -2.5 -> -3. llround already has that
// tie behaviour; named here so call sites read as intent.
inline long long round_half_away(double x) { return std::llround(x); }

// floor() with the boundary guard above, for physical-value -> bin maps.
inline long long floor_bin(double x) { return static_cast<long long>(std::floor(x + kBinEpsilon)); }

// Deterministic random source. Draws go through raw 53-bit mantissa uniforms
// so sequences do not depend on the standard library's distribution
// implementations (std::normal_distribution is implementation-defined).
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    // Uniform in [0, 1).
    double uniform() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Standard normal via Box-Muller (no cached spare; two uniforms per draw
    // keeps the stream position a pure function of draw count).
    double gaussian() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
    }

    // Circularly symmetric complex normal with E|z|^2 = sigma^2.
    cplx complex_gaussian(double sigma) {
        const double s = sigma / std::sqrt(2.0);
        return {s * gaussian(), s * gaussian()};
    }

    std::uint64_t raw() { return gen_(); }

    // Uniform integer in [0, n).
    std::uint64_t index(std::uint64_t n) {
        // Rejection-free modulo is fine here; n is tiny compared to 2^64.
        return gen_() % n;
    }

private:
    std::mt19937_64 gen_;
};

}  // namespace rcube
