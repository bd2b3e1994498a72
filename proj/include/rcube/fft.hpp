#pragma once

#include <memory>
#include <mutex>
#include <unordered_map>
#include <vector>

#include "rcube/common.hpp"

namespace rcube {

// Precomputed tables for one transform length. Plans are immutable after
// construction, so shared lookup from several threads is safe.
struct FftPlan {
    std::size_t n = 0;
    bool pow2 = false;
    std::vector<std::size_t> bitrev;   // radix-2 reorder table
    std::vector<cplx> twiddle;         // exp(-2*pi*i*k/n), k < n/2 (radix-2)
    std::vector<cplx> roots;           // exp(-2*pi*i*k/n), k < n (direct path)

    explicit FftPlan(std::size_t size) : n(size) {
        if (n == 0) throw domain_error("fft size must be positive");
        pow2 = (n & (n - 1)) == 0;
        if (pow2) {
            bitrev.resize(n);
            std::size_t bits = 0;
            while ((std::size_t{1} << bits) < n) ++bits;
            for (std::size_t i = 0; i < n; ++i) {
                std::size_t r = 0;
                for (std::size_t b = 0; b < bits; ++b)
                    if (i & (std::size_t{1} << b)) r |= std::size_t{1} << (bits - 1 - b);
                bitrev[i] = r;
            }
            twiddle.resize(n / 2);
            for (std::size_t k = 0; k < n / 2; ++k) {
                const double a = -2.0 * kPi * static_cast<double>(k) / static_cast<double>(n);
                twiddle[k] = {std::cos(a), std::sin(a)};
            }
        } else {
            roots.resize(n);
            for (std::size_t k = 0; k < n; ++k) {
                const double a = -2.0 * kPi * static_cast<double>(k) / static_cast<double>(n);
                roots[k] = {std::cos(a), std::sin(a)};
            }
        }
    }
};

// Shared read-only plan cache keyed by length.
inline std::shared_ptr<const FftPlan> fft_plan(std::size_t n) {
    static std::mutex mu;
    static std::unordered_map<std::size_t, std::shared_ptr<const FftPlan>> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    auto plan = std::make_shared<const FftPlan>(n);
    cache.emplace(n, plan);
    return plan;
}

namespace detail {

inline void fft_radix2(std::vector<cplx>& x, const FftPlan& plan, bool inverse) {
    const std::size_t n = plan.n;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t j = plan.bitrev[i];
        if (j > i) std::swap(x[i], x[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const std::size_t half = len >> 1;
        const std::size_t stride = n / len;
        for (std::size_t start = 0; start < n; start += len) {
            for (std::size_t k = 0; k < half; ++k) {
                cplx w = plan.twiddle[k * stride];
                if (inverse) w = std::conj(w);
                const cplx t = x[start + k + half] * w;
                const cplx u = x[start + k];
                x[start + k] = u + t;
                x[start + k + half] = u - t;
            }
        }
    }
}

inline void fft_direct(std::vector<cplx>& x, const FftPlan& plan, bool inverse) {
    const std::size_t n = plan.n;
    std::vector<cplx> out(n, cplx{});
    for (std::size_t m = 0; m < n; ++m) {
        cplx acc{};
        for (std::size_t k = 0; k < n; ++k) {
            cplx w = plan.roots[(m * k) % n];
            if (inverse) w = std::conj(w);
            acc += x[k] * w;
        }
        out[m] = acc;
    }
    x = std::move(out);
}

}  // namespace detail

// Forward transform, unnormalized: X[m] = sum_k x[k] exp(-2*pi*i*m*k/n).
// The input is zero-padded or truncated to n. Power-of-two lengths take the
// radix-2 path; anything else falls back to the quadratic evaluation, which
// is fine at the sizes this library runs (<= a few hundred).
inline std::vector<cplx> fft(std::vector<cplx> x, std::size_t n) {
    auto plan = fft_plan(n);
    x.resize(n, cplx{});
    if (plan->pow2)
        detail::fft_radix2(x, *plan, false);
    else
        detail::fft_direct(x, *plan, false);
    return x;
}

// Inverse transform with 1/n normalization.
inline std::vector<cplx> ifft(std::vector<cplx> x, std::size_t n) {
    auto plan = fft_plan(n);
    x.resize(n, cplx{});
    if (plan->pow2)
        detail::fft_radix2(x, *plan, true);
    else
        detail::fft_direct(x, *plan, true);
    const double scale = 1.0 / static_cast<double>(n);
    for (auto& v : x) v *= scale;
    return x;
}

// Position of an unshifted FFT bin after centering bin 0. Even lengths only;
// the swap is then its own inverse, which keeps view indexing unambiguous.
inline std::size_t fftshift_index(std::size_t bin, std::size_t n) {
    return (bin + n / 2) % n;
}

template <class T>
std::vector<T> fftshift(const std::vector<T>& x) {
    const std::size_t n = x.size();
    std::vector<T> out(n);
    for (std::size_t i = 0; i < n; ++i) out[fftshift_index(i, n)] = x[i];
    return out;
}

}  // namespace rcube
