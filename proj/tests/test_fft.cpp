#include <catch2/catch_amalgamated.hpp>

#include <thread>

#include "rcube/fft.hpp"

#include "reference_dft.hpp"

using rcube::cplx;

namespace {

std::vector<cplx> random_signal(std::size_t n, rcube::Rng& rng) {
    std::vector<cplx> x(n);
    for (auto& v : x) v = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
    return x;
}

double relative_error(const std::vector<cplx>& got, const std::vector<cplx>& want) {
    double err = 0, norm = 0;
    for (std::size_t i = 0; i < got.size(); ++i) {
        err += std::norm(got[i] - want[i]);
        norm += std::norm(want[i]);
    }
    return norm > 0 ? std::sqrt(err / norm) : std::sqrt(err);
}

}  // namespace

TEST_CASE("forward transform matches the direct-sum reference", "[fft]") {
    rcube::Rng rng(42);
    for (std::size_t n : {2u, 3u, 4u, 5u, 8u, 12u, 16u, 32u, 64u, 100u, 128u, 255u, 256u}) {
        auto x = random_signal(n, rng);
        auto got = rcube::fft(x, n);
        auto want = testref::dft(x);
        INFO("n = " << n);
        CHECK(relative_error(got, want) <= 1e-9);
    }
}

TEST_CASE("zero padding matches the reference on the padded sequence", "[fft]") {
    rcube::Rng rng(7);
    auto x = random_signal(8, rng);
    auto got = rcube::fft(x, 128);
    auto padded = x;
    padded.resize(128, cplx{});
    auto want = testref::dft(padded);
    CHECK(relative_error(got, want) <= 1e-9);
}

TEST_CASE("inverse transform undoes the forward transform", "[fft]") {
    rcube::Rng rng(3);
    for (std::size_t n : {16u, 100u, 256u}) {
        auto x = random_signal(n, rng);
        auto back = rcube::ifft(rcube::fft(x, n), n);
        CHECK(relative_error(back, x) <= 1e-12);
    }
}

TEST_CASE("constant input concentrates in bin zero", "[fft]") {
    std::vector<cplx> ones(64, cplx{1.0, 0.0});
    auto spec = rcube::fft(ones, 64);
    CHECK(std::abs(spec[0] - cplx{64.0, 0.0}) < 1e-10);
    for (std::size_t m = 1; m < 64; ++m) CHECK(std::abs(spec[m]) < 1e-10);
}

TEST_CASE("centering swap is an involution on even lengths", "[fft]") {
    std::vector<int> v(128);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<int>(i);
    auto twice = rcube::fftshift(rcube::fftshift(v));
    CHECK(twice == v);
    CHECK(rcube::fftshift_index(0, 128) == 64);
    CHECK(rcube::fftshift_index(64, 128) == 0);
    CHECK(rcube::fftshift_index(127, 128) == 63);
}

TEST_CASE("plan cache survives concurrent lookups", "[fft]") {
    std::vector<std::thread> pool;
    std::atomic<int> failures{0};
    for (int t = 0; t < 8; ++t) {
        pool.emplace_back([&failures, t] {
            for (int i = 0; i < 100; ++i) {
                const std::size_t n = 2u << ((t + i) % 7);
                auto plan = rcube::fft_plan(n);
                if (!plan || plan->n != n) ++failures;
            }
        });
    }
    for (auto& th : pool) th.join();
    CHECK(failures.load() == 0);
}
