#include <catch2/catch_amalgamated.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>

#include "rcube/rcube_io.hpp"
#include "rcube/render.hpp"

using rcube::cplx;

namespace {

namespace fs = std::filesystem;

fs::path scratch_path(const char* name) {
    const auto dir = fs::temp_directory_path() / "rcube_io_tests";
    fs::create_directories(dir);
    return dir / name;
}

void put32(std::ofstream& os, std::uint32_t v) {
    const unsigned char b[4] = {
        static_cast<unsigned char>(v & 0xff), static_cast<unsigned char>((v >> 8) & 0xff),
        static_cast<unsigned char>((v >> 16) & 0xff), static_cast<unsigned char>((v >> 24) & 0xff)};
    os.write(reinterpret_cast<const char*>(b), 4);
}

// Minimal hand-built container: one rank-1 dim, no tag, zero payload floats.
void write_stub(const fs::path& p, std::uint32_t version, std::uint32_t dtype, std::uint32_t rank) {
    std::ofstream os(p, std::ios::binary);
    os.write("RCUB", 4);
    put32(os, version);
    put32(os, dtype);
    put32(os, rank);
    for (std::uint32_t i = 0; i < rank; ++i) put32(os, 1);
    put32(os, 0);
    const std::uint32_t floats = dtype == rcube::kDtypeComplexF32 ? 2 : 1;
    for (std::uint32_t i = 0; i < floats; ++i) put32(os, 0);
}

}  // namespace

TEST_CASE("complex tensors survive a file round trip", "[io]") {
    rcube::Tensor<cplx> t({3, 4, 5});
    for (std::size_t i = 0; i < t.size(); ++i)
        t[i] = {0.25 * static_cast<double>(i % 7) - 1.5, 0.5 * static_cast<double>(i)};

    const auto p = scratch_path("roundtrip_complex.rcube");
    rcube::write_rcube(p.string(), t, "frame,sample,chirp");
    auto back = rcube::read_rcube(p.string());

    CHECK(back.is_complex());
    CHECK(back.header.version == 1);
    CHECK(back.header.axes == "frame,sample,chirp");
    REQUIRE(back.header.dims == std::vector<std::uint32_t>{3, 4, 5});
    REQUIRE(back.complex_values.dims() == t.dims());
    // Quarter-step values are exact in 32-bit floats, so equality is exact.
    CHECK(back.complex_values == t);
}

TEST_CASE("real tensors survive a file round trip", "[io]") {
    rcube::Tensor<double> t({2, 6});
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = 0.125 * static_cast<double>(i) - 0.5;

    const auto p = scratch_path("roundtrip_real.rcube");
    rcube::write_rcube(p.string(), t, "");
    auto back = rcube::read_rcube(p.string());

    CHECK_FALSE(back.is_complex());
    CHECK(back.header.dtype == rcube::kDtypeRealF32);
    CHECK(back.header.axes.empty());
    CHECK(back.real_values == t);
    CHECK(back.complex_values.size() == 0);
}

TEST_CASE("malformed containers are rejected by kind", "[io]") {
    const auto junk = scratch_path("junk.rcube");
    {
        std::ofstream os(junk, std::ios::binary);
        os << "JUNKJUNKJUNKJUNK";
    }
    CHECK_THROWS_AS(rcube::read_rcube(junk.string()), rcube::schema_error);

    const auto ver = scratch_path("version.rcube");
    write_stub(ver, 2, rcube::kDtypeComplexF32, 1);
    CHECK_THROWS_AS(rcube::read_rcube(ver.string()), rcube::schema_error);

    const auto dt = scratch_path("dtype.rcube");
    write_stub(dt, 1, 7, 1);
    CHECK_THROWS_AS(rcube::read_rcube(dt.string()), rcube::schema_error);

    const auto r0 = scratch_path("rank0.rcube");
    write_stub(r0, 1, rcube::kDtypeRealF32, 0);
    CHECK_THROWS_AS(rcube::read_rcube(r0.string()), rcube::schema_error);

    const auto r9 = scratch_path("rank9.rcube");
    write_stub(r9, 1, rcube::kDtypeRealF32, 9);
    CHECK_THROWS_AS(rcube::read_rcube(r9.string()), rcube::schema_error);
}

TEST_CASE("truncated and padded containers are caught", "[io]") {
    rcube::Tensor<double> t({4, 4});
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = static_cast<double>(i);

    const auto cut = scratch_path("cut.rcube");
    rcube::write_rcube(cut.string(), t, "range,angle");
    fs::resize_file(cut, fs::file_size(cut) - 4);
    CHECK_THROWS_AS(rcube::read_rcube(cut.string()), rcube::io_error);

    const auto stub = scratch_path("header_cut.rcube");
    rcube::write_rcube(stub.string(), t, "range,angle");
    fs::resize_file(stub, 6);
    CHECK_THROWS_AS(rcube::read_rcube(stub.string()), rcube::io_error);

    const auto fat = scratch_path("fat.rcube");
    rcube::write_rcube(fat.string(), t, "range,angle");
    {
        std::ofstream os(fat, std::ios::binary | std::ios::app);
        os << "XXXX";
    }
    CHECK_THROWS_AS(rcube::read_rcube(fat.string()), rcube::schema_error);
}

TEST_CASE("filesystem failures raise io errors", "[io]") {
    CHECK_THROWS_AS(rcube::read_rcube("/nonexistent_dir_rcube/missing.rcube"), rcube::io_error);
    rcube::Tensor<double> t({2, 2});
    CHECK_THROWS_AS(rcube::write_rcube("/nonexistent_dir_rcube/out.rcube", t, ""), rcube::io_error);
}

TEST_CASE("an empty map renders as a uniform image", "[render]") {
    rcube::Tensor<double> z({4, 5});
    auto bytes = rcube::render_ppm(z);

    const std::string header = "P6\n5 4\n255\n";
    REQUIRE(bytes.size() == header.size() + 3 * 20);
    CHECK(std::equal(header.begin(), header.end(), bytes.begin()));

    // Every pixel is the colormap's bottom color.
    const std::size_t base = header.size();
    CHECK(bytes[base + 0] == 68);
    CHECK(bytes[base + 1] == 1);
    CHECK(bytes[base + 2] == 84);
    for (std::size_t px = 1; px < 20; ++px)
        for (std::size_t ch = 0; ch < 3; ++ch)
            CHECK(bytes[base + 3 * px + ch] == bytes[base + ch]);
}

TEST_CASE("gray rendering maps decibels below the peak linearly", "[render]") {
    rcube::Tensor<double> m({2, 2});
    m(0, 0) = 100.0;  // peak -> white
    m(0, 1) = 1.0;    // -40 dB with a -60 dB floor -> a third of the way up
    m(1, 0) = 0.01;   // -80 dB, below the floor -> black
    m(1, 1) = 0.0;    // zero stays black

    rcube::RenderSpec spec;
    spec.colormap = "gray";
    auto bytes = rcube::render_ppm(m, spec);
    const std::size_t base = std::string("P6\n2 2\n255\n").size();
    CHECK(bytes[base + 0] == 255);
    CHECK(bytes[base + 3] == 85);
    CHECK(bytes[base + 6] == 0);
    CHECK(bytes[base + 9] == 0);
    // Gray pixels have equal channels.
    CHECK(bytes[base + 4] == 85);
    CHECK(bytes[base + 5] == 85);
}

TEST_CASE("brighter cells never render darker", "[render]") {
    rcube::Tensor<double> m({1, 5});
    const double vals[5] = {0.0, 0.5, 2.0, 30.0, 100.0};
    for (std::size_t i = 0; i < 5; ++i) m(0, i) = vals[i];

    rcube::RenderSpec spec;
    spec.colormap = "gray";
    auto bytes = rcube::render_ppm(m, spec);
    const std::size_t base = std::string("P6\n5 1\n255\n").size();
    for (std::size_t i = 1; i < 5; ++i) CHECK(bytes[base + 3 * i] >= bytes[base + 3 * (i - 1)]);
    CHECK(bytes[base + 12] == 255);
}

TEST_CASE("render inputs are validated", "[render]") {
    rcube::Tensor<double> m({2, 2}, 1.0);
    rcube::RenderSpec bad;
    bad.colormap = "jet";
    CHECK_THROWS_AS(rcube::render_ppm(m, bad), rcube::domain_error);

    rcube::RenderSpec floor;
    floor.db_floor = 0.0;
    CHECK_THROWS_AS(rcube::render_ppm(m, floor), rcube::domain_error);

    CHECK_THROWS_AS(rcube::render_ppm(rcube::Tensor<double>({2, 2, 2})), rcube::domain_error);

    rcube::Tensor<double> neg({2, 2});
    neg(0, 0) = -1.0;
    CHECK_THROWS_AS(rcube::render_ppm(neg), rcube::domain_error);
}

TEST_CASE("the image writer puts the rendered bytes on disk", "[render]") {
    rcube::Tensor<double> m({3, 3});
    m(1, 1) = 5.0;
    const auto p = scratch_path("view.ppm");
    rcube::write_ppm(p.string(), m);

    std::ifstream in(p, std::ios::binary);
    std::vector<unsigned char> disk((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    CHECK(disk == rcube::render_ppm(m));
}
