#pragma once

#include <cstring>
#include <fstream>
#include <string>

#include "rcube/tensor.hpp"

namespace rcube {

// Binary tensor container. Layout, all integers little-endian:
//   bytes 0..3   magic "RCUB"
//   u32          version (currently 1)
//   u32          dtype: 0 = complex float32 (re,im pairs), 1 = float32
//   u32          rank
//   u32[rank]    dims
//   u32          tag length, then that many bytes of axis-semantics tag
//   payload      row-major float32 values, last axis fastest
struct RcubeHeader {
    std::uint32_t version = 1;
    std::uint32_t dtype = 0;
    std::vector<std::uint32_t> dims;
    std::string axes;
};

inline constexpr std::uint32_t kRcubeVersion = 1;
inline constexpr std::uint32_t kDtypeComplexF32 = 0;
inline constexpr std::uint32_t kDtypeRealF32 = 1;

struct RcubeData {
    RcubeHeader header;
    Tensor<cplx> complex_values;
    Tensor<double> real_values;

    bool is_complex() const { return header.dtype == kDtypeComplexF32; }
};

namespace detail {

inline void put_u32(std::ostream& os, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v & 0xff),
                          static_cast<unsigned char>((v >> 8) & 0xff),
                          static_cast<unsigned char>((v >> 16) & 0xff),
                          static_cast<unsigned char>((v >> 24) & 0xff)};
    os.write(reinterpret_cast<const char*>(b), 4);
}

inline std::uint32_t get_u32(std::istream& is) {
    unsigned char b[4];
    is.read(reinterpret_cast<char*>(b), 4);
    if (!is) throw io_error("container truncated");
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

inline void put_f32(std::ostream& os, float v) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, 4);
    put_u32(os, bits);
}

inline float get_f32(std::istream& is) {
    const std::uint32_t bits = get_u32(is);
    float v;
    std::memcpy(&v, &bits, 4);
    return v;
}

inline void write_header(std::ostream& os, std::uint32_t dtype,
                         const std::vector<std::size_t>& dims, const std::string& axes) {
    os.write("RCUB", 4);
    put_u32(os, kRcubeVersion);
    put_u32(os, dtype);
    put_u32(os, static_cast<std::uint32_t>(dims.size()));
    for (auto d : dims) put_u32(os, static_cast<std::uint32_t>(d));
    put_u32(os, static_cast<std::uint32_t>(axes.size()));
    os.write(axes.data(), static_cast<std::streamsize>(axes.size()));
}

}  // namespace detail

inline void write_rcube(const std::string& path, const Tensor<cplx>& t, const std::string& axes) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw io_error("cannot open '" + path + "' for writing");
    detail::write_header(os, kDtypeComplexF32, t.dims(), axes);
    for (std::size_t i = 0; i < t.size(); ++i) {
        detail::put_f32(os, static_cast<float>(t[i].real()));
        detail::put_f32(os, static_cast<float>(t[i].imag()));
    }
    if (!os) throw io_error("write failed for '" + path + "'");
}

inline void write_rcube(const std::string& path, const Tensor<double>& t, const std::string& axes) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw io_error("cannot open '" + path + "' for writing");
    detail::write_header(os, kDtypeRealF32, t.dims(), axes);
    for (std::size_t i = 0; i < t.size(); ++i) detail::put_f32(os, static_cast<float>(t[i]));
    if (!os) throw io_error("write failed for '" + path + "'");
}

inline RcubeData read_rcube(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw io_error("cannot open '" + path + "' for reading");
    char magic[4];
    is.read(magic, 4);
    if (!is || std::memcmp(magic, "RCUB", 4) != 0)
        throw schema_error("'" + path + "' is not a tensor container (bad magic)");
    RcubeData out;
    out.header.version = detail::get_u32(is);
    if (out.header.version != kRcubeVersion)
        throw schema_error("unsupported container version " + std::to_string(out.header.version));
    out.header.dtype = detail::get_u32(is);
    if (out.header.dtype != kDtypeComplexF32 && out.header.dtype != kDtypeRealF32)
        throw schema_error("unsupported container dtype " + std::to_string(out.header.dtype));
    const std::uint32_t rank = detail::get_u32(is);
    if (rank == 0 || rank > 8) throw schema_error("container rank out of range");
    std::vector<std::size_t> dims;
    for (std::uint32_t i = 0; i < rank; ++i) {
        out.header.dims.push_back(detail::get_u32(is));
        dims.push_back(out.header.dims.back());
    }
    const std::uint32_t tag_len = detail::get_u32(is);
    if (tag_len > 4096) throw schema_error("container tag implausibly long");
    out.header.axes.resize(tag_len);
    is.read(out.header.axes.data(), tag_len);
    if (!is) throw io_error("container truncated in tag");

    std::size_t count = 1;
    for (auto d : dims) count *= d;
    if (out.is_complex()) {
        out.complex_values = Tensor<cplx>(dims);
        for (std::size_t i = 0; i < count; ++i) {
            const float re = detail::get_f32(is);
            const float im = detail::get_f32(is);
            out.complex_values[i] = {static_cast<double>(re), static_cast<double>(im)};
        }
    } else {
        out.real_values = Tensor<double>(dims);
        for (std::size_t i = 0; i < count; ++i)
            out.real_values[i] = static_cast<double>(detail::get_f32(is));
    }
    if (!is) throw io_error("container truncated in payload");
    // Trailing bytes mean the dims lie about the payload.
    is.peek();
    if (!is.eof()) throw schema_error("container has trailing bytes beyond the declared payload");
    return out;
}

}  // namespace rcube
