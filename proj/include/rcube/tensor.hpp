#pragma once

#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <vector>

#include "rcube/common.hpp"

namespace rcube {

// Dense row-major tensor; the last axis varies fastest. This is the one
// in-memory layout the whole library uses, and it matches the file container
// byte order, so serialization is a flat copy.
template <class T>
class Tensor {
public:
    Tensor() = default;

    explicit Tensor(std::vector<std::size_t> dims, T fill = T{})
        : dims_(std::move(dims)), data_(count(dims_), fill) {}

    Tensor(std::initializer_list<std::size_t> dims, T fill = T{})
        : Tensor(std::vector<std::size_t>(dims), fill) {}

    std::size_t rank() const { return dims_.size(); }
    const std::vector<std::size_t>& dims() const { return dims_; }
    std::size_t dim(std::size_t axis) const { return dims_.at(axis); }
    std::size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    T* data() { return data_.data(); }
    const T* data() const { return data_.data(); }

    T& operator[](std::size_t flat) { return data_[flat]; }
    const T& operator[](std::size_t flat) const { return data_[flat]; }

    template <class... Ix>
    T& operator()(Ix... ix) {
        return data_[offset({static_cast<std::size_t>(ix)...})];
    }

    template <class... Ix>
    const T& operator()(Ix... ix) const {
        return data_[offset({static_cast<std::size_t>(ix)...})];
    }

    // Bounds-checked variant for code paths fed by external input.
    T& at(const std::vector<std::size_t>& ix) {
        return data_[checked_offset(ix)];
    }
    const T& at(const std::vector<std::size_t>& ix) const {
        return data_[checked_offset(ix)];
    }

    void fill(T v) { std::fill(data_.begin(), data_.end(), v); }

    bool same_shape(const Tensor& other) const { return dims_ == other.dims_; }

    std::size_t offset(std::initializer_list<std::size_t> ix) const {
        std::size_t flat = 0;
        auto it = ix.begin();
        for (std::size_t a = 0; a < dims_.size(); ++a, ++it) flat = flat * dims_[a] + *it;
        return flat;
    }

    friend bool operator==(const Tensor& a, const Tensor& b) {
        return a.dims_ == b.dims_ && a.data_ == b.data_;
    }

private:
    static std::size_t count(const std::vector<std::size_t>& dims) {
        std::size_t n = dims.empty() ? 0 : 1;
        for (auto d : dims) n *= d;
        return n;
    }

    std::size_t checked_offset(const std::vector<std::size_t>& ix) const {
        if (ix.size() != dims_.size()) throw domain_error("tensor index rank mismatch");
        std::size_t flat = 0;
        for (std::size_t a = 0; a < dims_.size(); ++a) {
            if (ix[a] >= dims_[a]) throw domain_error("tensor index out of bounds");
            flat = flat * dims_[a] + ix[a];
        }
        return flat;
    }

    std::vector<std::size_t> dims_;
    std::vector<T> data_;
};

}  // namespace rcube
