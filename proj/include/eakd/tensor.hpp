#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "eakd/errors.hpp"

namespace eakd {

// Dense row-major tensor of 64-bit floats. Plain value type; gradients live
// on graph nodes (see autograd.hpp), not here.
struct Tensor {
    std::vector<std::size_t> shape;
    std::vector<double> data;

    Tensor() = default;
    explicit Tensor(std::vector<std::size_t> s) : shape(std::move(s)) {
        data.assign(element_count(shape), 0.0);
    }
    Tensor(std::vector<std::size_t> s, std::vector<double> d) : shape(std::move(s)), data(std::move(d)) {
        if (element_count(shape) != data.size()) {
            throw DimensionError("tensor data length " + std::to_string(data.size()) +
                                 " does not match shape " + shape_string(shape));
        }
    }

    static std::size_t element_count(const std::vector<std::size_t>& s) {
        std::size_t n = 1;
        for (std::size_t d : s) n *= d;
        return n;
    }

    static std::string shape_string(const std::vector<std::size_t>& s) {
        std::string out = "[";
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (i) out += "x";
            out += std::to_string(s[i]);
        }
        return out + "]";
    }

    static Tensor zeros(std::vector<std::size_t> s) { return Tensor(std::move(s)); }

    static Tensor full(std::vector<std::size_t> s, double v) {
        Tensor t(std::move(s));
        for (double& x : t.data) x = v;
        return t;
    }

    static Tensor scalar(double v) { return Tensor({1}, {v}); }

    static Tensor matrix(std::size_t rows, std::size_t cols, std::vector<double> d) {
        return Tensor({rows, cols}, std::move(d));
    }

    static Tensor vector(std::vector<double> d) {
        std::size_t n = d.size();
        return Tensor({n}, std::move(d));
    }

    static Tensor identity(std::size_t n) {
        Tensor t({n, n});
        for (std::size_t i = 0; i < n; ++i) t.data[i * n + i] = 1.0;
        return t;
    }

    std::size_t size() const { return data.size(); }
    bool is_scalar() const { return data.size() == 1; }
    bool is_matrix() const { return shape.size() == 2; }

    std::size_t rows() const { return shape.empty() ? 1 : shape[0]; }
    std::size_t cols() const { return shape.size() < 2 ? 1 : shape[1]; }

    double& at(std::size_t r, std::size_t c) { return data[r * cols() + c]; }
    double at(std::size_t r, std::size_t c) const { return data[r * cols() + c]; }

    std::string shape_str() const { return shape_string(shape); }

    bool same_shape(const Tensor& o) const { return shape == o.shape; }
};

inline void require_matrix(const Tensor& t, const char* what) {
    if (!t.is_matrix()) {
        throw DimensionError(std::string(what) + " must be 2-D, got " + t.shape_str());
    }
}

} // namespace eakd
