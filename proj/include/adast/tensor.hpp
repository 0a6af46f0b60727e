#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "adast/errors.hpp"

namespace adast {

using Shape = std::vector<std::size_t>;

inline std::string shape_string(const Shape& shape) {
    std::string s = "[";
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(shape[i]);
    }
    return s + "]";
}

inline std::size_t shape_numel(const Shape& shape) {
    return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>{});
}

/// Dense row-major array of doubles with rank 1..3.
class Tensor {
public:
    Tensor() = default;

    explicit Tensor(Shape shape, double fill = 0.0) : shape_(std::move(shape)) {
        check_shape(shape_);
        data_.assign(shape_numel(shape_), fill);
    }

    Tensor(Shape shape, std::vector<double> data) : shape_(std::move(shape)), data_(std::move(data)) {
        check_shape(shape_);
        if (data_.size() != shape_numel(shape_))
            throw DimensionError("tensor data length " + std::to_string(data_.size()) +
                                 " does not match shape " + shape_string(shape_));
    }

    static Tensor vector(std::initializer_list<double> values) {
        return Tensor({values.size()}, std::vector<double>(values));
    }

    static Tensor zeros_like(const Tensor& other) { return Tensor(other.shape_); }

    const Shape& shape() const noexcept { return shape_; }
    std::size_t rank() const noexcept { return shape_.size(); }
    std::size_t dim(std::size_t axis) const {
        if (axis >= shape_.size())
            throw DimensionError("axis " + std::to_string(axis) + " out of range for shape " + shape_string(shape_));
        return shape_[axis];
    }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    std::span<double> data() noexcept { return data_; }
    std::span<const double> data() const noexcept { return data_; }
    double* ptr() noexcept { return data_.data(); }
    const double* ptr() const noexcept { return data_.data(); }
    const std::vector<double>& values() const noexcept { return data_; }

    double& operator[](std::size_t i) noexcept { return data_[i]; }
    double operator[](std::size_t i) const noexcept { return data_[i]; }

    double& at(std::size_t i, std::size_t j) noexcept { return data_[i * shape_[1] + j]; }
    double at(std::size_t i, std::size_t j) const noexcept { return data_[i * shape_[1] + j]; }
    double& at(std::size_t i, std::size_t j, std::size_t k) noexcept {
        return data_[(i * shape_[1] + j) * shape_[2] + k];
    }
    double at(std::size_t i, std::size_t j, std::size_t k) const noexcept {
        return data_[(i * shape_[1] + j) * shape_[2] + k];
    }

    void fill(double value) { std::fill(data_.begin(), data_.end(), value); }

    Tensor& operator+=(const Tensor& other) {
        require_same_shape(*this, other, "tensor +=");
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
        return *this;
    }

    Tensor& operator*=(double s) {
        for (double& v : data_) v *= s;
        return *this;
    }

    bool all_finite() const {
        return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
    }

    double sum() const { return std::accumulate(data_.begin(), data_.end(), 0.0); }

    Tensor reshaped(Shape shape) const {
        if (shape_numel(shape) != data_.size())
            throw DimensionError("cannot reshape " + shape_string(shape_) + " to " + shape_string(shape));
        return Tensor(std::move(shape), data_);
    }

    friend bool operator==(const Tensor& a, const Tensor& b) { return a.shape_ == b.shape_ && a.data_ == b.data_; }

    static void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
        if (a.shape_ != b.shape_)
            throw DimensionError(std::string(op) + ": shape " + shape_string(a.shape_) + " vs " +
                                 shape_string(b.shape_));
    }

    void require_rank(std::size_t rank, const char* op) const {
        if (shape_.size() != rank)
            throw DimensionError(std::string(op) + ": expected rank " + std::to_string(rank) + ", got shape " +
                                 shape_string(shape_));
    }

private:
    static void check_shape(const Shape& shape) {
        if (shape.empty() || shape.size() > 3)
            throw DimensionError("tensor rank must be 1..3, got shape " + shape_string(shape));
        for (std::size_t d : shape)
            if (d == 0) throw DimensionError("tensor dimensions must be positive, got " + shape_string(shape));
    }

    Shape shape_;
    std::vector<double> data_;
};

/// [A, B, C] -> [A, C, B].
inline Tensor swap_last_axes(const Tensor& x) {
    x.require_rank(3, "swap_last_axes");
    const std::size_t a = x.dim(0), b = x.dim(1), c = x.dim(2);
    Tensor out({a, c, b});
    for (std::size_t i = 0; i < a; ++i)
        for (std::size_t j = 0; j < b; ++j)
            for (std::size_t k = 0; k < c; ++k) out.at(i, k, j) = x.at(i, j, k);
    return out;
}

/// out[M,N] += a[M,K] * b[K,N]
inline void gemm_acc(std::size_t m, std::size_t k, std::size_t n, const double* a, const double* b, double* out) {
    for (std::size_t i = 0; i < m; ++i) {
        double* row = out + i * n;
        for (std::size_t p = 0; p < k; ++p) {
            const double av = a[i * k + p];
            if (av == 0.0) continue;
            const double* brow = b + p * n;
            for (std::size_t j = 0; j < n; ++j) row[j] += av * brow[j];
        }
    }
}

/// out[K,N] += a[M,K]^T * b[M,N]
inline void gemm_at_b_acc(std::size_t m, std::size_t k, std::size_t n, const double* a, const double* b,
                          double* out) {
    for (std::size_t i = 0; i < m; ++i) {
        const double* brow = b + i * n;
        for (std::size_t p = 0; p < k; ++p) {
            const double av = a[i * k + p];
            if (av == 0.0) continue;
            double* orow = out + p * n;
            for (std::size_t j = 0; j < n; ++j) orow[j] += av * brow[j];
        }
    }
}

/// out[M,K] += a[M,N] * b[K,N]^T
inline void gemm_a_bt_acc(std::size_t m, std::size_t n, std::size_t k, const double* a, const double* b,
                          double* out) {
    for (std::size_t i = 0; i < m; ++i) {
        const double* arow = a + i * n;
        for (std::size_t p = 0; p < k; ++p) {
            const double* brow = b + p * n;
            double s = 0.0;
            for (std::size_t j = 0; j < n; ++j) s += arow[j] * brow[j];
            out[i * k + p] += s;
        }
    }
}

}  // namespace adast
