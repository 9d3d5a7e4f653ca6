// Copyright 2026 The PGKET Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PGKET_TENSOR_HPP_
#define PGKET_TENSOR_HPP_

#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <numeric>
#include <utility>
#include <vector>

#include "pgket/errors.hpp"

namespace pgket {

/// Dense row-major real tensor with 64-bit scalars. The row-major layout is
/// the interchange convention across the whole library.
class RealTensor {
 public:
  RealTensor() = default;

  /// Zero-initialized tensor of the given extents.
  explicit RealTensor(std::vector<std::size_t> shape)
      : shape_(std::move(shape)), data_(count(shape_), 0.0) {}

  RealTensor(std::vector<std::size_t> shape, std::vector<double> data)
      : shape_(std::move(shape)), data_(std::move(data)) {
    if (data_.size() != count(shape_)) {
      throw ShapeError("RealTensor: data length does not match extents");
    }
  }

  static RealTensor zeros(std::vector<std::size_t> shape) {
    return RealTensor(std::move(shape));
  }

  static RealTensor scalar(double v) { return RealTensor({1}, {v}); }

  static RealTensor row_vector(std::vector<double> v) {
    std::size_t n = v.size();
    return RealTensor({1, n}, std::move(v));
  }

  static RealTensor vector(std::vector<double> v) {
    std::size_t n = v.size();
    return RealTensor({n}, std::move(v));
  }

  static RealTensor matrix(std::size_t rows, std::size_t cols,
                           std::vector<double> data) {
    return RealTensor({rows, cols}, std::move(data));
  }

  static RealTensor identity(std::size_t n) {
    RealTensor out({n, n});
    for (std::size_t i = 0; i < n; ++i) out(i, i) = 1.0;
    return out;
  }

  const std::vector<std::size_t>& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t size() const { return data_.size(); }
  std::size_t extent(std::size_t axis) const { return shape_.at(axis); }

  /// Extent helpers for the ubiquitous 2-D case.
  std::size_t rows() const { return extent(0); }
  std::size_t cols() const { return extent(1); }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  std::vector<double>& values() { return data_; }
  const std::vector<double>& values() const { return data_; }

  double& operator[](std::size_t flat) { return data_[flat]; }
  double operator[](std::size_t flat) const { return data_[flat]; }

  double& operator()(std::size_t i) { return data_[i]; }
  double operator()(std::size_t i) const { return data_[i]; }

  double& operator()(std::size_t i, std::size_t j) {
    return data_[i * shape_[1] + j];
  }
  double operator()(std::size_t i, std::size_t j) const {
    return data_[i * shape_[1] + j];
  }

  bool same_shape(const RealTensor& other) const {
    return shape_ == other.shape_;
  }

  bool all_finite() const {
    for (double v : data_) {
      if (!std::isfinite(v)) return false;
    }
    return true;
  }

  void fill(double v) { data_.assign(data_.size(), v); }

  static std::size_t count(const std::vector<std::size_t>& shape) {
    std::size_t n = 1;
    for (std::size_t e : shape) n *= e;
    return n;
  }

 private:
  std::vector<std::size_t> shape_;
  std::vector<double> data_;
};

/// Dense row-major complex matrix (pairs of 64-bit reals).
class ComplexMatrix {
 public:
  using Scalar = std::complex<double>;

  ComplexMatrix() = default;

  ComplexMatrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, Scalar(0.0, 0.0)) {}

  ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<Scalar> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
      throw ShapeError("ComplexMatrix: data length does not match extents");
    }
  }

  static ComplexMatrix identity(std::size_t n) {
    ComplexMatrix out(n, n);
    for (std::size_t i = 0; i < n; ++i) out(i, i) = Scalar(1.0, 0.0);
    return out;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  Scalar* data() { return data_.data(); }
  const Scalar* data() const { return data_.data(); }

  Scalar& operator()(std::size_t r, std::size_t c) {
    return data_[r * cols_ + c];
  }
  Scalar operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }

  bool all_finite() const {
    for (const Scalar& v : data_) {
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
    }
    return true;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<Scalar> data_;
};

}  // namespace pgket

#endif  // PGKET_TENSOR_HPP_
