// Copyright (c) 2026, The relgat Authors
// SPDX-License-Identifier: Apache-2.0
//
// Dense row-major matrices in double precision and a max-shifted softmax.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "relgat/errors.hpp"

namespace relgat {

class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  Matrix(std::initializer_list<std::initializer_list<double>> init) {
    rows_ = init.size();
    cols_ = rows_ == 0 ? 0 : init.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto& row : init) {
      if (row.size() != cols_) {
        throw ShapeError("ragged matrix initializer");
      }
      data_.insert(data_.end(), row.begin(), row.end());
    }
  }

  static Matrix from_data(std::size_t rows, std::size_t cols,
                          std::vector<double> data) {
    if (data.size() != rows * cols) {
      throw ShapeError("matrix data length " + std::to_string(data.size()) +
                       " does not match shape " + std::to_string(rows) + "x" +
                       std::to_string(cols));
    }
    Matrix m;
    m.rows_ = rows;
    m.cols_ = cols;
    m.data_ = std::move(data);
    return m;
  }

  static Matrix row_vector(std::span<const double> values) {
    return from_data(1, values.size(),
                     std::vector<double>(values.begin(), values.end()));
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const {
    return data_[r * cols_ + c];
  }

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }
  const std::vector<double>& values() const noexcept { return data_; }

  std::span<double> row(std::size_t r) {
    return std::span<double>(data_).subspan(r * cols_, cols_);
  }
  std::span<const double> row(std::size_t r) const {
    return std::span<const double>(data_).subspan(r * cols_, cols_);
  }

  Matrix transposed() const {
    Matrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r) {
      for (std::size_t c = 0; c < cols_; ++c) {
        t(c, r) = (*this)(r, c);
      }
    }
    return t;
  }

  bool all_finite() const {
    return std::all_of(data_.begin(), data_.end(),
                       [](double v) { return std::isfinite(v); });
  }

  Matrix& operator+=(const Matrix& other);
  Matrix& operator-=(const Matrix& other);
  Matrix& operator*=(double s) {
    for (double& v : data_) v *= s;
    return *this;
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

inline std::string shape_string(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

inline void require_shape(const Matrix& m, std::size_t rows, std::size_t cols,
                          const std::string& what) {
  if (m.rows() != rows || m.cols() != cols) {
    throw ShapeError(what + " has shape " + shape_string(m) + ", expected " +
                     std::to_string(rows) + "x" + std::to_string(cols));
  }
}

inline void require_same_shape(const Matrix& a, const Matrix& b,
                               const std::string& what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError(what + ": shapes " + shape_string(a) + " and " +
                     shape_string(b) + " differ");
  }
}

inline Matrix& Matrix::operator+=(const Matrix& other) {
  require_same_shape(*this, other, "matrix addition");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
  return *this;
}

inline Matrix& Matrix::operator-=(const Matrix& other) {
  require_same_shape(*this, other, "matrix subtraction");
  for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= other.data_[k];
  return *this;
}

inline Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
inline Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
inline Matrix operator*(double s, Matrix a) { return a *= s; }

inline double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) acc += a[k] * b[k];
  return acc;
}

/// a · b. Accumulation order is fixed (i, k, j) so results are reproducible.
inline Matrix matmul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw ShapeError("matmul: cannot multiply " + shape_string(a) + " by " +
                     shape_string(b));
  }
  Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto out_row = out.row(i);
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      auto b_row = b.row(k);
      for (std::size_t j = 0; j < b.cols(); ++j) out_row[j] += aik * b_row[j];
    }
  }
  return out;
}

/// a · bᵀ without materializing the transpose.
inline Matrix matmul_transposed(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) {
    throw ShapeError("matmul_transposed: cannot multiply " + shape_string(a) +
                     " by transpose of " + shape_string(b));
  }
  Matrix out(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < b.rows(); ++j) {
      out(i, j) = dot(a.row(i), b.row(j));
    }
  }
  return out;
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) {
  require_same_shape(a, b, "max_abs_diff");
  double worst = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    worst = std::max(worst, std::abs(a.data()[k] - b.data()[k]));
  }
  return worst;
}

/// Softmax over the unmasked entries of `logits`, computed as
/// exp(x - max) / sum. Masked entries (mask[k] == false) come out exactly 0.
inline std::vector<double> stable_softmax(
    std::span<const double> logits,
    std::optional<std::span<const bool>> mask = std::nullopt) {
  if (mask && mask->size() != logits.size()) {
    throw ShapeError("stable_softmax: mask length " +
                     std::to_string(mask->size()) + " vs logits length " +
                     std::to_string(logits.size()));
  }
  auto active = [&](std::size_t k) { return !mask || (*mask)[k]; };

  bool any = false;
  double peak = 0.0;
  for (std::size_t k = 0; k < logits.size(); ++k) {
    if (!active(k)) continue;
    if (!std::isfinite(logits[k])) {
      throw DomainError("stable_softmax: non-finite logit at index " +
                        std::to_string(k));
    }
    peak = any ? std::max(peak, logits[k]) : logits[k];
    any = true;
  }
  if (!any) {
    throw EmptySupportError("stable_softmax: no unmasked entries");
  }

  std::vector<double> out(logits.size(), 0.0);
  double total = 0.0;
  for (std::size_t k = 0; k < logits.size(); ++k) {
    if (!active(k)) continue;
    out[k] = std::exp(logits[k] - peak);
    total += out[k];
  }
  for (double& v : out) v /= total;
  return out;
}

}  // namespace relgat
