// Copyright (c) 2026, The relgat Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "relgat/numerics.hpp"

namespace relgat {

// Draws are derived directly from mt19937_64 output bits rather than through
// <random> distributions, whose algorithms are implementation-defined. This
// keeps seeded parameter files identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound) {
    // Rejection sampling to avoid modulo bias.
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % bound;
  }

  /// Standard normal via Box-Muller.
  double normal() {
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
  }

  Matrix uniform_matrix(std::size_t rows, std::size_t cols, double lo,
                        double hi) {
    Matrix m(rows, cols);
    for (double& v : m.data()) v = uniform(lo, hi);
    return m;
  }

  /// Glorot/Xavier uniform: U(-a, a) with a = sqrt(6 / (fan_in + fan_out)).
  Matrix glorot(std::size_t fan_out, std::size_t fan_in) {
    const double limit =
        std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    return uniform_matrix(fan_out, fan_in, -limit, limit);
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace relgat
