// Copyright (c) 2026, The relgat Authors
// SPDX-License-Identifier: Apache-2.0
//
// Central-difference gradient checker for hand-derived backward passes.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "relgat/numerics.hpp"

namespace relgat {

/// Named parameter tensors, ordered by name so reports are deterministic.
using ParamSet = std::map<std::string, Matrix>;

struct GradReport {
  std::string parameter_name;
  double max_relative_error = 0.0;
  std::size_t worst_row = 0;
  std::size_t worst_col = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  /// False when the objective was non-finite at some perturbed point.
  bool valid = true;
};

inline constexpr double kDefaultFiniteDiffStep = 1e-5;
inline constexpr double kRelativeErrorFloor = 1e-8;

inline double relative_error(double analytic, double numeric) {
  const double denom =
      std::max({std::abs(analytic), std::abs(numeric), kRelativeErrorFloor});
  return std::abs(analytic - numeric) / denom;
}

/// For every parameter in `params`, compares `analytic` against
/// (f(p + h e_k) - f(p - h e_k)) / 2h entry by entry and reports the largest
/// relative error. Parameters missing from `analytic` are a shape error.
inline std::vector<GradReport> finite_diff_check(
    const std::function<double(const ParamSet&)>& f, const ParamSet& params,
    const ParamSet& analytic, double step = kDefaultFiniteDiffStep) {
  if (!(step > 0.0)) {
    throw DomainError("finite_diff_check: step must be positive");
  }
  std::vector<GradReport> reports;
  ParamSet probe = params;
  for (const auto& [name, value] : params) {
    auto it = analytic.find(name);
    if (it == analytic.end()) {
      throw ShapeError("finite_diff_check: no analytic gradient for '" + name +
                       "'");
    }
    require_same_shape(value, it->second, "gradient for '" + name + "'");

    GradReport report;
    report.parameter_name = name;
    Matrix& slot = probe.at(name);
    for (std::size_t k = 0; k < value.size(); ++k) {
      const double original = value.data()[k];
      slot.data()[k] = original + step;
      const double plus = f(probe);
      slot.data()[k] = original - step;
      const double minus = f(probe);
      slot.data()[k] = original;

      if (!std::isfinite(plus) || !std::isfinite(minus)) {
        report.valid = false;
        continue;
      }
      const double numeric = (plus - minus) / (2.0 * step);
      const double a = it->second.data()[k];
      const double err = relative_error(a, numeric);
      if (k == 0 || err > report.max_relative_error) {
        report.max_relative_error = err;
        report.worst_row = k / value.cols();
        report.worst_col = k % value.cols();
        report.worst_analytic = a;
        report.worst_numeric = numeric;
      }
    }
    reports.push_back(std::move(report));
  }
  return reports;
}

}  // namespace relgat
