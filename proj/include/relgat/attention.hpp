// Copyright (c) 2026, The relgat Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>

#include "relgat/numerics.hpp"

// Builds with RELGAT_FAULT_GRADIENT_SCALE defined return gradients scaled by
// that factor. Used only to prove the gradient checker catches a bad backward.
#ifndef RELGAT_FAULT_GRADIENT_SCALE
#define RELGAT_FAULT_GRADIENT_SCALE 1.0
#endif

namespace relgat {

inline constexpr double kGradientScale = RELGAT_FAULT_GRADIENT_SCALE;

/// Attention coefficients w_ij (row i = receiving node, column j = source),
/// the raw similarity scores and, for the implicit graph, the geometry gates.
/// A row of `weights` either sums to one or is entirely zero.
struct AttentionMap {
  Matrix weights;
  Matrix raw_similarity;
  std::optional<Matrix> geometry_gate;
};

struct GatOutput {
  Matrix v_star;
  AttentionMap attention;
};

/// Residual refinement v' = v + v*.
inline Matrix refine(const Matrix& features, const Matrix& v_star) {
  require_same_shape(features, v_star, "refine");
  return features + v_star;
}

}  // namespace relgat
