// Copyright (c) 2026, The relgat Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <vector>

#include "relgat/relgat.hpp"

namespace relgat::fixtures {

inline Matrix random_features(Rng& rng, std::size_t n, std::size_t d) {
  return rng.uniform_matrix(n, d, -1.0, 1.0);
}

inline std::vector<std::size_t> random_permutation(Rng& rng, std::size_t n) {
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  for (std::size_t k = n; k > 1; --k) std::swap(perm[k - 1], perm[rng.below(k)]);
  return perm;
}

/// Row perm[k] of the result is row k of m.
inline Matrix permute_rows(const Matrix& m, const std::vector<std::size_t>& perm) {
  Matrix out(m.rows(), m.cols());
  for (std::size_t k = 0; k < m.rows(); ++k) {
    std::copy(m.row(k).begin(), m.row(k).end(), out.row(perm[k]).begin());
  }
  return out;
}

inline Matrix permute_both(const Matrix& m, const std::vector<std::size_t>& perm) {
  Matrix out(m.rows(), m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) out(perm[r], perm[c]) = m(r, c);
  }
  return out;
}

/// A typed graph of the given variant over random boxes.
inline RelationGraph random_typed_graph(Rng& rng, GraphVariant v,
                                        const std::vector<DetectedObject>& boxes,
                                        const SceneExtent& scene = {}) {
  if (v == GraphVariant::spatial) return build_spatial(boxes, scene.diagonal());
  return build_semantic(boxes.size(), random_semantic_predictions(rng, boxes.size()));
}

inline double max_row_sum_error(const Matrix& weights) {
  double worst = 0.0;
  for (std::size_t i = 0; i < weights.rows(); ++i) {
    double sum = 0.0;
    bool any = false;
    for (double w : weights.row(i)) {
      sum += w;
      any = any || w != 0.0;
    }
    if (any) worst = std::max(worst, std::abs(sum - 1.0));
  }
  return worst;
}

}  // namespace relgat::fixtures
