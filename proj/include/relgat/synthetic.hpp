// Copyright (c) 2026, The relgat Authors
// SPDX-License-Identifier: Apache-2.0
//
// Seeded random scenes for property tests, gradient checks and demos.

#pragma once

#include <cstddef>
#include <vector>

#include "relgat/geometry.hpp"
#include "relgat/graph.hpp"
#include "relgat/rng.hpp"
#include "relgat/typed_gat.hpp"

namespace relgat {

struct SceneExtent {
  double width = 640.0;
  double height = 480.0;
  double diagonal() const { return image_diagonal(width, height); }
};

inline std::vector<DetectedObject> random_boxes(Rng& rng, std::size_t n,
                                                const SceneExtent& scene = {}) {
  std::vector<DetectedObject> boxes;
  boxes.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    DetectedObject o;
    o.cx = rng.uniform(0.0, scene.width);
    o.cy = rng.uniform(0.0, scene.height);
    o.w = rng.uniform(0.05, 0.5) * scene.width;
    o.h = rng.uniform(0.05, 0.5) * scene.height;
    o.category = static_cast<int>(rng.below(80));
    boxes.push_back(o);
  }
  return boxes;
}

/// One 16-way prediction per ordered pair. With probability
/// `no_relation_rate` the argmax is class 0; otherwise a random relation class
/// gets `peak` of the mass and the rest is spread evenly.
inline std::vector<EdgePrediction> random_semantic_predictions(
    Rng& rng, std::size_t n, double no_relation_rate = 0.4, double peak = 0.6) {
  std::vector<EdgePrediction> out;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const int cls = rng.uniform() < no_relation_rate
                          ? 0
                          : 1 + static_cast<int>(rng.below(kSemanticClassCount - 1));
      EdgePrediction p{i, j,
                       std::vector<double>(kSemanticClassCount,
                                           (1.0 - peak) / (kSemanticClassCount - 1))};
      p.probs[static_cast<std::size_t>(cls)] = peak;
      out.push_back(std::move(p));
    }
  }
  return out;
}

/// Glorot matrices with biases and score offsets drawn from U(-0.5, 0.5), so
/// that every term of the typed attention is exercised.
inline TypedGatParams random_typed_params(Rng& rng, std::size_t d, GraphVariant v) {
  const auto labels = labels_for(v);
  auto p = TypedGatParams::init(rng, d, labels);
  for (auto& [label, bias] : p.b_lab) {
    for (double& x : bias.data()) x = rng.uniform(-0.5, 0.5);
  }
  for (auto& [label, offset] : p.c_lab) offset = rng.uniform(-0.5, 0.5);
  return p;
}

}  // namespace relgat
