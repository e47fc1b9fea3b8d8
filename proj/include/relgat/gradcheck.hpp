// Copyright (c) 2026, The relgat Authors
// SPDX-License-Identifier: Apache-2.0
//
// End-to-end gradient check for one GAT variant on a seeded random scene,
// with the scalar objective L = sum(R .* v*) for a random upstream R.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "relgat/finite_diff.hpp"
#include "relgat/implicit_gat.hpp"
#include "relgat/params_io.hpp"
#include "relgat/synthetic.hpp"
#include "relgat/typed_gat.hpp"

namespace relgat {

inline constexpr double kGradcheckTolerance = 1e-4;
// Gate logits closer than this to the ReLU kink are moved away before
// checking, since a finite-difference probe could straddle the kink.
inline constexpr double kKinkMargin = 1e-4;

struct GradcheckOptions {
  GraphVariant variant = GraphVariant::implicit;
  std::uint64_t seed = 0;
  std::size_t n = 5;
  std::size_t d = 16;
  std::size_t d_g = 16;
  double step = kDefaultFiniteDiffStep;
};

struct GradcheckResult {
  std::vector<GradReport> reports;
  bool passed = true;
  double worst_error = 0.0;
};

namespace detail {

inline double min_gate_margin(std::span<const DetectedObject> objects,
                              const RelationGraph& g, const ImplicitGatParams& p) {
  double margin = INFINITY;
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    for (const Neighbor& nb : g.in_neighbors(i)) {
      const auto e = sinusoidal_embed(geometry_feature(objects[i], objects[nb.src]),
                                      p.embed_width());
      margin = std::min(margin, std::abs(dot(p.W_bG.row(0), e)));
    }
  }
  return margin;
}

inline double weighted_sum(const Matrix& upstream, const Matrix& v_star) {
  double acc = 0.0;
  for (std::size_t k = 0; k < v_star.size(); ++k) {
    acc += upstream.data()[k] * v_star.data()[k];
  }
  return acc;
}

inline GradcheckResult summarize(std::vector<GradReport> reports) {
  GradcheckResult result;
  for (const auto& r : reports) {
    result.worst_error = std::max(result.worst_error, r.max_relative_error);
    if (!r.valid || !(r.max_relative_error < kGradcheckTolerance)) {
      result.passed = false;
    }
  }
  result.reports = std::move(reports);
  return result;
}

}  // namespace detail

inline GradcheckResult run_gradcheck(const GradcheckOptions& opt) {
  Rng rng(opt.seed);
  const SceneExtent scene;
  auto objects = random_boxes(rng, opt.n, scene);
  ParamSet params;
  params["V"] = rng.uniform_matrix(opt.n, opt.d, -1.0, 1.0);
  const Matrix upstream = rng.uniform_matrix(opt.n, opt.d, -1.0, 1.0);

  if (opt.variant == GraphVariant::implicit) {
    const auto graph = build_implicit(opt.n);
    const auto init = ImplicitGatParams::init(rng, opt.d, opt.d_g);
    for (int attempt = 0; attempt < 1000 &&
                          detail::min_gate_margin(objects, graph, init) < kKinkMargin;
         ++attempt) {
      for (auto& o : objects) {
        o.cx += rng.uniform(-1e-3, 1e-3) * scene.diagonal();
        o.cy += rng.uniform(-1e-3, 1e-3) * scene.diagonal();
      }
    }
    params.merge(implicit_tensors(init));
    auto objective = [&](const ParamSet& set) {
      const auto p = implicit_from_tensors(set);
      return detail::weighted_sum(
          upstream, implicit_forward(set.at("V"), objects, graph, p).v_star);
    };
    const auto grads = implicit_backward(params.at("V"), objects, graph,
                                         implicit_from_tensors(params), upstream);
    ParamSet analytic = implicit_tensors(grads);
    analytic["V"] = grads.V;
    return detail::summarize(finite_diff_check(objective, params, analytic, opt.step));
  }

  const std::string prefix = variant_name(opt.variant);
  const RelationGraph graph =
      opt.variant == GraphVariant::spatial
          ? build_spatial(objects, scene.diagonal())
          : build_semantic(opt.n, random_semantic_predictions(rng, opt.n));
  params.merge(typed_tensors(random_typed_params(rng, opt.d, opt.variant), prefix));
  auto objective = [&](const ParamSet& set) {
    const auto p = typed_from_tensors(set, opt.variant, prefix);
    return detail::weighted_sum(upstream, typed_forward(set.at("V"), graph, p).v_star);
  };
  const auto grads =
      typed_backward(params.at("V"), graph,
                     typed_from_tensors(params, opt.variant, prefix), upstream);
  ParamSet analytic = typed_tensors(grads, prefix);
  analytic["V"] = grads.V;
  return detail::summarize(finite_diff_check(objective, params, analytic, opt.step));
}

}  // namespace relgat
