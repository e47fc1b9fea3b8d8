// Copyright (c) 2026, The relgat Authors
// SPDX-License-Identifier: Apache-2.0
//
// Implicit-relation graph attention with a geometry gate.
//
//   w^v_ij = (W_K v_i)^T (W_Q v_j)
//   w^b_ij = max(0, W_bG . embed(geometry_feature(o_i, o_j)))
//   w_ij   = w^b_ij exp(w^v_ij) / sum_k w^b_ik exp(w^v_ik)
//   v*_i   = sum_j w_ij W v_j
//
// The sums run over the incoming edges of i (all j != i in a full implicit
// graph). A node whose gates are all zero gets v*_i = 0 and a zero row.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "relgat/attention.hpp"
#include "relgat/geometry.hpp"
#include "relgat/graph.hpp"
#include "relgat/numerics.hpp"
#include "relgat/rng.hpp"

namespace relgat {

struct ImplicitGatParams {
  Matrix W;     // d x d
  Matrix W_K;   // d x d
  Matrix W_Q;   // d x d
  Matrix W_bG;  // 1 x d_g

  std::size_t dim() const { return W.rows(); }
  std::size_t embed_width() const { return W_bG.cols(); }

  void validate() const {
    const std::size_t d = dim();
    require_shape(W, d, d, "implicit.W");
    require_shape(W_K, d, d, "implicit.W_K");
    require_shape(W_Q, d, d, "implicit.W_Q");
    require_shape(W_bG, 1, W_bG.cols(), "implicit.W_bG");
    validate_embed_width(embed_width());
  }

  static ImplicitGatParams init(Rng& rng, std::size_t d, std::size_t d_g) {
    validate_embed_width(d_g);
    ImplicitGatParams p;
    p.W = rng.glorot(d, d);
    p.W_K = rng.glorot(d, d);
    p.W_Q = rng.glorot(d, d);
    p.W_bG = rng.glorot(1, d_g);
    return p;
  }
};

struct ImplicitGradients {
  Matrix W;
  Matrix W_K;
  Matrix W_Q;
  Matrix W_bG;
  Matrix V;
};

namespace detail {

struct ImplicitEntry {
  std::size_t src = 0;
  double similarity = 0.0;
  double gate_logit = 0.0;
  double gate = 0.0;
  double weight = 0.0;
  // exp(similarity - row max) / normalizer, i.e. weight / gate.
  double unit_weight = 0.0;
  std::vector<double> embedding;
};

struct ImplicitState {
  Matrix U;  // rows W v_j
  Matrix K;  // rows W_K v_i
  Matrix Q;  // rows W_Q v_j
  std::vector<std::vector<ImplicitEntry>> rows;
};

inline void check_implicit_inputs(const Matrix& V,
                                  std::span<const DetectedObject> objects,
                                  const RelationGraph& g,
                                  const ImplicitGatParams& p) {
  p.validate();
  if (g.variant() != GraphVariant::implicit) {
    throw ConfigError("implicit GAT requires an implicit graph, got " +
                      variant_name(g.variant()));
  }
  if (V.rows() != g.node_count() || objects.size() != g.node_count()) {
    throw ShapeError("implicit GAT: " + std::to_string(V.rows()) +
                     " feature rows, " + std::to_string(objects.size()) +
                     " objects, " + std::to_string(g.node_count()) +
                     " graph nodes");
  }
  if (V.cols() != p.dim()) {
    throw ShapeError("implicit GAT: features are " + shape_string(V) +
                     " but parameters expect d=" + std::to_string(p.dim()));
  }
  for (const DetectedObject& o : objects) validate_box(o);
}

inline ImplicitState implicit_state(const Matrix& V,
                                    std::span<const DetectedObject> objects,
                                    const RelationGraph& g,
                                    const ImplicitGatParams& p) {
  check_implicit_inputs(V, objects, g, p);
  ImplicitState s;
  s.U = matmul_transposed(V, p.W);
  s.K = matmul_transposed(V, p.W_K);
  s.Q = matmul_transposed(V, p.W_Q);
  s.rows.resize(g.node_count());

  const auto gate_row = p.W_bG.row(0);
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    auto& row = s.rows[i];
    bool any = false;
    double peak = 0.0;
    for (const Neighbor& nb : g.in_neighbors(i)) {
      ImplicitEntry e;
      e.src = nb.src;
      e.similarity = dot(s.K.row(i), s.Q.row(nb.src));
      e.embedding = sinusoidal_embed(
          geometry_feature(objects[i], objects[nb.src]), p.embed_width());
      e.gate_logit = dot(gate_row, e.embedding);
      e.gate = std::max(0.0, e.gate_logit);
      if (e.gate > 0.0) {
        peak = any ? std::max(peak, e.similarity) : e.similarity;
        any = true;
      }
      row.push_back(std::move(e));
    }
    if (!any) continue;

    double total = 0.0;
    for (auto& e : row) {
      if (e.gate > 0.0) {
        e.unit_weight = std::exp(e.similarity - peak);
        e.weight = e.gate * e.unit_weight;
        total += e.weight;
      }
    }
    for (auto& e : row) {
      if (e.gate > 0.0) {
        e.unit_weight /= total;
        e.weight /= total;
      }
    }
  }
  return s;
}

}  // namespace detail

inline GatOutput implicit_forward(const Matrix& V,
                                  std::span<const DetectedObject> objects,
                                  const RelationGraph& g,
                                  const ImplicitGatParams& p) {
  const auto s = detail::implicit_state(V, objects, g, p);
  const std::size_t n = g.node_count();
  GatOutput out{Matrix(n, p.dim()),
                {Matrix(n, n), Matrix(n, n), Matrix(n, n)}};
  for (std::size_t i = 0; i < n; ++i) {
    auto target = out.v_star.row(i);
    for (const auto& e : s.rows[i]) {
      out.attention.weights(i, e.src) = e.weight;
      out.attention.raw_similarity(i, e.src) = e.similarity;
      (*out.attention.geometry_gate)(i, e.src) = e.gate;
      if (e.weight == 0.0) continue;
      const auto u = s.U.row(e.src);
      for (std::size_t c = 0; c < target.size(); ++c) target[c] += e.weight * u[c];
    }
  }
  return out;
}

/// Gradients of L with respect to every parameter and the features, given
/// upstream = dL/dv*. The ReLU gate uses subgradient 0 at 0.
inline ImplicitGradients implicit_backward(const Matrix& V,
                                           std::span<const DetectedObject> objects,
                                           const RelationGraph& g,
                                           const ImplicitGatParams& p,
                                           const Matrix& upstream) {
  const auto s = detail::implicit_state(V, objects, g, p);
  require_same_shape(upstream, V, "implicit_backward upstream gradient");
  const std::size_t n = g.node_count();
  const std::size_t d = p.dim();

  Matrix dU(n, d), dK(n, d), dQ(n, d);
  Matrix dWbG(1, p.embed_width());
  for (std::size_t i = 0; i < n; ++i) {
    const auto grad = upstream.row(i);
    const auto& row = s.rows[i];

    std::vector<double> dweight(row.size(), 0.0);
    double mean = 0.0;
    for (std::size_t k = 0; k < row.size(); ++k) {
      const auto& e = row[k];
      if (e.gate <= 0.0) continue;
      dweight[k] = dot(grad, s.U.row(e.src));
      mean += e.weight * dweight[k];
      auto du = dU.row(e.src);
      for (std::size_t c = 0; c < d; ++c) du[c] += e.weight * grad[c];
    }

    auto dk = dK.row(i);
    for (std::size_t k = 0; k < row.size(); ++k) {
      const auto& e = row[k];
      if (e.gate <= 0.0) continue;
      const double centered = dweight[k] - mean;
      const double dsim = e.weight * centered;
      const auto q = s.Q.row(e.src);
      const auto key = s.K.row(i);
      auto dq = dQ.row(e.src);
      for (std::size_t c = 0; c < d; ++c) {
        dk[c] += dsim * q[c];
        dq[c] += dsim * key[c];
      }
      // d w_ik / d gate_ij = unit_ij (delta_jk - w_ik)
      const double dgate = e.unit_weight * centered;
      auto dw = dWbG.row(0);
      for (std::size_t c = 0; c < dw.size(); ++c) dw[c] += dgate * e.embedding[c];
    }
  }

  ImplicitGradients grads;
  grads.W = matmul(dU.transposed(), V);
  grads.W_K = matmul(dK.transposed(), V);
  grads.W_Q = matmul(dQ.transposed(), V);
  grads.W_bG = std::move(dWbG);
  grads.V = matmul(dU, p.W) + matmul(dK, p.W_K) + matmul(dQ, p.W_Q);

  if constexpr (kGradientScale != 1.0) {
    for (Matrix* m : {&grads.W, &grads.W_K, &grads.W_Q, &grads.W_bG, &grads.V}) {
      *m *= kGradientScale;
    }
  }
  return grads;
}

}  // namespace relgat
