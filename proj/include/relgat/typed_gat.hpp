// Copyright (c) 2026, The relgat Authors
// SPDX-License-Identifier: Apache-2.0
//
// Direction- and label-aware graph attention for spatial and semantic graphs.
//
//   w^v_ij = (W_K v_i)^T Wv_dir v_j + c_lab
//   w_ij   = softmax_j(w^v_ij) over the incoming edges of i (self_loop incl.)
//   v*_i   = sum_j w_ij (W_dir v_j + b_lab)
//
// dir is `self` on the self_loop and `forward` on every other incoming edge.
// Outgoing edges do not feed node i, so the `backward` matrices are carried
// in the parameter set but receive zero gradient.

#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "relgat/attention.hpp"
#include "relgat/graph.hpp"
#include "relgat/numerics.hpp"
#include "relgat/rng.hpp"

namespace relgat {

enum class Direction : std::size_t { forward = 0, backward = 1, self = 2 };

inline constexpr std::array<Direction, 3> kDirections{
    Direction::forward, Direction::backward, Direction::self};

inline std::string direction_name(Direction d) {
  switch (d) {
    case Direction::forward: return "forward";
    case Direction::backward: return "backward";
    case Direction::self: return "self";
  }
  return "unknown";
}

inline Direction edge_direction(std::size_t receiver, std::size_t src) {
  return receiver == src ? Direction::self : Direction::forward;
}

struct TypedGatParams {
  std::array<Matrix, 3> W_dir;   // indexed by Direction, d x d
  std::array<Matrix, 3> Wv_dir;  // indexed by Direction, d x d
  Matrix W_K;                    // d x d
  std::map<EdgeLabel, Matrix> b_lab;  // 1 x d
  std::map<EdgeLabel, double> c_lab;

  std::size_t dim() const { return W_K.rows(); }

  const Matrix& transform(Direction d) const {
    return W_dir[static_cast<std::size_t>(d)];
  }
  const Matrix& score_transform(Direction d) const {
    return Wv_dir[static_cast<std::size_t>(d)];
  }

  void validate() const {
    const std::size_t d = dim();
    require_shape(W_K, d, d, "W_K");
    for (Direction dir : kDirections) {
      require_shape(transform(dir), d, d, "W_dir." + direction_name(dir));
      require_shape(score_transform(dir), d, d, "Wv_dir." + direction_name(dir));
    }
    for (const auto& [label, bias] : b_lab) {
      require_shape(bias, 1, d, "b_lab." + label_name(label));
    }
  }

  /// Throws ConfigError naming the first label of `g` without parameters.
  void require_labels(const RelationGraph& g) const {
    for (const Edge& e : g.edges()) {
      if (!b_lab.contains(e.label) || !c_lab.contains(e.label)) {
        throw ConfigError("no b_lab/c_lab parameters for edge label '" +
                          label_name(e.label) + "'");
      }
    }
  }

  /// Glorot matrices, zero biases and score offsets.
  static TypedGatParams init(Rng& rng, std::size_t d,
                             std::span<const EdgeLabel> labels) {
    TypedGatParams p;
    for (Direction dir : kDirections) {
      p.W_dir[static_cast<std::size_t>(dir)] = rng.glorot(d, d);
    }
    for (Direction dir : kDirections) {
      p.Wv_dir[static_cast<std::size_t>(dir)] = rng.glorot(d, d);
    }
    p.W_K = rng.glorot(d, d);
    for (const EdgeLabel& label : labels) {
      p.b_lab[label] = Matrix(1, d);
      p.c_lab[label] = 0.0;
    }
    return p;
  }
};

struct TypedGradients {
  std::array<Matrix, 3> W_dir;
  std::array<Matrix, 3> Wv_dir;
  Matrix W_K;
  std::map<EdgeLabel, Matrix> b_lab;
  std::map<EdgeLabel, double> c_lab;
  Matrix V;
};

namespace detail {

struct TypedEntry {
  std::size_t src = 0;
  Direction dir = Direction::forward;
  EdgeLabel label;
  double score = 0.0;
  double weight = 0.0;
};

struct TypedState {
  std::array<Matrix, 3> transformed;  // rows W_dir v_j
  std::array<Matrix, 3> scored;       // rows Wv_dir v_j
  Matrix K;                           // rows W_K v_i
  std::vector<std::vector<TypedEntry>> rows;
};

inline TypedState typed_state(const Matrix& V, const RelationGraph& g,
                              const TypedGatParams& p) {
  p.validate();
  if (g.variant() == GraphVariant::implicit) {
    throw ConfigError("typed GAT requires a spatial or semantic graph");
  }
  if (V.rows() != g.node_count()) {
    throw ShapeError("typed GAT: " + std::to_string(V.rows()) +
                     " feature rows but " + std::to_string(g.node_count()) +
                     " graph nodes");
  }
  if (V.cols() != p.dim()) {
    throw ShapeError("typed GAT: features are " + shape_string(V) +
                     " but parameters expect d=" + std::to_string(p.dim()));
  }
  p.require_labels(g);

  TypedState s;
  for (Direction dir : kDirections) {
    const auto k = static_cast<std::size_t>(dir);
    s.transformed[k] = matmul_transposed(V, p.transform(dir));
    s.scored[k] = matmul_transposed(V, p.score_transform(dir));
  }
  s.K = matmul_transposed(V, p.W_K);
  s.rows.resize(g.node_count());

  for (std::size_t i = 0; i < g.node_count(); ++i) {
    auto& row = s.rows[i];
    std::vector<double> scores;
    for (const Neighbor& nb : g.in_neighbors(i)) {
      TypedEntry e{nb.src, edge_direction(i, nb.src), nb.label};
      e.score = dot(s.K.row(i),
                    s.scored[static_cast<std::size_t>(e.dir)].row(nb.src)) +
                p.c_lab.at(nb.label);
      scores.push_back(e.score);
      row.push_back(e);
    }
    if (row.empty()) continue;
    const auto weights = stable_softmax(scores);
    for (std::size_t k = 0; k < row.size(); ++k) row[k].weight = weights[k];
  }
  return s;
}

}  // namespace detail

inline GatOutput typed_forward(const Matrix& V, const RelationGraph& g,
                               const TypedGatParams& p) {
  const auto s = detail::typed_state(V, g, p);
  const std::size_t n = g.node_count();
  GatOutput out{Matrix(n, p.dim()), {Matrix(n, n), Matrix(n, n), std::nullopt}};
  for (std::size_t i = 0; i < n; ++i) {
    auto target = out.v_star.row(i);
    for (const auto& e : s.rows[i]) {
      out.attention.weights(i, e.src) = e.weight;
      out.attention.raw_similarity(i, e.src) = e.score;
      const auto u = s.transformed[static_cast<std::size_t>(e.dir)].row(e.src);
      const auto b = p.b_lab.at(e.label).row(0);
      for (std::size_t c = 0; c < target.size(); ++c) {
        target[c] += e.weight * (u[c] + b[c]);
      }
    }
  }
  return out;
}

inline TypedGradients typed_backward(const Matrix& V, const RelationGraph& g,
                                     const TypedGatParams& p,
                                     const Matrix& upstream) {
  const auto s = detail::typed_state(V, g, p);
  require_same_shape(upstream, V, "typed_backward upstream gradient");
  const std::size_t n = g.node_count();
  const std::size_t d = p.dim();

  std::array<Matrix, 3> d_transformed{Matrix(n, d), Matrix(n, d), Matrix(n, d)};
  std::array<Matrix, 3> d_scored{Matrix(n, d), Matrix(n, d), Matrix(n, d)};
  Matrix dK(n, d);

  TypedGradients grads;
  for (const auto& [label, bias] : p.b_lab) grads.b_lab[label] = Matrix(1, d);
  for (const auto& [label, offset] : p.c_lab) grads.c_lab[label] = 0.0;

  for (std::size_t i = 0; i < n; ++i) {
    const auto grad = upstream.row(i);
    const auto& row = s.rows[i];

    std::vector<double> dweight(row.size());
    double mean = 0.0;
    for (std::size_t k = 0; k < row.size(); ++k) {
      const auto& e = row[k];
      const auto dir = static_cast<std::size_t>(e.dir);
      const auto u = s.transformed[dir].row(e.src);
      const auto b = p.b_lab.at(e.label).row(0);
      double acc = 0.0;
      for (std::size_t c = 0; c < d; ++c) acc += grad[c] * (u[c] + b[c]);
      dweight[k] = acc;
      mean += e.weight * acc;

      auto du = d_transformed[dir].row(e.src);
      auto db = grads.b_lab.at(e.label).row(0);
      for (std::size_t c = 0; c < d; ++c) {
        du[c] += e.weight * grad[c];
        db[c] += e.weight * grad[c];
      }
    }

    auto dk = dK.row(i);
    const auto key = s.K.row(i);
    for (std::size_t k = 0; k < row.size(); ++k) {
      const auto& e = row[k];
      const auto dir = static_cast<std::size_t>(e.dir);
      const double dscore = e.weight * (dweight[k] - mean);
      grads.c_lab.at(e.label) += dscore;
      const auto r = s.scored[dir].row(e.src);
      auto dr = d_scored[dir].row(e.src);
      for (std::size_t c = 0; c < d; ++c) {
        dk[c] += dscore * r[c];
        dr[c] += dscore * key[c];
      }
    }
  }

  grads.V = matmul(dK, p.W_K);
  grads.W_K = matmul(dK.transposed(), V);
  for (Direction dir : kDirections) {
    const auto k = static_cast<std::size_t>(dir);
    grads.W_dir[k] = matmul(d_transformed[k].transposed(), V);
    grads.Wv_dir[k] = matmul(d_scored[k].transposed(), V);
    grads.V += matmul(d_transformed[k], p.transform(dir));
    grads.V += matmul(d_scored[k], p.score_transform(dir));
  }

  if constexpr (kGradientScale != 1.0) {
    for (Matrix& m : grads.W_dir) m *= kGradientScale;
    for (Matrix& m : grads.Wv_dir) m *= kGradientScale;
    grads.W_K *= kGradientScale;
    grads.V *= kGradientScale;
    for (auto& [label, m] : grads.b_lab) m *= kGradientScale;
    for (auto& [label, c] : grads.c_lab) c *= kGradientScale;
  }
  return grads;
}

}  // namespace relgat
