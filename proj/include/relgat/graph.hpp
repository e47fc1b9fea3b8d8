// Copyright (c) 2026, The relgat Authors
// SPDX-License-Identifier: Apache-2.0
//
// Relationship graphs over detected regions.
//
// An edge (src, dst, label) means src -> dst; a node aggregates over its
// incoming edges. Edges are kept sorted by (src, dst, label).

#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstddef>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "relgat/errors.hpp"
#include "relgat/geometry.hpp"

namespace relgat {

inline constexpr int kSemanticClassCount = 16;  // incl. class 0 = no relation

struct EdgeLabel {
  enum class Kind { implicit, spatial, semantic, self_loop };

  Kind kind = Kind::implicit;
  int id = 0;

  static EdgeLabel implicit() { return {Kind::implicit, 0}; }
  static EdgeLabel self_loop() { return {Kind::self_loop, 0}; }
  static EdgeLabel spatial(SpatialLabel s) {
    if (!s.is_relation()) {
      throw DomainError("spatial edges cannot carry no_relation");
    }
    return {Kind::spatial, s.class_id};
  }
  static EdgeLabel semantic(int class_id) {
    if (class_id < 1 || class_id >= kSemanticClassCount) {
      throw DomainError("semantic edge class " + std::to_string(class_id) +
                        " outside 1.." +
                        std::to_string(kSemanticClassCount - 1));
    }
    return {Kind::semantic, class_id};
  }

  friend auto operator<=>(const EdgeLabel&, const EdgeLabel&) = default;
};

inline std::string label_name(const EdgeLabel& label) {
  switch (label.kind) {
    case EdgeLabel::Kind::implicit: return "implicit";
    case EdgeLabel::Kind::self_loop: return "self_loop";
    case EdgeLabel::Kind::spatial:
      return spatial_label_name(SpatialLabel{label.id});
    case EdgeLabel::Kind::semantic:
      return "semantic_" + std::to_string(label.id);
  }
  return "unknown";
}

enum class GraphVariant { implicit, spatial, semantic };

inline std::string variant_name(GraphVariant v) {
  switch (v) {
    case GraphVariant::implicit: return "implicit";
    case GraphVariant::spatial: return "spatial";
    case GraphVariant::semantic: return "semantic";
  }
  return "unknown";
}

/// Every label a graph of the given typed variant can carry, self_loop first.
inline std::vector<EdgeLabel> labels_for(GraphVariant v) {
  std::vector<EdgeLabel> labels{EdgeLabel::self_loop()};
  if (v == GraphVariant::spatial) {
    for (int c = 1; c < SpatialLabel::kCount; ++c) {
      labels.push_back(EdgeLabel::spatial(SpatialLabel{c}));
    }
  } else if (v == GraphVariant::semantic) {
    for (int c = 1; c < kSemanticClassCount; ++c) {
      labels.push_back(EdgeLabel::semantic(c));
    }
  } else {
    return {EdgeLabel::implicit()};
  }
  return labels;
}

inline EdgeLabel parse_label(GraphVariant v, const std::string& name) {
  for (const EdgeLabel& label : labels_for(v)) {
    if (label_name(label) == name) return label;
  }
  throw InputError("unknown " + variant_name(v) + " edge label '" + name + "'");
}

struct Edge {
  std::size_t src = 0;
  std::size_t dst = 0;
  EdgeLabel label;

  friend auto operator<=>(const Edge&, const Edge&) = default;
};

struct Neighbor {
  std::size_t src = 0;
  EdgeLabel label;

  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

class RelationGraph {
 public:
  /// Validates every structural invariant of `variant` and sorts the edges.
  RelationGraph(std::size_t n, GraphVariant variant, std::vector<Edge> edges)
      : n_(n), variant_(variant), edges_(std::move(edges)) {
    if (n_ == 0) throw InputError("relation graph needs at least one node");
    std::sort(edges_.begin(), edges_.end());
    validate();
    incoming_.resize(n_);
    for (const Edge& e : edges_) incoming_[e.dst].push_back({e.src, e.label});
    // Edges are sorted by src first, so each incoming list is ascending.
  }

  std::size_t node_count() const noexcept { return n_; }
  GraphVariant variant() const noexcept { return variant_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }

  /// Incoming edges of node i in ascending source order.
  std::span<const Neighbor> in_neighbors(std::size_t i) const {
    if (i >= n_) {
      throw DomainError("node index " + std::to_string(i) +
                        " out of range for graph with " + std::to_string(n_) +
                        " nodes");
    }
    return incoming_[i];
  }

  /// Edges without self loops.
  std::vector<Edge> relation_edges() const {
    std::vector<Edge> out;
    for (const Edge& e : edges_) {
      if (e.label.kind != EdgeLabel::Kind::self_loop) out.push_back(e);
    }
    return out;
  }

 private:
  void validate() const {
    const bool typed = variant_ != GraphVariant::implicit;
    std::set<std::pair<std::size_t, std::size_t>> pairs;
    std::vector<int> self_loops(n_, 0);
    for (std::size_t k = 0; k < edges_.size(); ++k) {
      const Edge& e = edges_[k];
      if (e.src >= n_ || e.dst >= n_) {
        throw InputError("edge index out of range");
      }
      if (k > 0 && edges_[k - 1] == e) {
        throw InputError("duplicate edge " + std::to_string(e.src) + "->" +
                         std::to_string(e.dst) + " (" + label_name(e.label) +
                         ")");
      }
      if (!pairs.insert({e.src, e.dst}).second) {
        throw InputError("more than one edge " + std::to_string(e.src) + "->" +
                         std::to_string(e.dst));
      }
      const bool is_self = e.label.kind == EdgeLabel::Kind::self_loop;
      if (is_self != (e.src == e.dst)) {
        throw InputError("self_loop label must be used exactly on i->i edges");
      }
      if (is_self) ++self_loops[e.src];
      const auto expected = variant_ == GraphVariant::implicit
                                ? EdgeLabel::Kind::implicit
                            : variant_ == GraphVariant::spatial
                                ? EdgeLabel::Kind::spatial
                                : EdgeLabel::Kind::semantic;
      if (!is_self && e.label.kind != expected) {
        throw InputError(variant_name(variant_) + " graph cannot carry " +
                         label_name(e.label) + " edges");
      }
    }
    if (!typed) {
      if (edges_.size() != n_ * (n_ - 1)) {
        throw InputError("implicit graph must have n(n-1) edges");
      }
      return;
    }
    for (std::size_t i = 0; i < n_; ++i) {
      if (self_loops[i] != 1) {
        throw InputError("node " + std::to_string(i) +
                         " must have exactly one self_loop");
      }
    }
    if (variant_ == GraphVariant::spatial) {
      for (const Edge& e : edges_) {
        if (e.src == e.dst) continue;
        const Edge mirror{
            e.dst, e.src,
            EdgeLabel::spatial(complement_label(SpatialLabel{e.label.id}))};
        if (!std::binary_search(edges_.begin(), edges_.end(), mirror)) {
          throw InputError("spatial edge " + std::to_string(e.src) + "->" +
                           std::to_string(e.dst) + " has no mirror edge");
        }
      }
    }
  }

  std::size_t n_;
  GraphVariant variant_;
  std::vector<Edge> edges_;
  std::vector<std::vector<Neighbor>> incoming_;
};

inline RelationGraph build_implicit(std::size_t n) {
  if (n == 0) throw InputError("implicit graph needs at least one node");
  std::vector<Edge> edges;
  edges.reserve(n * (n - 1));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j) edges.push_back({i, j, EdgeLabel::implicit()});
    }
  }
  return RelationGraph(n, GraphVariant::implicit, std::move(edges));
}

inline RelationGraph build_spatial(std::span<const DetectedObject> objects,
                                   double image_diag,
                                   const SpatialRules& rules = {}) {
  if (objects.empty()) throw InputError("spatial graph needs at least one object");
  for (const DetectedObject& o : objects) validate_box(o);
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < objects.size(); ++i) {
    edges.push_back({i, i, EdgeLabel::self_loop()});
    for (std::size_t j = 0; j < objects.size(); ++j) {
      if (i == j) continue;
      const SpatialLabel label =
          spatial_classify(objects[i], objects[j], image_diag, rules);
      if (label.is_relation()) edges.push_back({i, j, EdgeLabel::spatial(label)});
    }
  }
  return RelationGraph(objects.size(), GraphVariant::spatial, std::move(edges));
}

struct EdgePrediction {
  std::size_t src = 0;
  std::size_t dst = 0;
  std::vector<double> probs;  // kSemanticClassCount entries
};

inline constexpr double kDefaultSemanticThreshold = 0.5;

/// Argmax class of a 16-way distribution; ties go to the lowest class.
inline int argmax_class(std::span<const double> probs) {
  return static_cast<int>(std::max_element(probs.begin(), probs.end()) -
                          probs.begin());
}

/// Adds src -> dst with the argmax class when that class is a relation and
/// its probability reaches `threshold`. Every node gets a self_loop.
inline RelationGraph build_semantic(std::size_t n,
                                    std::span<const EdgePrediction> predictions,
                                    double threshold = kDefaultSemanticThreshold) {
  if (n == 0) throw InputError("semantic graph needs at least one node");
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i) edges.push_back({i, i, EdgeLabel::self_loop()});
  for (const EdgePrediction& p : predictions) {
    if (p.src >= n || p.dst >= n || p.src == p.dst) {
      throw InputError("semantic prediction for invalid pair " +
                       std::to_string(p.src) + "->" + std::to_string(p.dst));
    }
    if (p.probs.size() != static_cast<std::size_t>(kSemanticClassCount)) {
      throw InputError("semantic prediction must have " +
                       std::to_string(kSemanticClassCount) + " probabilities");
    }
    double total = 0.0;
    for (double v : p.probs) {
      if (!(v >= 0.0) || !std::isfinite(v)) {
        throw InputError("semantic probabilities must be finite and nonnegative");
      }
      total += v;
    }
    if (std::abs(total - 1.0) > 1e-6) {
      throw InputError("semantic probabilities for " + std::to_string(p.src) +
                       "->" + std::to_string(p.dst) + " sum to " +
                       std::to_string(total));
    }
    const int best = argmax_class(p.probs);
    if (best != 0 && p.probs[best] >= threshold) {
      edges.push_back({p.src, p.dst, EdgeLabel::semantic(best)});
    }
  }
  return RelationGraph(n, GraphVariant::semantic, std::move(edges));
}

/// The same graph with node k renamed to perm[k].
inline RelationGraph relabel(const RelationGraph& g,
                             std::span<const std::size_t> perm) {
  if (perm.size() != g.node_count()) {
    throw ShapeError("permutation length does not match node count");
  }
  std::vector<Edge> edges;
  edges.reserve(g.edges().size());
  for (const Edge& e : g.edges()) edges.push_back({perm[e.src], perm[e.dst], e.label});
  return RelationGraph(g.node_count(), g.variant(), std::move(edges));
}

}  // namespace relgat
