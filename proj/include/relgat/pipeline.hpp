// Copyright (c) 2026, The relgat Authors
// SPDX-License-Identifier: Apache-2.0
//
// Glue between detection files, parameter files and the encoders: graph
// construction per variant, encoding, JSON views of the results, top-k
// attention extraction and SVG overlays.

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdio>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "relgat/attention.hpp"
#include "relgat/detection_file.hpp"
#include "relgat/graph.hpp"
#include "relgat/implicit_gat.hpp"
#include "relgat/json_io.hpp"
#include "relgat/params_io.hpp"
#include "relgat/semantic_classifier.hpp"
#include "relgat/typed_gat.hpp"

namespace relgat {

/// Short names used on the command line and in output documents.
inline std::string short_name(GraphVariant v) {
  switch (v) {
    case GraphVariant::implicit: return "imp";
    case GraphVariant::spatial: return "spa";
    case GraphVariant::semantic: return "sem";
  }
  return "?";
}

inline GraphVariant parse_variant(const std::string& name) {
  if (name == "imp" || name == "implicit") return GraphVariant::implicit;
  if (name == "spa" || name == "spatial") return GraphVariant::spatial;
  if (name == "sem" || name == "semantic") return GraphVariant::semantic;
  throw InputError("unknown graph '" + name + "' (expected imp, spa or sem)");
}

struct PipelineOptions {
  SpatialRules spatial_rules;
  double semantic_threshold = kDefaultSemanticThreshold;
};

/// Classifier output for every ordered pair i != j, in (i, j) order. Uses the
/// file's union feature when present, else union_feature_fallback.
inline std::vector<EdgePrediction> predict_semantic_edges(
    const DetectionFile& file, const SemanticClassifierParams& classifier) {
  if (file.feature_dim() != classifier.input_dim()) {
    throw ShapeError("regions[*].feature has length " +
                     std::to_string(file.feature_dim()) +
                     " but the classifier expects d=" +
                     std::to_string(classifier.input_dim()));
  }
  std::vector<EdgePrediction> out;
  for (std::size_t i = 0; i < file.size(); ++i) {
    for (std::size_t j = 0; j < file.size(); ++j) {
      if (i == j) continue;
      const auto& vi = file.regions[i].feature;
      const auto& vj = file.regions[j].feature;
      auto it = file.union_features.find({i, j});
      const std::vector<double> vu =
          it != file.union_features.end() ? it->second : union_feature_fallback(vi, vj);
      out.push_back({i, j, semantic_classifier_forward(vi, vj, vu, classifier)});
    }
  }
  return out;
}

inline RelationGraph build_graph(GraphVariant v, const DetectionFile& file,
                                 const ParameterFile* params,
                                 const PipelineOptions& opt = {}) {
  if (file.size() == 0) throw InputError("detection file has no regions");
  switch (v) {
    case GraphVariant::implicit:
      return build_implicit(file.size());
    case GraphVariant::spatial: {
      const auto objects = file.objects();
      return build_spatial(objects, file.diagonal(), opt.spatial_rules);
    }
    case GraphVariant::semantic: {
      if (!params || !params->classifier) {
        throw ConfigError("semantic graphs need classifier parameters");
      }
      return build_semantic(file.size(),
                            predict_semantic_edges(file, *params->classifier),
                            opt.semantic_threshold);
    }
  }
  throw ConfigError("unknown graph variant");
}

inline GatOutput run_encoder(GraphVariant v, const DetectionFile& file,
                             const RelationGraph& graph, const ParameterFile& params) {
  const Matrix V = file.features();
  const std::size_t expected = v == GraphVariant::implicit
                                   ? (params.implicit ? params.implicit->dim() : 0)
                                   : params.typed(v).dim();
  if (v == GraphVariant::implicit && !params.implicit) {
    throw ConfigError("parameter file has no implicit block");
  }
  if (file.feature_dim() != expected) {
    throw ShapeError("regions[*].feature has length " +
                     std::to_string(file.feature_dim()) + " but " +
                     variant_name(v) + " parameters expect d=" +
                     std::to_string(expected));
  }
  if (v == GraphVariant::implicit) {
    return implicit_forward(V, file.objects(), graph, *params.implicit);
  }
  return typed_forward(V, graph, params.typed(v));
}

inline json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    rows.push_back(std::vector<double>(m.row(r).begin(), m.row(r).end()));
  }
  return rows;
}

inline json attention_to_json(const AttentionMap& a) {
  json j;
  j["weights"] = matrix_to_json(a.weights);
  j["raw_similarity"] = matrix_to_json(a.raw_similarity);
  if (a.geometry_gate) j["geometry_gate"] = matrix_to_json(*a.geometry_gate);
  return j;
}

inline json box_to_json(const DetectedObject& o) {
  return json::array({o.cx, o.cy, o.w, o.h});
}

// ---------------------------------------------------------------------------
// Top-k attention.

struct AttentionPick {
  std::size_t src = 0;
  double weight = 0.0;
};

/// The k heaviest incoming attention weights of node i over its graph edges,
/// descending, ties broken by ascending source index.
inline std::vector<AttentionPick> top_k_attention(const AttentionMap& attn,
                                                  const RelationGraph& g,
                                                  std::size_t i, std::size_t k) {
  std::vector<AttentionPick> picks;
  for (const Neighbor& nb : g.in_neighbors(i)) {
    picks.push_back({nb.src, attn.weights(i, nb.src)});
  }
  std::stable_sort(picks.begin(), picks.end(),
                   [](const AttentionPick& a, const AttentionPick& b) {
                     if (a.weight != b.weight) return a.weight > b.weight;
                     return a.src < b.src;
                   });
  if (picks.size() > k) picks.resize(k);
  return picks;
}

inline constexpr std::size_t kDefaultTopK = 3;

inline json top_k_to_json(const DetectionFile& file, GraphVariant v,
                          const AttentionMap& attn, const RelationGraph& g,
                          std::size_t k) {
  json doc;
  doc["format_version"] = kFormatVersion;
  doc["image_id"] = file.image_id;
  doc["graph"] = short_name(v);
  doc["top_k"] = k;
  json nodes = json::array();
  for (std::size_t i = 0; i < file.size(); ++i) {
    json node;
    node["node"] = i;
    node["bbox"] = box_to_json(file.regions[i].box);
    node["category"] = file.regions[i].box.category;
    json top = json::array();
    for (const auto& pick : top_k_attention(attn, g, i, k)) {
      json entry;
      entry["src"] = pick.src;
      entry["weight"] = pick.weight;
      entry["bbox"] = box_to_json(file.regions[pick.src].box);
      entry["category"] = file.regions[pick.src].box.category;
      top.push_back(std::move(entry));
    }
    node["top"] = std::move(top);
    nodes.push_back(std::move(node));
  }
  doc["nodes"] = std::move(nodes);
  return doc;
}

namespace detail {

inline std::string svg_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline std::string svg_rect(const DetectedObject& o, const std::string& style) {
  return "  <rect x=\"" + svg_number(o.left()) + "\" y=\"" + svg_number(o.top()) +
         "\" width=\"" + svg_number(o.w) + "\" height=\"" + svg_number(o.h) +
         "\" " + style + "/>\n";
}

}  // namespace detail

/// Overlay for one query node: every region outlined in gray, the query in
/// red, and its top-k sources filled with opacity equal to their weight.
inline std::string render_attention_svg(const DetectionFile& file,
                                        const AttentionMap& attn,
                                        const RelationGraph& g, std::size_t node,
                                        std::size_t k) {
  if (node >= file.size()) {
    throw InputError("query node " + std::to_string(node) + " out of range");
  }
  using detail::svg_number;
  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
                    svg_number(file.image_width) + "\" height=\"" +
                    svg_number(file.image_height) + "\" viewBox=\"0 0 " +
                    svg_number(file.image_width) + " " +
                    svg_number(file.image_height) + "\">\n";
  svg += "  <rect x=\"0\" y=\"0\" width=\"" + svg_number(file.image_width) +
         "\" height=\"" + svg_number(file.image_height) +
         "\" fill=\"white\" stroke=\"black\"/>\n";
  for (const auto& r : file.regions) {
    svg += detail::svg_rect(r.box, "fill=\"none\" stroke=\"gray\" stroke-width=\"1\"");
  }
  for (const auto& pick : top_k_attention(attn, g, node, k)) {
    const auto& box = file.regions[pick.src].box;
    svg += detail::svg_rect(box, "fill=\"steelblue\" fill-opacity=\"" +
                                     svg_number(pick.weight) +
                                     "\" stroke=\"steelblue\" stroke-width=\"2\"");
    svg += "  <text x=\"" + svg_number(box.left() + 2) + "\" y=\"" +
           svg_number(box.top() + 12) + "\" font-size=\"12\">" +
           std::to_string(pick.src) + ": " + svg_number(pick.weight) + "</text>\n";
  }
  svg += detail::svg_rect(file.regions[node].box,
                          "fill=\"none\" stroke=\"red\" stroke-width=\"3\"");
  svg += "</svg>\n";
  return svg;
}

}  // namespace relgat
