// Copyright (c) 2026, The relgat Authors
// SPDX-License-Identifier: Apache-2.0
//
// Parameter files: a list of named row-major tensors.
//
//   implicit.{W, W_K, W_Q, W_bG}
//   <spatial|semantic>.W_dir.<forward|backward|self>
//   <spatial|semantic>.Wv_dir.<forward|backward|self>
//   <spatial|semantic>.W_K
//   <spatial|semantic>.b_lab.<label>      1 x d
//   <spatial|semantic>.c_lab.<label>      1 x 1
//   classifier.{input_proj, position, output_proj}
//   classifier.layer<l>.{W_q, W_k, W_v, W_o}
//   classifier.layer<l>.ff.{W1, b1, W2, b2}
//   classifier.layer<l>.norm<1|2>.{gain, offset}
//
// Classifier head count lives under "config". Numbers are written in the
// shortest decimal form that round-trips to the same double.

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "relgat/finite_diff.hpp"
#include "relgat/implicit_gat.hpp"
#include "relgat/json_io.hpp"
#include "relgat/rng.hpp"
#include "relgat/semantic_classifier.hpp"
#include "relgat/typed_gat.hpp"

namespace relgat {

inline std::string variant_prefix(GraphVariant v) { return variant_name(v); }

// Works for both ImplicitGatParams and ImplicitGradients.
template <class T>
ParamSet implicit_tensors(const T& p, const std::string& prefix = "implicit") {
  return {{prefix + ".W", p.W},
          {prefix + ".W_K", p.W_K},
          {prefix + ".W_Q", p.W_Q},
          {prefix + ".W_bG", p.W_bG}};
}

// Works for both TypedGatParams and TypedGradients.
template <class T>
ParamSet typed_tensors(const T& p, const std::string& prefix) {
  ParamSet out;
  for (Direction dir : kDirections) {
    const auto k = static_cast<std::size_t>(dir);
    out[prefix + ".W_dir." + direction_name(dir)] = p.W_dir[k];
    out[prefix + ".Wv_dir." + direction_name(dir)] = p.Wv_dir[k];
  }
  out[prefix + ".W_K"] = p.W_K;
  for (const auto& [label, bias] : p.b_lab) {
    out[prefix + ".b_lab." + label_name(label)] = bias;
  }
  for (const auto& [label, offset] : p.c_lab) {
    out[prefix + ".c_lab." + label_name(label)] = Matrix(1, 1, offset);
  }
  return out;
}

inline ParamSet classifier_tensors(const SemanticClassifierParams& p) {
  ParamSet out{{"classifier.input_proj", p.input_proj},
               {"classifier.position", p.position},
               {"classifier.output_proj", p.output_proj}};
  for (std::size_t l = 0; l < p.layers.size(); ++l) {
    const auto& L = p.layers[l];
    const std::string tag = "classifier.layer" + std::to_string(l);
    out[tag + ".W_q"] = L.W_q;
    out[tag + ".W_k"] = L.W_k;
    out[tag + ".W_v"] = L.W_v;
    out[tag + ".W_o"] = L.W_o;
    out[tag + ".ff.W1"] = L.ff_W1;
    out[tag + ".ff.b1"] = L.ff_b1;
    out[tag + ".ff.W2"] = L.ff_W2;
    out[tag + ".ff.b2"] = L.ff_b2;
    out[tag + ".norm1.gain"] = L.norm1_gain;
    out[tag + ".norm1.offset"] = L.norm1_offset;
    out[tag + ".norm2.gain"] = L.norm2_gain;
    out[tag + ".norm2.offset"] = L.norm2_offset;
  }
  return out;
}

namespace detail {

inline const Matrix& take(const ParamSet& set, const std::string& name) {
  auto it = set.find(name);
  if (it == set.end()) throw ConfigError("missing parameter tensor '" + name + "'");
  return it->second;
}

inline bool has_prefix(const ParamSet& set, const std::string& prefix) {
  auto it = set.lower_bound(prefix + ".");
  return it != set.end() && it->first.starts_with(prefix + ".");
}

}  // namespace detail

inline ImplicitGatParams implicit_from_tensors(const ParamSet& set,
                                               const std::string& prefix = "implicit") {
  ImplicitGatParams p{detail::take(set, prefix + ".W"),
                      detail::take(set, prefix + ".W_K"),
                      detail::take(set, prefix + ".W_Q"),
                      detail::take(set, prefix + ".W_bG")};
  p.validate();
  return p;
}

inline TypedGatParams typed_from_tensors(const ParamSet& set, GraphVariant variant,
                                         const std::string& prefix) {
  TypedGatParams p;
  for (Direction dir : kDirections) {
    const auto k = static_cast<std::size_t>(dir);
    p.W_dir[k] = detail::take(set, prefix + ".W_dir." + direction_name(dir));
    p.Wv_dir[k] = detail::take(set, prefix + ".Wv_dir." + direction_name(dir));
  }
  p.W_K = detail::take(set, prefix + ".W_K");
  const std::string bias_prefix = prefix + ".b_lab.";
  const std::string offset_prefix = prefix + ".c_lab.";
  for (const auto& [name, tensor] : set) {
    if (name.starts_with(bias_prefix)) {
      p.b_lab[parse_label(variant, name.substr(bias_prefix.size()))] = tensor;
    } else if (name.starts_with(offset_prefix)) {
      require_shape(tensor, 1, 1, name);
      p.c_lab[parse_label(variant, name.substr(offset_prefix.size()))] =
          tensor(0, 0);
    }
  }
  for (const auto& [label, bias] : p.b_lab) {
    if (!p.c_lab.contains(label)) {
      throw ConfigError("label '" + label_name(label) + "' has b_lab but no c_lab");
    }
  }
  if (p.b_lab.size() != p.c_lab.size()) {
    throw ConfigError(prefix + ": c_lab entries without matching b_lab");
  }
  p.validate();
  return p;
}

inline SemanticClassifierParams classifier_from_tensors(const ParamSet& set,
                                                        std::size_t heads) {
  SemanticClassifierParams p;
  p.heads = heads;
  p.input_proj = detail::take(set, "classifier.input_proj");
  p.position = detail::take(set, "classifier.position");
  p.output_proj = detail::take(set, "classifier.output_proj");
  for (std::size_t l = 0; l < p.layers.size(); ++l) {
    auto& L = p.layers[l];
    const std::string tag = "classifier.layer" + std::to_string(l);
    L.W_q = detail::take(set, tag + ".W_q");
    L.W_k = detail::take(set, tag + ".W_k");
    L.W_v = detail::take(set, tag + ".W_v");
    L.W_o = detail::take(set, tag + ".W_o");
    L.ff_W1 = detail::take(set, tag + ".ff.W1");
    L.ff_b1 = detail::take(set, tag + ".ff.b1");
    L.ff_W2 = detail::take(set, tag + ".ff.W2");
    L.ff_b2 = detail::take(set, tag + ".ff.b2");
    L.norm1_gain = detail::take(set, tag + ".norm1.gain");
    L.norm1_offset = detail::take(set, tag + ".norm1.offset");
    L.norm2_gain = detail::take(set, tag + ".norm2.gain");
    L.norm2_offset = detail::take(set, tag + ".norm2.offset");
  }
  p.validate();
  return p;
}

struct ParameterFile {
  std::optional<ImplicitGatParams> implicit;
  std::optional<TypedGatParams> spatial;
  std::optional<TypedGatParams> semantic;
  std::optional<SemanticClassifierParams> classifier;

  const TypedGatParams& typed(GraphVariant v) const {
    const auto& slot = v == GraphVariant::spatial ? spatial : semantic;
    if (!slot) {
      throw ConfigError("parameter file has no " + variant_name(v) + " block");
    }
    return *slot;
  }
};

struct InitOptions {
  std::uint64_t seed = 0;
  std::size_t d = 1024;
  std::size_t d_g = kDefaultEmbedWidth;
  std::size_t model_width = kDefaultModelWidth;
  std::size_t heads = kDefaultHeads;
  std::size_t ff_width = 0;  // 0 = 4 * model_width
  /// Restricts the per-label b_lab/c_lab tables; empty keeps every label.
  std::set<std::string> labels;
};

/// Seeded Glorot initialization of all three GAT blocks and the classifier,
/// drawn in that order from one generator.
inline ParameterFile init_parameter_file(const InitOptions& opt) {
  Rng rng(opt.seed);
  ParameterFile file;
  file.implicit = ImplicitGatParams::init(rng, opt.d, opt.d_g);
  for (GraphVariant v : {GraphVariant::spatial, GraphVariant::semantic}) {
    std::vector<EdgeLabel> labels;
    for (const EdgeLabel& label : labels_for(v)) {
      if (opt.labels.empty() || opt.labels.contains(label_name(label))) {
        labels.push_back(label);
      }
    }
    auto params = TypedGatParams::init(rng, opt.d, labels);
    (v == GraphVariant::spatial ? file.spatial : file.semantic) = std::move(params);
  }
  file.classifier = SemanticClassifierParams::init(rng, opt.d, opt.model_width,
                                                   opt.heads, opt.ff_width);
  return file;
}

inline ParamSet all_tensors(const ParameterFile& file) {
  ParamSet out;
  if (file.implicit) out.merge(implicit_tensors(*file.implicit));
  if (file.spatial) out.merge(typed_tensors(*file.spatial, "spatial"));
  if (file.semantic) out.merge(typed_tensors(*file.semantic, "semantic"));
  if (file.classifier) out.merge(classifier_tensors(*file.classifier));
  return out;
}

inline json to_json(const ParameterFile& file) {
  json doc;
  doc["format_version"] = kFormatVersion;
  json config = json::object();
  if (file.classifier) config["heads"] = file.classifier->heads;
  doc["config"] = config;
  json tensors = json::array();
  for (const auto& [name, m] : all_tensors(file)) {
    json t;
    t["name"] = name;
    t["shape"] = {m.rows(), m.cols()};
    t["data"] = m.values();
    tensors.push_back(std::move(t));
  }
  doc["tensors"] = std::move(tensors);
  return doc;
}

inline ParameterFile parameter_file_from_json(const json& doc,
                                              const std::string& origin = "parameters") {
  check_format_version(doc, origin);
  if (!doc.is_object() || !doc.contains("tensors") || !doc["tensors"].is_array()) {
    throw InputError(origin + ": expected an object with a 'tensors' array");
  }
  ParamSet set;
  try {
    for (const auto& t : doc["tensors"]) {
      const auto name = t.at("name").get<std::string>();
      const auto shape = t.at("shape").get<std::vector<std::size_t>>();
      auto data = t.at("data").get<std::vector<double>>();
      std::size_t rows = 1, cols = 1;
      if (shape.size() == 1) {
        cols = shape[0];
      } else if (shape.size() == 2) {
        rows = shape[0];
        cols = shape[1];
      } else {
        throw InputError(origin + ": tensor '" + name + "' must be 1-d or 2-d");
      }
      if (!set.emplace(name, Matrix::from_data(rows, cols, std::move(data))).second) {
        throw InputError(origin + ": duplicate tensor '" + name + "'");
      }
    }
  } catch (const json::exception& e) {
    throw InputError(origin + ": malformed tensor record: " + e.what());
  }

  ParameterFile file;
  if (detail::has_prefix(set, "implicit")) file.implicit = implicit_from_tensors(set);
  if (detail::has_prefix(set, "spatial")) {
    file.spatial = typed_from_tensors(set, GraphVariant::spatial, "spatial");
  }
  if (detail::has_prefix(set, "semantic")) {
    file.semantic = typed_from_tensors(set, GraphVariant::semantic, "semantic");
  }
  if (detail::has_prefix(set, "classifier")) {
    std::size_t heads = kDefaultHeads;
    if (doc.contains("config") && doc["config"].contains("heads")) {
      heads = doc["config"]["heads"].get<std::size_t>();
    }
    file.classifier = classifier_from_tensors(set, heads);
  }
  return file;
}

inline ParameterFile load_parameter_file(const std::string& path) {
  return parameter_file_from_json(load_json_file(path), path);
}

}  // namespace relgat
