// Copyright (c) 2026, The relgat Authors
// SPDX-License-Identifier: Apache-2.0
//
// Forward pass of the pairwise semantic-relation classifier: three tokens
// (subject region, object region, union region) go through an input
// projection plus learned slot embeddings, two post-norm transformer encoder
// layers, mean pooling and a 16-way softmax. Training is out of scope.

#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "relgat/graph.hpp"
#include "relgat/numerics.hpp"
#include "relgat/rng.hpp"

namespace relgat {

inline constexpr std::size_t kClassifierTokens = 3;
inline constexpr std::size_t kClassifierLayers = 2;
inline constexpr std::size_t kDefaultModelWidth = 256;
inline constexpr std::size_t kDefaultHeads = 4;
inline constexpr double kLayerNormEps = 1e-5;

// Row-vector convention throughout: a token x (1 x d_m) maps to x * W.
struct EncoderLayerParams {
  Matrix W_q, W_k, W_v, W_o;  // d_m x d_m; head h owns columns [h*dh, (h+1)*dh)
  Matrix ff_W1;               // d_m x ff
  Matrix ff_b1;               // 1 x ff
  Matrix ff_W2;               // ff x d_m
  Matrix ff_b2;               // 1 x d_m
  Matrix norm1_gain, norm1_offset;  // 1 x d_m
  Matrix norm2_gain, norm2_offset;  // 1 x d_m
};

struct SemanticClassifierParams {
  Matrix input_proj;   // d x d_m
  Matrix position;     // 3 x d_m
  std::array<EncoderLayerParams, kClassifierLayers> layers;
  Matrix output_proj;  // d_m x 16
  std::size_t heads = kDefaultHeads;

  std::size_t input_dim() const { return input_proj.rows(); }
  std::size_t model_width() const { return input_proj.cols(); }
  std::size_t ff_width() const { return layers[0].ff_W1.cols(); }

  void validate() const {
    const std::size_t dm = model_width();
    if (heads == 0 || dm % heads != 0) {
      throw ConfigError("classifier width " + std::to_string(dm) +
                        " is not divisible by " + std::to_string(heads) +
                        " heads");
    }
    require_shape(position, kClassifierTokens, dm, "classifier.position");
    require_shape(output_proj, dm, kSemanticClassCount, "classifier.output_proj");
    const std::size_t ff = ff_width();
    for (std::size_t l = 0; l < layers.size(); ++l) {
      const auto& L = layers[l];
      const std::string tag = "classifier.layer" + std::to_string(l);
      for (const Matrix* m : {&L.W_q, &L.W_k, &L.W_v, &L.W_o}) {
        require_shape(*m, dm, dm, tag + " attention projection");
      }
      require_shape(L.ff_W1, dm, ff, tag + ".ff.W1");
      require_shape(L.ff_b1, 1, ff, tag + ".ff.b1");
      require_shape(L.ff_W2, ff, dm, tag + ".ff.W2");
      require_shape(L.ff_b2, 1, dm, tag + ".ff.b2");
      for (const Matrix* m : {&L.norm1_gain, &L.norm1_offset, &L.norm2_gain,
                              &L.norm2_offset}) {
        require_shape(*m, 1, dm, tag + " normalization");
      }
    }
  }

  static SemanticClassifierParams init(Rng& rng, std::size_t d,
                                       std::size_t model_width = kDefaultModelWidth,
                                       std::size_t heads = kDefaultHeads,
                                       std::size_t ff_width = 0) {
    if (ff_width == 0) ff_width = 4 * model_width;
    SemanticClassifierParams p;
    p.heads = heads;
    p.input_proj = rng.glorot(d, model_width);
    p.position = rng.glorot(kClassifierTokens, model_width);
    for (auto& L : p.layers) {
      L.W_q = rng.glorot(model_width, model_width);
      L.W_k = rng.glorot(model_width, model_width);
      L.W_v = rng.glorot(model_width, model_width);
      L.W_o = rng.glorot(model_width, model_width);
      L.ff_W1 = rng.glorot(model_width, ff_width);
      L.ff_b1 = Matrix(1, ff_width);
      L.ff_W2 = rng.glorot(ff_width, model_width);
      L.ff_b2 = Matrix(1, model_width);
      L.norm1_gain = Matrix(1, model_width, 1.0);
      L.norm1_offset = Matrix(1, model_width);
      L.norm2_gain = Matrix(1, model_width, 1.0);
      L.norm2_offset = Matrix(1, model_width);
    }
    p.output_proj = rng.glorot(model_width, kSemanticClassCount);
    p.validate();
    return p;
  }
};

namespace detail {

inline void add_row_bias(Matrix& x, const Matrix& bias) {
  for (std::size_t r = 0; r < x.rows(); ++r) {
    auto row = x.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) row[c] += bias(0, c);
  }
}

inline void layer_norm(Matrix& x, const Matrix& gain, const Matrix& offset) {
  const double width = static_cast<double>(x.cols());
  for (std::size_t r = 0; r < x.rows(); ++r) {
    auto row = x.row(r);
    double mean = 0.0;
    for (double v : row) mean += v;
    mean /= width;
    double var = 0.0;
    for (double v : row) var += (v - mean) * (v - mean);
    var /= width;
    const double inv = 1.0 / std::sqrt(var + kLayerNormEps);
    for (std::size_t c = 0; c < row.size(); ++c) {
      row[c] = (row[c] - mean) * inv * gain(0, c) + offset(0, c);
    }
  }
}

inline Matrix self_attention(const Matrix& x, const EncoderLayerParams& L,
                             std::size_t heads) {
  const Matrix q = matmul(x, L.W_q);
  const Matrix k = matmul(x, L.W_k);
  const Matrix v = matmul(x, L.W_v);
  const std::size_t tokens = x.rows();
  const std::size_t head_width = x.cols() / heads;
  const double scale = 1.0 / std::sqrt(static_cast<double>(head_width));

  Matrix mixed(tokens, x.cols());
  std::vector<double> scores(tokens);
  for (std::size_t h = 0; h < heads; ++h) {
    const std::size_t lo = h * head_width;
    for (std::size_t t = 0; t < tokens; ++t) {
      for (std::size_t u = 0; u < tokens; ++u) {
        double acc = 0.0;
        for (std::size_t c = lo; c < lo + head_width; ++c) acc += q(t, c) * k(u, c);
        scores[u] = acc * scale;
      }
      const auto probs = stable_softmax(scores);
      for (std::size_t u = 0; u < tokens; ++u) {
        for (std::size_t c = lo; c < lo + head_width; ++c) {
          mixed(t, c) += probs[u] * v(u, c);
        }
      }
    }
  }
  return matmul(mixed, L.W_o);
}

inline void encoder_layer(Matrix& x, const EncoderLayerParams& L,
                          std::size_t heads) {
  x += self_attention(x, L, heads);
  layer_norm(x, L.norm1_gain, L.norm1_offset);

  Matrix hidden = matmul(x, L.ff_W1);
  add_row_bias(hidden, L.ff_b1);
  for (double& v : hidden.data()) v = std::max(0.0, v);
  Matrix ff = matmul(hidden, L.ff_W2);
  add_row_bias(ff, L.ff_b2);
  x += ff;
  layer_norm(x, L.norm2_gain, L.norm2_offset);
}

}  // namespace detail

/// Probabilities over the 16 semantic classes (class 0 = no relation).
inline std::vector<double> semantic_classifier_forward(
    std::span<const double> subject, std::span<const double> object,
    std::span<const double> union_region, const SemanticClassifierParams& p) {
  p.validate();
  const std::size_t d = p.input_dim();
  for (auto [span, what] : {std::pair{subject, "subject"},
                            std::pair{object, "object"},
                            std::pair{union_region, "union"}}) {
    if (span.size() != d) {
      throw ShapeError(std::string("classifier ") + what + " feature has length " +
                       std::to_string(span.size()) + ", expected " +
                       std::to_string(d));
    }
  }

  Matrix tokens(kClassifierTokens, d);
  std::copy(subject.begin(), subject.end(), tokens.row(0).begin());
  std::copy(object.begin(), object.end(), tokens.row(1).begin());
  std::copy(union_region.begin(), union_region.end(), tokens.row(2).begin());

  Matrix x = matmul(tokens, p.input_proj);
  x += p.position;
  for (const auto& layer : p.layers) detail::encoder_layer(x, layer, p.heads);

  Matrix pooled(1, x.cols());
  for (std::size_t t = 0; t < x.rows(); ++t) {
    for (std::size_t c = 0; c < x.cols(); ++c) pooled(0, c) += x(t, c);
  }
  pooled *= 1.0 / static_cast<double>(x.rows());
  const Matrix logits = matmul(pooled, p.output_proj);
  return stable_softmax(logits.row(0));
}

/// Stand-in for a pooled union-box feature when the detector did not supply
/// one: the elementwise maximum of the two region features.
inline std::vector<double> union_feature_fallback(std::span<const double> a,
                                                  std::span<const double> b) {
  if (a.size() != b.size()) {
    throw ShapeError("union feature inputs differ in length");
  }
  std::vector<double> out(a.size());
  for (std::size_t c = 0; c < a.size(); ++c) out[c] = std::max(a[c], b[c]);
  return out;
}

}  // namespace relgat
