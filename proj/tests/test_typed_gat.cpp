// Copyright (c) 2026, The relgat Authors
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include <string>
#include <vector>

#include "relgat/relgat.hpp"
#include "support/fixtures.hpp"
#include "support/reference.hpp"

using namespace relgat;
using Catch::Approx;

TEST_CASE("typed forward matches the brute-force reference", "[typed]") {
  Rng rng(202);
  for (auto v : {GraphVariant::spatial, GraphVariant::semantic}) {
    for (int trial = 0; trial < 100; ++trial) {
      const std::size_t n = 1 + rng.below(10);
      const std::size_t d = 1 + rng.below(16);
      const auto boxes = random_boxes(rng, n);
      const auto g = fixtures::random_typed_graph(rng, v, boxes);
      const Matrix V = fixtures::random_features(rng, n, d);
      const auto p = random_typed_params(rng, d, v);
      const auto out = typed_forward(V, g, p);
      const auto ref = reference::typed(V, g, p);
      CHECK(max_abs_diff(out.v_star, ref.v_star) <= 1e-12);
      CHECK(max_abs_diff(out.attention.weights, ref.weights) <= 1e-12);
      CHECK_FALSE(out.attention.geometry_gate.has_value());
      for (std::size_t i = 0; i < n; ++i) {
        double sum = 0.0;
        for (double w : out.attention.weights.row(i)) sum += w;
        CHECK(sum == Approx(1.0).margin(1e-9));
      }
    }
  }
}

TEST_CASE("an isolated node attends only to itself", "[typed]") {
  Rng rng(7);
  const std::size_t d = 5;
  const auto p = random_typed_params(rng, d, GraphVariant::semantic);
  const Matrix V = fixtures::random_features(rng, 3, d);
  const auto g = build_semantic(3, std::vector<EdgePrediction>{});
  const auto out = typed_forward(V, g, p);
  const Matrix expected = matmul_transposed(V, p.transform(Direction::self));
  const Matrix& b = p.b_lab.at(EdgeLabel::self_loop());
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(out.attention.weights(i, i) == 1.0);
    for (std::size_t c = 0; c < d; ++c) {
      CHECK(out.v_star(i, c) == Approx(expected(i, c) + b(0, c)).margin(1e-15));
    }
  }
}

TEST_CASE("symmetric overlap pair splits each row", "[typed]") {
  Rng rng(8);
  const std::size_t d = 4;
  auto p = TypedGatParams::init(rng, d, labels_for(GraphVariant::spatial));
  const std::vector<DetectedObject> boxes{{50, 50, 20, 20, 0}, {50, 50, 20, 20, 1}};
  const auto g = build_spatial(boxes, 200);
  const Matrix V = fixtures::random_features(rng, 2, d);
  const auto out = typed_forward(V, g, p);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(out.attention.weights(i, 0) > 0.0);
    CHECK(out.attention.weights(i, 1) > 0.0);
    CHECK(out.attention.weights(i, 0) + out.attention.weights(i, 1) == Approx(1.0).margin(1e-15));
  }
}

TEST_CASE("missing label parameters are named", "[typed]") {
  Rng rng(1);
  const std::vector<DetectedObject> boxes{{50, 50, 20, 20, 0}, {50, 50, 100, 100, 1}};
  const auto g = build_spatial(boxes, 300);
  auto p = random_typed_params(rng, 3, GraphVariant::spatial);
  p.b_lab.erase(EdgeLabel::spatial({SpatialLabel::kCover}));
  const Matrix V = fixtures::random_features(rng, 2, 3);
  try {
    typed_forward(V, g, p);
    FAIL("no exception");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("cover") != std::string::npos);
  }
  CHECK_THROWS_AS(typed_forward(V, build_implicit(2), random_typed_params(rng, 3, GraphVariant::spatial)),
                  ConfigError);
  CHECK_THROWS_AS(typed_forward(Matrix(2, 4), g, random_typed_params(rng, 3, GraphVariant::spatial)),
                  ShapeError);
  CHECK_THROWS_AS(typed_forward(Matrix(3, 3), g, random_typed_params(rng, 3, GraphVariant::spatial)),
                  ShapeError);
}

TEST_CASE("typed backward basics", "[typed]") {
  Rng rng(19);
  const std::size_t n = 6, d = 5;
  const auto boxes = random_boxes(rng, n);
  const auto g = build_spatial(boxes, SceneExtent{}.diagonal());
  const auto p = random_typed_params(rng, d, GraphVariant::spatial);
  const Matrix V = fixtures::random_features(rng, n, d);

  const auto zero = typed_backward(V, g, p, Matrix(n, d));
  CHECK(zero.W_K == Matrix(d, d));
  CHECK(zero.V == Matrix(n, d));
  for (const auto& [label, m] : zero.b_lab) CHECK(m == Matrix(1, d));

  const Matrix up = rng.uniform_matrix(n, d, -1, 1);
  const auto grads = typed_backward(V, g, p, up);
  const auto out = typed_forward(V, g, p);

  // dL/db_l = sum over edges labelled l of w_ij * upstream_i.
  for (const auto& [label, m] : grads.b_lab) {
    Matrix expected(1, d);
    for (const Edge& e : g.edges()) {
      if (e.label != label) continue;
      for (std::size_t c = 0; c < d; ++c) {
        expected(0, c) += out.attention.weights(e.dst, e.src) * up(e.dst, c);
      }
    }
    CHECK(max_abs_diff(m, expected) <= 1e-14);
  }
  // Every non-self edge is oriented forward, so backward matrices are unused.
  const auto back = static_cast<std::size_t>(Direction::backward);
  CHECK(grads.W_dir[back] == Matrix(d, d));
  CHECK(grads.Wv_dir[back] == Matrix(d, d));
}

TEST_CASE("typed gradients agree with finite differences", "[typed]") {
  for (auto v : {GraphVariant::spatial, GraphVariant::semantic}) {
    for (std::uint64_t seed : {0u, 1u, 2u}) {
      GradcheckOptions opt;
      opt.variant = v;
      opt.seed = seed;
      const auto result = run_gradcheck(opt);
      CHECK(result.passed);
      CHECK(result.worst_error < kGradcheckTolerance);
    }
  }
}

TEST_CASE("typed output is permutation equivariant", "[typed]") {
  Rng rng(77);
  for (auto v : {GraphVariant::spatial, GraphVariant::semantic}) {
    for (int trial = 0; trial < 30; ++trial) {
      const std::size_t n = 2 + rng.below(9);
      const auto boxes = random_boxes(rng, n);
      const auto g = fixtures::random_typed_graph(rng, v, boxes);
      const Matrix V = fixtures::random_features(rng, n, 8);
      const auto p = random_typed_params(rng, 8, v);
      const auto perm = fixtures::random_permutation(rng, n);
      const auto base = typed_forward(V, g, p);
      const auto moved = typed_forward(fixtures::permute_rows(V, perm), relabel(g, perm), p);
      CHECK(max_abs_diff(moved.v_star, fixtures::permute_rows(base.v_star, perm)) <= 1e-10);
      CHECK(max_abs_diff(moved.attention.weights,
                         fixtures::permute_both(base.attention.weights, perm)) <= 1e-10);
    }
  }
}

TEST_CASE("direction of an edge", "[typed]") {
  CHECK(edge_direction(3, 3) == Direction::self);
  CHECK(edge_direction(3, 1) == Direction::forward);
  CHECK(edge_direction(1, 3) == Direction::forward);
  CHECK(direction_name(Direction::backward) == "backward");
}
