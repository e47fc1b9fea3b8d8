// Copyright (c) 2026, The relgat Authors
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <vector>

#include "relgat/relgat.hpp"

using namespace relgat;
using Catch::Approx;

namespace {

DetectedObject box(double cx, double cy, double w, double h) { return {cx, cy, w, h, 0}; }

int label_at(double degrees, double radius = 10.0) {
  const double rad = degrees * std::numbers::pi / 180.0;
  const DetectedObject a = box(0, 0, 1, 1);
  const DetectedObject b = box(radius * std::cos(rad), radius * std::sin(rad), 1, 1);
  return spatial_classify(a, b, 1000.0).class_id;
}

}  // namespace

TEST_CASE("iou examples", "[geometry]") {
  const auto a = box(5, 5, 10, 10);
  CHECK(iou(a, a) == 1.0);
  CHECK(iou(a, box(10, 5, 10, 10)) == Approx(1.0 / 3).epsilon(1e-15));
  CHECK(iou(a, box(100, 100, 10, 10)) == 0.0);
  // Touching edges share no area.
  CHECK(iou(a, box(15, 5, 10, 10)) == 0.0);
  CHECK(iou(box(10, 5, 10, 10), a) == iou(a, box(10, 5, 10, 10)));
}

TEST_CASE("union box", "[geometry]") {
  const auto u = union_box(box(5, 5, 10, 10), box(25, 25, 10, 10));
  CHECK(u.cx == 15);
  CHECK(u.cy == 15);
  CHECK(u.w == 30);
  CHECK(u.h == 30);
  CHECK(u.category == kUnionCategory);

  const auto outer = box(50, 50, 100, 80);
  const auto v = union_box(box(40, 45, 10, 10), outer);
  CHECK(v.cx == outer.cx);
  CHECK(v.cy == outer.cy);
  CHECK(v.w == outer.w);
  CHECK(v.h == outer.h);
}

TEST_CASE("box validation", "[geometry]") {
  CHECK_NOTHROW(validate_box(box(0, 0, 1, 1)));
  CHECK_THROWS_AS(validate_box(box(0, 0, 0, 1)), DomainError);
  CHECK_THROWS_AS(validate_box(box(0, 0, 1, -2)), DomainError);
  CHECK_THROWS_AS(validate_box(box(NAN, 0, 1, 1)), DomainError);
  CHECK_THROWS_AS(validate_box(box(0, 0, INFINITY, 1)), DomainError);
}

TEST_CASE("geometry feature examples", "[geometry]") {
  const auto g = geometry_feature(box(5, 5, 10, 10), box(15, 15, 20, 20));
  CHECK(g[0] == 0.0);
  CHECK(g[1] == 0.0);
  CHECK(g[2] == Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(g[3] == Approx(std::log(2.0)).epsilon(1e-15));

  const auto same = box(3, 4, 8, 6);
  const auto s = geometry_feature(same, same);
  CHECK(s[0] == std::log(1e-3 / 8));
  CHECK(s[1] == std::log(1e-3 / 6));
  CHECK(s[2] == 0.0);
  CHECK(s[3] == 0.0);
}

TEST_CASE("geometry feature is translation and scale invariant", "[geometry]") {
  Rng rng(5);
  for (int trial = 0; trial < 500; ++trial) {
    auto a = box(rng.uniform(0, 640), rng.uniform(0, 480), rng.uniform(5, 300), rng.uniform(5, 200));
    auto b = box(a.cx + rng.uniform(1, 200) * (rng.uniform() < 0.5 ? -1 : 1),
                 a.cy + rng.uniform(1, 200) * (rng.uniform() < 0.5 ? -1 : 1),
                 rng.uniform(5, 300), rng.uniform(5, 200));
    const double tx = rng.uniform(-1000, 1000);
    const double ty = rng.uniform(-1000, 1000);
    const double scale = rng.uniform(0.1, 10);
    auto moved = [&](DetectedObject o) {
      return box((o.cx + tx) * scale, (o.cy + ty) * scale, o.w * scale, o.h * scale);
    };
    const auto g0 = geometry_feature(a, b);
    const auto g1 = geometry_feature(moved(a), moved(b));
    for (int m = 0; m < 4; ++m) CHECK(std::abs(g0[m] - g1[m]) <= 1e-12);
  }
}

TEST_CASE("sinusoidal embedding", "[geometry]") {
  const auto zero = sinusoidal_embed({0, 0, 0, 0}, 8);
  CHECK(zero == std::vector<double>{0, 1, 0, 1, 0, 1, 0, 1});

  const auto half_pi = sinusoidal_embed({std::numbers::pi / 2, 0, 0, 0}, 8);
  CHECK(half_pi[0] == 1.0);
  CHECK(half_pi[1] == Approx(6.123233995736766e-17).epsilon(1e-12));

  const auto wide = sinusoidal_embed({0.7, -1.2, 2.0, 0.1}, 64);
  REQUIRE(wide.size() == 64);
  // Component 1, frequency index 3: slots 16 + 2*3.
  const double phase = -1.2 / std::pow(1000.0, 24.0 / 64.0);
  CHECK(wide[22] == Approx(std::sin(phase)).epsilon(1e-15));
  CHECK(wide[23] == Approx(std::cos(phase)).epsilon(1e-15));
  for (std::size_t k = 0; k < 64; k += 2) {
    CHECK(wide[k] * wide[k] + wide[k + 1] * wide[k + 1] == Approx(1.0).epsilon(1e-14));
  }

  CHECK_THROWS_AS(sinusoidal_embed({0, 0, 0, 0}, 12), ConfigError);
  CHECK_THROWS_AS(sinusoidal_embed({0, 0, 0, 0}, 0), ConfigError);
}

TEST_CASE("spatial rule examples", "[geometry]") {
  const double diag = image_diagonal(200, 200);
  const auto small = box(50, 50, 20, 20);
  const auto large = box(50, 50, 100, 100);
  CHECK(spatial_classify(small, large, diag).class_id == SpatialLabel::kInside);
  CHECK(spatial_classify(large, small, diag).class_id == SpatialLabel::kCover);
  CHECK(spatial_classify(small, small, diag).class_id == SpatialLabel::kOverlap);

  const auto far = box(190, 190, 10, 10);
  const auto near_origin = box(5, 5, 10, 10);
  CHECK(spatial_classify(near_origin, far, image_diagonal(120, 120)).class_id ==
        SpatialLabel::kNoRelation);

  // Sharing an edge is not strict containment.
  const auto flush = box(40, 50, 20, 20);
  CHECK(spatial_classify(flush, box(80, 50, 100, 100), diag).class_id != SpatialLabel::kInside);
}

TEST_CASE("spatial thresholds are configurable", "[geometry]") {
  const auto a = box(0, 0, 10, 10);
  const auto b = box(4, 0, 10, 10);  // IoU 6/14
  CHECK(spatial_classify(a, b, 100).is_octant());
  CHECK(spatial_classify(a, b, 100, {0.4, 0.5}).class_id == SpatialLabel::kOverlap);
  const auto c = box(30, 0, 10, 10);
  CHECK(spatial_classify(a, c, 100, {0.5, 0.3}).is_octant());
  CHECK(spatial_classify(a, c, 100, {0.5, 0.25}).class_id == SpatialLabel::kNoRelation);
}

TEST_CASE("coincident centers without containment overlap", "[geometry]") {
  const auto wide = box(0, 0, 40, 4);
  const auto tall = box(0, 0, 4, 40);
  CHECK(iou(wide, tall) < 0.5);
  CHECK(spatial_classify(wide, tall, 100).class_id == SpatialLabel::kOverlap);
  CHECK(spatial_classify(tall, wide, 100).class_id == SpatialLabel::kOverlap);
}

TEST_CASE("octant centers and boundaries", "[geometry]") {
  for (int k = 0; k < 8; ++k) {
    CHECK(label_at(45.0 * k) == SpatialLabel::kFirstOctant + k);
    CHECK(label_at(45.0 * k + 10) == SpatialLabel::kFirstOctant + k);
    CHECK(label_at(45.0 * k - 10) == SpatialLabel::kFirstOctant + k);
  }
  CHECK(direction_octant(1, 0) == 0);
  CHECK(direction_octant(0, 1) == 2);
  CHECK(direction_octant(-1, 0) == 4);
  CHECK(direction_octant(0, -1) == 6);
  CHECK(direction_octant(1, 1) == 1);
  CHECK(direction_octant(-1, -1) == 5);
  CHECK_THROWS_AS(direction_octant(0, 0), DomainError);
  // Boundaries go to the octant centered before them.
  CHECK(detail::upper_half_octant(std::cos(std::numbers::pi / 8), std::sin(std::numbers::pi / 8)) <= 1);
}

TEST_CASE("octant of a negated vector is the opposite octant", "[geometry]") {
  Rng rng(17);
  for (int trial = 0; trial < 20000; ++trial) {
    double dx = rng.uniform(-1, 1);
    double dy = rng.uniform(-1, 1);
    if (trial % 4 == 0) dx = static_cast<double>(rng.below(5)) - 2.0;
    if (trial % 4 == 1) dy = static_cast<double>(rng.below(5)) - 2.0;
    if (dx == 0 && dy == 0) continue;
    CHECK(direction_octant(-dx, -dy) == (direction_octant(dx, dy) + 4) % 8);
  }
}

TEST_CASE("complement labels", "[geometry]") {
  CHECK(complement_label({SpatialLabel::kInside}).class_id == SpatialLabel::kCover);
  CHECK(complement_label({SpatialLabel::kCover}).class_id == SpatialLabel::kInside);
  CHECK(complement_label({SpatialLabel::kOverlap}).class_id == SpatialLabel::kOverlap);
  CHECK(complement_label(SpatialLabel::octant(1)) == SpatialLabel::octant(5));
  CHECK(complement_label(SpatialLabel::octant(6)) == SpatialLabel::octant(2));
  CHECK_THROWS_AS(complement_label({SpatialLabel::kNoRelation}), DomainError);
  CHECK_THROWS_AS(complement_label({SpatialLabel::kCount}), DomainError);
  for (int c = 1; c < SpatialLabel::kCount; ++c) {
    CHECK(complement_label(complement_label({c})).class_id == c);
  }
}

TEST_CASE("spatial labels are complementary for random pairs", "[geometry]") {
  Rng rng(23);
  const SceneExtent scene;
  for (int trial = 0; trial < 2000; ++trial) {
    auto boxes = random_boxes(rng, 2, scene);
    if (trial % 3 == 0) {
      // Integer grid centers hit axis-aligned and diagonal directions exactly.
      for (auto& b : boxes) {
        b.cx = static_cast<double>(rng.below(5)) * 40.0;
        b.cy = static_cast<double>(rng.below(5)) * 40.0;
      }
    }
    const auto ij = spatial_classify(boxes[0], boxes[1], scene.diagonal());
    const auto ji = spatial_classify(boxes[1], boxes[0], scene.diagonal());
    REQUIRE(ij.is_relation() == ji.is_relation());
    if (ij.is_relation()) CHECK(complement_label(ij) == ji);
  }
}

TEST_CASE("spatial label names", "[geometry]") {
  CHECK(spatial_label_name({0}) == "no_relation");
  CHECK(spatial_label_name({3}) == "overlap");
  CHECK(spatial_label_name(SpatialLabel::octant(0)) == "angle_0");
  CHECK(spatial_label_name(SpatialLabel::octant(7)) == "angle_315");
  CHECK_THROWS_AS(spatial_label_name({12}), DomainError);
}
