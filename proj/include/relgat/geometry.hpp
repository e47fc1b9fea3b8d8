// Copyright (c) 2026, The relgat Authors
// SPDX-License-Identifier: Apache-2.0
//
// Box geometry for detected regions: IoU, union boxes, the 4-d relative
// geometry feature with its sinusoidal embedding, and rule-based spatial
// relation labels.
//
// Boxes are center format (cx, cy, w, h) in pixels. Angles are measured in
// the image frame as atan2(cy_j - cy_i, cx_j - cx_i), so with the usual
// downward pixel y axis 90 degrees points down the image.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include "relgat/errors.hpp"

namespace relgat {

struct DetectedObject {
  double cx = 0.0;
  double cy = 0.0;
  double w = 1.0;
  double h = 1.0;
  int category = 0;

  double left() const { return cx - 0.5 * w; }
  double right() const { return cx + 0.5 * w; }
  double top() const { return cy - 0.5 * h; }
  double bottom() const { return cy + 0.5 * h; }
  double area() const { return w * h; }

  friend bool operator==(const DetectedObject&, const DetectedObject&) = default;
};

inline constexpr int kUnionCategory = -1;

inline void validate_box(const DetectedObject& o) {
  if (!(o.w > 0.0) || !(o.h > 0.0) || !std::isfinite(o.cx) ||
      !std::isfinite(o.cy) || !std::isfinite(o.w) || !std::isfinite(o.h)) {
    throw DomainError("box must have finite center and positive size");
  }
}

inline double intersection_area(const DetectedObject& a,
                                const DetectedObject& b) {
  const double iw = std::min(a.right(), b.right()) - std::max(a.left(), b.left());
  const double ih = std::min(a.bottom(), b.bottom()) - std::max(a.top(), b.top());
  if (iw <= 0.0 || ih <= 0.0) return 0.0;
  return iw * ih;
}

inline double iou(const DetectedObject& a, const DetectedObject& b) {
  const double inter = intersection_area(a, b);
  if (inter == 0.0) return 0.0;
  return inter / (a.area() + b.area() - inter);
}

inline DetectedObject union_box(const DetectedObject& a,
                                const DetectedObject& b) {
  const double l = std::min(a.left(), b.left());
  const double r = std::max(a.right(), b.right());
  const double t = std::min(a.top(), b.top());
  const double btm = std::max(a.bottom(), b.bottom());
  return {0.5 * (l + r), 0.5 * (t + btm), r - l, btm - t, kUnionCategory};
}

// ---------------------------------------------------------------------------
// Relative geometry feature and embedding.

using GeometryFeature = std::array<double, 4>;

inline constexpr double kOffsetClamp = 1e-3;
inline constexpr std::size_t kDefaultEmbedWidth = 64;

/// (log(|dx|/w_i), log(|dy|/h_i), log(w_j/w_i), log(h_j/h_i)) with |dx| and
/// |dy| clamped below at kOffsetClamp.
inline GeometryFeature geometry_feature(const DetectedObject& oi,
                                        const DetectedObject& oj) {
  const double dx = std::max(std::abs(oi.cx - oj.cx), kOffsetClamp);
  const double dy = std::max(std::abs(oi.cy - oj.cy), kOffsetClamp);
  return {std::log(dx / oi.w), std::log(dy / oi.h), std::log(oj.w / oi.w),
          std::log(oj.h / oi.h)};
}

inline void validate_embed_width(std::size_t width) {
  if (width == 0 || width % 8 != 0) {
    throw ConfigError("geometry embedding width " + std::to_string(width) +
                      " must be a positive multiple of 8");
  }
}

/// For each component g_m and k in [0, width/8): sin(g_m / 1000^(8k/width)),
/// cos(g_m / 1000^(8k/width)). Laid out component-major, then k, sin first.
inline std::vector<double> sinusoidal_embed(const GeometryFeature& g,
                                            std::size_t width) {
  validate_embed_width(width);
  const std::size_t per_component = width / 8;
  std::vector<double> out;
  out.reserve(width);
  for (double value : g) {
    for (std::size_t k = 0; k < per_component; ++k) {
      const double wavelength = std::pow(
          1000.0, 8.0 * static_cast<double>(k) / static_cast<double>(width));
      const double phase = value / wavelength;
      out.push_back(std::sin(phase));
      out.push_back(std::cos(phase));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Spatial relation labels.

/// 0 = no relation, 1 = inside, 2 = cover, 3 = overlap, 4 + k = direction
/// octant centered at k * 45 degrees.
struct SpatialLabel {
  int class_id = 0;

  static constexpr int kNoRelation = 0;
  static constexpr int kInside = 1;
  static constexpr int kCover = 2;
  static constexpr int kOverlap = 3;
  static constexpr int kFirstOctant = 4;
  static constexpr int kCount = 12;

  static SpatialLabel octant(int k) { return {kFirstOctant + k}; }

  bool is_relation() const { return class_id != kNoRelation; }
  bool is_octant() const { return class_id >= kFirstOctant; }

  friend auto operator<=>(const SpatialLabel&, const SpatialLabel&) = default;
};

inline std::string spatial_label_name(SpatialLabel label) {
  switch (label.class_id) {
    case SpatialLabel::kNoRelation: return "no_relation";
    case SpatialLabel::kInside: return "inside";
    case SpatialLabel::kCover: return "cover";
    case SpatialLabel::kOverlap: return "overlap";
    default: break;
  }
  if (label.class_id > SpatialLabel::kOverlap &&
      label.class_id < SpatialLabel::kCount) {
    return "angle_" +
           std::to_string((label.class_id - SpatialLabel::kFirstOctant) * 45);
  }
  throw DomainError("spatial label id " + std::to_string(label.class_id) +
                    " out of range");
}

inline SpatialLabel complement_label(SpatialLabel label) {
  switch (label.class_id) {
    case SpatialLabel::kNoRelation:
      throw DomainError("no_relation has no complement");
    case SpatialLabel::kInside: return {SpatialLabel::kCover};
    case SpatialLabel::kCover: return {SpatialLabel::kInside};
    case SpatialLabel::kOverlap: return label;
    default: break;
  }
  if (!label.is_octant() || label.class_id >= SpatialLabel::kCount) {
    throw DomainError("spatial label id " + std::to_string(label.class_id) +
                      " out of range");
  }
  const int k = label.class_id - SpatialLabel::kFirstOctant;
  return SpatialLabel::octant((k + 4) % 8);
}

struct SpatialRules {
  double overlap_iou = 0.5;
  double distance_ratio = 0.5;
};

namespace detail {

// Octant of a nonzero direction lying in the closed upper half plane
// (dy > 0, or dy == 0 and dx > 0). Boundaries at 22.5 + 45k degrees go to
// the octant whose center precedes them.
inline int upper_half_octant(double dx, double dy) {
  const double degrees = std::atan2(dy, dx) * (180.0 / std::numbers::pi);
  const double k = std::ceil((degrees - 22.5) / 45.0);
  return std::clamp(static_cast<int>(k), 0, 4);
}

}  // namespace detail

/// Direction octant of the vector (dx, dy). Lower-half directions are
/// classified through their negation so that octant(-v) is always
/// octant(v) + 4 (mod 8), bit for bit.
inline int direction_octant(double dx, double dy) {
  if (dx == 0.0 && dy == 0.0) {
    throw DomainError("direction of a zero vector is undefined");
  }
  const bool upper = dy > 0.0 || (dy == 0.0 && dx > 0.0);
  if (upper) return detail::upper_half_octant(dx, dy);
  return (detail::upper_half_octant(-dx, -dy) + 4) % 8;
}

inline bool strictly_inside(const DetectedObject& inner,
                            const DetectedObject& outer) {
  return inner.left() > outer.left() && inner.right() < outer.right() &&
         inner.top() > outer.top() && inner.bottom() < outer.bottom();
}

/// Rules, first match wins: i strictly inside j -> inside; j strictly inside
/// i -> cover; IoU >= overlap_iou -> overlap; coincident centers -> overlap;
/// center distance <= distance_ratio * image_diag -> direction octant from i
/// to j; otherwise no relation.
inline SpatialLabel spatial_classify(const DetectedObject& oi,
                                     const DetectedObject& oj,
                                     double image_diag,
                                     const SpatialRules& rules = {}) {
  if (!(image_diag > 0.0)) {
    throw DomainError("image diagonal must be positive");
  }
  if (strictly_inside(oi, oj)) return {SpatialLabel::kInside};
  if (strictly_inside(oj, oi)) return {SpatialLabel::kCover};
  if (iou(oi, oj) >= rules.overlap_iou) return {SpatialLabel::kOverlap};

  const double dx = oj.cx - oi.cx;
  const double dy = oj.cy - oi.cy;
  if (dx == 0.0 && dy == 0.0) return {SpatialLabel::kOverlap};
  if (std::hypot(dx, dy) <= rules.distance_ratio * image_diag) {
    return SpatialLabel::octant(direction_octant(dx, dy));
  }
  return {SpatialLabel::kNoRelation};
}

inline double image_diagonal(double width, double height) {
  return std::hypot(width, height);
}

}  // namespace relgat
