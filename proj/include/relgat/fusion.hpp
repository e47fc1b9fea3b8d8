// Copyright (c) 2026, The relgat Authors
// SPDX-License-Identifier: Apache-2.0
//
// Per-step fusion of the spatial, semantic and implicit word distributions,
//   P = alpha P_spa + beta P_sem + (1 - alpha - beta) P_imp,
// and a grid sweep over (alpha, beta).

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <exception>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "relgat/errors.hpp"
#include "relgat/json_io.hpp"

namespace relgat {

inline constexpr double kDefaultAlpha = 0.3;
inline constexpr double kDefaultBeta = 0.3;
inline constexpr double kDistributionTolerance = 1e-9;

struct FusionWeights {
  double alpha = kDefaultAlpha;
  double beta = kDefaultBeta;

  double implicit_weight() const { return 1.0 - (alpha + beta); }

  void validate() const {
    if (!std::isfinite(alpha) || !std::isfinite(beta) || alpha < 0.0 ||
        beta < 0.0 || !(alpha + beta < 1.0)) {
      throw DomainError("fusion weights need alpha >= 0, beta >= 0 and "
                        "alpha + beta < 1 (got alpha=" + std::to_string(alpha) +
                        ", beta=" + std::to_string(beta) + ")");
    }
  }
};

inline void validate_distribution(std::span<const double> p, const std::string& what) {
  if (p.empty()) throw DomainError(what + " is empty");
  double total = 0.0;
  for (double v : p) {
    if (!std::isfinite(v) || v < 0.0) {
      throw DomainError(what + " has a negative or non-finite entry");
    }
    total += v;
  }
  if (std::abs(total - 1.0) > kDistributionTolerance) {
    throw DomainError(what + " sums to " + std::to_string(total) + ", not 1");
  }
}

/// Evaluated as p_imp + alpha (p_spa - p_imp) + beta (p_sem - p_imp) so that
/// three identical inputs come back unchanged bit for bit.
inline std::vector<double> fuse(std::span<const double> p_spa,
                                std::span<const double> p_sem,
                                std::span<const double> p_imp,
                                const FusionWeights& w) {
  w.validate();
  if (p_spa.size() != p_imp.size() || p_sem.size() != p_imp.size()) {
    throw ShapeError("fuse: vocabulary sizes " + std::to_string(p_spa.size()) +
                     ", " + std::to_string(p_sem.size()) + ", " +
                     std::to_string(p_imp.size()) + " differ");
  }
  validate_distribution(p_spa, "spatial distribution");
  validate_distribution(p_sem, "semantic distribution");
  validate_distribution(p_imp, "implicit distribution");

  std::vector<double> out(p_imp.size());
  for (std::size_t k = 0; k < out.size(); ++k) {
    const double mixed = p_imp[k] + w.alpha * (p_spa[k] - p_imp[k]) +
                         w.beta * (p_sem[k] - p_imp[k]);
    out[k] = std::max(0.0, mixed);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sweep.

struct SweepCell {
  std::size_t a = 0;  // alpha = a * step
  std::size_t b = 0;  // beta = b * step
  double alpha = 0.0;
  double beta = 0.0;
  bool valid = false;
  std::optional<double> score;
  std::string error;
};

struct SweepGrid {
  double step = 0.1;
  std::size_t extent = 0;  // a, b range over 1..extent
  std::vector<SweepCell> cells;  // row-major by (a, b)

  const SweepCell& at(std::size_t a, std::size_t b) const {
    return cells.at((a - 1) * extent + (b - 1));
  }

  std::size_t valid_count() const {
    return static_cast<std::size_t>(std::count_if(
        cells.begin(), cells.end(), [](const SweepCell& c) { return c.valid; }));
  }

  /// Highest-scoring valid cell; ties keep the first in (alpha, beta) order.
  const SweepCell* best() const {
    const SweepCell* winner = nullptr;
    for (const auto& c : cells) {
      if (c.valid && c.score && (!winner || *c.score > *winner->score)) winner = &c;
    }
    return winner;
  }
};

inline constexpr double kSweepTolerance = 1e-9;

namespace detail {

inline int step_decimals(double step) {
  int decimals = 1;
  while (decimals < 6 &&
         std::abs(step * std::pow(10.0, decimals) -
                  std::round(step * std::pow(10.0, decimals))) > 1e-9) {
    ++decimals;
  }
  return decimals;
}

inline std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

}  // namespace detail

/// Scores every (a*step, b*step) with a, b >= 1 whose row or column holds at
/// least one admissible cell; cells with alpha + beta >= 1 are marked invalid
/// and not scored. A throwing scorer marks only that cell as failed.
inline SweepGrid sweep(const std::function<double(const FusionWeights&)>& scorer,
                       double step) {
  if (!(step > 0.0) || !(step < 1.0)) {
    throw DomainError("sweep step must lie in (0, 1)");
  }
  SweepGrid grid;
  grid.step = step;
  while (static_cast<double>(grid.extent + 2) * step < 1.0 - kSweepTolerance) {
    ++grid.extent;
  }
  const double scale = std::pow(10.0, detail::step_decimals(step));
  for (std::size_t a = 1; a <= grid.extent; ++a) {
    for (std::size_t b = 1; b <= grid.extent; ++b) {
      SweepCell cell;
      cell.a = a;
      cell.b = b;
      cell.alpha = std::round(static_cast<double>(a) * step * scale) / scale;
      cell.beta = std::round(static_cast<double>(b) * step * scale) / scale;
      cell.valid = static_cast<double>(a + b) * step < 1.0 - kSweepTolerance;
      if (cell.valid) {
        try {
          cell.score = scorer(FusionWeights{cell.alpha, cell.beta});
        } catch (const std::exception& e) {
          cell.error = e.what();
        }
      }
      grid.cells.push_back(std::move(cell));
    }
  }
  return grid;
}


/// Rows are alpha, columns beta, "-" for inadmissible cells.
inline std::string render_sweep_table(const SweepGrid& grid) {
  const int decimals = detail::step_decimals(grid.step);
  const int width = 10;
  auto pad = [&](std::string s) {
    if (static_cast<int>(s.size()) < width) s.insert(0, width - s.size(), ' ');
    return s;
  };
  std::string out = pad("alpha\\beta");
  for (std::size_t b = 1; b <= grid.extent; ++b) {
    out += pad(detail::fixed(static_cast<double>(b) * grid.step, decimals));
  }
  out += "\n";
  for (std::size_t a = 1; a <= grid.extent; ++a) {
    out += pad(detail::fixed(static_cast<double>(a) * grid.step, decimals));
    for (std::size_t b = 1; b <= grid.extent; ++b) {
      const auto& c = grid.at(a, b);
      if (!c.valid) {
        out += pad("-");
      } else if (!c.score) {
        out += pad("error");
      } else {
        out += pad(detail::fixed(*c.score, 4));
      }
    }
    out += "\n";
  }
  return out;
}

inline json sweep_to_json(const SweepGrid& grid) {
  json doc;
  doc["format_version"] = kFormatVersion;
  doc["step"] = grid.step;
  doc["extent"] = grid.extent;
  doc["valid_cells"] = grid.valid_count();
  json cells = json::array();
  for (const auto& c : grid.cells) {
    json j;
    j["alpha"] = c.alpha;
    j["beta"] = c.beta;
    j["valid"] = c.valid;
    if (c.valid) {
      if (c.score) {
        j["score"] = *c.score;
      } else {
        j["score"] = nullptr;
        j["error"] = c.error;
      }
    }
    cells.push_back(std::move(j));
  }
  doc["cells"] = std::move(cells);
  if (const SweepCell* best = grid.best()) {
    doc["best"] = {{"alpha", best->alpha}, {"beta", best->beta}, {"score", *best->score}};
  } else {
    doc["best"] = nullptr;
  }
  return doc;
}

}  // namespace relgat
