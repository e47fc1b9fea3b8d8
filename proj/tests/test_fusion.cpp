// Copyright (c) 2026, The relgat Authors
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "relgat/relgat.hpp"

using namespace relgat;
using Catch::Approx;

namespace {

std::vector<double> random_distribution(Rng& rng, std::size_t n) {
  std::vector<double> logits(n);
  for (double& l : logits) l = 3.0 * rng.normal();
  return stable_softmax(logits);
}

// Expected populated cells of the alpha/beta grid, rows alpha = 0.1..0.8,
// columns beta = 0.1..0.8.
constexpr const char* kExpectedLayout[] = {
    "########", "#######-", "######--", "#####---",
    "####----", "###-----", "##------", "#-------",
};

}  // namespace

TEST_CASE("fusion examples", "[fusion]") {
  const std::vector<double> spa{1, 0}, sem{0, 1}, imp{0, 1};
  const auto out = fuse(spa, sem, imp, {0.3, 0.3});
  CHECK(out[0] == Approx(0.3).epsilon(1e-15));
  CHECK(out[1] == Approx(0.7).epsilon(1e-15));

  const FusionWeights defaults;
  CHECK(defaults.alpha == 0.3);
  CHECK(defaults.beta == 0.3);
  CHECK(defaults.implicit_weight() == Approx(0.4).epsilon(1e-15));
}

TEST_CASE("fusion keeps a shared input fixed", "[fusion]") {
  Rng rng(10);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto p = random_distribution(rng, 1 + rng.below(50));
    const double a = rng.uniform(0, 1);
    const FusionWeights w{a, rng.uniform(0, 1 - a)};
    CHECK(fuse(p, p, p, w) == p);
  }
}

TEST_CASE("fusion is convex", "[fusion]") {
  Rng rng(11);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t n = 1 + rng.below(40);
    const auto a = random_distribution(rng, n);
    const auto b = random_distribution(rng, n);
    const auto c = random_distribution(rng, n);
    const double alpha = rng.uniform(0, 1);
    const FusionWeights w{alpha, rng.uniform(0, 1 - alpha)};
    const auto out = fuse(a, b, c, w);
    double sum = 0.0;
    for (double x : out) {
      CHECK(x >= 0.0);
      sum += x;
    }
    CHECK(std::abs(sum - 1.0) <= 1e-12);
  }
}

TEST_CASE("fusion validation", "[fusion]") {
  const std::vector<double> p{0.5, 0.5};
  CHECK_THROWS_AS(fuse(p, p, p, {0.6, 0.6}), DomainError);
  CHECK_THROWS_AS(fuse(p, p, p, {-0.1, 0.3}), DomainError);
  CHECK_THROWS_AS(fuse(p, p, p, {NAN, 0.3}), DomainError);
  CHECK_NOTHROW(fuse(p, p, p, {0.0, 0.0}));
  CHECK_NOTHROW(fuse(p, p, p, {0.5, 0.49}));
  // The implicit stream keeps a strictly positive weight.
  CHECK_THROWS_AS(fuse(p, p, p, {0.5, 0.5}), DomainError);
  CHECK_THROWS_AS(fuse(p, p, std::vector<double>{1.0}, {}), ShapeError);
  CHECK_THROWS_AS(fuse(std::vector<double>{0.5, 0.6}, p, p, {}), DomainError);
  CHECK_THROWS_AS(fuse(std::vector<double>{1.5, -0.5}, p, p, {}), DomainError);
}

TEST_CASE("sweep has the expected grid layout", "[fusion]") {
  const auto grid = sweep([](const FusionWeights&) { return 1.0; }, 0.1);
  REQUIRE(grid.extent == 8);
  CHECK(grid.valid_count() == 36);
  for (std::size_t a = 1; a <= 8; ++a) {
    for (std::size_t b = 1; b <= 8; ++b) {
      const auto& cell = grid.at(a, b);
      CHECK(cell.valid == (kExpectedLayout[a - 1][b - 1] == '#'));
      CHECK(cell.score.has_value() == cell.valid);
      if (cell.valid) CHECK(*cell.score == 1.0);
    }
  }
  CHECK(grid.at(3, 3).alpha == Approx(0.3));
  CHECK(grid.at(8, 1).alpha + grid.at(8, 1).beta == Approx(0.9));
}

TEST_CASE("sweep finds a synthetic peak", "[fusion]") {
  const auto grid = sweep(
      [](const FusionWeights& w) {
        return -((w.alpha - 0.3) * (w.alpha - 0.3) + (w.beta - 0.3) * (w.beta - 0.3));
      },
      0.1);
  const auto* best = grid.best();
  REQUIRE(best != nullptr);
  CHECK(best->a == 3);
  CHECK(best->b == 3);
}

TEST_CASE("sweep isolates failing cells", "[fusion]") {
  const auto grid = sweep(
      [](const FusionWeights& w) {
        if (w.alpha > 0.65) throw std::runtime_error("scorer down");
        return w.beta;
      },
      0.1);
  CHECK(grid.at(7, 1).error == "scorer down");
  CHECK_FALSE(grid.at(7, 1).score.has_value());
  CHECK(grid.at(6, 3).score.has_value());
  CHECK(grid.best()->b == 8);
  CHECK_THROWS_AS(sweep([](const FusionWeights&) { return 0.0; }, 0.0), DomainError);
  CHECK_THROWS_AS(sweep([](const FusionWeights&) { return 0.0; }, 1.0), DomainError);
}

TEST_CASE("sweep at other steps", "[fusion]") {
  const auto coarse = sweep([](const FusionWeights&) { return 0.0; }, 0.25);
  CHECK(coarse.extent == 2);
  CHECK(coarse.valid_count() == 3);
  const auto fine = sweep([](const FusionWeights&) { return 0.0; }, 0.05);
  CHECK(fine.extent == 18);
  CHECK(fine.valid_count() == 18 * 19 / 2);
}

TEST_CASE("sweep rendering", "[fusion]") {
  const auto grid = sweep([](const FusionWeights&) { return 2.5; }, 0.1);
  const std::string table = render_sweep_table(grid);
  CHECK(table.find("alpha\\beta") != std::string::npos);
  CHECK(table.find("2.5000") != std::string::npos);
  const auto doc = sweep_to_json(grid);
  CHECK(doc.at("format_version") == 1);
  CHECK(doc.at("valid_cells") == 36);
}
