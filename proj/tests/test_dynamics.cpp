#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "support.hpp"
#include "turnpike/dynamics.hpp"
#include "turnpike/error.hpp"
#include "turnpike/hausdorff.hpp"

using namespace turnpike;

namespace {

Correspondence counterexample_phi() {
  return FiniteBranch{{[](std::span<const double> x) { return Point{-x[0]}; },
                       [](std::span<const double> x) { return Point{x[0] / 2}; }}};
}

Correspondence affine_phi(const std::vector<std::pair<double, double>>& maps) {
  FiniteBranch fb;
  for (auto [a, b] : maps) {
    fb.branches.push_back([a, b](std::span<const double> x) { return Point{a * x[0] + b}; });
  }
  return fb;
}

Correspondence blocks_phi() {
  return Interval1D{[](std::span<const double> x) { return std::min(-2 * x[0], -x[0] / 2); },
                    [](std::span<const double> x) { return std::max(-2 * x[0], -x[0] / 2); }, 33};
}

// Exact membership of the l2 truncation written out coordinate by coordinate.
bool l2_member(const Point& x, const Point& y, double tol) {
  bool halving = true;
  for (std::size_t i = 0; i < x.size(); ++i) halving = halving && std::abs(y[i] - x[i] / 2) <= tol;
  if (halving) return true;
  double tail = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) tail += x[i] * x[i];
  if (std::abs(y[0] + tail) > tol) return false;
  for (std::size_t i = 1; i < x.size(); ++i) {
    const double lo = 2 * x[i];
    const double hi = x[i] + 1.0 / static_cast<double>(i);
    if (y[i] < lo - tol || y[i] > hi + tol) return false;
  }
  return true;
}

}  // namespace

TEST_SUITE("dynamics") {

TEST_CASE("finite branch images keep branch order") {
  const PointSet img = counterexample_phi().images(Point{0.8});
  REQUIRE(img.size() == 2);
  CHECK(img[0][0] == -0.8);
  CHECK(img[1][0] == 0.4);
  CHECK(counterexample_phi().fixed_branch_count() == 2);
}

TEST_CASE("always-second-branch path is the halving orbit") {
  const Path p = feasible_path(counterexample_phi(), {1.0}, always_branch(1), 30);
  REQUIRE(p.size() == 30);
  for (std::size_t n = 0; n < p.size(); ++n) CHECK(p.states[n][0] == std::ldexp(1.0, -static_cast<int>(n)));
  CHECK(std::all_of(p.trace.begin(), p.trace.end(), [](std::size_t t) { return t == 1; }));
}

TEST_CASE("singleton path is an orbit") {
  const Correspondence phi = Singleton{[](std::span<const double> x) { return Point{std::cos(x[0])}; }};
  const Path p = feasible_path(phi, {0.3}, always_branch(0), 20);
  double x = 0.3;
  for (std::size_t n = 0; n < p.size(); ++n) {
    CHECK(p.states[n][0] == x);
    x = std::cos(x);
  }
}

TEST_CASE("interval images are sampled segments with exact endpoints") {
  const PointSet img = blocks_phi().images(Point{1.0});
  REQUIRE(img.size() == 33);
  CHECK(img.front()[0] == -2.0);
  CHECK(img.back()[0] == -0.5);
  const PointSet neg = blocks_phi().images(Point{-1.0});
  CHECK(neg.front()[0] == 0.5);
  CHECK(neg.back()[0] == 2.0);
  CHECK(blocks_phi().distance_to_image(Point{1.0}, Point{-1.3}) == 0.0);
  CHECK(blocks_phi().distance_to_image(Point{1.0}, Point{0.0}) == doctest::Approx(0.5));
}

TEST_CASE("empty interval images raise and truncate paths") {
  const Correspondence phi = Interval1D{[](std::span<const double> x) { return x[0]; },
                                        [](std::span<const double> x) { return 2 - x[0]; }, 5};
  CHECK_THROWS_AS(phi.images(Point{1.5}), InfeasibleError);
  const Path p = feasible_path(phi, {1.5}, always_branch(0), 10);
  CHECK(p.truncated);
  CHECK(p.size() == 1);
  CHECK_FALSE(p.error.empty());
}

TEST_CASE("fixed points of the worked examples") {
  const PointSet c = fixed_points(counterexample_phi(), Box{{-2.0}, {2.0}});
  REQUIRE(c.size() == 1);
  CHECK(std::abs(c[0][0]) <= 1e-8);

  const PointSet ifs = fixed_points(affine_phi({{0.5, 0.0}, {0.3, 0.7}}), Box{{-2.0}, {2.0}});
  REQUIRE(ifs.size() == 2);
  CHECK(std::abs(ifs[0][0]) <= 1e-8);
  CHECK(std::abs(ifs[1][0] - 1.0) <= 1e-8);

  const PointSet other = fixed_points(affine_phi({{0.9, -0.1}, {0.2, 0.4}}), Box{{-2.0}, {2.0}});
  REQUIRE(other.size() == 2);
  CHECK(other[0][0] == doctest::Approx(-1.0).epsilon(1e-8));
  CHECK(other[1][0] == doctest::Approx(0.5).epsilon(1e-8));

  const PointSet blocks = fixed_points(blocks_phi(), Box{{-2.0}, {2.0}});
  REQUIRE(blocks.size() == 1);
  CHECK(std::abs(blocks[0][0]) <= 1e-8);
}

TEST_CASE("affine fixed points match the closed form (property)") {
  support::Rng rng(51);
  for (std::uint64_t c = 0; c < support::kPropertyCases; ++c) {
    std::vector<std::pair<double, double>> maps;
    PointSet expected;
    for (std::size_t k = 0; k < 1 + rng.index(3); ++k) {
      const double a = rng.uniform(-0.9, 0.9);
      const double b = rng.uniform(-1.0, 1.0);
      maps.emplace_back(a, b);
      expected.push_back({b / (1 - a)});
    }
    const Correspondence phi = affine_phi(maps);
    const PointSet got = fixed_points(phi, Box{{-15.0}, {15.0}});
    REQUIRE_FALSE(got.empty());
    CHECK(hausdorff(got, deduplicate(expected, 1e-7)) <= 1e-8);
    for (const auto& eta : got) CHECK(phi.distance_to_image(eta, eta) <= 1e-8);
  }
}

TEST_CASE("feasible paths pass an independent membership check (property)") {
  support::Rng rng(52);
  const Correspondence l2 = TruncatedL2{4, 5};
  for (std::uint64_t c = 0; c < support::kPropertyCases; ++c) {
    Point x0(4);
    for (std::size_t i = 0; i < 4; ++i) x0[i] = rng.uniform(-0.3, 0.3) / static_cast<double>(i + 1);
    const BranchPolicy random_pick = [&](std::size_t, std::span<const double>, const PointSet& imgs) {
      return rng.index(imgs.size());
    };
    const Path p = feasible_path(l2, x0, random_pick, 40);
    for (std::size_t n = 0; n + 1 < p.size(); ++n) CHECK(l2_member(p.states[n], p.states[n + 1], 1e-12));
    if (!p.truncated) CHECK_FALSE(find_infeasible_step(l2, p.window(), 1e-12).has_value());

    const Path q = feasible_path(blocks_phi(), {rng.uniform(-1.0, 1.0)}, random_pick, 60);
    for (std::size_t n = 0; n + 1 < q.size(); ++n) {
      const double r = -q.states[n + 1][0] / q.states[n][0];
      CHECK(r >= 0.5 - 1e-12);
      CHECK(r <= 2.0 + 1e-12);
    }
  }
}

TEST_CASE("the l2 image of the origin is not a singleton") {
  const Correspondence phi = TruncatedL2{8, 5};
  const Point zero(8, 0.0);
  Point y(8, 0.0);
  for (std::size_t i = 1; i < 8; ++i) y[i] = 1.0 / static_cast<double>(i);
  CHECK(phi.distance_to_image(zero, zero) == 0.0);
  CHECK(phi.distance_to_image(zero, y) == 0.0);
  CHECK(l2_member(zero, y, 0.0));
}

TEST_CASE("the l2 map jumps where a band becomes empty") {
  const Correspondence phi = TruncatedL2{3, 5};
  // Band 1 is [2 x_1, x_1 + 1]; it is a point at x_1 = 1 and empty beyond.
  const Point at = {0.0, 1.0, 0.0};
  const Point past = {0.0, 1.0 + 1e-6, 0.0};
  const double jump = hausdorff(phi.images(at), phi.images(past));
  CHECK(jump > 0.5);
  CHECK(phi.images(past).size() == 1);
}

TEST_CASE("search view keeps band endpoints above dimension four") {
  const Correspondence big = Correspondence(TruncatedL2{8, 5}).search_view();
  CHECK(std::get<TruncatedL2>(big.variant()).band_samples == 2);
  const Correspondence small = Correspondence(TruncatedL2{3, 5}).search_view();
  CHECK(std::get<TruncatedL2>(small.variant()).band_samples == 5);
  const Correspondence fine = blocks_phi().refined(10);
  CHECK(std::get<Interval1D>(fine.variant()).samples > 33);
}

TEST_CASE("hutchinson iterates contract at the branch rate") {
  const Correspondence ifs = affine_phi({{0.5, 0.0}, {0.3, 0.7}});
  const auto& fb = std::get<FiniteBranch>(ifs.variant());
  const HutchinsonResult h = hutchinson_iterate(fb, {0.0}, 25);
  CHECK(h.max_lipschitz == doctest::Approx(0.5).epsilon(1e-3));
  CHECK(h.set.front()[0] >= -1e-12);
  CHECK(h.set.back()[0] <= 1.0 + 1e-12);
  for (std::size_t n = 1; n < h.step_distances.size(); ++n) {
    if (h.step_distances[n - 1] > 10 * h.resolution) {
      CHECK(h.step_distances[n] <= h.max_lipschitz * h.step_distances[n - 1] + 2 * h.resolution);
    }
  }
  const Correspondence expanding = affine_phi({{1.5, 0.0}});
  const auto& bad = std::get<FiniteBranch>(expanding.variant());
  CHECK_THROWS_AS(hutchinson_iterate(bad, {0.0}, 5), DivergenceError);
}

TEST_CASE("hutchinson decay on random affine systems (property)") {
  support::Rng rng(53);
  for (std::uint64_t c = 0; c < 20; ++c) {
    std::vector<std::pair<double, double>> maps;
    for (std::size_t k = 0; k < 2; ++k) maps.emplace_back(rng.uniform(-0.6, 0.6), rng.uniform(-1.0, 1.0));
    const Correspondence phi = affine_phi(maps);
    const auto& fb = std::get<FiniteBranch>(phi.variant());
    const HutchinsonResult h = hutchinson_iterate(fb, {rng.uniform(-1.0, 1.0)}, 14);
    for (std::size_t n = 1; n < h.step_distances.size(); ++n) {
      CHECK(h.step_distances[n] <= h.max_lipschitz * h.step_distances[n - 1] + 2 * h.resolution);
    }
  }
}

TEST_CASE("continuity probe separates continuous and jumping maps") {
  CHECK(continuity_probe(counterexample_phi(), Box{{-2.0}, {2.0}}).passed);
  CHECK(continuity_probe(blocks_phi(), Box{{-2.0}, {2.0}}).passed);
  const Correspondence jump = FiniteBranch{
      {[](std::span<const double> x) { return Point{x[0] / 2}; },
       [](std::span<const double> x) { return Point{x[0] == 0.0 ? 1.0 : x[0] / 2}; }}};
  CHECK_FALSE(continuity_probe(jump, Box{{-1.0}, {1.0}}).passed);
}

}  // TEST_SUITE
