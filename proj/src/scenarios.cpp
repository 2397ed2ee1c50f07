#include "turnpike/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "turnpike/error.hpp"

namespace turnpike {

namespace {

std::vector<Point> orbit(const VectorMap& f, Point x, std::size_t length) {
  std::vector<Point> out;
  out.reserve(length);
  for (std::size_t n = 0; n < length; ++n) {
    out.push_back(x);
    x = f(x);
  }
  return out;
}

Point halve(std::span<const double> x) {
  Point y(x.begin(), x.end());
  for (double& v : y) v *= 0.5;
  return y;
}

double first_coordinate(std::span<const double> x) { return x[0]; }

}  // namespace

SystemInstance build_counterexample_system(const IdealModel& ideal,
                                           std::size_t reference_length) {
  FiniteBranch phi{{[](std::span<const double> x) { return Point{-x[0]}; },
                    [](std::span<const double> x) { return Point{x[0] / 2.0}; }}};
  return SystemInstance{
      .name = "counterexample",
      .dimension = 1,
      .phi = std::move(phi),
      .u = [](std::span<const double> x) { return x[0] * x[0] * x[0]; },
      .ideal = ideal,
      .constraint = ConstraintKind::StartAt,
      .start = {1.0},
      .start_box = std::nullopt,
      .t = Point{1.0},
      .eta_star = Point{0.0},
      .reference_path = orbit(halve, {1.0}, reference_length),
      .probe_box = Box{{-2.0}, {2.0}},
  };
}

std::size_t block_sequence_length(int k_max) {
  std::size_t total = 0;
  std::size_t factorial = 1;
  for (int k = 1; k <= k_max; ++k) {
    factorial *= static_cast<std::size_t>(k);
    total += static_cast<std::size_t>(2 * k - 1) + factorial;
  }
  return total;
}

SequenceWindow build_block_sequence(int k_max) {
  if (k_max < 2 || k_max > 12) {
    throw RangeError("k_max must lie in [2, 12], got " + std::to_string(k_max));
  }
  std::vector<double> x;
  x.reserve(block_sequence_length(k_max));
  std::size_t factorial = 1;
  for (int k = 1; k <= k_max; ++k) {
    factorial *= static_cast<std::size_t>(k);
    for (int j = 0; j < k; ++j) x.push_back(std::ldexp(1.0, -j));
    x.insert(x.end(), factorial, std::ldexp(1.0, -k));
    for (int j = k - 1; j >= 1; --j) x.push_back(std::ldexp(1.0, -j));
  }
  for (std::size_t n = 1; n < x.size(); n += 2) x[n] = -x[n];
  for (std::size_t n = 0; n + 1 < x.size(); ++n) {
    const double ratio = -x[n + 1] / x[n];
    if (!(ratio >= 0.5 && ratio <= 2.0)) {
      throw Error("block sequence leaves Phi(x) = [-2x, -x/2] at n = " + std::to_string(n));
    }
  }
  return SequenceWindow::scalar(std::move(x));
}

SystemInstance build_blocks_system(const IdealModel& ideal, std::size_t reference_length) {
  Interval1D phi{[](std::span<const double> x) { return std::min(-2.0 * x[0], -0.5 * x[0]); },
                 [](std::span<const double> x) { return std::max(-2.0 * x[0], -0.5 * x[0]); },
                 33};
  return SystemInstance{
      .name = "blocks",
      .dimension = 1,
      .phi = std::move(phi),
      .u = first_coordinate,
      .ideal = ideal,
      .constraint = ConstraintKind::Free,
      .start = {},
      .start_box = Box{{-1.0}, {1.0}},
      .t = Point{1.0},
      .eta_star = Point{0.0},
      .reference_path = orbit([](std::span<const double> x) { return Point{-0.5 * x[0]}; },
                              {1.0}, reference_length),
      .probe_box = Box{{-2.0}, {2.0}},
  };
}

SystemInstance build_ifs_system(const std::vector<AffineMap>& branches, ScalarMap u,
                                const IdealModel& ideal, double start,
                                std::size_t reference_length) {
  if (branches.empty()) throw ConfigError("IFS needs at least one branch");
  FiniteBranch phi;
  double eta = -std::numeric_limits<double>::infinity();
  double lo = std::numeric_limits<double>::infinity();
  std::size_t owner = 0;
  for (std::size_t k = 0; k < branches.size(); ++k) {
    const AffineMap m = branches[k];
    if (!(std::abs(m.slope) < 1.0)) {
      throw DivergenceError("IFS branch " + std::to_string(k) + " has slope " +
                            std::to_string(m.slope) + ", not a contraction");
    }
    const double fixed = m.offset / (1.0 - m.slope);
    if (fixed > eta) {
      eta = fixed;
      owner = k;
    }
    lo = std::min(lo, fixed);
    phi.branches.push_back(
        [m](std::span<const double> x) { return Point{m.slope * x[0] + m.offset}; });
  }
  const AffineMap best = branches[owner];
  const double margin = std::max(1.0, std::abs(start - eta));
  return SystemInstance{
      .name = "ifs",
      .dimension = 1,
      .phi = std::move(phi),
      .u = std::move(u),
      .ideal = ideal,
      .constraint = ConstraintKind::StartAt,
      .start = {start},
      .start_box = std::nullopt,
      .t = Point{1.0},
      .eta_star = Point{eta},
      .reference_path = orbit(
          [best](std::span<const double> x) { return Point{best.slope * x[0] + best.offset}; },
          {start}, reference_length),
      .probe_box = Box{{std::min(lo, start) - margin}, {std::max(eta, start) + margin}},
  };
}

Point seeded_l2_start(std::size_t d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Point x(d);
  double n = 0.0;
  while (n == 0.0) {
    for (double& v : x) v = gauss(rng);
    n = norm(x);
  }
  const double radius = std::pow(unit(rng), 1.0 / static_cast<double>(d));
  for (double& v : x) v *= radius / n;
  return x;
}

SystemInstance build_l2_truncation(std::size_t d, const Point& x_star, const IdealModel& ideal,
                                   std::size_t reference_length) {
  if (d < 2 || d > 8) throw RangeError("l2 truncation dimension must lie in [2, 8]");
  if (x_star.size() != d) throw ConfigError("x_star must have dimension " + std::to_string(d));
  Box probe{Point(d, -1.0), Point(d, 1.0)};
  for (std::size_t i = 1; i < d; ++i) {
    probe.lo[i] = -1.0 / static_cast<double>(i);
    probe.hi[i] = 0.5 / static_cast<double>(i);
  }
  Point t(d, 0.0);
  t[0] = 1.0;
  return SystemInstance{
      .name = "l2",
      .dimension = d,
      .phi = TruncatedL2{d, 5},
      .u = first_coordinate,
      .ideal = ideal,
      .constraint = ConstraintKind::StartAt,
      .start = x_star,
      .start_box = std::nullopt,
      .t = std::move(t),
      .eta_star = Point(d, 0.0),
      .reference_path = orbit(halve, x_star, reference_length),
      .probe_box = std::move(probe),
  };
}

SystemInstance build_separation_instance(const IdealModel& ideal) {
  FiniteBranch phi{{[](std::span<const double> x) { return Point{x[0] / 2.0}; },
                    [](std::span<const double> x) {
                      return Point{x[0] == 0.0 ? 1.0 : x[0] / 2.0};
                    }}};
  return SystemInstance{
      .name = "separation",
      .dimension = 1,
      .phi = std::move(phi),
      .u = first_coordinate,
      .ideal = ideal,
      .constraint = ConstraintKind::StartAt,
      .start = {1.0},
      .start_box = std::nullopt,
      .t = Point{1.0},
      .eta_star = Point{0.0},
      .reference_path = orbit(halve, {1.0}, 1024),
      .probe_box = Box{{-1.0}, {1.0}},
  };
}

}  // namespace turnpike
