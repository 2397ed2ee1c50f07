#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "support.hpp"
#include "turnpike/cluster.hpp"
#include "turnpike/error.hpp"
#include "turnpike/optimizer.hpp"
#include "turnpike/scenarios.hpp"
#include "turnpike/verifier.hpp"

using namespace turnpike;

namespace {

struct Oracle {
  double objective = -INFINITY;
  double path_min = -INFINITY;
  std::vector<std::size_t> trace;
};

double trimmed_tail_min(const std::vector<double>& u, double trim) {
  const std::size_t half = u.size() / 2;
  std::vector<double> tail(u.end() - static_cast<long>(half), u.end());
  std::sort(tail.begin(), tail.end());
  const auto drop = static_cast<std::size_t>(std::ceil(trim * static_cast<double>(half)));
  return tail[std::min(drop, tail.size() - 1)];
}

double cell(double v) { return std::floor(v / 1e-9) + 0.0; }

// Brute force over every branch sequence of a two-branch system, written
// without the library's search code. Ties keep the lexicographically first.
Oracle brute_force(const SystemInstance& sys, std::size_t n, double trim) {
  const auto& fb = std::get<FiniteBranch>(sys.phi.variant());
  Oracle best;
  const std::size_t steps = n - 1;
  for (std::size_t code = 0; code < (std::size_t{1} << steps); ++code) {
    std::vector<std::size_t> trace(steps);
    std::vector<double> u;
    Point x = sys.start;
    u.push_back(sys.u(x));
    for (std::size_t s = 0; s < steps; ++s) {
      trace[s] = (code >> (steps - 1 - s)) & 1U;
      x = fb.branches[trace[s]](x);
      u.push_back(sys.u(x));
    }
    const double obj = trimmed_tail_min(u, trim);
    const double pmin = *std::min_element(u.begin(), u.end());
    const bool better = cell(obj) > cell(best.objective) ||
                        (cell(obj) == cell(best.objective) && cell(pmin) > cell(best.path_min));
    if (best.trace.empty() || better) best = {obj, pmin, trace};
  }
  return best;
}

SystemInstance random_instance(std::uint64_t seed) {
  support::Rng rng(seed);
  std::vector<AffineMap> maps;
  for (int k = 0; k < 2; ++k) maps.push_back({rng.uniform(-0.95, 0.95), rng.uniform(-1.0, 1.0)});
  const double w = rng.uniform(0.0, 6.28);
  const double start = rng.uniform(-1.0, 1.0);
  return build_ifs_system(maps, [w](std::span<const double> x) { return std::sin(3 * x[0] + w); },
                          IdealModel::fin(1000), start, 12);
}

}  // namespace

TEST_SUITE("optimizer") {

TEST_CASE("config validation") {
  SearchConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.horizon = 1;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = {};
  cfg.beam = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = {};
  cfg.grid = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = {};
  cfg.trim = 0.5;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}

TEST_CASE("surrogate objective") {
  const IdealModel z = IdealModel::density(200);
  std::vector<double> u(200, 1.0);
  u[150] = -5.0;
  // One low value in a tail of 100 is discarded at trim 0.01 but not at 0.
  CHECK(surrogate_objective(u, z, 0.01) == 1.0);
  CHECK(surrogate_objective(u, z, 0.0) == -5.0);
  CHECK(surrogate_objective(u, IdealModel::fin(200), 0.01) == -5.0);
  CHECK(effective_trim(IdealModel::fin(200), 0.01) == 0.0);
  CHECK(effective_trim(z, 0.01) == 0.01);
  // Finite-trace over the evens only scores even indices.
  std::vector<double> alt(200);
  for (std::size_t n = 0; n < alt.size(); ++n) alt[n] = n % 2 == 0 ? 1.0 : -1.0;
  CHECK(surrogate_objective(alt, IdealModel::finite_trace(200, Parity::Evens), 0.01) == 1.0);
  CHECK(surrogate_objective(alt, z, 0.01) == -1.0);
}

TEST_CASE("exhaustive search agrees with a brute-force oracle (property)") {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const SystemInstance sys = random_instance(500 + s);
    const Oracle o = brute_force(sys, 12, 0.0);
    const OptimReport ex = exhaustive_maxmin(sys, 12);
    CHECK(ex.exhaustive);
    CHECK(ex.objective == o.objective);
    CHECK(ex.best.trace == o.trace);
    const OptimReport beam = maxmin_search(sys, {.horizon = 12, .beam = 64});
    CHECK(beam.objective <= ex.objective);
    CHECK(beam.objective == ex.objective);
    CHECK(beam.best.trace == ex.best.trace);
  }
}

TEST_CASE("beam search never overstates and improves with width (property)") {
  for (std::uint64_t s = 0; s < 20; ++s) {
    const SystemInstance sys = random_instance(900 + s);
    const double exact = exhaustive_maxmin(sys, 14).objective;
    double previous = -INFINITY;
    for (std::size_t b : {1UL, 2UL, 4UL, 16UL, 256UL}) {
      const OptimReport r = maxmin_search(sys, {.horizon = 14, .beam = b});
      // Ranking is on the 1e-9 grid, so the beam may land in the same cell
      // as the exhaustive optimum with a marginally different value.
      CHECK(r.objective <= exact + 1e-9);
      CHECK(r.objective >= previous - 1e-9);
      previous = r.objective;
    }
  }
}

TEST_CASE("determinism") {
  const SystemInstance sys = build_counterexample_system(IdealModel::density(512), 512);
  const OptimReport a = maxmin_search(sys, {.horizon = 512, .beam = 16});
  const OptimReport b = maxmin_search(sys, {.horizon = 512, .beam = 16});
  CHECK(a.objective == b.objective);
  CHECK(a.best.trace == b.best.trace);
  CHECK(a.frontier_sizes == b.frontier_sizes);
}

TEST_CASE("the counterexample under both ideals") {
  SUBCASE("finite trace: the alternating path is optimal") {
    const IdealModel ideal = IdealModel::finite_trace(512, Parity::Evens);
    const SystemInstance sys = build_counterexample_system(ideal, 512);
    const OptimReport r = maxmin_search(sys, {.horizon = 512, .beam = 64});
    CHECK(r.objective >= 1.0 - 1e-9);
    for (std::size_t n = 0; n < r.best.size(); ++n) CHECK(std::abs(r.best.states[n][0]) == 1.0);
    // Re-evaluating the objective with seq-analysis.
    const SequenceWindow u = r.best.window().map_scalar(sys.u);
    CHECK(ideal_liminf(u, ideal) == doctest::Approx(r.objective).epsilon(1e-8));
  }
  SUBCASE("density: the best path converges to zero") {
    const IdealModel ideal = IdealModel::density(512);
    const SystemInstance sys = build_counterexample_system(ideal, 512);
    const OptimReport r = maxmin_search(sys, {.horizon = 512, .beam = 64});
    CHECK(r.objective <= 1e-3);
    CHECK(r.objective >= 0.0);
    CHECK(turnpike_verdict(r.best.window(), {0.0}, ideal).verdict);
    const SequenceWindow u = r.best.window().map_scalar(sys.u);
    CHECK(std::abs(ideal_liminf(u, ideal) - r.objective) <= 1e-8);
  }
}

TEST_CASE("singleton and single-branch systems have one path") {
  const IdealModel fin = IdealModel::fin(1000);
  const SystemInstance sys = build_ifs_system({{0.5, 0.0}}, [](std::span<const double> x) { return x[0]; }, fin,
                                              1.0, 40);
  const OptimReport r = maxmin_search(sys, {.horizon = 40, .beam = 8});
  CHECK(r.objective == std::ldexp(1.0, -39));
  const OptimReport e = exhaustive_maxmin(sys, 16);
  CHECK(e.objective == std::ldexp(1.0, -15));
  CHECK(e.frontier_sizes.back() == 1);
}

TEST_CASE("IFS optimum keeps taking the second branch") {
  const SystemInstance sys = build_ifs_system({{0.5, 0.0}, {0.3, 0.7}},
                                              [](std::span<const double> x) { return x[0]; },
                                              IdealModel::fin(1000), 0.0, 12);
  const OptimReport e = exhaustive_maxmin(sys, 12);
  CHECK(std::all_of(e.best.trace.begin(), e.best.trace.end(), [](std::size_t t) { return t == 1; }));
  CHECK(maxmin_search(sys, {.horizon = 12, .beam = 64}).best.trace == e.best.trace);
}

TEST_CASE("budget and shape errors") {
  const SystemInstance sys = build_counterexample_system(IdealModel::fin(1000), 64);
  CHECK_THROWS_AS(exhaustive_maxmin(sys, 40), BudgetError);
  const SystemInstance blocks = build_blocks_system(IdealModel::fin(1000), 64);
  CHECK_THROWS_AS(exhaustive_maxmin(blocks, 8), ConfigError);
}

TEST_CASE("infeasible starts raise") {
  SystemInstance sys = build_counterexample_system(IdealModel::fin(1000), 64);
  sys.phi = Interval1D{[](std::span<const double> x) { return x[0]; },
                       [](std::span<const double> x) { return -x[0]; }, 5};
  CHECK_THROWS_AS(maxmin_search(sys, {.horizon = 64, .beam = 4}), InfeasibleError);
}

}  // TEST_SUITE
