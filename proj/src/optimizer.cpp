#include "turnpike/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <unordered_map>

#include "turnpike/error.hpp"

namespace turnpike {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Keeps the k+1 smallest tail utilities seen so far.
struct TailSpec {
  std::size_t horizon = 0;
  std::size_t tail_start = 0;
  std::size_t keep = 1;
  const IdealModel* ideal = nullptr;
  bool filter_trace = false;

  bool counts(std::size_t n) const {
    if (n < tail_start) return false;
    return !filter_trace || ideal->in_trace(n);
  }
};

TailSpec make_tail(std::size_t horizon, const IdealModel& ideal, double trim) {
  TailSpec spec;
  spec.horizon = horizon;
  spec.tail_start = horizon - horizon / 2;
  spec.ideal = &ideal;
  spec.filter_trace = ideal.kind() == IdealKind::FiniteTrace;
  std::size_t counted = 0;
  for (std::size_t n = spec.tail_start; n < horizon; ++n) counted += spec.counts(n) ? 1 : 0;
  if (counted == 0) {
    spec.filter_trace = false;
    counted = horizon - spec.tail_start;
  }
  const double t = effective_trim(ideal, trim);
  const auto discard = static_cast<std::size_t>(
      std::ceil(t * static_cast<double>(horizon / 2) - 1e-12));
  spec.keep = std::min(discard, counted - 1) + 1;
  return spec;
}

void push_tail(std::vector<double>& lowest, std::size_t keep, double v) {
  if (lowest.size() == keep && v >= lowest.back()) return;
  lowest.insert(std::upper_bound(lowest.begin(), lowest.end(), v), v);
  if (lowest.size() > keep) lowest.pop_back();
}

double tail_value(const std::vector<double>& lowest, std::size_t keep) {
  return lowest.size() < keep ? kInf : lowest.back();
}

// Objective and path minimum are compared on the state grid, so values that
// agree to the grid resolution tie and fall through to the next component.
// `current` (utility of the last state) only ranks unfinished paths.
struct Key {
  double objective;
  double path_min;
  double current;
  std::size_t order;  // lexicographic position of the branch sequence
};

double quantize(double v, double g) { return std::isinf(v) ? v : std::floor(v / g) + 0.0; }

Key make_key(double objective, double path_min, double current, std::size_t order, double g) {
  return {quantize(objective, g), quantize(path_min, g), current, order};
}

bool better(const Key& a, const Key& b, bool partial = true) {
  if (a.objective != b.objective) return a.objective > b.objective;
  if (a.path_min != b.path_min) return a.path_min > b.path_min;
  if (partial && a.current != b.current) return a.current > b.current;
  return a.order < b.order;
}

struct Node {
  Point state;
  std::vector<double> lowest;
  double path_min = kInf;
  std::size_t parent = 0;
  std::size_t branch = 0;
  Key key{kInf, kInf, kInf, 0};
};

struct CellHash {
  std::size_t operator()(const std::vector<double>& v) const {
    std::size_t h = 1469598103934665603ull;
    for (double x : v) h = (h ^ std::hash<double>{}(x)) * 1099511628211ull;
    return h;
  }
};

std::vector<double> cell_of(const Point& x, double g) {
  std::vector<double> c(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) c[i] = std::floor(x[i] / g) + 0.0;
  return c;
}

std::vector<Point> start_points(const SystemInstance& sys, const SearchConfig& cfg) {
  if (sys.constraint == ConstraintKind::StartAt) {
    if (sys.start.size() != sys.dimension) throw ConfigError("start point has wrong dimension");
    return {sys.start};
  }
  if (!sys.start_box) throw ConfigError("free constraint needs a start box");
  const Box& box = *sys.start_box;
  std::vector<Point> out{box.centre()};
  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t k = 0; k < cfg.free_starts; ++k) {
    Point p(box.dimension());
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = box.lo[i] + (box.hi[i] - box.lo[i]) * unit(rng);
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<double> utilities_of(const SystemInstance& sys, const Path& path) {
  std::vector<double> u;
  u.reserve(path.size());
  for (const Point& p : path.states) u.push_back(sys.u(p));
  return u;
}

void fill_summary(const SystemInstance& sys, double trim, OptimReport& r) {
  const auto u = utilities_of(sys, r.best);
  r.trim = effective_trim(sys.ideal, trim);
  const TailSpec spec = make_tail(u.size(), sys.ideal, trim);
  r.tail_start = spec.tail_start;
  r.discarded = spec.keep - 1;
  r.objective = surrogate_objective(u, sys.ideal, trim);
  r.path_min = *std::min_element(u.begin(), u.end());
}

}  // namespace

void SearchConfig::validate() const {
  if (horizon < 2) throw ConfigError("search horizon must be at least 2");
  if (beam < 1) throw ConfigError("beam width must be at least 1");
  if (!(grid > 0.0)) throw ConfigError("state grid resolution must be positive");
  if (!(trim >= 0.0 && trim < 0.5)) throw ConfigError("trim fraction must lie in [0, 0.5)");
}

double effective_trim(const IdealModel& ideal, double trim) {
  return ideal.kind() == IdealKind::Density ? trim : 0.0;
}

double surrogate_objective(std::span<const double> utilities, const IdealModel& ideal,
                           double trim) {
  if (utilities.size() < 2) throw ConfigError("objective needs at least two states");
  const TailSpec spec = make_tail(utilities.size(), ideal, trim);
  std::vector<double> lowest;
  for (std::size_t n = spec.tail_start; n < utilities.size(); ++n) {
    if (spec.counts(n)) push_tail(lowest, spec.keep, utilities[n]);
  }
  return tail_value(lowest, spec.keep);
}

OptimReport maxmin_search(const SystemInstance& sys, const SearchConfig& cfg) {
  cfg.validate();
  const Correspondence view = sys.phi.search_view();
  const TailSpec spec = make_tail(cfg.horizon, sys.ideal, cfg.trim);

  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> history;
  std::vector<Node> frontier;
  const std::vector<Point> starts = start_points(sys, cfg);
  for (std::size_t s = 0; s < starts.size(); ++s) {
    Node node;
    node.state = starts[s];
    const double u0 = sys.u(node.state);
    node.path_min = u0;
    if (spec.counts(0)) push_tail(node.lowest, spec.keep, u0);
    node.branch = s;
    frontier.push_back(std::move(node));
  }

  OptimReport report;
  report.frontier_sizes.push_back(frontier.size());
  std::vector<std::pair<std::size_t, std::size_t>> level0;
  for (const Node& n : frontier) level0.emplace_back(0, n.branch);
  history.push_back(std::move(level0));

  bool collapsed = false;
  for (std::size_t n = 1; n < cfg.horizon; ++n) {
    std::vector<Node> candidates;
    std::unordered_map<std::vector<double>, std::size_t, CellHash> by_cell;
    std::size_t order = 0;
    std::size_t infeasible = 0;
    for (std::size_t p = 0; p < frontier.size(); ++p) {
      const Node& parent = frontier[p];
      PointSet imgs;
      try {
        imgs = view.images(parent.state);
      } catch (const InfeasibleError&) {
        if (n == 1 && sys.constraint == ConstraintKind::StartAt) throw;
        ++infeasible;
        continue;
      }
      for (std::size_t j = 0; j < imgs.size(); ++j, ++order) {
        Node child;
        const double uv = sys.u(imgs[j]);
        child.lowest = parent.lowest;
        if (spec.counts(n)) push_tail(child.lowest, spec.keep, uv);
        child.path_min = std::min(parent.path_min, uv);
        child.parent = p;
        child.branch = j;
        child.key = make_key(tail_value(child.lowest, spec.keep), child.path_min, uv, order,
                             cfg.grid);
        child.state = std::move(imgs[j]);
        auto [it, inserted] = by_cell.try_emplace(cell_of(child.state, cfg.grid), candidates.size());
        if (inserted) {
          candidates.push_back(std::move(child));
        } else if (better(child.key, candidates[it->second].key)) {
          candidates[it->second] = std::move(child);
        }
      }
    }
    if (candidates.empty()) {
      if (n == 1 && infeasible == frontier.size()) {
        throw InfeasibleError("every start point has an empty image");
      }
      collapsed = true;
      break;
    }
    if (candidates.size() > cfg.beam) {
      std::nth_element(candidates.begin(), candidates.begin() + static_cast<long>(cfg.beam),
                       candidates.end(),
                       [](const Node& a, const Node& b) { return better(a.key, b.key); });
      candidates.resize(cfg.beam);
    }
    std::sort(candidates.begin(), candidates.end(),
              [](const Node& a, const Node& b) { return a.key.order < b.key.order; });
    std::vector<std::pair<std::size_t, std::size_t>> level;
    level.reserve(candidates.size());
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      level.emplace_back(candidates[i].parent, candidates[i].branch);
      candidates[i].key.order = i;
    }
    history.push_back(std::move(level));
    frontier = std::move(candidates);
    report.frontier_sizes.push_back(frontier.size());
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i < frontier.size(); ++i) {
    if (better(frontier[i].key, frontier[best].key, false)) best = i;
  }

  // Walk the parent pointers back, then replay the branch choices.
  std::vector<std::size_t> choices(history.size());
  std::size_t idx = best;
  for (std::size_t level = history.size(); level-- > 0;) {
    choices[level] = history[level][idx].second;
    idx = history[level][idx].first;
  }
  report.best.states.push_back(starts[choices[0]]);
  for (std::size_t level = 1; level < choices.size(); ++level) {
    PointSet imgs = view.images(report.best.states.back());
    report.best.trace.push_back(choices[level]);
    report.best.states.push_back(std::move(imgs[choices[level]]));
  }
  if (collapsed) {
    report.partial = true;
    report.best.truncated = true;
    report.best.error = "frontier collapsed at step " + std::to_string(history.size());
    report.note = report.best.error;
  }
  const auto* l2 = std::get_if<TruncatedL2>(&view.variant());
  const auto* full = std::get_if<TruncatedL2>(&sys.phi.variant());
  if (l2 && full && l2->band_samples != full->band_samples) {
    report.note = "search used band endpoints only (" + std::to_string(l2->band_samples) +
                  " samples per band)";
  }
  if (report.best.size() >= 2) fill_summary(sys, cfg.trim, report);
  return report;
}

OptimReport exhaustive_maxmin(const SystemInstance& sys, std::size_t horizon, double trim,
                              double grid) {
  const auto branches = sys.phi.fixed_branch_count();
  const bool enumerable = std::holds_alternative<FiniteBranch>(sys.phi.variant()) ||
                          std::holds_alternative<Singleton>(sys.phi.variant());
  if (!enumerable || !branches) {
    throw ConfigError("exhaustive search needs a finite-branch correspondence");
  }
  if (horizon < 2) throw ConfigError("search horizon must be at least 2");
  if (!(grid > 0.0)) throw ConfigError("state grid resolution must be positive");
  if (sys.constraint != ConstraintKind::StartAt) {
    throw ConfigError("exhaustive search needs a fixed start point");
  }
  double budget = 1.0;
  for (std::size_t n = 0; n < horizon; ++n) {
    budget *= static_cast<double>(*branches);
    if (budget > 1e7) {
      throw BudgetError("exhaustive search over " + std::to_string(*branches) + "^" +
                        std::to_string(horizon) + " paths exceeds the 1e7 budget");
    }
  }

  const TailSpec spec = make_tail(horizon, sys.ideal, trim);
  std::vector<Point> states{sys.start};
  std::vector<std::size_t> trace;
  std::vector<std::vector<double>> lowest(horizon);
  std::vector<double> path_min(horizon);
  const double u0 = sys.u(sys.start);
  path_min[0] = u0;
  if (spec.counts(0)) push_tail(lowest[0], spec.keep, u0);

  OptimReport report;
  report.exhaustive = true;
  Key best{-kInf, -kInf, -kInf, 0};
  bool have = false;
  std::size_t leaves = 0;

  const auto recurse = [&](auto&& self, std::size_t n) -> void {
    if (n == horizon) {
      const Key key = make_key(tail_value(lowest[n - 1], spec.keep), path_min[n - 1], 0.0,
                               leaves++, grid);
      if (!have || better(key, best, false)) {
        best = key;
        have = true;
        report.best.states = states;
        report.best.trace = trace;
      }
      return;
    }
    const PointSet imgs = sys.phi.images(states.back());
    for (std::size_t j = 0; j < imgs.size(); ++j) {
      const double uv = sys.u(imgs[j]);
      lowest[n] = lowest[n - 1];
      if (spec.counts(n)) push_tail(lowest[n], spec.keep, uv);
      path_min[n] = std::min(path_min[n - 1], uv);
      states.push_back(imgs[j]);
      trace.push_back(j);
      self(self, n + 1);
      states.pop_back();
      trace.pop_back();
    }
  };
  recurse(recurse, 1);
  report.frontier_sizes.push_back(leaves);
  fill_summary(sys, trim, report);
  return report;
}

}  // namespace turnpike
