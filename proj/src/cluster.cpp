#include "turnpike/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <random>

#include "turnpike/error.hpp"

namespace turnpike {

namespace {

using CellKey = std::vector<long long>;

struct Grid {
  Point lo;
  double eps = 0.0;
  std::size_t dim = 1;

  void key_of(std::span<const double> p, CellKey& key) const {
    key.resize(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      key[i] = static_cast<long long>(std::floor((p[i] - lo[i]) / eps));
    }
  }
  Point centre(const CellKey& key) const {
    Point c(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      c[i] = lo[i] + (static_cast<double>(key[i]) + 0.5) * eps;
    }
    return c;
  }
};

// Calls f(neighbour_key) for the 3^d cells around `key`, including itself.
template <class F>
void for_each_neighbour(const CellKey& key, F&& f) {
  const std::size_t d = key.size();
  CellKey nb(key);
  std::vector<int> offset(d, -1);
  while (true) {
    for (std::size_t i = 0; i < d; ++i) nb[i] = key[i] + offset[i];
    f(nb);
    std::size_t i = 0;
    while (i < d && offset[i] == 1) offset[i++] = -1;
    if (i == d) break;
    ++offset[i];
  }
}

struct DisjointSets {
  std::vector<std::size_t> parent;
  explicit DisjointSets(std::size_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), std::size_t{0});
  }
  std::size_t find(std::size_t a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

bool cell_is_positive(const SequenceWindow& x, const IdealModel& ideal,
                      const std::map<CellKey, std::vector<std::size_t>>& cells,
                      const Grid& grid, const CellKey& key, double theta,
                      std::size_t burn_in, std::vector<std::size_t>& scratch) {
  const Point c = grid.centre(key);
  scratch.clear();
  std::size_t count = 0;
  for_each_neighbour(key, [&](const CellKey& nb) {
    const auto it = cells.find(nb);
    if (it == cells.end()) return;
    for (std::size_t n : it->second) {
      if (distance(x[n], c) < grid.eps) {
        ++count;
        if (ideal.kind() != IdealKind::Density) scratch.push_back(n);
      }
    }
  });
  if (ideal.kind() == IdealKind::Density) {
    return static_cast<double>(count) /
               static_cast<double>(x.size() - burn_in) >= theta;
  }
  std::sort(scratch.begin(), scratch.end());
  return !ideal.is_small_sorted(scratch, burn_in);
}

ClusterSet cluster_on_grid(const SequenceWindow& x, const IdealModel& ideal,
                           const Grid& grid, double theta, std::size_t burn_in) {
  std::map<CellKey, std::vector<std::size_t>> cells;
  CellKey key;
  for (std::size_t n = burn_in; n < x.size(); ++n) {
    grid.key_of(x[n], key);
    auto it = cells.find(key);
    if (it == cells.end()) it = cells.emplace(key, std::vector<std::size_t>{}).first;
    it->second.push_back(n);
  }

  std::vector<const CellKey*> qualifying;
  std::map<CellKey, std::size_t> slot;
  std::vector<std::size_t> scratch;
  for (const auto& [k, members] : cells) {
    if (cell_is_positive(x, ideal, cells, grid, k, theta, burn_in, scratch)) {
      slot.emplace(k, qualifying.size());
      qualifying.push_back(&k);
    }
  }

  DisjointSets components(qualifying.size());
  for (std::size_t i = 0; i < qualifying.size(); ++i) {
    for_each_neighbour(*qualifying[i], [&](const CellKey& nb) {
      const auto it = slot.find(nb);
      if (it != slot.end()) components.unite(i, it->second);
    });
  }

  const std::size_t d = x.dimension();
  std::map<std::size_t, std::pair<Point, std::size_t>> sums;
  for (std::size_t i = 0; i < qualifying.size(); ++i) {
    auto& [sum, visits] = sums[components.find(i)];
    sum.resize(d, 0.0);
    for (std::size_t n : cells.at(*qualifying[i])) {
      const auto v = x[n];
      for (std::size_t j = 0; j < d; ++j) sum[j] += v[j];
      ++visits;
    }
  }

  ClusterSet out;
  out.eps_grid = grid.eps;
  out.burn_in = burn_in;
  for (auto& [root, acc] : sums) {
    Point centroid = acc.first;
    for (double& v : centroid) v /= static_cast<double>(acc.second);
    // A long merged chain can put its centroid in a gap; snap it back to the
    // nearest visited point so every reported point is within eps of the data.
    double best = std::numeric_limits<double>::infinity();
    std::size_t nearest = 0;
    for (std::size_t i = 0; i < qualifying.size(); ++i) {
      if (components.find(i) != root) continue;
      for (std::size_t n : cells.at(*qualifying[i])) {
        const double dist = distance(x[n], centroid);
        if (dist < best) {
          best = dist;
          nearest = n;
        }
      }
    }
    if (best >= grid.eps) centroid = x.point(nearest);
    out.points.push_back(std::move(centroid));
  }
  std::sort(out.points.begin(), out.points.end());
  return out;
}

}  // namespace

std::size_t resolve_burn_in(const AnalysisOptions& opts, std::size_t n) {
  std::size_t b = opts.burn_in ? *opts.burn_in
                               : static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(n))));
  if (b >= n) b = 0;
  return b;
}

IdealModel ideal_for_window(const IdealModel& ideal, std::size_t n) {
  return ideal.horizon() == n ? ideal : ideal.with_horizon(n);
}

ClusterSet cluster_points(const SequenceWindow& x, const IdealModel& ideal_in,
                          const AnalysisOptions& opts) {
  if (opts.eps_grid < 0.0) throw ConfigError("eps_grid must be positive");
  if (!(opts.theta > 0.0 && opts.theta < 1.0)) throw ConfigError("theta must lie in (0,1)");
  const IdealModel ideal = ideal_for_window(ideal_in, x.size());
  const std::size_t burn_in = resolve_burn_in(opts, x.size());
  const std::size_t d = x.dimension();

  Point lo(x[burn_in].begin(), x[burn_in].end());
  Point hi = lo;
  for (std::size_t n = burn_in + 1; n < x.size(); ++n) {
    const auto v = x[n];
    for (std::size_t i = 0; i < d; ++i) {
      lo[i] = std::min(lo[i], v[i]);
      hi[i] = std::max(hi[i], v[i]);
    }
  }
  double range = 0.0;
  for (std::size_t i = 0; i < d; ++i) range = std::max(range, hi[i] - lo[i]);

  if (range == 0.0) {
    ClusterSet out;
    out.points.push_back(lo);
    out.eps_grid = opts.eps_grid > 0.0 ? opts.eps_grid : 0.0;
    out.burn_in = burn_in;
    return out;
  }

  Grid grid{lo, opts.eps_grid > 0.0 ? opts.eps_grid : range / kGridDivisions, d};
  for (int attempt = 0; attempt < 64; ++attempt) {
    ClusterSet out = cluster_on_grid(x, ideal, grid, opts.theta, burn_in);
    if (!out.points.empty()) {
      out.coarsenings = attempt;
      return out;
    }
    grid.eps *= 2.0;
  }
  throw RangeError("no I-positive cell found: the window is too short for ideal " +
                   ideal.describe());
}

double ideal_liminf(const SequenceWindow& x, const IdealModel& ideal_in,
                    const AnalysisOptions& opts) {
  if (x.dimension() != 1) throw ConfigError("ideal_liminf requires a scalar sequence");
  const IdealModel ideal = ideal_for_window(ideal_in, x.size());
  const std::size_t burn_in = resolve_burn_in(opts, x.size());
  const auto values = x.scalars();

  double lo = values[burn_in];
  double hi = lo;
  for (std::size_t n = burn_in; n < x.size(); ++n) {
    lo = std::min(lo, values[n]);
    hi = std::max(hi, values[n]);
  }

  std::vector<std::size_t> below;
  below.reserve(x.size() - burn_in);
  const auto positive_below = [&](double r) {
    below.clear();
    for (std::size_t n = burn_in; n < x.size(); ++n) {
      if (values[n] < r) below.push_back(n);
    }
    return !ideal.is_small_sorted(below, burn_in);
  };

  hi += 1e-9 * std::max(1.0, std::abs(hi));
  if (!positive_below(hi)) {
    throw RangeError("the whole window is I-small under " + ideal.describe() +
                     "; it is too short to define an I-liminf");
  }
  for (int step = 0; step < 60 && hi - lo > 1e-9; ++step) {
    const double mid = 0.5 * (lo + hi);
    if (positive_below(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

double ideal_limsup(const SequenceWindow& x, const IdealModel& ideal,
                    const AnalysisOptions& opts) {
  const SequenceWindow negated =
      x.map_scalar([](std::span<const double> v) { return -v[0]; });
  return -ideal_liminf(negated, ideal, opts);
}

std::optional<Point> ideal_limit(const SequenceWindow& x, const IdealModel& ideal_in,
                                 double eps, const AnalysisOptions& opts) {
  if (!(eps > 0.0)) throw ConfigError("limit tolerance must be positive");
  const IdealModel ideal = ideal_for_window(ideal_in, x.size());
  const ClusterSet clusters = cluster_points(x, ideal, opts);
  if (clusters.points.size() != 1) return std::nullopt;
  const Point& eta = clusters.points.front();

  std::vector<std::size_t> deviating;
  for (double scale : {eps, eps / 2.0, eps / 4.0}) {
    deviating.clear();
    for (std::size_t n = clusters.burn_in; n < x.size(); ++n) {
      if (distance(x[n], eta) >= scale) deviating.push_back(n);
    }
    if (!ideal.is_small_sorted(deviating, clusters.burn_in)) return std::nullopt;
  }
  return eta;
}

ClusterReport analyze_window(const SequenceWindow& x, const IdealModel& ideal_in,
                             double limit_eps, const AnalysisOptions& opts) {
  const IdealModel ideal = ideal_for_window(ideal_in, x.size());
  ClusterReport report;
  const ClusterSet clusters = cluster_points(x, ideal, opts);
  report.cluster_points = clusters.points;
  report.eps_grid = clusters.eps_grid;
  report.burn_in = clusters.burn_in;
  report.theta = opts.theta;
  report.limit_eps = limit_eps;
  report.horizon = x.size();
  report.ideal = ideal.describe();
  if (x.dimension() == 1) {
    report.liminf = ideal_liminf(x, ideal, opts);
    report.limsup = ideal_limsup(x, ideal, opts);
  }
  report.converges_to = ideal_limit(x, ideal, limit_eps, opts);
  const auto box = x.bounding_box();
  report.window_min = box.lo;
  report.window_max = box.hi;
  return report;
}

double lipschitz_estimate(const std::function<Point(std::span<const double>)>& h,
                          const SequenceWindow::Box& box) {
  const std::size_t d = box.lo.size();
  double best = 0.0;
  const auto slope = [&](const Point& a, const Point& b) {
    const double dx = distance(a, b);
    if (dx == 0.0) return;
    best = std::max(best, distance(h(a), h(b)) / dx);
  };
  if (d == 1) {
    constexpr int kSteps = 2000;
    const double width = box.hi[0] - box.lo[0];
    if (width == 0.0) return 0.0;
    Point prev{box.lo[0]};
    for (int i = 1; i <= kSteps; ++i) {
      Point cur{box.lo[0] + width * i / kSteps};
      slope(prev, cur);
      prev = cur;
    }
    return best;
  }
  std::mt19937_64 rng(0x5eed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 4000; ++trial) {
    Point a(d);
    Point b(d);
    for (std::size_t i = 0; i < d; ++i) {
      const double w = box.hi[i] - box.lo[i];
      a[i] = box.lo[i] + w * unit(rng);
      b[i] = std::clamp(a[i] + w * 1e-3 * (unit(rng) - 0.5), box.lo[i], box.hi[i]);
    }
    slope(a, b);
  }
  return best;
}

ImageIdentityReport check_image_cluster_identity(
    const SequenceWindow& x, const std::function<Point(std::span<const double>)>& h,
    const IdealModel& ideal, const AnalysisOptions& opts) {
  ImageIdentityReport report;
  const ClusterSet state = cluster_points(x, ideal, opts);
  for (const Point& eta : state.points) report.image_of_clusters.push_back(h(eta));

  AnalysisOptions image_opts = opts;
  image_opts.eps_grid = 0.0;
  const ClusterSet image = cluster_points(x.map(h), ideal, image_opts);
  report.clusters_of_image = image.points;

  report.distance = hausdorff(report.image_of_clusters, report.clusters_of_image);
  report.lipschitz = lipschitz_estimate(h, x.bounding_box());
  report.eps_grid = std::max(state.eps_grid, image.eps_grid);
  report.tolerance = 2.0 * report.eps_grid * (1.0 + report.lipschitz);
  report.passed = report.distance <= report.tolerance;
  return report;
}

RepresentationReport check_representation_identity(
    const SequenceWindow& x, const std::function<double(std::span<const double>)>& u,
    const IdealModel& ideal, const AnalysisOptions& opts) {
  RepresentationReport r;
  const SequenceWindow ux = x.map_scalar(u);

  r.liminf_definition = ideal_liminf(ux, ideal, opts);
  r.limsup_definition = ideal_limsup(ux, ideal, opts);

  AnalysisOptions image_opts = opts;
  image_opts.eps_grid = 0.0;
  const ClusterSet image = cluster_points(ux, ideal, image_opts);
  r.liminf_image_min = image.points.front()[0];
  r.limsup_image_max = image.points.back()[0];

  const ClusterSet state = cluster_points(x, ideal, opts);
  r.liminf_state_min = std::numeric_limits<double>::infinity();
  r.limsup_state_max = -std::numeric_limits<double>::infinity();
  for (const Point& eta : state.points) {
    const double v = u(eta);
    r.liminf_state_min = std::min(r.liminf_state_min, v);
    r.limsup_state_max = std::max(r.limsup_state_max, v);
  }

  r.lipschitz = lipschitz_estimate(
      [&](std::span<const double> p) { return Point{u(p)}; }, x.bounding_box());
  r.eps_grid = std::max(state.eps_grid, image.eps_grid);
  // The bisection resolution bounds the agreement on degenerate windows.
  r.tolerance = std::max(r.eps_grid * (1.0 + r.lipschitz), 2e-9);
  const auto agree = [&](double a, double b, double c) {
    return std::abs(a - b) <= r.tolerance && std::abs(b - c) <= r.tolerance &&
           std::abs(a - c) <= r.tolerance;
  };
  r.passed = agree(r.liminf_definition, r.liminf_image_min, r.liminf_state_min) &&
             agree(r.limsup_definition, r.limsup_image_max, r.limsup_state_max);
  return r;
}

}  // namespace turnpike
