#include "turnpike/dynamics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "turnpike/cluster.hpp"
#include "turnpike/error.hpp"

namespace turnpike {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double band_upper(std::size_t i, double xi) { return xi + 1.0 / static_cast<double>(i); }

bool bands_nonempty(std::span<const double> x) {
  for (std::size_t i = 1; i < x.size(); ++i) {
    if (2.0 * x[i] > band_upper(i, x[i])) return false;
  }
  return true;
}

double tail_square_sum(std::span<const double> x) {
  double s = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) s += x[i] * x[i];
  return s;
}

PointSet l2_images(const TruncatedL2& l2, std::span<const double> x) {
  const std::size_t d = l2.dimension;
  if (x.size() != d) throw ConfigError("state dimension does not match the l2 truncation");
  PointSet out;
  Point half(x.begin(), x.end());
  for (double& v : half) v *= 0.5;
  out.push_back(std::move(half));
  if (!bands_nonempty(x) || d < 2) return out;

  const std::size_t m = std::max<std::size_t>(l2.band_samples, 2);
  std::vector<std::vector<double>> bands(d);
  for (std::size_t i = 1; i < d; ++i) {
    const double a = 2.0 * x[i];
    const double b = band_upper(i, x[i]);
    bands[i].resize(m);
    for (std::size_t j = 0; j < m; ++j) {
      bands[i][j] = a + (b - a) * static_cast<double>(j) / static_cast<double>(m - 1);
    }
  }
  const double head = -tail_square_sum(x);
  std::vector<std::size_t> digit(d, 0);
  while (true) {
    Point y(d);
    y[0] = head;
    for (std::size_t i = 1; i < d; ++i) y[i] = bands[i][digit[i]];
    out.push_back(std::move(y));
    std::size_t i = d - 1;
    while (i >= 1 && digit[i] == m - 1) digit[i--] = 0;
    if (i == 0) break;
    ++digit[i];
  }
  return out;
}

double l2_band_distance(std::span<const double> x, std::span<const double> y) {
  double s = y[0] + tail_square_sum(x);
  s *= s;
  for (std::size_t i = 1; i < x.size(); ++i) {
    const double a = 2.0 * x[i];
    const double b = band_upper(i, x[i]);
    const double gap = std::max({a - y[i], y[i] - b, 0.0});
    s += gap * gap;
  }
  return std::sqrt(s);
}

// Newton iteration on g(x) = phi(x) - x with a forward-difference Jacobian.
std::optional<Point> newton_fixed_point(const VectorMap& phi, Point x, double tol) {
  const std::size_t d = x.size();
  for (int iter = 0; iter < 60; ++iter) {
    const Point fx = phi(x);
    Eigen::VectorXd g(d);
    for (std::size_t i = 0; i < d; ++i) g[i] = fx[i] - x[i];
    if (g.norm() <= tol * 0.1) return x;
    Eigen::MatrixXd jac(d, d);
    for (std::size_t j = 0; j < d; ++j) {
      const double h = 1e-7 * std::max(1.0, std::abs(x[j]));
      Point xp = x;
      xp[j] += h;
      const Point fp = phi(xp);
      for (std::size_t i = 0; i < d; ++i) {
        jac(i, j) = ((fp[i] - xp[i]) - g[i]) / h;
      }
    }
    const Eigen::VectorXd step = jac.fullPivLu().solve(-g);
    if (!step.allFinite()) return std::nullopt;
    for (std::size_t i = 0; i < d; ++i) x[i] += step[i];
    if (step.norm() <= tol * 1e-3) break;
  }
  return x;
}

std::vector<Point> probe_points(const Box& box, std::size_t random_probes,
                                std::uint64_t seed) {
  const std::size_t d = box.dimension();
  std::vector<Point> probes;
  if (d <= 3) {
    const std::size_t per_dim = d == 1 ? 401 : d == 2 ? 41 : 13;
    std::vector<std::size_t> digit(d, 0);
    while (true) {
      Point p(d);
      for (std::size_t i = 0; i < d; ++i) {
        p[i] = box.lo[i] + (box.hi[i] - box.lo[i]) * static_cast<double>(digit[i]) /
                               static_cast<double>(per_dim - 1);
      }
      probes.push_back(std::move(p));
      std::size_t i = 0;
      while (i < d && digit[i] == per_dim - 1) digit[i++] = 0;
      if (i == d) break;
      ++digit[i];
    }
  }
  probes.push_back(box.centre());
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t k = 0; k < random_probes; ++k) {
    Point p(d);
    for (std::size_t i = 0; i < d; ++i) {
      p[i] = box.lo[i] + (box.hi[i] - box.lo[i]) * unit(rng);
    }
    probes.push_back(std::move(p));
  }
  return probes;
}

PointSet merge_within(PointSet points, double radius) {
  std::sort(points.begin(), points.end());
  PointSet out;
  for (Point& p : points) {
    bool dup = false;
    for (const Point& q : out) {
      if (distance(p, q) <= radius) {
        dup = true;
        break;
      }
    }
    if (!dup) out.push_back(std::move(p));
  }
  return out;
}

// Roots of f on [lo, hi] located from sign changes on a uniform scan.
void scan_roots(const std::function<double(double)>& f, double lo, double hi,
                std::size_t steps, double tol, std::vector<double>& roots) {
  double prev_x = lo;
  double prev_f = f(lo);
  if (prev_f == 0.0) roots.push_back(lo);
  for (std::size_t k = 1; k <= steps; ++k) {
    const double x = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(steps);
    const double fx = f(x);
    if (fx == 0.0) {
      roots.push_back(x);
    } else if ((prev_f < 0.0) != (fx < 0.0) && prev_f != 0.0) {
      double a = prev_x;
      double b = x;
      double fa = prev_f;
      for (int it = 0; it < 200 && b - a > tol * 1e-3; ++it) {
        const double m = 0.5 * (a + b);
        const double fm = f(m);
        if (fm == 0.0) {
          a = b = m;
          break;
        }
        if ((fa < 0.0) == (fm < 0.0)) {
          a = m;
          fa = fm;
        } else {
          b = m;
        }
      }
      roots.push_back(0.5 * (a + b));
    }
    prev_x = x;
    prev_f = fx;
  }
}

}  // namespace

std::string Correspondence::kind_name() const {
  return std::visit(Overloaded{[](const FiniteBranch&) { return std::string("finite-branch"); },
                               [](const Interval1D&) { return std::string("interval-1d"); },
                               [](const Singleton&) { return std::string("singleton"); },
                               [](const TruncatedL2&) { return std::string("truncated-l2"); }},
                    v_);
}

PointSet Correspondence::images(std::span<const double> x) const {
  return std::visit(
      Overloaded{
          [&](const FiniteBranch& fb) {
            if (fb.branches.empty()) throw ConfigError("finite-branch correspondence without branches");
            PointSet out;
            out.reserve(fb.branches.size());
            for (const auto& f : fb.branches) out.push_back(f(x));
            return out;
          },
          [&](const Interval1D& iv) {
            const double a = iv.lower(x);
            const double b = iv.upper(x);
            if (a > b) {
              throw InfeasibleError("empty interval image at x = " + std::to_string(x[0]));
            }
            const std::size_t m = std::max<std::size_t>(iv.samples, 2);
            PointSet out;
            out.reserve(m);
            for (std::size_t j = 0; j < m; ++j) {
              out.push_back({a + (b - a) * static_cast<double>(j) / static_cast<double>(m - 1)});
            }
            out.back()[0] = b;
            return out;
          },
          [&](const Singleton& s) { return PointSet{s.map(x)}; },
          [&](const TruncatedL2& l2) { return l2_images(l2, x); }},
      v_);
}

double Correspondence::distance_to_image(std::span<const double> x,
                                         std::span<const double> y) const {
  return std::visit(
      Overloaded{
          [&](const FiniteBranch& fb) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& f : fb.branches) best = std::min(best, distance(f(x), y));
            return best;
          },
          [&](const Interval1D& iv) {
            const double a = iv.lower(x);
            const double b = iv.upper(x);
            if (a > b) return std::numeric_limits<double>::infinity();
            return std::max({a - y[0], y[0] - b, 0.0});
          },
          [&](const Singleton& s) { return distance(s.map(x), y); },
          [&](const TruncatedL2&) {
            double half = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) {
              const double d = 0.5 * x[i] - y[i];
              half += d * d;
            }
            double best = std::sqrt(half);
            if (bands_nonempty(x)) best = std::min(best, l2_band_distance(x, y));
            return best;
          }},
      v_);
}

Correspondence Correspondence::refined(std::size_t factor) const {
  return std::visit(Overloaded{[&](const Interval1D& iv) -> Correspondence {
                                 Interval1D out = iv;
                                 out.samples = (iv.samples - 1) * factor + 1;
                                 return out;
                               },
                               [&](const TruncatedL2& l2) -> Correspondence {
                                 TruncatedL2 out = l2;
                                 out.band_samples = (l2.band_samples - 1) * factor + 1;
                                 return out;
                               },
                               [&](const auto&) -> Correspondence { return *this; }},
                    v_);
}

Correspondence Correspondence::search_view() const {
  if (const auto* l2 = std::get_if<TruncatedL2>(&v_); l2 && l2->dimension > 4) {
    return TruncatedL2{l2->dimension, 2};
  }
  return *this;
}

std::optional<std::size_t> Correspondence::fixed_branch_count() const {
  return std::visit(Overloaded{[](const FiniteBranch& fb) -> std::optional<std::size_t> {
                                 return fb.branches.size();
                               },
                               [](const Interval1D& iv) -> std::optional<std::size_t> {
                                 return std::max<std::size_t>(iv.samples, 2);
                               },
                               [](const Singleton&) -> std::optional<std::size_t> { return 1; },
                               [](const TruncatedL2&) -> std::optional<std::size_t> {
                                 return std::nullopt;
                               }},
                    v_);
}

PointSet fixed_points(const Correspondence& phi, const Box& box, double tol,
                      std::size_t random_probes, std::uint64_t seed) {
  const std::size_t d = box.dimension();
  PointSet candidates;
  const double slack = 10.0 * tol;

  std::visit(
      Overloaded{
          [&](const Interval1D& iv) {
            if (d != 1) throw ConfigError("interval correspondence needs a 1-d box");
            std::vector<double> roots;
            const auto below = [&](double t) {
              const double p[1] = {t};
              return iv.lower(p) - t;
            };
            const auto above = [&](double t) {
              const double p[1] = {t};
              return t - iv.upper(p);
            };
            scan_roots(below, box.lo[0], box.hi[0], 4000, tol, roots);
            scan_roots(above, box.lo[0], box.hi[0], 4000, tol, roots);
            for (double r : roots) candidates.push_back({r});
          },
          [&](const TruncatedL2&) {
            candidates.push_back(Point(d, 0.0));
            for (Point p : probe_points(box, random_probes, seed)) {
              double s = 0.0;
              for (std::size_t i = 1; i < d; ++i) {
                p[i] = std::min(p[i], 0.0);
                s += p[i] * p[i];
              }
              p[0] = -s;
              candidates.push_back(std::move(p));
            }
          },
          [&](const auto& single_valued) {
            std::vector<VectorMap> maps;
            if constexpr (std::is_same_v<std::decay_t<decltype(single_valued)>, Singleton>) {
              maps.push_back(single_valued.map);
            } else {
              maps = single_valued.branches;
            }
            for (const Point& start : probe_points(box, d <= 3 ? 0 : random_probes, seed)) {
              for (const auto& f : maps) {
                if (auto fp = newton_fixed_point(f, start, tol)) candidates.push_back(*fp);
              }
            }
          }},
      phi.variant());

  PointSet accepted;
  for (Point& c : candidates) {
    bool finite = true;
    for (double v : c) finite = finite && std::isfinite(v);
    if (!finite || !box.contains(c, slack)) continue;
    if (phi.distance_to_image(c, c) <= tol) accepted.push_back(std::move(c));
  }
  return merge_within(std::move(accepted), 10.0 * tol);
}

HutchinsonResult hutchinson_iterate(const FiniteBranch& phi, const Point& seed,
                                    std::size_t iterations, double resolution) {
  if (phi.branches.empty()) throw ConfigError("IFS without branches");
  HutchinsonResult result;
  result.resolution = resolution;

  Box around{seed, seed};
  for (std::size_t i = 0; i < seed.size(); ++i) {
    const double r = 2.0 * std::max(1.0, std::abs(seed[i]));
    around.lo[i] -= r;
    around.hi[i] += r;
  }
  for (std::size_t k = 0; k < phi.branches.size(); ++k) {
    const double lip = lipschitz_estimate(phi.branches[k], around);
    result.max_lipschitz = std::max(result.max_lipschitz, lip);
    if (!(lip < 1.0)) {
      throw DivergenceError("IFS branch " + std::to_string(k) +
                            " is not a contraction (Lipschitz estimate " +
                            std::to_string(lip) + ")");
    }
  }

  PointSet current{seed};
  for (std::size_t it = 0; it < iterations; ++it) {
    PointSet next;
    next.reserve(current.size() * phi.branches.size());
    for (const Point& p : current) {
      for (const auto& f : phi.branches) next.push_back(f(p));
    }
    next = deduplicate(std::move(next), resolution);
    result.step_distances.push_back(hausdorff(current, next));
    current = std::move(next);
  }
  result.set = std::move(current);
  return result;
}

ContinuityReport continuity_probe(const Correspondence& phi, const Box& box,
                                  std::size_t samples, std::vector<double> deltas,
                                  std::uint64_t seed) {
  const std::size_t d = box.dimension();
  std::vector<Point> probes{box.centre()};
  for (std::size_t i = 0; i < d; ++i) {
    for (int k = -4; k <= 4; ++k) {
      if (k == 0) continue;
      Point p = box.centre();
      p[i] += (box.hi[i] - box.lo[i]) * k / 8.0;
      probes.push_back(std::move(p));
    }
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (std::size_t k = 0; k < samples; ++k) {
    Point p(d);
    for (std::size_t i = 0; i < d; ++i) p[i] = box.lo[i] + (box.hi[i] - box.lo[i]) * unit(rng);
    probes.push_back(std::move(p));
  }

  std::vector<Point> directions;
  for (std::size_t k = 0; k < probes.size(); ++k) {
    Point dir(d);
    if (d == 1) {
      dir[0] = 1.0;
    } else {
      double n = 0.0;
      do {
        for (double& v : dir) v = gauss(rng);
        n = norm(dir);
      } while (n == 0.0);
      for (double& v : dir) v /= n;
    }
    directions.push_back(std::move(dir));
  }

  ContinuityReport report;
  report.probes = probes.size();
  for (double delta : deltas) {
    ContinuityRung rung;
    rung.delta = delta;
    for (std::size_t k = 0; k < probes.size(); ++k) {
      const Point& x = probes[k];
      PointSet base;
      try {
        base = phi.images(x);
      } catch (const InfeasibleError&) {
        if (delta == deltas.front()) ++report.skipped_infeasible;
        continue;
      }
      for (double sign : {1.0, -1.0}) {
        Point moved = x;
        for (std::size_t i = 0; i < d; ++i) moved[i] += sign * delta * directions[k][i];
        PointSet other;
        try {
          other = phi.images(moved);
        } catch (const InfeasibleError&) {
          continue;
        }
        const double ratio = hausdorff(base, other) / delta;
        if (ratio > rung.max_ratio || rung.worst_point.empty()) {
          rung.max_ratio = std::max(rung.max_ratio, ratio);
          if (ratio >= rung.max_ratio) rung.worst_point = x;
        }
      }
    }
    report.rungs.push_back(std::move(rung));
  }
  report.passed = !report.rungs.empty();
  if (report.passed) {
    const double reference = std::max(1.0, report.rungs.front().max_ratio);
    for (const auto& r : report.rungs) {
      if (r.max_ratio > 10.0 * reference) report.passed = false;
    }
  }
  return report;
}

BranchPolicy always_branch(std::size_t k) {
  return [k](std::size_t, std::span<const double>, const PointSet& images) {
    return std::min(k, images.size() - 1);
  };
}

Path feasible_path(const Correspondence& phi, const Point& x0, const BranchPolicy& policy,
                   std::size_t length) {
  if (length < 1) throw ConfigError("path length must be at least 1");
  Path path;
  path.states.reserve(length);
  path.states.push_back(x0);
  while (path.states.size() < length) {
    const std::size_t n = path.states.size() - 1;
    PointSet imgs;
    try {
      imgs = phi.images(path.states.back());
    } catch (const InfeasibleError& e) {
      path.truncated = true;
      path.error = e.what();
      break;
    }
    const std::size_t choice = policy(n, path.states.back(), imgs);
    if (choice >= imgs.size()) throw ConfigError("branch policy chose a missing image");
    path.trace.push_back(choice);
    path.states.push_back(std::move(imgs[choice]));
  }
  return path;
}

std::optional<std::size_t> find_infeasible_step(const Correspondence& phi,
                                                const SequenceWindow& path, double tol) {
  for (std::size_t n = 0; n + 1 < path.size(); ++n) {
    if (!(phi.distance_to_image(path[n], path[n + 1]) <= tol)) return n;
  }
  return std::nullopt;
}

}  // namespace turnpike
