#include "turnpike/verifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "turnpike/cluster.hpp"
#include "turnpike/error.hpp"

namespace turnpike {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

std::string fmt(const Point& p) {
  std::string out = "(";
  for (std::size_t i = 0; i < p.size(); ++i) out += (i ? ", " : "") + fmt(p[i]);
  return out + ")";
}

std::vector<Point> probe_set(const Box& box, std::size_t uniform, std::uint64_t seed,
                             bool lattice) {
  const std::size_t d = box.dimension();
  std::vector<Point> out;
  if (lattice) out.push_back(box.centre());
  for (std::size_t i = 0; lattice && i < d; ++i) {
    for (int k = -4; k <= 4; ++k) {
      if (k == 0) continue;
      Point p = box.centre();
      p[i] += (box.hi[i] - box.lo[i]) * k / 8.0;
      out.push_back(std::move(p));
    }
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t k = 0; k < uniform; ++k) {
    Point p(d);
    for (std::size_t i = 0; i < d; ++i) p[i] = box.lo[i] + (box.hi[i] - box.lo[i]) * unit(rng);
    out.push_back(std::move(p));
  }
  return out;
}

ConditionResult check_a1(const SystemInstance& sys) {
  ConditionResult r;
  r.name = "A1";
  const ContinuityReport c = continuity_probe(sys.phi.search_view(), sys.probe_box);
  double worst = 0.0;
  const ContinuityRung* worst_rung = nullptr;
  for (const auto& rung : c.rungs) {
    if (!worst_rung || rung.max_ratio > worst) {
      worst = rung.max_ratio;
      worst_rung = &rung;
    }
  }
  r.residual = worst;
  r.threshold = 10.0 * std::max(1.0, c.rungs.empty() ? 0.0 : c.rungs.front().max_ratio);
  r.verdict = c.passed ? Verdict::Pass : Verdict::Fail;
  if (worst_rung && !worst_rung->worst_point.empty()) r.witnesses.push_back(worst_rung->worst_point);
  r.detail = "max Hausdorff ratio " + fmt(worst) + " over " + std::to_string(c.probes) +
             " probes and " + std::to_string(c.rungs.size()) + " rungs";
  return r;
}

ConditionResult check_a2(const SystemInstance& sys, const SamplingPlan& plan) {
  ConditionResult r;
  r.name = "A2";
  const std::vector<double> deltas = {1e-2, 1e-3, 1e-4, 1e-5};
  const auto probes = probe_set(sys.probe_box, 500, plan.seed ^ 0xa2, true);
  std::mt19937_64 rng(plan.seed ^ 0xa2a2);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<Point> dirs;
  for (std::size_t k = 0; k < probes.size(); ++k) {
    Point dir(sys.dimension);
    double n = 0.0;
    while (n == 0.0) {
      for (double& v : dir) v = gauss(rng);
      n = norm(dir);
    }
    for (double& v : dir) v /= n;
    dirs.push_back(std::move(dir));
  }
  std::vector<double> ratios;
  Point worst_point;
  double worst = 0.0;
  for (double delta : deltas) {
    double rung = 0.0;
    for (std::size_t k = 0; k < probes.size(); ++k) {
      const double base = sys.u(probes[k]);
      for (double sign : {1.0, -1.0}) {
        Point q = probes[k];
        for (std::size_t i = 0; i < q.size(); ++i) q[i] += sign * delta * dirs[k][i];
        const double ratio = std::abs(sys.u(q) - base) / delta;
        if (ratio > rung) rung = ratio;
        if (ratio > worst) {
          worst = ratio;
          worst_point = probes[k];
        }
      }
    }
    ratios.push_back(rung);
  }
  r.threshold = 10.0 * std::max(1.0, ratios.front());
  r.residual = *std::max_element(ratios.begin(), ratios.end());
  r.verdict = r.residual <= r.threshold ? Verdict::Pass : Verdict::Fail;
  r.witnesses.push_back(worst_point);
  r.detail = "max |du|/delta " + fmt(r.residual);
  return r;
}

ConditionResult check_a3(const SystemInstance& sys, const SamplingPlan& plan) {
  ConditionResult r;
  r.name = "A3";
  const TranslationReport t = check_translation_invariance(
      sys.ideal, plan.translation_samples, plan.shifts, plan.seed ^ 0xa3);
  r.verdict = t.invariant ? Verdict::Pass : Verdict::Fail;
  for (const auto& s : t.shifts) {
    if (!r.witness_set && s.witness) {
      r.witness_set = s.witness;
      r.residual = s.fraction;
      r.detail = "shift " + std::to_string(s.shift) + " maps a small set outside the ideal (" +
                 std::to_string(s.tested - s.stayed_small) + " of " +
                 std::to_string(s.tested) + " samples)";
    }
  }
  if (t.invariant) {
    r.detail = std::to_string(plan.translation_samples) + " small sets stay small under " +
               std::to_string(plan.shifts.size()) + " shifts";
  }
  r.threshold = 1.0;
  return r;
}

ConditionResult check_a4(const SystemInstance& sys, const SamplingPlan& plan) {
  ConditionResult r;
  r.name = "A4";
  constexpr double kMargin = 1e-6;
  constexpr double kSeparation = 1e-3;
  r.threshold = kMargin;
  const PointSet fixed = fixed_points(sys.phi, sys.probe_box);
  if (fixed.empty()) {
    r.verdict = Verdict::Fail;
    r.detail = "no fixed point in the probe box";
    return r;
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < fixed.size(); ++i) {
    if (sys.u(fixed[i]) > sys.u(fixed[best])) best = i;
  }
  const double u_best = sys.u(fixed[best]);
  r.witnesses.push_back(fixed[best]);
  // Fixed points within kSeparation of the maximiser belong to the same
  // maximiser when the fixed set is a continuum.
  for (std::size_t i = 0; i < fixed.size(); ++i) {
    if (i == best || distance(fixed[i], fixed[best]) <= kSeparation) continue;
    if (u_best - sys.u(fixed[i]) <= kMargin) {
      r.verdict = Verdict::Fail;
      r.witnesses.push_back(fixed[i]);
      r.residual = u_best - sys.u(fixed[i]);
      r.detail = "utility tie between distinct fixed points";
      return r;
    }
  }
  if (sys.eta_star && distance(*sys.eta_star, fixed[best]) > plan.tol) {
    r.verdict = Verdict::Fail;
    r.witnesses.push_back(*sys.eta_star);
    r.residual = distance(*sys.eta_star, fixed[best]);
    r.detail = "declared eta_star is not the utility-maximising fixed point";
    return r;
  }
  r.verdict = Verdict::Pass;
  r.residual = sys.phi.distance_to_image(fixed[best], fixed[best]);
  r.detail = std::to_string(fixed.size()) + " fixed points, maximiser u = " + fmt(u_best);
  return r;
}

struct PairScan {
  std::optional<std::pair<Point, Point>> strong;
  std::optional<std::pair<Point, Point>> weak;
  std::size_t pairs = 0;
};

bool confirmed(const SystemInstance& sys, const Point& x, const Point& y) {
  return sys.phi.distance_to_image(x, y) <= 1e-12 && sys.apply_t(x) <= sys.apply_t(y);
}

PairScan scan_pairs(const SystemInstance& sys, const SamplingPlan& plan) {
  PairScan scan;
  const Point& eta = *sys.eta_star;
  const double u_eta = sys.u(eta);
  // Uniform probes plus eta_star itself; no lattice, so measure-zero
  // subsets of F are reached only through explicit tests.
  auto probes = probe_set(sys.probe_box, plan.probes, plan.seed ^ 0xa5, false);
  probes.insert(probes.begin(), eta);
  const Correspondence view = sys.phi.search_view();
  for (const Point& x : probes) {
    if (sys.u(x) < u_eta) continue;
    PointSet imgs;
    try {
      imgs = view.images(x);
    } catch (const InfeasibleError&) {
      continue;
    }
    const double tx = sys.apply_t(x);
    const bool x_is_eta = distance(x, eta) <= plan.tol;
    for (const Point& y : imgs) {
      ++scan.pairs;
      if (!(tx <= sys.apply_t(y))) continue;
      const bool y_is_eta = distance(y, eta) <= plan.tol;
      if (!scan.strong && !(x_is_eta && y_is_eta) && confirmed(sys, x, y)) scan.strong = {x, y};
      if (!scan.weak && !x_is_eta && confirmed(sys, x, y)) scan.weak = {x, y};
    }
  }
  return scan;
}

ConditionResult check_a5(const SystemInstance& sys, const SamplingPlan& plan) {
  ConditionResult r;
  r.name = "A5";
  if (!sys.t || !sys.eta_star) {
    r.detail = !sys.t ? "no separation functional T supplied" : "no eta_star supplied";
    return r;
  }
  const PairScan scan = scan_pairs(sys, plan);
  if (scan.strong) {
    r.verdict = Verdict::Fail;
    r.witnesses = {scan.strong->first, scan.strong->second};
    r.residual = sys.apply_t(scan.strong->second) - sys.apply_t(scan.strong->first);
    std::ostringstream os;
    os << "T x <= T y at x = " << fmt(scan.strong->first)
       << ", y = " << fmt(scan.strong->second) << " with (x, y) != (eta_star, eta_star)";
    r.detail = os.str();
  } else {
    r.verdict = Verdict::Pass;
    r.detail = "T y < T x on " + std::to_string(scan.pairs) + " sampled pairs in F";
  }
  return r;
}

ConditionResult check_a6(const SystemInstance& sys, const SamplingPlan& plan) {
  ConditionResult r;
  r.name = "A6";
  if (!sys.reference_path || !sys.eta_star) {
    r.detail = !sys.reference_path ? "no reference path supplied" : "no eta_star supplied";
    return r;
  }
  const SequenceWindow path(*sys.reference_path);
  if (auto step = find_infeasible_step(sys.phi, path, 1e-9)) {
    r.verdict = Verdict::Fail;
    r.witnesses = {path.point(*step), path.point(*step + 1)};
    r.detail = "reference path leaves the graph of Phi at step " + std::to_string(*step);
    return r;
  }
  if (sys.constraint == ConstraintKind::StartAt && distance(path.point(0), sys.start) > plan.tol) {
    r.verdict = Verdict::Fail;
    r.witnesses = {path.point(0)};
    r.detail = "reference path does not start at the constrained start point";
    return r;
  }
  const double liminf = ideal_liminf(path.map_scalar(sys.u), sys.ideal);
  const double target = sys.u(*sys.eta_star);
  r.residual = liminf;
  r.threshold = target - plan.tol;
  r.verdict = liminf >= r.threshold ? Verdict::Pass : Verdict::Fail;
  r.detail = "I-liminf u(y) = " + fmt(liminf) + ", u(eta_star) = " + fmt(target);
  if (r.verdict == Verdict::Fail) r.witnesses = {path.point(path.size() - 1)};
  return r;
}

}  // namespace

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass:
      return "pass";
    case Verdict::Fail:
      return "fail";
    case Verdict::Untestable:
      return "untestable";
  }
  return {};
}

const ConditionResult& ConditionReport::at(const std::string& name) const {
  for (const auto& c : conditions) {
    if (c.name == name) return c;
  }
  throw ConfigError("no condition named " + name);
}

bool ConditionReport::all_pass() const {
  return std::all_of(conditions.begin(), conditions.end(),
                     [](const ConditionResult& c) { return c.verdict == Verdict::Pass; });
}

double t_hat(const SystemInstance& sys, std::span<const double> x) {
  if (!sys.t) throw ConfigError("t_hat needs a separation functional T");
  const PointSet imgs = sys.phi.search_view().images(x);
  const double tx = sys.apply_t(x);
  double best = -std::numeric_limits<double>::infinity();
  for (const Point& y : imgs) best = std::max(best, sys.apply_t(y) - tx);
  return best;
}

ConditionReport check_conditions(const SystemInstance& sys, const SamplingPlan& plan) {
  ConditionReport report;
  report.conditions.push_back(check_a1(sys));
  report.conditions.push_back(check_a2(sys, plan));
  report.conditions.push_back(check_a3(sys, plan));
  report.conditions.push_back(check_a4(sys, plan));
  report.conditions.push_back(check_a5(sys, plan));
  report.conditions.push_back(check_a6(sys, plan));
  return report;
}

SeparationReport check_separation_variants(const SystemInstance& sys, const SamplingPlan& plan) {
  if (!sys.t || !sys.eta_star) throw ConfigError("separation check needs T and eta_star");
  const PairScan scan = scan_pairs(sys, plan);
  SeparationReport r;
  r.pairs = scan.pairs;
  r.strong_holds = !scan.strong;
  r.weak_holds = !scan.weak;
  r.strong_witness = scan.strong;
  r.weak_witness = scan.weak;
  r.flagged = r.weak_holds && !r.strong_holds;
  return r;
}

TurnpikeVerdict turnpike_verdict(const SequenceWindow& path, const Point& eta_star,
                                 const IdealModel& ideal_in, const std::vector<double>& ladder,
                                 std::optional<std::size_t> burn_in) {
  if (path.size() == 0) throw ConfigError("turnpike verdict needs a nonempty path");
  if (eta_star.size() != path.dimension()) throw ConfigError("eta_star has wrong dimension");
  AnalysisOptions opts;
  opts.burn_in = burn_in;
  TurnpikeVerdict v;
  v.target = eta_star;
  v.horizon = path.size();
  v.burn_in = resolve_burn_in(opts, path.size());
  const IdealModel ideal = ideal_for_window(ideal_in, path.size());
  v.ideal = ideal.describe();
  v.verdict = true;
  std::vector<double> dist(path.size());
  for (std::size_t n = 0; n < path.size(); ++n) dist[n] = distance(path[n], eta_star);
  for (double eps : ladder) {
    std::vector<std::size_t> deviating;
    for (std::size_t n = v.burn_in; n < path.size(); ++n) {
      if (dist[n] >= eps) deviating.push_back(n);
    }
    LadderRung rung;
    rung.eps = eps;
    rung.count = deviating.size();
    rung.density = static_cast<double>(deviating.size()) /
                   static_cast<double>(path.size() - v.burn_in);
    rung.small = ideal.is_small_sorted(deviating, v.burn_in);
    v.verdict = v.verdict && rung.small;
    v.rungs.push_back(rung);
  }
  return v;
}

PathDiagnostic cluster_separation_diagnostic(const SystemInstance& sys,
                                             const SequenceWindow& path) {
  if (!sys.t || !sys.eta_star) throw ConfigError("diagnostic needs T and eta_star");
  const ClusterSet clusters = cluster_points(path, sys.ideal);
  const double tol = std::max(clusters.eps_grid, 1e-9);
  PathDiagnostic d;
  d.clusters = clusters.points.size();
  for (const Point& x : clusters.points) {
    const bool x_is_eta = distance(x, *sys.eta_star) <= tol;
    const double tx = sys.apply_t(x);
    for (const Point& y : sys.phi.search_view().images(x)) {
      if (tx <= sys.apply_t(y) && !(x_is_eta && distance(y, *sys.eta_star) <= tol)) {
        d.violating_clusters.push_back(x);
        break;
      }
    }
  }
  d.holds = d.violating_clusters.empty();
  return d;
}

}  // namespace turnpike
