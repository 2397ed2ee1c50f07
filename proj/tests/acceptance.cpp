// Acceptance run: one line per criterion, nonzero exit if any fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "turnpike/cluster.hpp"
#include "turnpike/hausdorff.hpp"
#include "turnpike/optimizer.hpp"
#include "turnpike/scenarios.hpp"
#include "turnpike/verifier.hpp"

using namespace turnpike;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << "[missed: " << what << "] ";
    }
  }
};

int failures = 0;

void criterion(int id, const std::string& title, double budget_s,
               const std::function<void(Outcome&)>& body) {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.pass = false;
    o.detail << "exception: " << e.what();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (secs > budget_s) {
    o.pass = false;
    o.detail << "[over budget] ";
  }
  if (!o.pass) ++failures;
  std::printf("%s criterion %d: %s | %s| %.2fs of %.0fs\n", o.pass ? "PASS" : "FAIL", id,
              title.c_str(), o.detail.str().c_str(), secs, budget_s);
  std::fflush(stdout);
}

SequenceWindow alternating(std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = i % 2 == 0 ? 1.0 : -1.0;
  return SequenceWindow::scalar(std::move(v));
}

// Periodic values plus noise on an index set of density at most `rate`.
SequenceWindow periodic_plus_sparse(std::mt19937_64& rng, std::size_t n, double rate) {
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  std::uniform_int_distribution<std::size_t> len(2, 6);
  std::vector<double> pattern(len(rng));
  for (double& p : pattern) p = val(rng);
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = pattern[i % pattern.size()];
  const auto hits = static_cast<std::size_t>(rate * static_cast<double>(n));
  std::uniform_int_distribution<std::size_t> where(0, n - 1);
  for (std::size_t k = 0; k < hits; ++k) v[where(rng)] = 3.0 * val(rng);
  return SequenceWindow::scalar(std::move(v));
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

double ident(std::span<const double> x) { return x[0]; }

}  // namespace

int main() {
  criterion(1, "factorial block sequence, density limit 0", 30, [](Outcome& o) {
    const SequenceWindow x = build_block_sequence(10);
    const IdealModel z = IdealModel::density(x.size(), 0.01);
    const ClusterReport r = analyze_window(x, z, 0.1);
    const TurnpikeVerdict v = turnpike_verdict(x, {0.0}, z, {0.1});
    const bool limit_zero = r.converges_to && std::abs((*r.converges_to)[0]) <= r.eps_grid;
    o.require(x.size() == 4038013, "length 4038013");
    o.require(limit_zero, "limit 0");
    o.require(v.verdict && v.rungs[0].density <= 0.02, "deviation density <= 0.02");
    o.require(r.window_min[0] == -1.0 && r.window_max[0] == 1.0, "classical extremes -1 and 1");
    const ClusterReport fin = analyze_window(x, IdealModel::fin(x.size()), 0.1);
    o.require(!fin.converges_to, "no Fin limit");
    o.detail << "N=" << x.size() << " limit=" << (r.converges_to ? fmt((*r.converges_to)[0]) : "none")
             << " deviation density=" << fmt(v.rungs[0].density) << " min=" << r.window_min[0]
             << " max=" << r.window_max[0] << " fin limit=" << (fin.converges_to ? "present" : "absent") << ' ';
  });

  criterion(2, "cluster points and representation identity", 10, [](Outcome& o) {
    const SequenceWindow x = alternating(20000);
    const IdealModel z = IdealModel::density(x.size());
    const ClusterSet cs = cluster_points(x, z);
    o.require(cs.points.size() == 2 && std::abs(cs.points[0][0] + 1) <= cs.eps_grid &&
                  std::abs(cs.points[1][0] - 1) <= cs.eps_grid,
              "cluster set {-1, 1}");
    const double li = ideal_liminf(x, z);
    o.require(std::abs(li + 1) <= cs.eps_grid, "liminf -1");
    std::mt19937_64 rng(2024);
    std::size_t passed = 0;
    for (int s = 0; s < 20; ++s) {
      const SequenceWindow w = periodic_plus_sparse(rng, 20000, 0.001);
      const RepresentationReport r = check_representation_identity(w, ident, IdealModel::density(w.size()));
      passed += r.passed ? 1 : 0;
    }
    o.require(passed == 20, "20/20 representation checks");
    o.detail << "clusters=" << cs.points.size() << " liminf=" << fmt(li) << " grid=" << fmt(cs.eps_grid)
             << " representation " << passed << "/20 ";
  });

  criterion(3, "image cluster identity for t^2, t^3, |t|", 20, [](Outcome& o) {
    using H = std::function<Point(std::span<const double>)>;
    const std::vector<std::pair<std::string, H>> maps = {
        {"t^2", [](std::span<const double> t) { return Point{t[0] * t[0]}; }},
        {"t^3", [](std::span<const double> t) { return Point{t[0] * t[0] * t[0]}; }},
        {"|t|", [](std::span<const double> t) { return Point{std::abs(t[0])}; }}};
    std::mt19937_64 rng(77);
    std::size_t passed = 0;
    std::size_t total = 0;
    double worst = 0.0;
    for (int s = 0; s < 25; ++s) {
      const SequenceWindow w = periodic_plus_sparse(rng, 10000, 0.01);
      const IdealModel z = IdealModel::density(w.size());
      for (const auto& [name, h] : maps) {
        const ImageIdentityReport r = check_image_cluster_identity(w, h, z);
        ++total;
        passed += r.passed ? 1 : 0;
        worst = std::max(worst, r.tolerance > 0 ? r.distance / r.tolerance : 0.0);
      }
    }
    o.require(passed == total, "every case within 2 eps (1 + L)");
    o.detail << passed << "/" << total << " worst distance/tolerance=" << fmt(worst) << ' ';
  });

  criterion(4, "counterexample under finite-trace and density ideals", 60, [](Outcome& o) {
    const IdealModel trace = IdealModel::finite_trace(4096, Parity::Evens);
    const SystemInstance st = build_counterexample_system(trace, 4096);
    const OptimReport rt = maxmin_search(st, {.horizon = 4096, .beam = 64});
    bool alternating_path = true;
    for (std::size_t n = 0; n < rt.best.size(); ++n) {
      alternating_path = alternating_path && rt.best.states[n][0] == (n % 2 == 0 ? 1.0 : -1.0);
    }
    const bool vt = turnpike_verdict(rt.best.window(), {0.0}, trace).verdict;
    o.require(rt.objective >= 1 - 1e-9, "finite-trace objective >= 1 - 1e-9");
    o.require(alternating_path, "alternating optimal path");
    o.require(!vt, "finite-trace verdict false");

    const IdealModel z = IdealModel::density(4096);
    const SystemInstance sz = build_counterexample_system(z, 4096);
    const OptimReport rz = maxmin_search(sz, {.horizon = 4096, .beam = 64});
    const bool vz = turnpike_verdict(rz.best.window(), {0.0}, z).verdict;
    o.require(rz.objective <= 1e-3, "density objective <= 1e-3");
    o.require(vz, "density verdict true");

    const ConditionReport ct = check_conditions(st);
    const ConditionReport cz = check_conditions(sz);
    o.require(ct.at("A3").verdict == Verdict::Fail, "A3 fails for finite-trace");
    o.require(cz.all_pass(), "A1-A6 pass for density");
    o.detail << "finite-trace obj=" << fmt(rt.objective) << " alternating=" << alternating_path
             << " verdict=" << vt << " A3=" << to_string(ct.at("A3").verdict)
             << "; density obj=" << fmt(rz.objective) << " verdict=" << vz
             << " all conditions=" << cz.all_pass() << ' ';
  });

  criterion(5, "beam search matches exhaustive search on 10 instances", 30, [](Outcome& o) {
    std::size_t matched = 0;
    for (std::uint64_t s = 0; s < 10; ++s) {
      std::mt19937_64 rng(1000 + s);
      std::uniform_real_distribution<double> slope(-0.95, 0.95);
      std::uniform_real_distribution<double> unit(-1.0, 1.0);
      std::vector<AffineMap> maps;
      for (int k = 0; k < 2; ++k) {
        const double a = slope(rng);
        maps.push_back({a, unit(rng)});
      }
      const double w = 3.0 * unit(rng);
      const double start = unit(rng);
      const SystemInstance sys =
          build_ifs_system(maps, [w](std::span<const double> x) { return std::sin(3 * x[0] + w); },
                           IdealModel::fin(1000), start, 12);
      const OptimReport ex = exhaustive_maxmin(sys, 12);
      const OptimReport bs = maxmin_search(sys, {.horizon = 12, .beam = 64});
      if (ex.objective == bs.objective && ex.best.trace == bs.best.trace) ++matched;
    }
    o.require(matched == 10, "10/10 exact matches");
    o.detail << matched << "/10 exact (objective and path) ";
  });

  criterion(6, "IFS {0.5x, 0.3x + 0.7} turnpike", 5, [](Outcome& o) {
    const SystemInstance sys =
        build_ifs_system({{0.5, 0.0}, {0.3, 0.7}}, ident, IdealModel::fin(200), 0.0, 200);
    const PointSet fixed = fixed_points(sys.phi, sys.probe_box);
    const bool fp = fixed.size() == 2 && hausdorff(fixed, {{0.0}, {1.0}}) <= 1e-8;
    o.require(fp, "fixed points {0, 1}");
    o.require(std::abs((*sys.eta_star)[0] - 1.0) <= 1e-12, "eta_star = 1");
    const OptimReport r = maxmin_search(sys, {.horizon = 200, .beam = 64});
    const double gap = std::abs(r.best.states.back()[0] - 1.0);
    const bool v = turnpike_verdict(r.best.window(), {1.0}, IdealModel::fin(200)).verdict;
    o.require(gap <= 1e-6, "|x_N - 1| <= 1e-6");
    o.require(v, "verdict true");
    o.detail << "fixed points=" << fixed.size() << " eta*=" << fmt((*sys.eta_star)[0])
             << " |x_N-1|=" << fmt(gap) << " verdict=" << v << ' ';
  });

  criterion(7, "l2 truncation, d = 8", 60, [](Outcome& o) {
    const IdealModel z = IdealModel::density(10000);
    const Point xs = seeded_l2_start(8, 42);
    const SystemInstance sys = build_l2_truncation(8, xs, z, 10000);
    const ConditionReport c = check_conditions(sys);
    for (const auto& cond : c.conditions) {
      o.require(cond.verdict == Verdict::Pass, cond.name + " pass");
      o.detail << cond.name << '=' << to_string(cond.verdict) << ' ';
    }
    o.detail << "(A5: " << c.at("A5").detail << ") ";
    const double at_zero = t_hat(sys, Point(8, 0.0));
    o.require(at_zero == 0.0, "T-hat(0) = 0");
    std::mt19937_64 rng(4242);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::size_t probed = 0;
    double worst = -INFINITY;
    while (probed < 10000) {
      Point x(8);
      for (std::size_t i = 0; i < 8; ++i) {
        x[i] = sys.probe_box.lo[i] + (sys.probe_box.hi[i] - sys.probe_box.lo[i]) * unit(rng);
      }
      if (!sys.in_f(x)) continue;
      worst = std::max(worst, t_hat(sys, x));
      ++probed;
    }
    o.require(worst < 0.0, "T-hat < 0 on 1e4 probes");
    const OptimReport r = maxmin_search(sys, {.horizon = 10000, .beam = 16});
    const bool v = turnpike_verdict(r.best.window(), Point(8, 0.0), z, {1e-3}).verdict;
    o.require(v, "density verdict at eps 1e-3");
    o.detail << "|x*|=" << fmt(norm(xs)) << " T-hat(0)=" << at_zero << " max probed T-hat=" << fmt(worst)
             << " verdict=" << v << ' ';
  });

  criterion(8, "strong versus weak separation", 5, [](Outcome& o) {
    const IdealModel z = IdealModel::density(4096);
    const SeparationReport crafted = check_separation_variants(build_separation_instance(z));
    const bool witness = crafted.strong_witness && crafted.strong_witness->first == Point{0.0} &&
                         crafted.strong_witness->second == Point{1.0};
    o.require(crafted.weak_holds, "weak passes on the crafted instance");
    o.require(!crafted.strong_holds && witness, "strong fails with witness (0, 1)");
    const SeparationReport ex = check_separation_variants(build_counterexample_system(z));
    o.require(ex.strong_holds && ex.weak_holds, "both pass on the counterexample system");
    o.detail << "crafted weak=" << crafted.weak_holds << " strong=" << crafted.strong_holds
             << " witness=" << witness << "; counterexample strong=" << ex.strong_holds
             << " weak=" << ex.weak_holds << ' ';
  });

  std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
