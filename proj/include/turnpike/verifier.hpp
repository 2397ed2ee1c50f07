#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "turnpike/dynamics.hpp"
#include "turnpike/ideal.hpp"
#include "turnpike/system.hpp"

namespace turnpike {

enum class Verdict { Pass, Fail, Untestable };

std::string to_string(Verdict v);

struct ConditionResult {
  std::string name;  // "A1" .. "A6"
  Verdict verdict = Verdict::Untestable;
  std::string detail;
  /// Witness points for a failure (or the decisive points for a pass).
  std::vector<Point> witnesses;
  std::optional<IndexSet> witness_set;
  double residual = 0.0;
  double threshold = 0.0;
};

struct ConditionReport {
  std::vector<ConditionResult> conditions;

  const ConditionResult& at(const std::string& name) const;
  bool all_pass() const;
};

struct SamplingPlan {
  std::size_t probes = 10000;
  std::uint64_t seed = 2024;
  /// Translation-invariance sampling.
  std::size_t translation_samples = 200;
  std::vector<long> shifts = {1, 2, 3, 7};
  double tol = 1e-6;
};

/// max over y in Phi(x) of T(y - x).
double t_hat(const SystemInstance& sys, std::span<const double> x);

ConditionReport check_conditions(const SystemInstance& sys, const SamplingPlan& plan = {});

struct SeparationReport {
  bool strong_holds = true;
  bool weak_holds = true;
  std::optional<std::pair<Point, Point>> strong_witness;
  std::optional<std::pair<Point, Point>> weak_witness;
  std::size_t pairs = 0;
  /// Weak holds while strong fails.
  bool flagged = false;
};

/// Strong: T x <= T y with x in F, y in Phi(x) implies x = y = eta_star.
/// Weak:   T x <= T y with x in F \ {eta_star}, y in Phi(x) never happens.
/// Probes are eta_star plus seeded uniform points of the probe box, restricted
/// to F.
SeparationReport check_separation_variants(const SystemInstance& sys,
                                           const SamplingPlan& plan = {});

struct LadderRung {
  double eps = 0.0;
  /// |{n >= burn_in : |x_n - eta| >= eps}| / (N - burn_in).
  double density = 0.0;
  std::size_t count = 0;
  bool small = false;
};

struct TurnpikeVerdict {
  Point target;
  std::vector<LadderRung> rungs;
  std::size_t burn_in = 0;
  std::size_t horizon = 0;
  std::string ideal;
  bool verdict = false;
};

inline const std::vector<double> kDefaultLadder = {1e-1, 1e-2, 1e-3};

/// burn_in unset selects ceil(sqrt(N)) as in seq-analysis.
TurnpikeVerdict turnpike_verdict(const SequenceWindow& path, const Point& eta_star,
                                 const IdealModel& ideal,
                                 const std::vector<double>& ladder = kDefaultLadder,
                                 std::optional<std::size_t> burn_in = std::nullopt);

struct PathDiagnostic {
  /// Cluster points of the path at which the separation inequality fails.
  std::vector<Point> violating_clusters;
  std::size_t clusters = 0;
  bool holds = true;
};

/// Path-dependent weakening: the separation inequality only checked at the
/// I-cluster points of a given path. Diagnostic only.
PathDiagnostic cluster_separation_diagnostic(const SystemInstance& sys,
                                             const SequenceWindow& path);

}  // namespace turnpike
