#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "turnpike/dynamics.hpp"
#include "turnpike/system.hpp"

namespace turnpike {

struct SearchConfig {
  std::size_t horizon = 4096;
  std::size_t beam = 64;
  double grid = 1e-9;
  double trim = 0.01;
  std::uint64_t seed = 1;
  /// Random starts drawn from the start box under the Free constraint.
  std::size_t free_starts = 16;

  void validate() const;
};

struct OptimReport {
  Path best;
  /// Surrogate I-liminf of u along `best`.
  double objective = 0.0;
  /// Untrimmed minimum of u over the whole path, used as the secondary key.
  double path_min = 0.0;
  /// Trim fraction actually applied (forced to 0 for Fin and finite-trace).
  double trim = 0.0;
  std::size_t tail_start = 0;
  std::size_t discarded = 0;
  std::vector<std::size_t> frontier_sizes;
  bool exhaustive = false;
  /// Every path died before the horizon; `best` is the longest survivor.
  bool partial = false;
  std::string note;
};

/// Trim fraction the objective uses for this ideal.
double effective_trim(const IdealModel& ideal, double trim);

/// Surrogate objective of a utility sequence of length N: the minimum over the
/// last N/2 indices after discarding the ceil(trim * N/2) lowest values. For
/// finite-trace ideals only tail indices in the trace class count.
double surrogate_objective(std::span<const double> utilities, const IdealModel& ideal,
                           double trim);

/// Beam search over branch choices. Candidates are ranked by (objective so
/// far, path minimum of u, utility of the current state, lexicographic branch
/// sequence), the first two on the grid `cfg.grid`; among candidates whose
/// states share a grid cell only the best survives. Complete paths are ranked
/// without the current-state component.
OptimReport maxmin_search(const SystemInstance& sys, const SearchConfig& cfg);

/// Enumerates every branch sequence of length N (b^N <= 1e7) and returns the
/// best complete path under the same ranking. Requires a finite-branch or
/// singleton correspondence.
OptimReport exhaustive_maxmin(const SystemInstance& sys, std::size_t horizon, double trim = 0.01,
                              double grid = 1e-9);

}  // namespace turnpike
