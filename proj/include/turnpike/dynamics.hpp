#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "turnpike/hausdorff.hpp"
#include "turnpike/sequence.hpp"

namespace turnpike {

using VectorMap = std::function<Point(std::span<const double>)>;
using ScalarMap = std::function<double(std::span<const double>)>;

/// Phi(x) = {phi_1(x), ..., phi_k(x)}, in branch order.
struct FiniteBranch {
  std::vector<VectorMap> branches;
};

/// Phi(x) = [a(x), b(x)] on the real line, sampled at `samples` equispaced
/// points with both endpoints included.
struct Interval1D {
  ScalarMap lower;
  ScalarMap upper;
  std::size_t samples = 33;
};

struct Singleton {
  VectorMap map;
};

/// Finite truncation of the l2 example:
///   Phi(x) = {(-sum_{i>=1} x_i^2, y_1, ..., y_{d-1}) : 2 x_i <= y_i <= x_i + 1/i}
///            union {x / 2}.
/// Each band is sampled at `band_samples` equispaced points; the band
/// component is empty as soon as one band is (x_i > 1/i). The halving point
/// is always image 0.
struct TruncatedL2 {
  std::size_t dimension = 8;
  std::size_t band_samples = 5;
};

/// Set-valued map R^d => R^d with finitely sampled compact images.
class Correspondence {
 public:
  using Variant = std::variant<FiniteBranch, Interval1D, Singleton, TruncatedL2>;

  Correspondence(FiniteBranch v) : v_(std::move(v)) {}
  Correspondence(Interval1D v) : v_(std::move(v)) {}
  Correspondence(Singleton v) : v_(std::move(v)) {}
  Correspondence(TruncatedL2 v) : v_(v) {}

  const Variant& variant() const { return v_; }
  std::string kind_name() const;

  /// Nonempty finite sample of Phi(x). Throws InfeasibleError when the image
  /// is empty (an interval with a(x) > b(x)).
  PointSet images(std::span<const double> x) const;

  /// Distance from y to the exact image set Phi(x), not to its sample.
  double distance_to_image(std::span<const double> x, std::span<const double> y) const;

  /// Same correspondence with every sampled component `factor` times finer.
  Correspondence refined(std::size_t factor) const;

  /// View used by search and probing: identical except that a TruncatedL2
  /// of dimension above 4 keeps only the two endpoints of each band.
  Correspondence search_view() const;

  /// Number of sampled image points per evaluation, when it does not depend on x.
  std::optional<std::size_t> fixed_branch_count() const;

 private:
  Variant v_;
};

/// Fixed points found by scanning `box`, refined per variant: Newton on each
/// branch for FiniteBranch/Singleton, bisection on the endpoint crossings
/// for Interval1D (an interval of fixed points is reported by its
/// endpoints), projection onto the fixed set for TruncatedL2. Points with
/// residual above `tol` are dropped; survivors are merged within 10 tol.
PointSet fixed_points(const Correspondence& phi, const Box& box, double tol = 1e-8,
                      std::size_t random_probes = 2000, std::uint64_t seed = 7);

struct HutchinsonResult {
  PointSet set;
  /// Hausdorff distance between H^{n-1}({x0}) and H^n({x0}), n = 1..iterations.
  std::vector<double> step_distances;
  double max_lipschitz = 0.0;
  double resolution = 1e-6;
};

/// H^n({seed}) with H(A) = union over a in A of Phi(a). Each iterate is
/// deduplicated at `resolution`. Throws DivergenceError if some branch is not
/// a contraction near the seed.
HutchinsonResult hutchinson_iterate(const FiniteBranch& phi, const Point& seed,
                                    std::size_t iterations, double resolution = 1e-6);

struct ContinuityRung {
  double delta = 0.0;
  double max_ratio = 0.0;
  Point worst_point;
};

struct ContinuityReport {
  std::vector<ContinuityRung> rungs;
  std::size_t probes = 0;
  std::size_t skipped_infeasible = 0;
  bool passed = false;
};

/// Estimates H(Phi(x), Phi(x')) / delta for |x - x'| = delta over sampled x
/// (box centre, an axis lattice and seeded uniform points). Passes when the
/// worst ratio does not grow as delta shrinks: every rung stays within 10x
/// of max(1, ratio at the widest rung).
ContinuityReport continuity_probe(const Correspondence& phi, const Box& box,
                                  std::size_t samples = 200,
                                  std::vector<double> deltas = {1e-2, 1e-3, 1e-4, 1e-5},
                                  std::uint64_t seed = 11);

/// Feasible path: states plus the image index taken at every step.
struct Path {
  std::vector<Point> states;
  std::vector<std::size_t> trace;
  bool truncated = false;
  std::string error;

  SequenceWindow window() const { return SequenceWindow(states); }
  std::size_t size() const { return states.size(); }
};

/// Chooses an index into `images` given the step n and the current state.
using BranchPolicy =
    std::function<std::size_t(std::size_t n, std::span<const double> x, const PointSet& images)>;

BranchPolicy always_branch(std::size_t k);

/// Path of length N from x0. An empty image stops the path early with
/// `truncated` set.
Path feasible_path(const Correspondence& phi, const Point& x0, const BranchPolicy& policy,
                   std::size_t length);

/// First n with dist(x_{n+1}, Phi(x_n)) > tol, if any.
std::optional<std::size_t> find_infeasible_step(const Correspondence& phi,
                                                const SequenceWindow& path, double tol);

}  // namespace turnpike
