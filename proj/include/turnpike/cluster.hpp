#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>

#include "turnpike/hausdorff.hpp"
#include "turnpike/ideal.hpp"
#include "turnpike/sequence.hpp"

namespace turnpike {

struct AnalysisOptions {
  /// Grid spacing; 0 selects (largest coordinate range)/200.
  double eps_grid = 0.0;
  /// Upper-density positivity threshold for the density ideal.
  double theta = 0.05;
  /// Leading indices excluded from every statistic; unset selects ceil(sqrt(N)).
  std::optional<std::size_t> burn_in;
};

inline constexpr double kGridDivisions = 200.0;

std::size_t resolve_burn_in(const AnalysisOptions& opts, std::size_t n);

/// The ideal re-targeted to the window length.
IdealModel ideal_for_window(const IdealModel& ideal, std::size_t n);

struct ClusterSet {
  PointSet points;
  double eps_grid = 0.0;
  std::size_t burn_in = 0;
  /// Number of times the grid was doubled before a positive cell was found.
  int coarsenings = 0;
};

/// Empirical I-cluster points on an eps-grid.
///
/// A cell centre c qualifies when {n >= burn_in : |x_n - c| < eps} is
/// I-positive (density >= theta for the density ideal). Adjacent qualifying
/// cells are merged and reported as the centroid of the tail points they
/// hold. If no cell qualifies the grid is doubled until one does, which keeps
/// the reported set nonempty for every bounded window.
ClusterSet cluster_points(const SequenceWindow& x, const IdealModel& ideal,
                          const AnalysisOptions& opts = {});

/// inf{ r : {n : x_n < r} is I-positive }, found by bisection (width 1e-9 or
/// 60 steps). Requires d == 1.
double ideal_liminf(const SequenceWindow& x, const IdealModel& ideal,
                    const AnalysisOptions& opts = {});
/// -ideal_liminf(-x).
double ideal_limsup(const SequenceWindow& x, const IdealModel& ideal,
                    const AnalysisOptions& opts = {});

/// The I-limit, if the cluster set is a singleton {eta} and
/// {n : |x_n - eta| >= s} is I-small for s in {eps, eps/2, eps/4}.
std::optional<Point> ideal_limit(const SequenceWindow& x, const IdealModel& ideal,
                                 double eps, const AnalysisOptions& opts = {});

struct ClusterReport {
  PointSet cluster_points;
  std::optional<double> liminf;
  std::optional<double> limsup;
  std::optional<Point> converges_to;
  double eps_grid = 0.0;
  double theta = 0.0;
  double limit_eps = 0.0;
  std::size_t burn_in = 0;
  std::size_t horizon = 0;
  std::string ideal;
  /// Classical extremes of the window, for comparison.
  Point window_min;
  Point window_max;
};

/// Cluster set, liminf/limsup (d == 1) and limit verdict in one pass.
ClusterReport analyze_window(const SequenceWindow& x, const IdealModel& ideal,
                             double limit_eps, const AnalysisOptions& opts = {});

/// Largest finite-difference slope of h over a sample of the box.
double lipschitz_estimate(const std::function<Point(std::span<const double>)>& h,
                          const SequenceWindow::Box& box);

struct ImageIdentityReport {
  PointSet image_of_clusters;   // h(Gamma_x)
  PointSet clusters_of_image;   // Gamma_{h(x)}
  double distance = 0.0;
  double lipschitz = 0.0;
  double eps_grid = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

/// Compares h(Gamma_x(I)) with Gamma_{h(x)}(I) in the Hausdorff metric.
/// Passes when the distance is at most 2 eps (1 + L), eps being the coarser
/// of the two grids and L the Lipschitz estimate of h on the bounding box.
ImageIdentityReport check_image_cluster_identity(
    const SequenceWindow& x, const std::function<Point(std::span<const double>)>& h,
    const IdealModel& ideal, const AnalysisOptions& opts = {});

struct RepresentationReport {
  double liminf_definition = 0.0;
  double liminf_image_min = 0.0;
  double liminf_state_min = 0.0;
  double limsup_definition = 0.0;
  double limsup_image_max = 0.0;
  double limsup_state_max = 0.0;
  double lipschitz = 0.0;
  double eps_grid = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

/// I-liminf u(x) = min Gamma_{u(x)} = min over Gamma_x of u, and the limsup
/// analogue, each side computed independently.
RepresentationReport check_representation_identity(
    const SequenceWindow& x, const std::function<double(std::span<const double>)>& u,
    const IdealModel& ideal, const AnalysisOptions& opts = {});

}  // namespace turnpike
