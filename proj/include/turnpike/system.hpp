#pragma once

#include <optional>
#include <string>
#include <vector>

#include "turnpike/dynamics.hpp"
#include "turnpike/ideal.hpp"

namespace turnpike {

enum class ConstraintKind { StartAt, Free };

/// <X, Phi, u, I, C> plus the optional separation functional and claimed
/// optimal stationary point. F = {x : u(x) >= u(eta_star)} is derived.
struct SystemInstance {
  std::string name;
  std::size_t dimension = 1;
  Correspondence phi;
  ScalarMap u;
  IdealModel ideal;
  ConstraintKind constraint = ConstraintKind::StartAt;
  /// Start point for StartAt.
  Point start;
  /// Start region for Free.
  std::optional<Box> start_box;
  /// Coefficients of T(x) = <t, x>.
  std::optional<Point> t;
  std::optional<Point> eta_star;
  /// Witness path for (A6).
  std::optional<std::vector<Point>> reference_path;
  /// Box for probing conditions and searching fixed points.
  Box probe_box;

  double utility(std::span<const double> x) const { return u(x); }
  double apply_t(std::span<const double> x) const;
  bool in_f(std::span<const double> x) const;
};

/// dist(eta_star, Phi(eta_star)); throws ConfigError without eta_star.
double stationarity_residual(const SystemInstance& sys);

}  // namespace turnpike
