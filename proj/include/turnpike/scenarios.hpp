#pragma once

#include <cstdint>
#include <vector>

#include "turnpike/sequence.hpp"
#include "turnpike/system.hpp"

namespace turnpike {

/// Phi(x) = {-x, x/2}, u(x) = x^3, start 1, T = identity, eta_star = 0.
/// The reference path is the halving orbit 2^-n of length `reference_length`.
SystemInstance build_counterexample_system(const IdealModel& ideal,
                                           std::size_t reference_length = 4096);

/// Sum over k = 1..k_max of (2k - 1 + k!).
std::size_t block_sequence_length(int k_max);

/// x_n = (-1)^n z_n with z the concatenation of the factorial blocks
/// B_k = (1, 1/2, ..., 1/2^(k-1), [1/2^k] * k!, 1/2^(k-1), ..., 1/2).
/// Requires 2 <= k_max <= 12; every consecutive pair is checked against
/// Phi(x) = [-2x, -x/2].
SequenceWindow build_block_sequence(int k_max);

/// Phi(x) = segment between -2x and -x/2, u(x) = x, free start in [-1, 1],
/// T = identity, eta_star = 0, reference path (-1/2)^n.
SystemInstance build_blocks_system(const IdealModel& ideal, std::size_t reference_length = 4096);

struct AffineMap {
  double slope = 0.0;
  double offset = 0.0;
};

/// FiniteBranch of affine contractions with eta_star = max offset/(1 - slope)
/// and T = identity. Throws DivergenceError when some |slope| >= 1. The
/// reference path iterates the branch owning eta_star from `start`.
SystemInstance build_ifs_system(const std::vector<AffineMap>& branches, ScalarMap u,
                                const IdealModel& ideal, double start = 0.0,
                                std::size_t reference_length = 200);

/// Seeded point of the closed unit ball in R^d.
Point seeded_l2_start(std::size_t d, std::uint64_t seed);

/// TruncatedL2 of dimension d (2..8), u = T = first coordinate, eta_star = 0,
/// start x_star, reference path the halving orbit of x_star. Conditions are
/// probed on x_0 in [-1, 1], x_i in [-1/i, 1/(2i)], where every band is
/// nonempty.
SystemInstance build_l2_truncation(std::size_t d, const Point& x_star, const IdealModel& ideal,
                                   std::size_t reference_length = 10000);

/// Phi(0) = {0, 1}, Phi(x) = {x/2} otherwise; u = T = identity, eta_star = 0.
SystemInstance build_separation_instance(const IdealModel& ideal);

}  // namespace turnpike
