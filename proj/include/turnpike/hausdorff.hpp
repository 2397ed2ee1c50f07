#pragma once

#include <vector>

#include "turnpike/sequence.hpp"

namespace turnpike {

using PointSet = std::vector<Point>;

/// sup over a in A of the distance from a to B.
double directed_hausdorff(const PointSet& a, const PointSet& b);

/// Symmetric Hausdorff distance between two finite nonempty point sets.
/// One-dimensional sets go through a sorted nearest-neighbour search, other
/// dimensions are compared pairwise.
double hausdorff(const PointSet& a, const PointSet& b);

/// Removes points closer than `resolution` (in every coordinate) to an
/// earlier kept point after quantisation; the result is sorted.
PointSet deduplicate(PointSet points, double resolution);

}  // namespace turnpike
