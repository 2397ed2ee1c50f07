#include "turnpike/hausdorff.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "turnpike/error.hpp"

namespace turnpike {

namespace {

double directed_1d(const PointSet& a, const std::vector<double>& sorted_b) {
  double worst = 0.0;
  for (const Point& p : a) {
    const double v = p[0];
    const auto it = std::lower_bound(sorted_b.begin(), sorted_b.end(), v);
    double best = std::numeric_limits<double>::infinity();
    if (it != sorted_b.end()) best = *it - v;
    if (it != sorted_b.begin()) best = std::min(best, v - *(it - 1));
    worst = std::max(worst, best);
  }
  return worst;
}

std::vector<double> sorted_coords(const PointSet& s) {
  std::vector<double> out;
  out.reserve(s.size());
  for (const Point& p : s) out.push_back(p[0]);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

double directed_hausdorff(const PointSet& a, const PointSet& b) {
  if (a.empty() || b.empty()) throw RangeError("Hausdorff distance of an empty set");
  if (a.front().size() == 1 && b.front().size() == 1) {
    return directed_1d(a, sorted_coords(b));
  }
  double worst = 0.0;
  for (const Point& p : a) {
    double best = std::numeric_limits<double>::infinity();
    for (const Point& q : b) {
      best = std::min(best, distance(p, q));
      if (best <= worst) break;
    }
    worst = std::max(worst, best);
  }
  return worst;
}

double hausdorff(const PointSet& a, const PointSet& b) {
  return std::max(directed_hausdorff(a, b), directed_hausdorff(b, a));
}

PointSet deduplicate(PointSet points, double resolution) {
  if (points.empty()) return points;
  if (points.front().size() == 1) {
    std::sort(points.begin(), points.end());
    PointSet out;
    out.reserve(points.size());
    for (Point& p : points) {
      if (out.empty() || p[0] - out.back()[0] >= resolution) out.push_back(std::move(p));
    }
    return out;
  }
  std::map<std::vector<long long>, Point> cells;
  std::vector<long long> key;
  for (Point& p : points) {
    key.resize(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
      key[i] = static_cast<long long>(std::floor(p[i] / resolution));
    }
    cells.try_emplace(key, std::move(p));
  }
  PointSet out;
  out.reserve(cells.size());
  for (auto& [k, p] : cells) out.push_back(std::move(p));
  return out;
}

}  // namespace turnpike
