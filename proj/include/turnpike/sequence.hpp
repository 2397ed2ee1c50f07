#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace turnpike {

using Point = std::vector<double>;

/// Axis-aligned box in R^d.
struct Box {
  Point lo;
  Point hi;
  std::size_t dimension() const { return lo.size(); }
  Point centre() const;
  bool contains(std::span<const double> p, double slack = 0.0) const;
};

double distance(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> a);

/// Finite prefix (x_0, ..., x_{N-1}) of a sequence in R^d, stored row-major.
class SequenceWindow {
 public:
  /// Throws on d == 0, empty input, ragged rows or non-finite entries.
  SequenceWindow(std::size_t dimension, std::vector<double> flat);
  explicit SequenceWindow(const std::vector<Point>& points);
  static SequenceWindow scalar(std::vector<double> values);

  std::size_t dimension() const { return dim_; }
  std::size_t size() const { return flat_.size() / dim_; }
  std::span<const double> operator[](std::size_t n) const {
    return {flat_.data() + n * dim_, dim_};
  }
  Point point(std::size_t n) const;
  /// Coordinate view for d == 1 windows.
  std::span<const double> scalars() const { return flat_; }
  std::span<const double> flat() const { return flat_; }

  /// h applied pointwise, i.e. the sequence h(x).
  SequenceWindow map(const std::function<Point(std::span<const double>)>& h) const;
  SequenceWindow map_scalar(const std::function<double(std::span<const double>)>& h) const;

  using Box = turnpike::Box;
  Box bounding_box() const;

 private:
  std::size_t dim_ = 1;
  std::vector<double> flat_;
};

/// Plain text: one point per line, whitespace-separated coordinates.
/// Blank lines and lines starting with '#' are skipped.
SequenceWindow read_window(std::istream& in);
SequenceWindow read_window_file(const std::string& path);

}  // namespace turnpike
