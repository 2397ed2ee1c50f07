#include "turnpike/sequence.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "turnpike/error.hpp"

namespace turnpike {

Point Box::centre() const {
  Point c(lo.size());
  for (std::size_t i = 0; i < lo.size(); ++i) c[i] = 0.5 * (lo[i] + hi[i]);
  return c;
}

bool Box::contains(std::span<const double> p, double slack) const {
  for (std::size_t i = 0; i < lo.size(); ++i) {
    if (p[i] < lo[i] - slack || p[i] > hi[i] + slack) return false;
  }
  return true;
}

double distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::sqrt(s);
}

double norm(std::span<const double> a) {
  double s = 0.0;
  for (double v : a) s += v * v;
  return std::sqrt(s);
}

SequenceWindow::SequenceWindow(std::size_t dimension, std::vector<double> flat)
    : dim_(dimension), flat_(std::move(flat)) {
  if (dim_ == 0) throw ConfigError("sequence dimension must be at least 1");
  if (flat_.empty()) throw ConfigError("sequence window is empty");
  if (flat_.size() % dim_ != 0) throw ConfigError("ragged sequence window");
  for (std::size_t i = 0; i < flat_.size(); ++i) {
    if (!std::isfinite(flat_[i])) {
      throw UnboundedInputError("non-finite entry at index " +
                                std::to_string(i / dim_));
    }
  }
}

namespace {
std::vector<double> flatten(const std::vector<Point>& points) {
  if (points.empty()) throw ConfigError("sequence window is empty");
  std::vector<double> flat;
  flat.reserve(points.size() * points.front().size());
  for (const Point& p : points) {
    if (p.size() != points.front().size()) throw ConfigError("ragged sequence window");
    flat.insert(flat.end(), p.begin(), p.end());
  }
  return flat;
}
}  // namespace

SequenceWindow::SequenceWindow(const std::vector<Point>& points)
    : SequenceWindow(points.empty() ? 1 : points.front().size(), flatten(points)) {}

SequenceWindow SequenceWindow::scalar(std::vector<double> values) {
  return SequenceWindow(1, std::move(values));
}

Point SequenceWindow::point(std::size_t n) const {
  const auto v = (*this)[n];
  return Point(v.begin(), v.end());
}

SequenceWindow SequenceWindow::map(
    const std::function<Point(std::span<const double>)>& h) const {
  std::vector<double> out;
  std::size_t out_dim = 0;
  for (std::size_t n = 0; n < size(); ++n) {
    Point y = h((*this)[n]);
    if (n == 0) {
      out_dim = y.size();
      out.reserve(out_dim * size());
    } else if (y.size() != out_dim) {
      throw ConfigError("mapped sequence changes dimension");
    }
    out.insert(out.end(), y.begin(), y.end());
  }
  return SequenceWindow(out_dim, std::move(out));
}

SequenceWindow SequenceWindow::map_scalar(
    const std::function<double(std::span<const double>)>& h) const {
  std::vector<double> out(size());
  for (std::size_t n = 0; n < size(); ++n) out[n] = h((*this)[n]);
  return SequenceWindow(1, std::move(out));
}

SequenceWindow::Box SequenceWindow::bounding_box() const {
  Box box{Point((*this)[0].begin(), (*this)[0].end()),
          Point((*this)[0].begin(), (*this)[0].end())};
  for (std::size_t n = 1; n < size(); ++n) {
    const auto v = (*this)[n];
    for (std::size_t i = 0; i < dim_; ++i) {
      box.lo[i] = std::min(box.lo[i], v[i]);
      box.hi[i] = std::max(box.hi[i], v[i]);
    }
  }
  return box;
}

SequenceWindow read_window(std::istream& in) {
  std::vector<double> flat;
  std::size_t dim = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream row(line);
    std::size_t count = 0;
    std::string token;
    while (row >> token) {
      // strtod rather than stod: subnormal values set ERANGE but are valid.
      char* end = nullptr;
      const double v = std::strtod(token.c_str(), &end);
      if (end != token.c_str() + token.size() || !std::isfinite(v)) {
        throw ConfigError("line " + std::to_string(line_no) +
                          ": malformed coordinate '" + token + "'");
      }
      flat.push_back(v);
      ++count;
    }
    if (dim == 0) dim = count;
    if (count != dim) {
      throw ConfigError("line " + std::to_string(line_no) + ": expected " +
                        std::to_string(dim) + " coordinates, found " +
                        std::to_string(count));
    }
  }
  if (dim == 0) throw ConfigError("sequence file contains no points");
  return SequenceWindow(dim, std::move(flat));
}

SequenceWindow read_window_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read sequence file '" + path + "'");
  return read_window(in);
}

}  // namespace turnpike
