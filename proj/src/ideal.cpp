#include "turnpike/ideal.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <random>
#include <sstream>

#include "turnpike/error.hpp"

namespace turnpike {

IndexSet::IndexSet(std::vector<std::size_t> indices, std::size_t horizon)
    : indices_(std::move(indices)), horizon_(horizon) {
  for (std::size_t i = 0; i < indices_.size(); ++i) {
    if (indices_[i] >= horizon_) {
      throw RangeError("index " + std::to_string(indices_[i]) +
                       " outside horizon " + std::to_string(horizon_));
    }
    if (i > 0 && indices_[i] <= indices_[i - 1]) {
      throw RangeError("index set must be strictly increasing");
    }
  }
}

IndexSet IndexSet::from_predicate(std::size_t horizon,
                                  const std::function<bool(std::size_t)>& pred) {
  IndexSet out(horizon);
  for (std::size_t n = 0; n < horizon; ++n) {
    if (pred(n)) out.indices_.push_back(n);
  }
  return out;
}

bool IndexSet::contains(std::size_t n) const {
  return std::binary_search(indices_.begin(), indices_.end(), n);
}

std::size_t IndexSet::count_below(std::size_t n) const {
  return static_cast<std::size_t>(
      std::lower_bound(indices_.begin(), indices_.end(), n) - indices_.begin());
}

IndexSet IndexSet::complement() const {
  IndexSet out(horizon_);
  out.indices_.reserve(horizon_ - indices_.size());
  std::size_t j = 0;
  for (std::size_t n = 0; n < horizon_; ++n) {
    if (j < indices_.size() && indices_[j] == n) {
      ++j;
    } else {
      out.indices_.push_back(n);
    }
  }
  return out;
}

IndexSet IndexSet::united(const IndexSet& other) const {
  if (other.horizon_ != horizon_) throw RangeError("horizon mismatch in union");
  IndexSet out(horizon_);
  std::set_union(indices_.begin(), indices_.end(), other.indices_.begin(),
                 other.indices_.end(), std::back_inserter(out.indices_));
  return out;
}

IndexSet IndexSet::shifted(long k) const {
  IndexSet out(horizon_);
  for (std::size_t a : indices_) {
    const long v = static_cast<long>(a) + k;
    if (v >= 0 && v < static_cast<long>(horizon_)) {
      out.indices_.push_back(static_cast<std::size_t>(v));
    }
  }
  return out;
}

bool IndexSet::is_subset_of(const IndexSet& other) const {
  return std::includes(other.indices_.begin(), other.indices_.end(),
                       indices_.begin(), indices_.end());
}

double upper_density(const IndexSet& a, std::size_t n) {
  if (n < 1 || n > a.horizon()) {
    throw RangeError("upper_density: n=" + std::to_string(n) +
                     " outside [1, " + std::to_string(a.horizon()) + "]");
  }
  return static_cast<double>(a.count_below(n)) / static_cast<double>(n);
}

std::string to_string(Parity p) { return p == Parity::Evens ? "evens" : "odds"; }

IdealModel IdealModel::fin(std::size_t horizon, std::size_t cutoff) {
  if (horizon == 0) throw ConfigError("ideal horizon must be positive");
  if (cutoff >= horizon) {
    throw ConfigError("Fin cutoff " + std::to_string(cutoff) +
                      " must be below the horizon " + std::to_string(horizon));
  }
  IdealModel m;
  m.kind_ = IdealKind::Fin;
  m.horizon_ = horizon;
  m.cutoff_ = cutoff;
  return m;
}

IdealModel IdealModel::density(std::size_t horizon, double threshold) {
  if (horizon == 0) throw ConfigError("ideal horizon must be positive");
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw ConfigError("density threshold must lie in (0,1)");
  }
  IdealModel m;
  m.kind_ = IdealKind::Density;
  m.horizon_ = horizon;
  m.threshold_ = threshold;
  return m;
}

IdealModel IdealModel::finite_trace(std::size_t horizon, Parity trace,
                                    std::size_t cutoff) {
  if (horizon == 0) throw ConfigError("ideal horizon must be positive");
  // The trace class must keep growing inside the horizon and exceed the cutoff,
  // otherwise every set would be small.
  const std::size_t first = trace == Parity::Evens ? 0 : 1;
  const auto count_in = [&](std::size_t n) { return n > first ? (n - first + 1) / 2 : 0; };
  if (count_in(horizon) <= cutoff || count_in(horizon) <= count_in(horizon / 2)) {
    throw ConfigError("finite-trace ideal: trace class has only " +
                      std::to_string(count_in(horizon)) +
                      " elements below the horizon, cutoff is " +
                      std::to_string(cutoff));
  }
  IdealModel m;
  m.kind_ = IdealKind::FiniteTrace;
  m.horizon_ = horizon;
  m.trace_ = trace;
  m.cutoff_ = cutoff;
  return m;
}

IdealModel IdealModel::parse(std::string_view spec, std::size_t horizon,
                             Parity auto_parity) {
  const auto colon = spec.find(':');
  const std::string_view head = spec.substr(0, colon);
  const std::string_view arg =
      colon == std::string_view::npos ? std::string_view{} : spec.substr(colon + 1);
  if (head == "fin") {
    if (!arg.empty()) throw ConfigError("ideal 'fin' takes no argument");
    return fin(horizon);
  }
  if (head == "density") {
    if (arg.empty()) return density(horizon);
    double t = 0.0;
    const auto* end = arg.data() + arg.size();
    const auto res = std::from_chars(arg.data(), end, t);
    if (res.ec != std::errc{} || res.ptr != end) {
      throw ConfigError("malformed density threshold '" + std::string(arg) + "'");
    }
    return density(horizon, t);
  }
  if (head == "finite-trace") {
    if (arg == "evens") return finite_trace(horizon, Parity::Evens);
    if (arg == "odds") return finite_trace(horizon, Parity::Odds);
    if (arg == "auto") return finite_trace(horizon, auto_parity);
    throw ConfigError("finite-trace ideal expects evens, odds or auto, got '" +
                      std::string(arg) + "'");
  }
  if (head == "maximal" || head == "ultrafilter") {
    throw ConfigError(
        "maximal ideals have no computable membership oracle and are not supported");
  }
  throw ConfigError("unknown ideal '" + std::string(spec) +
                    "' (expected fin, density:<t>, finite-trace:evens|odds|auto)");
}

bool IdealModel::in_trace(std::size_t n) const {
  return (n % 2 == 0) == (trace_ == Parity::Evens);
}

IdealModel IdealModel::with_horizon(std::size_t horizon) const {
  switch (kind_) {
    case IdealKind::Fin:
      return fin(horizon, cutoff_);
    case IdealKind::Density:
      return density(horizon, threshold_);
    case IdealKind::FiniteTrace:
      return finite_trace(horizon, trace_, cutoff_);
  }
  return *this;
}

IdealModel IdealModel::with_cutoff(std::size_t cutoff) const {
  IdealModel m = *this;
  m.cutoff_ = cutoff;
  return m;
}

bool IdealModel::is_small(const IndexSet& a, std::size_t window_start) const {
  if (a.horizon() != horizon_) {
    throw RangeError("index set horizon " + std::to_string(a.horizon()) +
                     " differs from ideal horizon " + std::to_string(horizon_));
  }
  return is_small_sorted(a.indices(), window_start);
}

bool IdealModel::is_small_sorted(std::span<const std::size_t> sorted,
                                 std::size_t window_start) const {
  if (window_start >= horizon_) throw RangeError("window start beyond horizon");
  const auto first = std::lower_bound(sorted.begin(), sorted.end(), window_start);
  switch (kind_) {
    case IdealKind::Fin:
      return first == sorted.end() || sorted.back() < cutoff_;
    case IdealKind::Density: {
      const auto count = static_cast<double>(sorted.end() - first);
      return count / static_cast<double>(horizon_ - window_start) < threshold_;
    }
    case IdealKind::FiniteTrace: {
      std::size_t hits = 0;
      for (auto it = first; it != sorted.end(); ++it) {
        if (in_trace(*it) && ++hits > cutoff_) return false;
      }
      return true;
    }
  }
  return false;
}

bool IdealModel::is_dual(const IndexSet& a) const { return is_small(a.complement()); }

std::string IdealModel::describe() const {
  switch (kind_) {
    case IdealKind::Fin:
      return "fin";
    case IdealKind::Density: {
      std::ostringstream os;
      os << "density:" << threshold_;
      return os.str();
    }
    case IdealKind::FiniteTrace:
      return "finite-trace:" + to_string(trace_);
  }
  return {};
}

namespace {

IndexSet sample_small_set(const IdealModel& ideal, std::mt19937_64& rng) {
  const std::size_t horizon = ideal.horizon();
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::size_t> picked;
  switch (ideal.kind()) {
    case IdealKind::Fin:
      for (std::size_t n = 0; n < ideal.cutoff(); ++n) {
        if (unit(rng) < 0.5) picked.push_back(n);
      }
      break;
    case IdealKind::Density: {
      // Keep the expected density well under the threshold so sampling noise
      // does not push a "small" draw over it.
      const double p = unit(rng) * ideal.threshold() / 2.0;
      for (std::size_t n = 0; n < horizon; ++n) {
        if (unit(rng) < p) picked.push_back(n);
      }
      break;
    }
    case IdealKind::FiniteTrace: {
      std::uniform_int_distribution<std::size_t> budget(0, ideal.cutoff());
      std::size_t in_trace_left = budget(rng);
      for (std::size_t n = 0; n < horizon; ++n) {
        if (ideal.in_trace(n)) {
          if (in_trace_left > 0 && unit(rng) < 0.05) {
            picked.push_back(n);
            --in_trace_left;
          }
        } else if (unit(rng) < 0.5) {
          picked.push_back(n);
        }
      }
      break;
    }
  }
  return IndexSet(std::move(picked), horizon);
}

}  // namespace

TranslationReport check_translation_invariance(const IdealModel& ideal,
                                               std::size_t samples,
                                               std::span<const long> shifts,
                                               std::uint64_t seed) {
  TranslationReport report;
  report.samples = samples;
  report.seed = seed;
  std::mt19937_64 rng(seed);

  std::vector<IndexSet> small_sets;
  small_sets.reserve(samples);
  while (small_sets.size() < samples) {
    IndexSet a = sample_small_set(ideal, rng);
    if (ideal.is_small(a)) small_sets.push_back(std::move(a));
  }

  for (long k : shifts) {
    if (k == 0 || static_cast<std::size_t>(std::labs(k)) * 2 >= ideal.horizon()) {
      throw RangeError("shift " + std::to_string(k) +
                       " must be nonzero with |k| < horizon/2");
    }
    const IdealModel judge = ideal.kind() == IdealKind::Density
                                 ? ideal
                                 : ideal.with_cutoff(ideal.cutoff() +
                                                     static_cast<std::size_t>(std::labs(k)));
    ShiftOutcome out;
    out.shift = k;
    for (const IndexSet& a : small_sets) {
      ++out.tested;
      IndexSet moved = a.shifted(k);
      if (judge.is_small(moved)) {
        ++out.stayed_small;
      } else if (!out.witness) {
        out.witness = a;
      }
    }
    out.fraction = out.tested == 0 ? 1.0
                                   : static_cast<double>(out.stayed_small) /
                                         static_cast<double>(out.tested);
    if (out.stayed_small != out.tested) report.invariant = false;
    report.shifts.push_back(std::move(out));
  }
  return report;
}

}  // namespace turnpike
