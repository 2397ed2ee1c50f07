#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace turnpike {

/// Sorted set of distinct indices in [0, horizon).
class IndexSet {
 public:
  explicit IndexSet(std::size_t horizon) : horizon_(horizon) {}
  /// Throws RangeError unless `indices` is strictly increasing and below `horizon`.
  IndexSet(std::vector<std::size_t> indices, std::size_t horizon);

  static IndexSet from_predicate(std::size_t horizon,
                                 const std::function<bool(std::size_t)>& pred);

  std::span<const std::size_t> indices() const { return indices_; }
  std::size_t size() const { return indices_.size(); }
  bool empty() const { return indices_.empty(); }
  std::size_t horizon() const { return horizon_; }
  bool contains(std::size_t n) const;

  /// Number of elements strictly below n.
  std::size_t count_below(std::size_t n) const;

  IndexSet complement() const;
  IndexSet united(const IndexSet& other) const;
  /// (A + k) intersected with [0, horizon).
  IndexSet shifted(long k) const;
  bool is_subset_of(const IndexSet& other) const;

  friend bool operator==(const IndexSet&, const IndexSet&) = default;

 private:
  std::vector<std::size_t> indices_;
  std::size_t horizon_ = 0;
};

/// |{a in A : a < n}| / n.  Requires 1 <= n <= horizon.
double upper_density(const IndexSet& a, std::size_t n);

enum class IdealKind { Fin, Density, FiniteTrace };

/// Index class S of a FiniteTrace ideal: a set is small when it meets S in
/// at most `cutoff` points.
enum class Parity { Evens, Odds };

std::string to_string(Parity p);

/// Finite-horizon model of an ideal on the nonnegative integers.
///
/// Every classification is computed on [0, horizon) with the thresholds
/// stored here, so a verdict can always be reproduced from `describe()`.
class IdealModel {
 public:
  static constexpr std::size_t kDefaultCutoff = 64;
  static constexpr double kDefaultDensityThreshold = 0.01;

  static IdealModel fin(std::size_t horizon, std::size_t cutoff = kDefaultCutoff);
  static IdealModel density(std::size_t horizon,
                            double threshold = kDefaultDensityThreshold);
  static IdealModel finite_trace(std::size_t horizon, Parity trace,
                                 std::size_t cutoff = kDefaultCutoff);

  /// Parses `fin`, `density[:<t>]`, `finite-trace:{evens,odds,auto}`.
  /// `auto` resolves to `auto_parity`. Maximal/ultrafilter ideals are
  /// rejected with a ConfigError.
  static IdealModel parse(std::string_view spec, std::size_t horizon,
                          Parity auto_parity = Parity::Evens);

  IdealKind kind() const { return kind_; }
  std::size_t horizon() const { return horizon_; }
  double threshold() const { return threshold_; }
  std::size_t cutoff() const { return cutoff_; }
  Parity trace() const { return trace_; }
  bool in_trace(std::size_t n) const;

  /// Same ideal, different horizon. Cutoffs are kept.
  IdealModel with_horizon(std::size_t horizon) const;
  /// Same ideal with another cofinite cutoff (Fin and FiniteTrace only).
  IdealModel with_cutoff(std::size_t cutoff) const;

  /// Smallness of A restricted to [window_start, horizon). For the density
  /// kind the density denominator is horizon - window_start.
  bool is_small(const IndexSet& a, std::size_t window_start = 0) const;
  bool is_positive(const IndexSet& a, std::size_t window_start = 0) const {
    return !is_small(a, window_start);
  }
  /// A is in the dual filter: its complement in [0, horizon) is small.
  bool is_dual(const IndexSet& a) const;

  /// Same as is_small, for a strictly increasing index list that is
  /// already known to lie inside the horizon.
  bool is_small_sorted(std::span<const std::size_t> sorted,
                       std::size_t window_start = 0) const;

  /// Canonical spec string, e.g. "density:0.01" or "finite-trace:evens".
  std::string describe() const;

 private:
  IdealModel() = default;

  IdealKind kind_ = IdealKind::Fin;
  std::size_t horizon_ = 0;
  double threshold_ = kDefaultDensityThreshold;
  std::size_t cutoff_ = kDefaultCutoff;
  Parity trace_ = Parity::Evens;
};

struct ShiftOutcome {
  long shift = 0;
  std::size_t tested = 0;
  std::size_t stayed_small = 0;
  double fraction = 1.0;
  /// A sampled small set whose shift is not small, if any.
  std::optional<IndexSet> witness;
};

struct TranslationReport {
  bool invariant = true;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  std::vector<ShiftOutcome> shifts;
};

/// Samples small sets, shifts them and reports how many stay small.
/// For the cutoff-based kinds the shifted set is judged with the cutoff
/// widened by |k|, since shifting a set bounded by c gives one bounded by
/// c + |k|.
TranslationReport check_translation_invariance(const IdealModel& ideal,
                                               std::size_t samples,
                                               std::span<const long> shifts,
                                               std::uint64_t seed);

}  // namespace turnpike
