#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "turnpike/ideal.hpp"

namespace support {

// Seeded generators for the hand-rolled property tests.
struct Rng {
  explicit Rng(std::uint64_t seed) : gen(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen); }
  std::size_t index(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(gen); }
  bool coin(double p) { return std::bernoulli_distribution(p)(gen); }
  std::mt19937_64 gen;
};

// Random subset of [0, horizon) with each index kept with probability p.
inline turnpike::IndexSet random_set(Rng& rng, std::size_t horizon, double p) {
  std::vector<std::size_t> out;
  for (std::size_t n = 0; n < horizon; ++n) {
    if (rng.coin(p)) out.push_back(n);
  }
  return turnpike::IndexSet(std::move(out), horizon);
}

inline constexpr std::uint64_t kPropertyCases = 50;

}  // namespace support
