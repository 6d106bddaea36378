#pragma once

#include <cstdint>
#include <random>

namespace dftsim::detail {

// Unbiased draw from [0, n) without std distributions, whose output differs
// between standard libraries.
inline std::uint64_t uniform_below(std::mt19937_64& eng, std::uint64_t n) {
  const std::uint64_t threshold = (0 - n) % n;
  for (;;) {
    const std::uint64_t x = eng();
    if (x >= threshold) return x % n;
  }
}

// Inclusive range.
inline std::uint64_t uniform_between(std::mt19937_64& eng, std::uint64_t lo, std::uint64_t hi) {
  return lo + uniform_below(eng, hi - lo + 1);
}

// True with probability p, resolved to 1/2^32 steps.
inline bool bernoulli(std::mt19937_64& eng, double p) {
  if (p <= 0) return false;
  if (p >= 1) return true;
  return static_cast<double>(eng() >> 32) < p * 4294967296.0;
}

}  // namespace dftsim::detail
