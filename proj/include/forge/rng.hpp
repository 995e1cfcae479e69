#pragma once

// Counter-free deterministic random streams.
//
// Every random decision in the pipeline (mask coins, option shuffles, the
// random ranker) draws from a stream keyed by a hash of its seed material, so
// results never depend on evaluation order or thread count. Nothing here goes
// through <random> distributions, whose output is implementation-defined.

#include <cstdint>
#include <initializer_list>
#include <string_view>
#include <utility>

#include "forge/rational.hpp"

namespace forge::rng {

std::uint64_t mix64(std::uint64_t x);

/// FNV-1a over bytes, continuing from `basis`.
std::uint64_t fnv1a(std::string_view bytes, std::uint64_t basis = 0xcbf29ce484222325ULL);

/// Key for a stream identified by a seed and a sequence of labels. Labels are
/// length-prefixed, so ("ab", "c") and ("a", "bc") give different keys.
std::uint64_t derive_key(std::uint64_t seed, std::initializer_list<std::string_view> labels);

/// SplitMix64 generator.
class Stream {
 public:
  explicit Stream(std::uint64_t key) : state_(key) {}

  std::uint64_t next();

  /// Uniform integer in [0, bound), unbiased. bound must be > 0.
  std::uint64_t below(std::uint64_t bound);

  /// True with probability exactly p (0 <= p <= 1).
  bool bernoulli(const Rational& p);

  /// Fisher-Yates shuffle.
  template <typename It>
  void shuffle(It first, It last) {
    auto n = static_cast<std::uint64_t>(last - first);
    for (std::uint64_t i = n; i > 1; --i) {
      std::uint64_t j = below(i);
      using std::swap;
      swap(first[i - 1], first[j]);
    }
  }

 private:
  std::uint64_t state_;
};

inline Stream derive(std::uint64_t seed, std::initializer_list<std::string_view> labels) {
  return Stream(derive_key(seed, labels));
}

}  // namespace forge::rng
