#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace dauction {

// xoshiro256** 1.0 (Blackman & Vigna 2018). The four state words are filled
// from a splitmix64 sequence started at the seed, so any 64-bit seed is valid.
//
// Stream splitting: Rng::stream(master, i) seeds splitmix64 with
//   master ^ (0x9E3779B97F4A7C15 * (i + 1))   (mod 2^64)
// Sample path i of an experiment uses stream i; per-agent alpha draws use
// stream kAlphaStream.
//
// uniform() returns (next() >> 11) * 2^-53. normal() is Box-Muller on two
// uniforms (the first mapped into (0,1]) and caches the second variate.
class Rng {
 public:
  using result_type = std::uint64_t;

  static constexpr std::uint64_t kAlphaStream = std::numeric_limits<std::uint64_t>::max();

  explicit Rng(std::uint64_t seed = 0);

  static Rng stream(std::uint64_t master_seed, std::uint64_t stream_index);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() { return next(); }

  std::uint64_t next();
  double uniform();
  double uniform(double lo, double hi);
  double normal();
  bool bernoulli(double p);

  bool operator==(const Rng&) const = default;

 private:
  std::array<std::uint64_t, 4> s_{};
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

std::uint64_t splitmix64(std::uint64_t& state);

}  // namespace dauction
