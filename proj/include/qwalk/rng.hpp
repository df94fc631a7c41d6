#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace qwalk {

/// Name and version of the random number pipeline. Written to every run
/// manifest: identical seeds give identical numbers only for the same value.
inline constexpr std::string_view kRngAlgorithm =
    "mt19937_64/splitmix64-derivation/threshold-bernoulli v1";

/// One round of the SplitMix64 finalizer.
std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Counter-mode derivation of an independent stream seed from a master seed,
/// a stream domain and an index (trial number, config number, ...).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t domain,
                          std::uint64_t index) noexcept;

/// Stream domains used by the library. Kept stable across releases.
namespace stream {
inline constexpr std::uint64_t kLattice = 0x4c41545449434521ULL;
inline constexpr std::uint64_t kMask = 0x4d41534b53545245ULL;
inline constexpr std::uint64_t kSweep = 0x5357454550434647ULL;
inline constexpr std::uint64_t kClassical = 0x434c415353494341ULL;
}  // namespace stream

/// A seeded 64-bit generator. Only raw 64-bit outputs are consumed so that
/// results do not depend on the standard library's distribution classes.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t next() { return engine_(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Fair coin: the top bit of one draw.
  bool fair_bit() { return (next() >> 63) != 0; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

/// Bernoulli(p) trial that consumes exactly one 64-bit draw per call:
/// true iff draw < floor(p * 2^64). p == 1 is special-cased to always true.
class BernoulliThreshold {
 public:
  explicit BernoulliThreshold(double p);

  bool operator()(RandomStream& rng) const {
    const std::uint64_t u = rng.next();
    return always_ || u < threshold_;
  }

  double probability() const noexcept { return p_; }

 private:
  double p_;
  std::uint64_t threshold_ = 0;
  bool always_ = false;
};

}  // namespace qwalk
