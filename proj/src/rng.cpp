#include "qwalk/rng.hpp"

#include <cmath>

#include "qwalk/error.hpp"

namespace qwalk {

std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t domain,
                          std::uint64_t index) noexcept {
  return splitmix64(splitmix64(splitmix64(master) ^ domain) + index);
}

BernoulliThreshold::BernoulliThreshold(double p) : p_(p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw ConfigError("probability must lie in [0, 1], got " + std::to_string(p));
  }
  if (p == 1.0) {
    always_ = true;
  } else {
    // p * 2^64 < 2^64 here, so the conversion is exact enough and in range.
    threshold_ = static_cast<std::uint64_t>(std::ldexp(p, 64));
  }
}

}  // namespace qwalk
