#pragma once

#include <cstdint>
#include <cmath>
#include <string_view>

namespace f0lab {

// SplitMix64 generator (Steele, Lea, Flood 2014). Small state, full 64-bit
// output, identical sequences on every platform. All randomness in the
// project flows through this type so that a (config, master_seed) pair pins
// every produced byte.
class SplitMix64 {
 public:
  explicit SplitMix64(uint64_t seed) : state_(seed) {}

  uint64_t next() {
    state_ += 0x9e3779b97f4a7c15ULL;
    uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Index in [0, n).
  uint64_t below(uint64_t n) { return n ? next() % n : 0; }

  // Standard normal via Box-Muller. The second value of each pair is cached.
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 1.0 - uniform01();  // (0, 1], keeps log finite
    double u2 = uniform01();
    double radius = std::sqrt(-2.0 * std::log(u1));
    double angle = 6.283185307179586476925286766559005768 * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  uint64_t state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

// Derives an independent stream seed from a master seed and a path-like tag,
// e.g. derive_seed(master, "utt/0012/noise/snr_-5"). FNV-1a folds the tag
// into the state; one SplitMix64 step decorrelates neighbouring tags.
inline uint64_t derive_seed(uint64_t master_seed, std::string_view tag) {
  uint64_t h = 0xcbf29ce484222325ULL;  // FNV offset basis
  for (unsigned char c : tag) {
    h ^= c;
    h *= 0x100000001b3ULL;  // FNV prime
  }
  SplitMix64 mix(master_seed ^ h);
  return mix.next();
}

}  // namespace f0lab
