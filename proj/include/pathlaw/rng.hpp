#pragma once

#include <cmath>
#include <cstdint>

namespace pathlaw {

/// (master, stream) fully determines a generator's output bit-for-bit.
/// Streams index substreams (worker lanes, replication slots) under one
/// master seed.
struct Seed {
  std::uint64_t master = 42;
  std::uint64_t stream = 0;
};

/// Counter-based generator: draw k is mix(key + k * golden), a pure
/// function of (seed, counter), so reproducibility survives reordering
/// of consumers and streams can be handed out independently.
class CounterRng {
 public:
  explicit CounterRng(Seed s) : key_(derive(s)) {}

  std::uint64_t next_bits() { return mix(key_ + (++counter_) * kGolden); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(next_bits() >> 11) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller; the paired draw is cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform01();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * 3.141592653589793238462643383279 * uniform01();
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

 private:
  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
  }

  static std::uint64_t derive(Seed s) {
    return mix(mix(s.master + kGolden) ^ (s.stream + 0xD1B54A32D192ED03ULL));
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace pathlaw
