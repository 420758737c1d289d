#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace evlnoise {

/// Purpose tag mixed into substream derivation, so that the orbit, the noise
/// and the target point of one realization never share a generator.
enum class StreamRole : std::uint64_t {
  kOrbit = 1,
  kNoise = 2,
  kTarget = 3,
  kMeasure = 4,
  kTest = 5,
};

/// A seeded uniform generator.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// standard. The conversion to doubles is done here rather than through
/// std::uniform_real_distribution, whose algorithm is implementation defined,
/// so streams are bit-identical across standard libraries.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  std::uint64_t next_u64() { return engine_(); }

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

/// Hashes (base_seed, key words...) to a 64-bit seed with BLAKE2b. Distinct
/// keys give statistically unrelated seeds; nearby integers do not produce
/// nearby streams.
std::uint64_t derive_seed(std::uint64_t base_seed,
                          std::initializer_list<std::uint64_t> key);

/// Maps (role, realization, cell) to an independent substream of one base
/// seed. Stateless, so it can be shared freely between worker threads.
class RandomStreamPolicy {
 public:
  explicit RandomStreamPolicy(std::uint64_t base_seed) : base_seed_(base_seed) {}

  std::uint64_t base_seed() const { return base_seed_; }

  std::uint64_t seed_for(StreamRole role, std::uint64_t realization,
                         std::uint64_t cell = 0) const {
    return derive_seed(base_seed_,
                       {static_cast<std::uint64_t>(role), realization, cell});
  }

  RandomStream stream(StreamRole role, std::uint64_t realization,
                      std::uint64_t cell = 0) const {
    return RandomStream(seed_for(role, realization, cell));
  }

 private:
  std::uint64_t base_seed_;
};

}  // namespace evlnoise
