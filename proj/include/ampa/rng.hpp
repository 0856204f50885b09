#pragma once

#include <cmath>
#include <cstdint>

namespace ampa {

// splitmix64 finalizer, also used to fan seeds out into independent streams
inline uint64_t mix64(uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// trial seed = hash(master_seed, index); any single trial is re-runnable in
// isolation by quoting the derived value
inline uint64_t derive_seed(uint64_t base, uint64_t stream, uint64_t index = 0) {
  return mix64(mix64(base ^ (0xD1B54A32D192ED03ULL * (stream + 1))) + index);
}

struct SplitMix64 {
  uint64_t s;
  explicit SplitMix64(uint64_t seed) : s(seed) {}
  uint64_t next() {
    s += 0x9E3779B97F4A7C15ULL;
    uint64_t z = s;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }
  // (0, 1]: the +1 keeps log() finite in Box-Muller
  double uniform_pos() { return double((next() >> 11) + 1) * 0x1.0p-53; }
  double uniform() { return double(next() >> 11) * 0x1.0p-53; }
};

// Box-Muller over splitmix64; independent of std::normal_distribution so the
// byte-identical-output contract does not hinge on libstdc++ internals
struct GaussianGen {
  SplitMix64 rng;
  double spare = 0.0;
  bool has_spare = false;
  explicit GaussianGen(uint64_t seed) : rng(seed) {}
  double next() {
    if (has_spare) {
      has_spare = false;
      return spare;
    }
    double u1 = rng.uniform_pos();
    double u2 = rng.uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 6.283185307179586476925286766559 * u2;
    spare = r * std::sin(a);
    has_spare = true;
    return r * std::cos(a);
  }
};

} // namespace ampa
