#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace kmapf {

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seed for a named sub-stream of a simulation seed; stable across platforms.
inline uint64_t derive_stream_seed(uint64_t seed, std::string_view stream) {
  uint64_t h = 1469598103934665603ULL;  // FNV-1a
  for (char c : stream) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  return splitmix64(seed ^ h);
}

// Deterministic draws on top of std::mt19937_64. The std distribution
// classes are implementation-defined, so all shaping is done here.
class Rng {
 public:
  explicit Rng(uint64_t seed) : eng_(seed) {}
  Rng(uint64_t seed, std::string_view stream) : eng_(derive_stream_seed(seed, stream)) {}

  uint64_t next_u64() { return eng_(); }

  // Uniform over [0, n); n >= 1.
  int uniform_int(int n) {
    return static_cast<int>(next_u64() % static_cast<uint64_t>(n));
  }

  bool coin() { return (next_u64() & 1ULL) != 0; }

  double uniform01() {  // [0, 1)
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  // Knuth's product method; fine for the small per-step rates used here.
  int poisson(double mean) {
    if (mean <= 0.0) return 0;
    double limit = std::exp(-mean);
    double product = 1.0;
    int count = -1;
    do {
      ++count;
      product *= uniform01();
    } while (product > limit);
    return count;
  }

 private:
  std::mt19937_64 eng_;
};

}  // namespace kmapf
