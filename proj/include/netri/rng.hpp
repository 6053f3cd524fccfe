#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace netri {

// All randomness in the library flows through this header. Draw streams are
// derived from (seed, stream, index) so that any unit of work (a draw, a
// replication) can be seeded independently of scheduling order; results are
// then identical for any worker count. Distribution functions are hand-rolled
// on top of std::mt19937_64 (whose output sequence is pinned by the standard)
// so sequences do not depend on the standard library implementation.

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Named sub-streams of a master seed.
enum class SeedStream : std::uint64_t {
  kNetwork = 1,
  kAssignment = 2,
  kOutcome = 3,
  kSelector = 4,
  kDraw = 5,
  kReplication = 6,
  kTieBreak = 7,
  kStudyCell = 8,
};

inline std::uint64_t subseed(std::uint64_t seed, SeedStream stream,
                             std::uint64_t index = 0) {
  std::uint64_t h = splitmix64(seed ^ (0xA24BAED4963EE407ULL *
                                       static_cast<std::uint64_t>(stream)));
  return splitmix64(h + 0x9552BFDF8B8E49A3ULL * (index + 1));
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  std::uint64_t next() { return engine_(); }

  // Uniform integer in [0, bound), bound > 0. Masked rejection keeps the
  // draw unbiased and implementation-independent.
  std::uint64_t below(std::uint64_t bound) {
    std::uint64_t mask = ~std::uint64_t{0};
    std::uint64_t b = bound - 1;
    mask >>= 63 - bit_width_minus_one(b | 1);
    for (;;) {
      std::uint64_t v = engine_() & mask;
      if (v < bound) return v;
    }
  }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform01() < p; }

  // Standard normal via the Marsaglia polar method.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform01() - 1.0;
      v = 2.0 * uniform01() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    have_spare_ = true;
    return u * f;
  }

  // Fisher-Yates; moves k uniformly chosen elements to the front of v.
  template <typename T>
  void choose_prefix(std::vector<T>& v, std::size_t k) {
    const std::size_t n = v.size();
    for (std::size_t i = 0; i < k && i + 1 < n; ++i) {
      std::size_t j = i + static_cast<std::size_t>(below(n - i));
      std::swap(v[i], v[j]);
    }
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    if (!v.empty()) choose_prefix(v, v.size() - 1);
  }

 private:
  static int bit_width_minus_one(std::uint64_t x) {
    int w = 0;
    while (x >>= 1) ++w;
    return w;
  }

  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace netri
