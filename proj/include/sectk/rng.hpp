#pragma once

#include <cstdint>

namespace sectk {

// Counter-based generator: output i of stream `seed` is the splitmix64
// finalizer applied to seed + i * golden-gamma. Output sequences depend only
// on (seed, counter), so results are stable across platforms and runs.
class Rng {
  public:
    explicit Rng(uint64_t seed, uint64_t counter = 0) : seed_(seed), counter_(counter) {}

    static uint64_t mix(uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    uint64_t next_u64() { return mix(seed_ + (++counter_) * 0x9E3779B97F4A7C15ULL); }

    // Uniform in [0, 1).
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // Uniform in [0, n). Modulo bias is negligible for the n used here.
    uint64_t next_below(uint64_t n) { return next_u64() % n; }

    // Uniform integer in [lo, hi] inclusive.
    int64_t next_int(int64_t lo, int64_t hi) {
        return lo + static_cast<int64_t>(next_below(static_cast<uint64_t>(hi - lo + 1)));
    }

    bool bernoulli(double p) { return next_double() < p; }

    // Independent substream for (seed, index) pairs, e.g. per-example seeds.
    static Rng substream(uint64_t seed, uint64_t index) {
        return Rng(mix(seed ^ mix(index + 0x9E3779B97F4A7C15ULL)));
    }

    uint64_t seed() const { return seed_; }
    uint64_t counter() const { return counter_; }

  private:
    uint64_t seed_;
    uint64_t counter_;
};

}  // namespace sectk
