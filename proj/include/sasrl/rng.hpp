#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace sasrl {

// splitmix64 step; used to derive independent child seeds from a run seed.
inline uint64_t mix_seed(uint64_t a, uint64_t b) {
    uint64_t z = a + 0x9e3779b97f4a7c15ULL * (b + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Seeded random source. Draws are generated from raw mt19937_64 bits so the
// stream is identical across standard library implementations.
class Rng {
public:
    explicit Rng(uint64_t seed) : gen_(seed) {}

    uint64_t next() { return gen_(); }

    // uniform in [0, 1)
    double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }

    double normal(double mu = 0.0, double sigma = 1.0) {
        // Box-Muller, always two draws, no cached spare.
        double u1 = unit();
        double u2 = unit();
        if (u1 <= 0.0) u1 = 0x1.0p-53;
        double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
        return mu + sigma * z;
    }

    // uniform integer in [0, n), rejection sampled
    uint64_t index(uint64_t n) {
        uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        uint64_t x;
        do {
            x = next();
        } while (x >= limit);
        return x % n;
    }

    Rng child(uint64_t tag) { return Rng(mix_seed(next(), tag)); }

private:
    std::mt19937_64 gen_;
};

}  // namespace sasrl
