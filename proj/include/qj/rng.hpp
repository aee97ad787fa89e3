#pragma once

#include <cstdint>
#include <cmath>

namespace qj {

// splitmix64; used both as a seed mixer and as the backing generator so
// that every stream is a pure function of its seed.
inline uint64_t splitmix64_next(uint64_t& state) {
    uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Derive an independent stream seed from a root seed and up to three indices.
inline uint64_t derive_seed(uint64_t root, uint64_t a, uint64_t b = 0, uint64_t c = 0) {
    uint64_t s = root;
    uint64_t h = splitmix64_next(s);
    s = h ^ (a * 0xd1342543de82ef95ULL);
    h = splitmix64_next(s);
    s = h ^ (b * 0xaf251af3b0f025b5ULL);
    h = splitmix64_next(s);
    s = h ^ (c * 0x9e3779b97f4a7c15ULL);
    return splitmix64_next(s);
}

// Small deterministic RNG with explicitly specified distributions, so that
// sampled values do not depend on the C++ standard library implementation.
class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    uint64_t next_u64() { return splitmix64_next(state_); }

    // Uniform in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Standard normal via Box-Muller (pairs cached).
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform();
        double u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

private:
    uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace qj
