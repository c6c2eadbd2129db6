#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <stdexcept>

namespace qevo {

// splitmix64 step; used to spread seed material over 64 bits.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// Folds a tuple of seed components (master seed, stream tag, indices, ...)
// into one stream seed. Every random stream in the project is derived this
// way, so runs are pure functions of the master seed.
inline std::uint64_t mix_seed(std::initializer_list<std::uint64_t> parts) {
    std::uint64_t h = 0x6a09e667f3bcc909ull;
    for (std::uint64_t p : parts) h = splitmix64(h ^ p);
    return h;
}

// Stream tags, one per kind of derived stream.
enum SeedTag : std::uint64_t {
    kSeedInit = 1,    // population initialization, per individual
    kSeedEval = 2,    // episode seeds, per (generation, individual)
    kSeedChild = 3,   // evolution operators, per (generation, child)
    kSeedReplay = 4,  // replay episodes
};

// Deterministic random stream.
//
// Wraps std::mt19937_64 (bit-exact everywhere) but samples with fixed
// algorithms instead of std::*_distribution, whose output is
// implementation-defined. Identical seeds therefore give identical
// sequences regardless of standard library.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    // Uniform double in [0, 1), 53 random bits.
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + uniform() * (hi - lo); }

    // Uniform integer in {0, ..., n-1}, unbiased (rejection sampling).
    int uniform_int(int n) {
        if (n < 1) throw std::invalid_argument("uniform_int needs n >= 1");
        const auto un = static_cast<std::uint64_t>(n);
        const std::uint64_t threshold = (0 - un) % un;  // 2^64 mod n
        for (;;) {
            const std::uint64_t v = next_u64();
            if (v >= threshold) return static_cast<int>(v % un);
        }
    }

    // Standard normal via Box-Muller; the second value of each pair is
    // cached, so draws come in deterministic order.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        // 1 - u1 is in (0, 1], so the log is finite.
        const double r = std::sqrt(-2.0 * std::log(1.0 - u1));
        const double a = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace qevo
