#pragma once

#include <cstdint>
#include <random>

namespace cashml {

// Deterministic RNG wrapper. All draws go through our own mapping from raw
// 64-bit output so results are bit-identical across platforms and standard
// library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    // Uniform double in [0, 1).
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [lo, hi] inclusive.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        const std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
        return lo + static_cast<std::int64_t>(engine_() % span);
    }

    bool bernoulli(double p) { return uniform() < p; }

    // Standard normal via Box-Muller (polar form avoided to keep draw count fixed).
    double normal() {
        double u1 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * 3.14159265358979323846 * u2);
    }

    std::uint64_t next_u64() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

// splitmix64 finalizer; used to derive independent child seeds from a master
// seed plus structural indices so parallel execution order cannot matter.
inline std::uint64_t hash_seed(std::uint64_t a) {
    a += 0x9e3779b97f4a7c15ULL;
    a = (a ^ (a >> 30)) * 0xbf58476d1ce4e5b9ULL;
    a = (a ^ (a >> 27)) * 0x94d049bb133111ebULL;
    return a ^ (a >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a,
                                 std::uint64_t b = 0, std::uint64_t c = 0) {
    std::uint64_t h = hash_seed(master);
    h = hash_seed(h ^ a);
    h = hash_seed(h ^ b);
    h = hash_seed(h ^ c);
    return h;
}

}  // namespace cashml
