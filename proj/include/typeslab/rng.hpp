#pragma once

#include <cstdint>

namespace typeslab {

// splitmix64 finalizer: a bijective mixer with good avalanche behaviour.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Counter-based generator: draw t of stream `seed` is mix64(seed', t) with a
// per-seed tweak, so any partition of the counter range across workers reads
// exactly the same values. No state advances; lookups are pure.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed) : key_(mix64(seed ^ 0x5851f42d4c957f2dULL)) {}

    std::uint64_t bits(std::uint64_t counter) const { return mix64(key_ + counter); }

    // Uniform double in [0, 1) with 53 random bits.
    double uniform(std::uint64_t counter) const {
        return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
    }

private:
    std::uint64_t key_;
};

}  // namespace typeslab
