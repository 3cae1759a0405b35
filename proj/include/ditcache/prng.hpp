#ifndef DITCACHE_PRNG_HPP_
#define DITCACHE_PRNG_HPP_

#include <cmath>
#include <cstdint>
#include <numbers>

namespace ditcache {

// SplitMix64 evaluated in counter mode: output i of a stream is a pure
// function of (seed, i), so any position can be replayed without generating
// the ones before it. Matches the canonical sequential splitmix64 generator
// seeded with `seed`.
inline std::uint64_t splitmix64_at(std::uint64_t seed, std::uint64_t counter) {
    std::uint64_t z = seed + (counter + 1) * 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Top 53 bits as a double in [0, 1).
inline double unit_from_bits(std::uint64_t bits) {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

class CounterRng {
public:
    explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

    std::uint64_t next_u64() { return splitmix64_at(seed_, counter_++); }

    double next_unit() { return unit_from_bits(next_u64()); }

    double next_uniform(double lo, double hi) {
        return lo + (hi - lo) * next_unit();
    }

    // Box-Muller on two uniform draws; the sine half is cached so the
    // stream consumes exactly one u64 per uniform, two per gaussian pair.
    double next_gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = next_unit();
        const double u2 = next_unit();
        const double radius = std::sqrt(-2.0 * std::log(1.0 - u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        spare_ = radius * std::sin(angle);
        have_spare_ = true;
        return radius * std::cos(angle);
    }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t counter() const { return counter_; }

private:
    std::uint64_t seed_;
    std::uint64_t counter_ = 0;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace ditcache

#endif  // DITCACHE_PRNG_HPP_
