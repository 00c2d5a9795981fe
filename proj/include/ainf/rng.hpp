#pragma once

#include "ainf/rational.hpp"

#include <cstdint>
#include <vector>

namespace ainf {

/* splitmix64; fixed across platforms so seeded runs are reproducible. */
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next()
    {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    /* uniform in [0, n) */
    std::uint64_t below(std::uint64_t n) { return n ? next() % n : 0; }

    int range(int lo, int hi) /* inclusive */
    {
        return lo + static_cast<int>(below(static_cast<std::uint64_t>(hi - lo + 1)));
    }

    bool chance(int num, int den) { return below(static_cast<std::uint64_t>(den)) < static_cast<std::uint64_t>(num); }

    /* small nonzero rational from a fixed grid */
    Rational small_rational()
    {
        static const int nums[] = {1, -1, 2, -2, 3, -3, 1, -1};
        static const int dens[] = {1, 1, 1, 1, 1, 1, 2, 2};
        int i = range(0, 7);
        return Rational(nums[i], dens[i]);
    }

private:
    std::uint64_t state_;
};

} // namespace ainf
