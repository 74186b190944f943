#pragma once

#include <cmath>
#include <cstdint>

namespace funcint {

/// Counter-based random stream.
///
/// Every (seed, counter) pair opens an independent splitmix64 sequence, so
/// the draws belonging to sample i never depend on which worker produced
/// them or on how many samples ran before.  This is what makes Monte Carlo
/// results bit-stable across worker counts.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t counter) noexcept
        : state_(mix(seed + 0x9e3779b97f4a7c15ull) ^ mix(counter + 0xbf58476d1ce4e5b9ull)) {}

    std::uint64_t next_u64() noexcept {
        state_ += 0x9e3779b97f4a7c15ull;
        return mix(state_);
    }

    /// Uniform double in the open interval (0, 1).
    double next_unit() noexcept {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Uniform double in [lo, hi).
    double next_uniform(double lo, double hi) noexcept {
        return lo + (hi - lo) * static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Standard normal via Box-Muller; pairs are cached.
    double next_normal() noexcept {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = next_unit();
        const double u2 = next_unit();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

private:
    static std::uint64_t mix(std::uint64_t z) noexcept {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    std::uint64_t state_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace funcint
