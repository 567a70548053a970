#pragma once

#include <cmath>
#include <cstdint>

namespace treise {

/// Counter-based pseudo random generator (splitmix64 core).
///
/// Every consumer derives its own stream with child(tag), so results do not
/// depend on the order in which independent pieces of work are executed.
/// All floating point draws are built from raw 64-bit outputs, never from
/// implementation-defined std:: distributions, so a given seed produces the
/// same sequence everywhere.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : root_(seed), state_(seed) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        return mix(state_);
    }

    /// Uniform double in [0, 1).
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n). n must be positive.
    std::uint64_t uniform_below(std::uint64_t n) {
        // Rejection sampling on the top bits keeps the draw unbiased.
        const std::uint64_t threshold = (~n + 1) % n;  // 2^64 mod n
        for (;;) {
            const std::uint64_t r = next_u64();
            if (r >= threshold) return r % n;
        }
    }

    /// Standard normal via Box-Muller; the second value of each pair is cached.
    double gaussian() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - uniform();  // (0, 1]
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        has_spare_ = true;
        return r * std::cos(a);
    }

    /// Independent substream addressed by tag. Derived from the construction
    /// seed, not the evolving state, so child(t) is stable no matter how many
    /// values were drawn from this stream.
    Rng child(std::uint64_t tag) const {
        return Rng(mix(root_ ^ mix(tag + 0x9E3779B97F4A7C15ULL)));
    }

    std::uint64_t seed() const noexcept { return root_; }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    std::uint64_t root_;
    std::uint64_t state_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace treise
