#pragma once

// Small deterministic RNG used by the stratified integrator and the symbol
// source of the split-step simulator.  std::mt19937_64 itself is portable,
// but std::uniform_real_distribution is not pinned by the standard, so we
// keep both the engine and the uniform mapping under our control: results
// must be bit-identical across compilers and across worker counts.

#include <cmath>
#include <cstdint>

namespace nli4d::detail {

// SplitMix64; used to expand a (seed, stream) pair into engine state.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

// xoshiro256** by Blackman & Vigna (public domain reference implementation).
class Xoshiro256ss {
  public:
    Xoshiro256ss(std::uint64_t seed, std::uint64_t stream) {
        // Decorrelate nearby (seed, stream) pairs through SplitMix64.
        std::uint64_t sm = seed ^ (0xA3EC4E93C5A1F3B7ull * (stream + 1));
        for (auto& word : s_) word = splitmix64(sm);
    }

    std::uint64_t next() {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    // Uniform double in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

    // Uniform double in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer in [0, n).  The tiny modulo bias (< n * 2^-64) is
    // irrelevant for symbol draws but the result is fully deterministic.
    std::uint32_t uniform_index(std::uint32_t n) {
        return static_cast<std::uint32_t>(next() % n);
    }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) {
        return (x << k) | (x >> (64 - k));
    }
    std::uint64_t s_[4];
};

// Neumaier compensated accumulator; keeps long Monte-Carlo and moment sums
// accurate independent of summation length.
class CompensatedSum {
  public:
    void add(double value) {
        double t = sum_ + value;
        if (std::abs(sum_) >= std::abs(value))
            comp_ += (sum_ - t) + value;
        else
            comp_ += (value - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

  private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

}  // namespace nli4d::detail
