#pragma once

#include <cstdint>
#include <cstddef>

namespace mtnet {

// Deterministic pseudo-random generator used everywhere in the repo.
//
// Algorithm: xoshiro256** (Blackman & Vigna), state seeded from the 64-bit
// seed through splitmix64. The raw next_u64() stream is fully specified by
// the seed and identical on every platform. Derived draws (uniform01,
// normal, below) are built only from next_u64(), integer arithmetic and
// basic libm calls, so a fixed seed reproduces the same sequence run to run.
//
// An Rng is single-owner: it is never shared across threads. Parallel work
// derives independent child generators with fork(), which mixes a stream id
// into the original seed and is insensitive to how many draws the parent
// has already made.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t seed() const { return seed_; }

    // Raw 64-bit draw; the portable base stream.
    std::uint64_t next_u64();

    // Uniform in [0, 1), 53-bit resolution.
    double uniform01();

    // Uniform in [lo, hi).
    double uniform(double lo, double hi);

    // Standard normal via the polar (Marsaglia) method; one spare is cached.
    double normal();

    // Unbiased integer in [0, n); n must be > 0. Rejection-free Lemire reduction.
    std::uint64_t below(std::uint64_t n);

    std::size_t index(std::size_t n) { return static_cast<std::size_t>(below(n)); }

    bool bernoulli(double p) { return uniform01() < p; }

    // Deterministic child generator for stream `stream`. Independent of the
    // parent's consumption so far.
    Rng fork(std::uint64_t stream) const;

private:
    std::uint64_t state_[4];
    std::uint64_t seed_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

// splitmix64 step; exposed because seed derivation elsewhere reuses it.
std::uint64_t splitmix64(std::uint64_t& state);

}  // namespace mtnet
