#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <limits>

namespace uag {

// Philox4x32-10 counter-based generator. The key is the seed, the upper half
// of the counter is a stream id and the lower half counts blocks, so every
// (seed, stream) pair is an independent reproducible sequence.
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

    // Stream for a path of ids, e.g. (n, replicate).
    static Rng for_path(std::uint64_t seed, std::initializer_list<std::uint64_t> path);

    std::uint32_t next_u32();
    std::uint64_t next_u64();

    // Uniform integer in [0, bound). bound must be positive.
    std::uint64_t below(std::uint64_t bound);
    // Uniform integer in [lo, hi].
    std::uint64_t between(std::uint64_t lo, std::uint64_t hi);
    // Uniform double in [0, 1).
    double uniform();

    result_type operator()() { return next_u64(); }
    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }

private:
    void refill();

    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t block_ = 0;
    std::array<std::uint32_t, 4> buf_{};
    int pos_ = 4;
};

std::uint64_t mix64(std::uint64_t x);

} // namespace uag
