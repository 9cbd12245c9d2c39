#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string_view>

#include "pptp/bytes.hpp"

namespace pptp {

// Randomness source. Either OS entropy or a deterministic stream expanded
// from a 32-byte seed, so every randomized component in the system can be
// replayed from a configured seed.
class Rng {
public:
    static Rng system();
    static Rng deterministic(std::span<const uint8_t> seed);
    static Rng deterministic(uint64_t seed);

    void fill(std::span<uint8_t> out);
    uint64_t next_u64();
    // Unbiased uniform draw from [0, bound); bound must be > 0.
    uint64_t below(uint64_t bound);
    // Uniform draw from the inclusive range [lo, hi].
    uint64_t between(uint64_t lo, uint64_t hi);

    // Independent substream labeled by (label, index); deterministic forks
    // of deterministic rngs, fresh entropy otherwise.
    Rng fork(std::string_view label, uint64_t index = 0) const;

    bool is_deterministic() const { return deterministic_; }

private:
    Rng() = default;
    void refill();

    bool deterministic_ = false;
    std::array<uint8_t, 32> key_{};
    uint64_t block_ = 0;
    std::array<uint8_t, 64> buf_{};
    size_t avail_ = 0;
};

}  // namespace pptp
