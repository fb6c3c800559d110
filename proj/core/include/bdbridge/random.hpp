#pragma once

// Counter-based random streams.
//
// Philox4x32-10 (Salmon et al., "Parallel random numbers: as easy as 1, 2, 3",
// SC'11). The 64-bit seed is the key; the counter is split into a 64-bit
// stream id (upper words) and a 64-bit block index (lower words), so every
// (seed, stream_id) pair addresses an independent, reproducible sequence and
// splitting a stream is just choosing another id.

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>

namespace bdbridge {

namespace detail {
__extension__ typedef __int128 int128;
__extension__ typedef unsigned __int128 uint128;
}  // namespace detail

class Philox4x32 {
  public:
    using result_type = std::uint64_t;
    using Block = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    Philox4x32(std::uint64_t seed, std::uint64_t stream_id) noexcept
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          stream_id_(stream_id) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept {
        if (index_ == 2) {
            refill();
        }
        const std::uint64_t lo = buffer_[2 * index_];
        const std::uint64_t hi = buffer_[2 * index_ + 1];
        ++index_;
        return lo | (hi << 32);
    }

    // Skip ahead by whole 128-bit blocks.
    void discard_blocks(std::uint64_t n) noexcept {
        block_ += n;
        index_ = 2;
    }

    std::uint64_t stream_id() const noexcept { return stream_id_; }

    // Raw ten-round bijection, exposed for known-answer tests.
    static Block bijection(Block ctr, Key key) noexcept {
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                key[0] += kWeyl0;
                key[1] += kWeyl1;
            }
            const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
            const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
            const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
            const auto lo0 = static_cast<std::uint32_t>(p0);
            const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
            const auto lo1 = static_cast<std::uint32_t>(p1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        }
        return ctr;
    }

  private:
    static constexpr std::uint32_t kMul0 = 0xD2511F53u;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

    void refill() noexcept {
        const Block ctr{static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
                        static_cast<std::uint32_t>(stream_id_),
                        static_cast<std::uint32_t>(stream_id_ >> 32)};
        buffer_ = bijection(ctr, key_);
        ++block_;
        index_ = 0;
    }

    Key key_;
    std::uint64_t stream_id_;
    std::uint64_t block_ = 0;
    Block buffer_{};
    int index_ = 2;
};

// Identifies one independent random stream.
struct RngStream {
    std::uint64_t seed = 0;
    std::uint64_t stream_id = 0;

    Philox4x32 engine() const noexcept { return Philox4x32(seed, stream_id); }

    // Child stream for nested parallel work; distinct (parent, child) pairs map
    // to distinct ids.
    RngStream child(std::uint64_t index) const noexcept {
        std::uint64_t z = stream_id * 0x9E3779B97F4A7C15ull + index + 0x632BE59BD9B4E019ull;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return {seed, z ^ (z >> 31)};
    }
};

// Uniform double in the open interval (0, 1).
template <class Engine>
inline double uniform_open01(Engine& rng) noexcept {
    return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

// Uniform integer in [0, n), n > 0. Lemire's multiply-and-reject.
template <class Engine>
inline std::uint64_t uniform_index(Engine& rng, std::uint64_t n) noexcept {
    std::uint64_t x = rng();
    detail::uint128 m = static_cast<detail::uint128>(x) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
        const std::uint64_t floor = (0 - n) % n;
        while (low < floor) {
            x = rng();
            m = static_cast<detail::uint128>(x) * n;
            low = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::uint64_t>(m >> 64);
}

template <class Engine>
inline double exponential(Engine& rng, double rate) noexcept {
    return -std::log(uniform_open01(rng)) / rate;
}

}  // namespace bdbridge
