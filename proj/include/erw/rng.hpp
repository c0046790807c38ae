#pragma once
// Counter-based random streams (philox4x32-10).
//
// A campaign with master seed sigma runs replicate r on stream (sigma, r);
// streams are independent and stateless to construct, so results are
// bitwise reproducible under any worker count.

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>

namespace erw {

class Philox {
public:
    using result_type = std::uint64_t;

    Philox(std::uint64_t seed, std::uint64_t stream) noexcept
        : key_{static_cast<std::uint32_t>(seed),
               static_cast<std::uint32_t>(seed >> 32)},
          ctr_{0u, 0u,
               static_cast<std::uint32_t>(stream),
               static_cast<std::uint32_t>(stream >> 32)} {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept {
        return std::numeric_limits<result_type>::max();
    }

    result_type operator()() noexcept {
        if (avail_ == 0) fill_block();
        --avail_;
        return block_[avail_];
    }

    // Uniform double in [0, 1), 53 random bits.
    double uniform01() noexcept {
        return static_cast<double>(operator()() >> 11) * 0x1.0p-53;
    }

    // Uniform integer in [0, bound); bound >= 1. Multiply-shift map; the
    // bias is O(bound / 2^64) and irrelevant at our sample sizes.
    std::uint64_t uniform_below(std::uint64_t bound) noexcept {
        using u128 = unsigned __int128;
        return static_cast<std::uint64_t>(
            (static_cast<u128>(operator()()) * bound) >> 64);
    }

    // Standard normal via Marsaglia's polar method; the spare value is
    // cached within the stream.
    double normal() noexcept {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double v1, v2, s;
        do {
            v1 = 2.0 * uniform01() - 1.0;
            v2 = 2.0 * uniform01() - 1.0;
            s = v1 * v1 + v2 * v2;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v2 * f;
        has_spare_ = true;
        return v1 * f;
    }

    // One raw philox4x32-10 block for the given counter/key; exposed for
    // the known-answer tests.
    static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 4> ctr,
                                              std::array<std::uint32_t, 2> key) noexcept {
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                key[0] += 0x9E3779B9u;
                key[1] += 0xBB67AE85u;
            }
            const std::uint64_t p0 = 0xD2511F53ull * ctr[0];
            const std::uint64_t p1 = 0xCD9E8D57ull * ctr[2];
            const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
            const auto lo0 = static_cast<std::uint32_t>(p0);
            const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
            const auto lo1 = static_cast<std::uint32_t>(p1);
            ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        }
        return ctr;
    }

private:
    void fill_block() noexcept {
        const auto out = block(ctr_, key_);
        block_[1] = (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
        block_[0] = (static_cast<std::uint64_t>(out[3]) << 32) | out[2];
        avail_ = 2;
        if (++ctr_[0] == 0) ++ctr_[1];
    }

    std::array<std::uint32_t, 2> key_;
    std::array<std::uint32_t, 4> ctr_;
    std::array<std::uint64_t, 2> block_{};
    int avail_ = 0;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace erw
