#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

namespace lsc::numerics {

/**
 * Philox4x32-10 counter-based generator (Salmon et al., SC'11).
 *
 * A stream is identified by a 64-bit key and a 64-bit stream id; draws walk the
 * remaining 64 bits of the counter. Distinct (key, stream) pairs give
 * statistically independent sequences, so per-path streams need no state sharing.
 */
class Philox4x32 {
public:
    using result_type = std::uint64_t;

    Philox4x32(std::uint64_t key, std::uint64_t stream) noexcept
        : key_{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)},
          stream_(stream) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

    result_type operator()() noexcept {
        if (lane_ >= 2) {
            block_ = generate(position_++);
            lane_ = 0;
        }
        const auto lo = static_cast<std::uint64_t>(block_[2 * lane_]);
        const auto hi = static_cast<std::uint64_t>(block_[2 * lane_ + 1]);
        ++lane_;
        return (hi << 32) | lo;
    }

    /// Uniform on the open interval (0, 1) with 53 random bits.
    double uniform() noexcept {
        return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
    }

    double exponential(double rate) noexcept { return -std::log(uniform()) / rate; }

    /// Standard normal by Box–Muller; the second variate of each pair is cached.
    double normal() noexcept {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

private:
    std::array<std::uint32_t, 4> generate(std::uint64_t position) const noexcept {
        constexpr std::uint32_t kMul0 = 0xD2511F53u;
        constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
        constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
        constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
        std::array<std::uint32_t, 4> ctr{static_cast<std::uint32_t>(position),
                                         static_cast<std::uint32_t>(position >> 32),
                                         static_cast<std::uint32_t>(stream_),
                                         static_cast<std::uint32_t>(stream_ >> 32)};
        std::array<std::uint32_t, 2> key = key_;
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = static_cast<std::uint64_t>(kMul0) * ctr[0];
            const std::uint64_t p1 = static_cast<std::uint64_t>(kMul1) * ctr[2];
            ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
                   static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
            key[0] += kWeyl0;
            key[1] += kWeyl1;
        }
        return ctr;
    }

    std::array<std::uint32_t, 2> key_;
    std::uint64_t stream_;
    std::uint64_t position_ = 0;
    std::array<std::uint32_t, 4> block_{};
    int lane_ = 2;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace lsc::numerics
