#pragma once

#include <array>
#include <cmath>
#include <cstdint>

#include "polestim/vec3.hpp"

namespace polestim {

/// Philox 4x32, 10 rounds (Salmon et al., "Parallel random numbers: as easy
/// as 1, 2, 3"). Counter-based: the value of any 128-bit block is a pure
/// function of (key, counter), so independent substreams are obtained by
/// partitioning the counter space instead of by sequential seeding.
struct philox4x32 {
    using ctr_t = std::array<std::uint32_t, 4>;
    using key_t = std::array<std::uint32_t, 2>;

    static constexpr std::uint32_t mul_a = 0xD2511F53u;
    static constexpr std::uint32_t mul_b = 0xCD9E8D57u;
    static constexpr std::uint32_t weyl_a = 0x9E3779B9u;
    static constexpr std::uint32_t weyl_b = 0xBB67AE85u;

    static constexpr ctr_t round_once(const ctr_t& c, const key_t& k) {
        const std::uint64_t p0 = static_cast<std::uint64_t>(mul_a) * c[0];
        const std::uint64_t p1 = static_cast<std::uint64_t>(mul_b) * c[2];
        const auto hi0 = static_cast<std::uint32_t>(p0 >> 32), lo0 = static_cast<std::uint32_t>(p0);
        const auto hi1 = static_cast<std::uint32_t>(p1 >> 32), lo1 = static_cast<std::uint32_t>(p1);
        return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    }

    static constexpr ctr_t generate(ctr_t c, key_t k) {
        for (int r = 0; r < 9; ++r) {
            c = round_once(c, k);
            k[0] += weyl_a;
            k[1] += weyl_b;
        }
        return round_once(c, k);
    }
};

/// Deterministic substream keyed by (seed, stream). Typical use gives every
/// Monte Carlo trial its own stream id, which makes results independent of
/// how trials are scheduled across threads.
class rng_stream {
  public:
    rng_stream(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {}

    std::uint32_t next_u32() {
        if (lane_ == 4) {
            const philox4x32::key_t key{static_cast<std::uint32_t>(seed_),
                                        static_cast<std::uint32_t>(seed_ >> 32)};
            const philox4x32::ctr_t ctr{static_cast<std::uint32_t>(block_),
                                        static_cast<std::uint32_t>(block_ >> 32),
                                        static_cast<std::uint32_t>(stream_),
                                        static_cast<std::uint32_t>(stream_ >> 32)};
            buffer_ = philox4x32::generate(ctr, key);
            ++block_;
            lane_ = 0;
        }
        return buffer_[lane_++];
    }

    std::uint64_t next_u64() {
        const std::uint64_t hi = next_u32();
        return (hi << 32) | next_u32();
    }

    /// Uniform in [0, 1), 53-bit resolution.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Standard normal via Box-Muller; the paired value is cached.
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = 1.0 - uniform();  // (0, 1], keeps the log finite
        const double u2 = uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * pi * u2;
        spare_ = radius * std::sin(angle);
        have_spare_ = true;
        return radius * std::cos(angle);
    }

    /// Zero-mean normal with standard deviation sigma, rejected and redrawn
    /// whenever |x| exceeds cutoff*sigma. sigma = 0 returns exactly 0.
    double truncated_normal(double sigma, double cutoff = 3.0) {
        if (sigma == 0.0) return 0.0;
        double x = sigma * normal();
        while (std::abs(x) > cutoff * sigma) x = sigma * normal();
        return x;
    }

    /// Uniform direction on the unit sphere.
    vec3 unit_sphere() {
        const double z = 1.0 - 2.0 * uniform();
        const double phi = 2.0 * pi * uniform();
        const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
        return {s * std::cos(phi), s * std::sin(phi), z};
    }

  private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t block_ = 0;
    philox4x32::ctr_t buffer_{};
    int lane_ = 4;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace polestim
