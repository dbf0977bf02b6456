#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace mkv {

// Philox4x32-10 counter-based generator (Salmon et al. constants).
// A stream is identified by (seed, stream_id); draws are a pure function of
// (seed, stream_id, counter), so independent streams can be advanced in any
// order or in parallel and still reproduce bitwise.
class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream_id)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          stream_(stream_id) {}

    std::uint32_t next_u32() {
        if (have_ == 0) refill();
        return buf_[4 - have_--];
    }

    std::uint64_t next_u64() {
        std::uint64_t lo = next_u32();
        std::uint64_t hi = next_u32();
        return (hi << 32) | lo;
    }

    // Uniform in (0,1]; strictly positive so log() is always finite.
    double uniform_pos() {
        return (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1p-53;
    }

    // Uniform in [0,1).
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1p-53;
    }

    // Standard normal via Box-Muller; consumes a fixed number of draws so
    // counter usage stays deterministic.
    double gaussian() {
        if (have_gauss_) {
            have_gauss_ = false;
            return spare_;
        }
        const double u1 = uniform_pos();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(a);
        have_gauss_ = true;
        return r * std::cos(a);
    }

    std::uint64_t stream() const { return stream_; }

private:
    static std::uint64_t mulhilo(std::uint32_t a, std::uint32_t b) {
        return static_cast<std::uint64_t>(a) * static_cast<std::uint64_t>(b);
    }

    void refill() {
        std::uint32_t c0 = static_cast<std::uint32_t>(counter_);
        std::uint32_t c1 = static_cast<std::uint32_t>(counter_ >> 32);
        std::uint32_t c2 = static_cast<std::uint32_t>(stream_);
        std::uint32_t c3 = static_cast<std::uint32_t>(stream_ >> 32);
        std::uint32_t k0 = key_[0];
        std::uint32_t k1 = key_[1];
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = mulhilo(0xD2511F53u, c0);
            const std::uint64_t p1 = mulhilo(0xCD9E8D57u, c2);
            const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
            const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
            const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
            const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
            const std::uint32_t n0 = hi1 ^ c1 ^ k0;
            const std::uint32_t n1 = lo1;
            const std::uint32_t n2 = hi0 ^ c3 ^ k1;
            const std::uint32_t n3 = lo0;
            c0 = n0;
            c1 = n1;
            c2 = n2;
            c3 = n3;
            k0 += 0x9E3779B9u;
            k1 += 0xBB67AE85u;
        }
        buf_ = {c0, c1, c2, c3};
        ++counter_;
        have_ = 4;
    }

    std::array<std::uint32_t, 2> key_;
    std::uint64_t stream_;
    std::uint64_t counter_ = 0;
    std::array<std::uint32_t, 4> buf_{};
    int have_ = 0;
    bool have_gauss_ = false;
    double spare_ = 0.0;
};

}  // namespace mkv
