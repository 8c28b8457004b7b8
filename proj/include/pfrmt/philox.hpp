#pragma once

// Philox4x64-10 counter-based generator (constants from the Random123 suite).
// Every sample index owns its own stream: the counter block is
// (sample_index, draw_block, 0, 0) with key (seed, 0), so parallel Monte Carlo
// draws are reproducible for a given (seed, samples) regardless of the thread
// schedule.

#include <array>
#include <cmath>
#include <cstdint>

namespace pfrmt {

class Philox4x64 {
  public:
    using Block = std::array<std::uint64_t, 4>;
    using Key = std::array<std::uint64_t, 2>;

    static Block generate(Block ctr, Key key) {
        for (int round = 0; round < 10; ++round) {
            ctr = single_round(ctr, key);
            key[0] += 0x9E3779B97F4A7C15ull;
            key[1] += 0xBB67AE8584CAA73Bull;
        }
        return ctr;
    }

  private:
    static void mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t& hi, std::uint64_t& lo) {
        unsigned __int128 p = static_cast<unsigned __int128>(a) * b;
        hi = static_cast<std::uint64_t>(p >> 64);
        lo = static_cast<std::uint64_t>(p);
    }

    static Block single_round(const Block& c, const Key& k) {
        std::uint64_t hi0, lo0, hi1, lo1;
        mulhilo(0xD2E7470EE14C6C93ull, c[0], hi0, lo0);
        mulhilo(0xCA5A826395121157ull, c[2], hi1, lo1);
        return {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    }
};

// Deterministic per-sample stream of uniforms and normals.
class SampleRng {
  public:
    SampleRng(std::uint64_t seed, std::uint64_t sample_index)
        : key_{seed, 0x7066726d74ull /* stream tag */}, sample_(sample_index) {}

    double uniform01() {  // in (0, 1)
        if (lane_ == 4) refill();
        std::uint64_t bits = block_[lane_++];
        return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
    }

    double normal() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        double u1 = uniform01();
        double u2 = uniform01();
        double r = std::sqrt(-2.0 * std::log(u1));
        double a = 6.283185307179586476925286766559 * u2;
        cached_ = r * std::sin(a);
        have_cached_ = true;
        return r * std::cos(a);
    }

  private:
    void refill() {
        block_ = Philox4x64::generate({sample_, draw_block_++, 0, 0}, key_);
        lane_ = 0;
    }

    Philox4x64::Key key_;
    std::uint64_t sample_;
    std::uint64_t draw_block_ = 0;
    Philox4x64::Block block_{};
    int lane_ = 4;
    double cached_ = 0.0;
    bool have_cached_ = false;
};

} // namespace pfrmt
