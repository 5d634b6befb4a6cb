#pragma once

#include <array>
#include <cstdint>

#include "nsvh/math.hpp"

namespace nsvh {

// Deterministic uniform/normal generator (xoshiro256++ with splitmix64 state
// expansion). Parallel simulations split streams by the documented rule
//   stream_seed = seed XOR stream_index,
// so identical (seed, index) pairs reproduce bit-identical draws regardless
// of thread count. Normals come from the polished inverse CDF, one uniform
// per normal, which keeps the per-draw accounting exact.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        std::uint64_t x = seed;
        for (auto& si : state_) {
            x += 0x9E3779B97F4A7C15ull;
            std::uint64_t z = x;
            z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
            z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
            si = z ^ (z >> 31);
        }
    }

    static Rng stream(std::uint64_t seed, std::uint64_t stream_index) {
        return Rng(seed ^ stream_index);
    }

    std::uint64_t next_u64() {
        const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform on the open interval (0, 1).
    double next_uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53 + 0x1.0p-54;
    }

    double next_normal() { return norm_quantile(next_uniform()); }

private:
    static std::uint64_t rotl(std::uint64_t v, int k) { return (v << k) | (v >> (64 - k)); }
    std::array<std::uint64_t, 4> state_;
};

}  // namespace nsvh
