#pragma once

// xoshiro256** (Blackman & Vigna) with splitmix64 seeding.
//
// Seeding scheme: the four state words are the first four splitmix64 outputs
// for the 64-bit seed. Independent streams for parallel sample blocks are taken
// from the same seed by applying the generator's 2^128-step jump once per block
// index, so block b starts exactly b * 2^128 draws into the base sequence.

#include <array>
#include <cstdint>

namespace welfare {

class Xoshiro256ss {
public:
    explicit Xoshiro256ss(std::uint64_t seed) noexcept {
        std::uint64_t x = seed;
        for (auto& word : state_) word = splitmix64(x);
    }

    /// Stream for sample block `block` under `seed`.
    static Xoshiro256ss stream(std::uint64_t seed, std::uint64_t block) noexcept {
        Xoshiro256ss rng(seed);
        for (std::uint64_t i = 0; i < block; ++i) rng.jump();
        return rng;
    }

    std::uint64_t next() noexcept {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    /// Uniform on the open interval (0, 1): 53 random bits, offset by half a step.
    double uniform_open() noexcept {
        return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53;
    }

    void jump() noexcept {
        static constexpr std::uint64_t kJump[] = {0x180ec6d33cfd0aba, 0xd5a61266f0c9392c,
                                                  0xa9582618e03fc9aa, 0x39abdc4529b1661c};
        std::array<std::uint64_t, 4> s{};
        for (std::uint64_t word : kJump) {
            for (int b = 0; b < 64; ++b) {
                if (word & (std::uint64_t{1} << b)) {
                    for (int i = 0; i < 4; ++i) s[i] ^= state_[i];
                }
                next();
            }
        }
        state_ = s;
    }

    bool operator==(const Xoshiro256ss&) const = default;

private:
    static std::uint64_t rotl(std::uint64_t x, int k) noexcept {
        return (x << k) | (x >> (64 - k));
    }

    static std::uint64_t splitmix64(std::uint64_t& x) noexcept {
        std::uint64_t z = (x += 0x9e3779b97f4a7c15);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9;
        z = (z ^ (z >> 27)) * 0x94d049bb133111eb;
        return z ^ (z >> 31);
    }

    std::array<std::uint64_t, 4> state_{};
};

}  // namespace welfare
