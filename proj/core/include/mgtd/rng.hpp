#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace mgtd {

// Portable deterministic PRNG (xoshiro256**, seeded through splitmix64).
//
// Every randomized operation in this codebase draws from this generator in a
// documented order, so identical (seed, input) pairs give identical results on
// any platform. std::shuffle / std::uniform_int_distribution are avoided on
// purpose: their outputs differ between standard library implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) {
        // splitmix64 expansion of the seed into the xoshiro state
        std::uint64_t x = seed;
        for (auto& word : state_) {
            x += 0x9E3779B97F4A7C15ULL;
            std::uint64_t z = x;
            z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
            z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
            word = z ^ (z >> 31);
        }
    }

    std::uint64_t next_u64() {
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

    // Uniform integer in [0, n); n must be > 0. Rejection sampling, no modulo bias.
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t threshold = (0 - n) % n;
        for (;;) {
            const std::uint64_t r = next_u64();
            if (r >= threshold) return r % n;
        }
    }

    // Uniform double in [0, 1) with 53 random bits.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    // In-place Fisher-Yates; iterates from the back, one below() draw per step.
    template <typename T>
    void shuffle(std::vector<T>& values) {
        for (std::size_t i = values.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(values[i - 1], values[j]);
        }
    }

private:
    static std::uint64_t rotl(std::uint64_t v, int k) {
        return (v << k) | (v >> (64 - k));
    }

    std::uint64_t state_[4]{};
};

// FNV-1a over arbitrary bytes; used to derive per-stratum and per-sample seeds.
inline std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t h = 0xCBF29CE484222325ULL) {
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    return h;
}

// Seed for a keyed sub-stream: the global seed mixed with a string key.
// Layout is fixed (8 little-endian seed bytes, then the key) so results are
// reproducible across implementations.
inline std::uint64_t derive_seed(std::uint64_t global_seed, std::string_view key) {
    char bytes[8];
    for (int i = 0; i < 8; ++i) bytes[i] = static_cast<char>((global_seed >> (8 * i)) & 0xFF);
    return fnv1a64(key, fnv1a64(std::string_view(bytes, 8)));
}

}  // namespace mgtd
