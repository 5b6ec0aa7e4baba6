#ifndef NTD_RNG_HPP
#define NTD_RNG_HPP

#include <cstdint>
#include <random>

namespace ntd::rng {

// splitmix64 avalanche; used both as a mixer and to expand seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

// Derive an independent substream seed from (seed, tag [, index]).
constexpr std::uint64_t derive(std::uint64_t seed, std::uint64_t tag) {
    return splitmix64(splitmix64(seed) ^ tag);
}

constexpr std::uint64_t derive(std::uint64_t seed, std::uint64_t tag, std::uint64_t index) {
    return splitmix64(derive(seed, tag) ^ splitmix64(index));
}

inline std::mt19937_64 engine(std::uint64_t seed) {
    return std::mt19937_64(seed);
}

// Counter-based generator: one splitmix64 avalanche per draw and a
// trivial constructor. Used where a fresh short-lived stream is keyed
// per item and an mt19937 warm-up would dominate the cost.
class SmallEngine {
public:
    using result_type = std::uint64_t;

    explicit constexpr SmallEngine(std::uint64_t seed) noexcept : state_(seed) {}

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return 0xffffffffffffffffull; }

    constexpr result_type operator()() noexcept {
        return splitmix64(state_ += 0x9e3779b97f4a7c15ull);
    }

private:
    std::uint64_t state_;
};

// Substream tags. Arbitrary distinct constants.
inline constexpr std::uint64_t kGeometry = 0x67656f6du;
inline constexpr std::uint64_t kTrainDraws = 0x747261696eu;
inline constexpr std::uint64_t kNoise = 0x6e6f697365u;
inline constexpr std::uint64_t kTestDraws = 0x74657374u;
inline constexpr std::uint64_t kModelInit = 0x696e6974u;
inline constexpr std::uint64_t kMemoryTrain = 0x6d656d74u;
inline constexpr std::uint64_t kTtaPolicies = 0x747461u;
inline constexpr std::uint64_t kReservoir = 0x72657376u;

}  // namespace ntd::rng

#endif  // NTD_RNG_HPP
