#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace aoi {

/// Seedable, splittable generator: a 64-bit Mersenne Twister whose state is
/// expanded from (seed, stream) by std::seed_seq. Children created with
/// split() draw from independent streams of the same seed.
class Rng {
public:
    static constexpr std::string_view algorithm = "mt19937_64/seed_seq(seed,stream)";

    explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) : seed_(seed), stream_(stream) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
        engine_.seed(seq);
    }

    Rng split(std::uint64_t stream) const { return Rng(seed_, stream_ * 0x9E3779B97F4A7C15ULL + stream + 1); }

    /// Uniform double in [0, 1) built from the top 53 bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    std::uint64_t next() { return engine_(); }

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::mt19937_64 engine_;
};

}  // namespace aoi
