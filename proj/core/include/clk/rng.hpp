#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace clk {

/// Named substream so independent samplers never share a raw seed.
inline std::uint64_t substream_seed(std::uint64_t seed, std::string_view purpose) {
    std::uint64_t h = 1469598103934665603ull ^ seed;
    for (char c : purpose) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ull;
    }
    return h;
}

inline std::mt19937_64 make_rng(std::uint64_t seed, std::string_view purpose) {
    return std::mt19937_64(substream_seed(seed, purpose));
}

}  // namespace clk
