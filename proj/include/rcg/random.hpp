#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace rcg {

/// Derives an independent seed for a named consumer (e.g. "split", "noise")
/// from one root seed. Stable across platforms.
std::uint64_t substream_seed(std::uint64_t root, std::string_view name);

inline std::mt19937_64 make_rng(std::uint64_t root, std::string_view name) {
    return std::mt19937_64(substream_seed(root, name));
}

}  // namespace rcg
