#pragma once

#include <cstdint>
#include <span>

namespace hamlink {

// FNV-1a, 64-bit variant (offset basis 0xcbf29ce484222325, prime
// 0x100000001b3). Non-cryptographic; used for the content digest exchanged in
// HASH_CHECK frames.
inline std::uint64_t fnv1a64(std::span<const std::uint8_t> bytes) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (std::uint8_t b : bytes) {
        h ^= b;
        h *= 0x100000001b3ull;
    }
    return h;
}

}  // namespace hamlink
