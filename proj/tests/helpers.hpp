#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "hamlink/bits.hpp"
#include "hamlink/hamming.hpp"

namespace testutil {

inline hamlink::BitBuffer random_bits(std::size_t n, std::mt19937_64& rng) {
    hamlink::BitBuffer bits(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (rng() & 1) {
            bits.set(i, true);
        }
    }
    return bits;
}

inline std::vector<std::uint8_t> random_bytes(std::size_t n, std::mt19937_64& rng) {
    std::vector<std::uint8_t> out(n);
    for (auto& b : out) {
        b = static_cast<std::uint8_t>(rng());
    }
    return out;
}

// Independent syndrome oracle: the literal per-position scan, per bit, with
// no byte tricks. Checks the production scan against first principles.
struct NaiveSyndrome {
    std::uint32_t syndrome = 0;
    int overall_parity = 0;
    std::uint64_t xor_accumulations = 0;
};

inline NaiveSyndrome naive_syndrome(const hamlink::CodeBlock& block) {
    NaiveSyndrome result;
    const int r = block.order.index_bits();
    for (std::uint32_t pos = 0; pos < block.order.total_bits(); ++pos) {
        if (block.bits.get(pos)) {
            result.syndrome ^= pos;
            result.overall_parity ^= 1;
        }
        result.xor_accumulations += static_cast<std::uint64_t>(r);
    }
    return result;
}

inline hamlink::CodeBlock random_codeword(hamlink::BlockOrder order, std::mt19937_64& rng) {
    return hamlink::encode(random_bits(order.data_bits(), rng), order);
}

}  // namespace testutil
