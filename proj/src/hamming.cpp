#include "hamlink/hamming.hpp"

#include <array>
#include <stdexcept>
#include <string>

namespace hamlink {

namespace {

// Per-byte-value scan tables. With the MSB-first convention, the bit stored
// at significance k of a byte has block index (byte*8) | (7-k), so a byte's
// contribution to the index-XOR splits into a whole-byte part (byte*8, taken
// when the byte has odd popcount) and the XOR of the low three index bits.
struct ByteTables {
    std::array<std::uint8_t, 256> low3xor{};
    std::array<std::uint8_t, 256> odd{};
};

ByteTables make_tables() {
    ByteTables t;
    for (int v = 0; v < 256; ++v) {
        std::uint8_t x = 0;
        int ones = 0;
        for (int k = 0; k < 8; ++k) {
            if ((v >> k) & 1) {
                x ^= static_cast<std::uint8_t>(7 - k);
                ++ones;
            }
        }
        t.low3xor[v] = x;
        t.odd[v] = static_cast<std::uint8_t>(ones & 1);
    }
    return t;
}

const ByteTables& tables() {
    static const ByteTables t = make_tables();
    return t;
}

// Index-XOR and parity of all set bits. Works for any bit count that is a
// multiple of 8; the r=4 block (16 bits) is two bytes, so this covers all
// supported orders.
std::pair<std::uint32_t, int> scan(const std::vector<std::uint8_t>& bytes) {
    const ByteTables& t = tables();
    std::uint32_t acc = 0;
    std::uint32_t par = 0;
    for (std::size_t i = 0; i < bytes.size(); ++i) {
        std::uint8_t v = bytes[i];
        if (t.odd[v]) {
            acc ^= static_cast<std::uint32_t>(i << 3);
            par ^= 1;
        }
        acc ^= t.low3xor[v];
    }
    return {acc, static_cast<int>(par)};
}

}  // namespace

BlockOrder BlockOrder::of(int index_bits) {
    if (index_bits != 4 && index_bits != 7 && index_bits != 15 && index_bits != 23) {
        throw std::invalid_argument("BlockOrder: unsupported order r=" + std::to_string(index_bits));
    }
    return BlockOrder(index_bits);
}

std::size_t data_capacity(BlockOrder order) {
    return order.data_bits();
}

std::vector<std::uint32_t> data_positions(BlockOrder order) {
    std::vector<std::uint32_t> out;
    out.reserve(order.data_bits());
    for (std::uint32_t pos = 3; pos < order.total_bits(); ++pos) {
        if (!is_parity_position(pos)) {
            out.push_back(pos);
        }
    }
    return out;
}

CodeBlock CodeBlock::from_wire(BlockOrder order, std::span<const std::uint8_t> bytes) {
    if (bytes.size() != order.total_bytes()) {
        throw std::invalid_argument("CodeBlock: wire size mismatch");
    }
    return CodeBlock{order, BitBuffer::from_bytes(bytes)};
}

const char* to_string(DecodeKind kind) {
    switch (kind) {
        case DecodeKind::Clean: return "clean";
        case DecodeKind::Corrected: return "corrected";
        case DecodeKind::Uncorrectable: return "uncorrectable";
    }
    return "unknown";
}

CodeBlock encode(const BitBuffer& data, BlockOrder order) {
    if (data.size() != order.data_bits()) {
        throw std::invalid_argument("encode: data length " + std::to_string(data.size()) +
                                    " != capacity " + std::to_string(order.data_bits()));
    }
    CodeBlock block = CodeBlock::zero(order);
    std::size_t di = 0;
    for (std::size_t pos = 3; pos < order.total_bits(); ++pos) {
        if (is_parity_position(pos)) {
            continue;
        }
        if (data.get(di++)) {
            block.bits.set(pos, true);
        }
    }
    // Each parity position 2^i is the only member of its own group, so
    // setting it toggles exactly bit i of the syndrome.
    auto [s, par] = scan(block.bits.bytes());
    (void)par;
    for (int i = 0; i < order.index_bits(); ++i) {
        if ((s >> i) & 1) {
            block.bits.set(std::size_t{1} << i, true);
        }
    }
    if (block.bits.popcount() % 2 != 0) {
        block.bits.set(0, true);
    }
    return block;
}

SyndromeInfo syndrome(const CodeBlock& block) {
    auto [s, par] = scan(block.bits.bytes());
    SyndromeInfo info;
    info.syndrome = s;
    info.overall_parity = par;
    info.counter.xor_accumulations =
        static_cast<std::uint64_t>(block.order.index_bits()) * block.order.total_bits();
    return info;
}

DecodeResult decode(const CodeBlock& block) {
    SyndromeInfo info = syndrome(block);
    DecodeResult result{DecodeOutcome{}, block, BitBuffer{}};
    result.outcome.syndrome = info.syndrome;
    result.outcome.overall_parity = info.overall_parity;
    if (info.overall_parity != 0) {
        result.outcome.kind = DecodeKind::Corrected;
        result.outcome.position = info.syndrome;
        result.repaired.bits.flip(info.syndrome);
    } else if (info.syndrome != 0) {
        result.outcome.kind = DecodeKind::Uncorrectable;
    } else {
        result.outcome.kind = DecodeKind::Clean;
    }
    result.data = extract_data(result.repaired);
    return result;
}

BitBuffer extract_data(const CodeBlock& block) {
    BitBuffer data(block.order.data_bits());
    std::size_t di = 0;
    for (std::size_t pos = 3; pos < block.order.total_bits(); ++pos) {
        if (is_parity_position(pos)) {
            continue;
        }
        if (block.bits.get(pos)) {
            data.set(di, true);
        }
        ++di;
    }
    return data;
}

}  // namespace hamlink
