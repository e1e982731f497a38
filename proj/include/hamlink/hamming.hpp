#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "hamlink/bits.hpp"

namespace hamlink {

// Block size descriptor for the extended Hamming (SEC-DED) code: a block of
// 2^r bits carries r parity-group bits at the power-of-two positions plus an
// overall-parity bit at position 0, leaving 2^r - r - 1 data bits.
class BlockOrder {
public:
    // Supported sizes: 16-bit (r=4) blocks for compact tests, and the
    // byte-aligned 128-bit, 32768-bit and 8388608-bit blocks used on the wire.
    static BlockOrder of(int index_bits);

    int index_bits() const { return r_; }
    std::size_t total_bits() const { return std::size_t{1} << r_; }
    std::size_t total_bytes() const { return total_bits() / 8; }
    std::size_t redundancy_bits() const { return static_cast<std::size_t>(r_) + 1; }
    std::size_t data_bits() const { return total_bits() - redundancy_bits(); }

    friend bool operator==(BlockOrder, BlockOrder) = default;

private:
    explicit BlockOrder(int r) : r_(r) {}
    int r_;
};

std::size_t data_capacity(BlockOrder order);

// Parity bits sit at position 0 and the power-of-two positions; every other
// position carries data.
constexpr bool is_parity_position(std::size_t pos) {
    return (pos & (pos - 1)) == 0;
}

// Ascending list of the data positions of an order (computed per call).
std::vector<std::uint32_t> data_positions(BlockOrder order);

struct CodeBlock {
    BlockOrder order;
    BitBuffer bits;

    static CodeBlock zero(BlockOrder order) {
        return CodeBlock{order, BitBuffer(order.total_bits())};
    }
    // Interprets `bytes` (exactly total_bytes() long) as a received block.
    static CodeBlock from_wire(BlockOrder order, std::span<const std::uint8_t> bytes);

    const std::vector<std::uint8_t>& wire() const { return bits.bytes(); }
};

enum class DecodeKind { Clean, Corrected, Uncorrectable };
const char* to_string(DecodeKind kind);

// Work metric for one syndrome pass. The scan is implemented with byte
// tables, but the count reported is the per-position index-XOR figure of the
// naive method, r * 2^r, which is the defined cost of scanning a block.
struct OpCounter {
    std::uint64_t xor_accumulations = 0;
};

struct SyndromeInfo {
    std::uint32_t syndrome = 0;  // XOR of the binary indices of all set bits
    int overall_parity = 0;      // popcount mod 2
    OpCounter counter;
};

struct DecodeOutcome {
    DecodeKind kind = DecodeKind::Clean;
    std::optional<std::uint32_t> position;  // set iff kind == Corrected
    std::uint32_t syndrome = 0;
    int overall_parity = 0;
};

struct DecodeResult {
    DecodeOutcome outcome;
    CodeBlock repaired;
    BitBuffer data;
};

// Places the data bits at the non-parity positions in ascending order, then
// toggles the parity bits so the index-XOR of set positions is zero and bit 0
// so the total popcount is even. `data` must be exactly data_capacity() long.
CodeBlock encode(const BitBuffer& data, BlockOrder order);

SyndromeInfo syndrome(const CodeBlock& block);

// Clean: syndrome 0, even parity. Corrected: odd parity, error at `syndrome`
// (position 0 when the overall-parity bit itself flipped); the repaired block
// is returned. Uncorrectable: nonzero syndrome with even parity; the block is
// returned unchanged and the extracted data must be discarded by the caller.
// Patterns of three or more errors can masquerade as Clean or as a Corrected
// block at the wrong position; callers needing end-to-end integrity must
// verify content separately (see the protocol's digest exchange).
DecodeResult decode(const CodeBlock& block);

// Bits at the non-parity positions in ascending order.
BitBuffer extract_data(const CodeBlock& block);

}  // namespace hamlink
