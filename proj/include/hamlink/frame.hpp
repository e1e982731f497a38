#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "hamlink/hamming.hpp"

namespace hamlink {

// Wire layout: 7-byte preamble (0x55) + SFD (0xD5), then one 128-bit coded
// block per header and, for DATA, a 32768-bit coded payload block. Parity
// bits sit inside each block at the power-of-two bit positions, so the
// "Hamming code" bytes of the layout tables are interleaved, not contiguous.
inline constexpr std::size_t kPreambleBytes = 7;
inline constexpr std::uint8_t kPreambleByte = 0x55;
inline constexpr std::uint8_t kSfd = 0xD5;

inline constexpr std::size_t kHeaderBlockBytes = 16;    // order-7 block
inline constexpr std::size_t kPayloadBlockBytes = 4096; // order-15 block
inline constexpr std::size_t kContentBytes = 4094;

inline constexpr std::size_t kDataFrameBytes = 8 + 16 + 16 + 4096;  // 4136
inline constexpr std::size_t kControlFrameBytes = 8 + 16;           // 24
inline constexpr std::size_t kHashCheckFrameBytes = 8 + 16 + 16;    // 40

// Baseline comparison point: a conventional 1500-byte IP fragment framed with
// preamble, 14-byte layer-2 header and 4-byte FCS.
inline constexpr std::size_t kBaselineFrameBytes = 1526;
inline constexpr std::size_t kBaselineContentBytes = 1480;

enum class FrameKind : std::uint8_t {
    Data = 0x01,
    Ack = 0x02,
    Nak = 0x03,
    HashCheck = 0x04,
    HashOk = 0x05,
    HashFail = 0x06,
    Eof = 0x07,
};

const char* to_string(FrameKind kind);
bool is_known_ether_type(std::uint8_t ether_type);
std::size_t wire_length(FrameKind kind);

struct MacAddr {
    std::array<std::uint8_t, 6> octets{};
    friend bool operator==(const MacAddr&, const MacAddr&) = default;
};

struct Ipv4Addr {
    std::array<std::uint8_t, 4> octets{};
    friend bool operator==(const Ipv4Addr&, const Ipv4Addr&) = default;
};

// Logical fields of the 128-bit layer-2 block, in wire order. ether_type is
// the one-byte protocol number; it doubles as the frame kind. `preserved`
// carries the referenced packet id in control frames and is 0 otherwise.
struct L2Header {
    MacAddr dst;
    MacAddr src;
    std::uint8_t ether_type = 0;
    std::uint16_t preserved = 0;
    friend bool operator==(const L2Header&, const L2Header&) = default;
};

// Logical fields of the 128-bit payload-header block, in wire order. err_pos
// is 0 when no payload bit was corrected in transit, otherwise the corrected
// payload-block bit position + 1.
struct L3Header {
    Ipv4Addr src_ip;
    Ipv4Addr dst_ip;
    std::uint16_t id = 0;
    std::uint8_t flags = 0;      // 3 bits; bit 0 = more chunks follow
    std::uint16_t offset = 0;    // 13 bits; index of this 4094-byte chunk
    std::uint8_t ttl = 0;
    std::uint16_t err_pos = 0;
    friend bool operator==(const L3Header&, const L3Header&) = default;
};

inline constexpr std::uint8_t kFlagMoreChunks = 0x1;
inline constexpr std::uint16_t kMaxChunkOffset = (1u << 13) - 1;
inline constexpr std::uint16_t kMaxErrPos = 32768;

// Body of a HASH_CHECK frame: referenced packet id + 64-bit content digest,
// padded with five zero bytes to fill the 120 data bits of an order-7 block.
struct HashCheckBody {
    std::uint16_t id = 0;
    std::uint64_t digest = 0;
    friend bool operator==(const HashCheckBody&, const HashCheckBody&) = default;
};

struct Frame {
    L2Header l2;
    std::optional<L3Header> l3;         // DATA only
    std::vector<std::uint8_t> content;  // DATA only, exactly 4094 bytes
    std::optional<HashCheckBody> hash;  // HASH_CHECK only

    FrameKind kind() const { return static_cast<FrameKind>(l2.ether_type); }

    static Frame data(L2Header l2, L3Header l3, std::vector<std::uint8_t> content);
    static Frame control(FrameKind kind, MacAddr dst, MacAddr src, std::uint16_t ref_id);
    static Frame hash_check(MacAddr dst, MacAddr src, std::uint16_t id, std::uint64_t digest);
};

enum class FrameErrorKind {
    BadPreamble,      // preamble/SFD bytes wrong
    UnknownProtocol,  // ether_type not in the registry after layer-2 decode
    Truncated,        // wire length does not match the kind
};

class FrameError : public std::runtime_error {
public:
    FrameError(FrameErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}
    FrameErrorKind kind() const { return kind_; }

private:
    FrameErrorKind kind_;
};

// Serializes the frame, encoding each block. Throws std::invalid_argument on
// kind-inconsistent fields (missing/extra l3, wrong content size, field
// overflow) and never emits a frame whose blocks are not valid codewords.
std::vector<std::uint8_t> build_frame(const Frame& frame);

struct ParsedFrame {
    Frame frame;
    // Per-block outcomes in wire order: layer-2 block, then for DATA the
    // payload header and payload blocks, for HASH_CHECK the body block.
    std::vector<DecodeOutcome> outcomes;

    bool any_uncorrectable() const;
    bool all_clean() const;
};

// Decodes every block, transparently repairing single-bit errors; the
// returned fields come from the repaired blocks. Blocks that decode
// Uncorrectable are reported in `outcomes` and their fields are extracted
// as-is (callers must treat them as garbage). Throws FrameError on structural
// problems only.
ParsedFrame parse_frame(std::span<const std::uint8_t> wire);

// Content bytes divided by wire bytes (0 for frames with no payload).
double payload_proportion(FrameKind kind);
double baseline_payload_proportion();

}  // namespace hamlink
