#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hamlink/channel.hpp"
#include "hamlink/digest.hpp"
#include "hamlink/frame.hpp"

namespace hamlink {

// ---------------------------------------------------------------------------
// Transfer chunking
//
// A transfer is split into 4094-byte chunks sent one per DATA frame. Every
// chunk except the last carries raw payload; the last chunk starts with a
// 4-byte big-endian count of the payload's total length, followed by the
// remaining payload bytes and zero padding. The more-chunks flag is clear
// only on the last chunk.
// ---------------------------------------------------------------------------

std::vector<std::vector<std::uint8_t>> make_chunks(std::span<const std::uint8_t> payload);

// Inverse of make_chunks; throws std::invalid_argument on inconsistent input
// (missing chunks, length prefix out of range).
std::vector<std::uint8_t> reassemble_chunks(const std::vector<std::vector<std::uint8_t>>& chunks);

// Zero-fill bytes in the final chunk of a payload of this length.
std::uint64_t wasted_padding_bytes(std::uint64_t payload_bytes);

// Digest of one chunk's 4094 content bytes (FNV-1a 64). Throws on wrong size.
std::uint64_t content_digest(std::span<const std::uint8_t> content);

// ---------------------------------------------------------------------------
// Trace events (one JSONL line each when written by the harness)
// ---------------------------------------------------------------------------

struct TraceEvent {
    std::uint64_t tick = 0;
    std::string node;     // "sender", "relay1", ..., "receiver", "link0", ...
    std::string event;    // send/recv/forward/correct/drop/nak/deliver/lost/...
    std::string kind;     // frame kind, when applicable
    int id = -1;          // packet id, when applicable
    std::string detail;
};

using TraceFn = std::function<void(const TraceEvent&)>;

// ---------------------------------------------------------------------------
// Relay: verify, correct, forward
// ---------------------------------------------------------------------------

struct RelayStats {
    std::uint64_t forwarded = 0;
    std::uint64_t payload_corrections = 0;
    std::uint64_t header_corrections = 0;
    std::uint64_t naks_sent = 0;
    std::uint64_t dropped_uncorrectable = 0;
    std::uint64_t dropped_malformed = 0;
    std::uint64_t dropped_ttl = 0;
};

class RelayMachine {
public:
    // Frames can cross a relay in both directions; MACs are rewritten to
    // (self -> neighbor on the outbound side).
    RelayMachine(MacAddr self, MacAddr toward_sender, MacAddr toward_receiver)
        : self_(self), toward_sender_(toward_sender), toward_receiver_(toward_receiver) {}

    struct Action {
        enum class Kind { Forward, DropNak, DropSilent } kind = Kind::DropSilent;
        std::optional<Frame> forward;  // repaired, readdressed frame to re-encode
        std::optional<Frame> nak;      // set when kind == DropNak
        std::optional<std::uint32_t> payload_correction;  // corrected payload bit
        bool header_correction = false;
    };

    // `toward_receiver` tells which port the frame arrived from.
    Action process(std::span<const std::uint8_t> wire, bool toward_receiver);

    const RelayStats& stats() const { return stats_; }

private:
    MacAddr self_;
    MacAddr toward_sender_;
    MacAddr toward_receiver_;
    RelayStats stats_;
};

// ---------------------------------------------------------------------------
// Sender: stop-and-wait with digest answering
// ---------------------------------------------------------------------------

struct SenderEvent {
    enum class Type { Tick, Ack, Nak, HashCheck };
    Type type = Type::Tick;
    std::uint64_t tick = 0;          // Tick only
    std::uint16_t id = 0;            // Ack/Nak/HashCheck
    std::uint64_t digest = 0;        // HashCheck only

    static SenderEvent make_tick(std::uint64_t t) { return {Type::Tick, t, 0, 0}; }
    static SenderEvent make_ack(std::uint16_t id) { return {Type::Ack, 0, id, 0}; }
    static SenderEvent make_nak(std::uint16_t id) { return {Type::Nak, 0, id, 0}; }
    static SenderEvent make_hash_check(std::uint16_t id, std::uint64_t digest) {
        return {Type::HashCheck, 0, id, digest};
    }
};

struct SenderStats {
    std::uint64_t data_frames_sent = 0;
    std::uint64_t retransmissions = 0;   // DATA frames beyond each chunk's first copy
    std::uint64_t timeouts = 0;
    std::uint64_t naks_received = 0;
    std::uint64_t hash_ok_sent = 0;
    std::uint64_t hash_fail_sent = 0;
    std::uint64_t ignored_events = 0;    // events referencing ids not in flight
};

struct SenderConfig {
    MacAddr self_mac;
    MacAddr next_mac;
    Ipv4Addr src_ip;
    Ipv4Addr dst_ip;
    std::uint8_t initial_ttl = 64;
    std::uint64_t timeout_ticks = 16;
    int max_retries = 16;
};

class SenderMachine {
public:
    SenderMachine(std::span<const std::uint8_t> payload, SenderConfig cfg);

    // Feed one event; returns the frames to put on the wire. The first
    // frame of the transfer is emitted on the first Tick.
    std::vector<Frame> on_event(const SenderEvent& event);

    bool finished() const { return phase_ == Phase::Done; }
    bool aborted() const { return phase_ == Phase::Aborted; }
    std::size_t chunk_count() const { return chunks_.size(); }
    std::optional<std::uint16_t> inflight_id() const;
    const SenderStats& stats() const { return stats_; }

private:
    enum class Phase { Idle, AwaitDataAck, AwaitEofAck, Done, Aborted };

    Frame current_data_frame() const;
    Frame eof_frame() const;
    std::vector<Frame> send_current(bool is_retransmission);
    std::vector<Frame> advance();

    SenderConfig cfg_;
    std::vector<std::vector<std::uint8_t>> chunks_;
    std::size_t next_chunk_ = 0;
    Phase phase_ = Phase::Idle;
    std::uint16_t current_id_ = 0;
    std::uint64_t current_digest_ = 0;
    int retries_ = 0;
    std::uint64_t now_ = 0;
    std::uint64_t last_send_tick_ = 0;
    SenderStats stats_;
};

// ---------------------------------------------------------------------------
// Receiver: ack / digest-check / nak
// ---------------------------------------------------------------------------

struct ReceiverStats {
    std::uint64_t acks_sent = 0;
    std::uint64_t naks_sent = 0;
    std::uint64_t hash_checks_sent = 0;
    std::uint64_t payload_corrections = 0;
    std::uint64_t header_corrections = 0;
    std::uint64_t duplicates = 0;
    std::uint64_t dropped_uncorrectable = 0;
    std::uint64_t ignored_frames = 0;
};

struct ReceiverConfig {
    MacAddr self_mac;
    MacAddr prev_mac;
    // When set, a corrected header block (not just payload) also routes the
    // chunk through the digest exchange.
    bool hash_check_on_header_correction = false;
};

class ReceiverMachine {
public:
    explicit ReceiverMachine(ReceiverConfig cfg) : cfg_(cfg) {}

    struct Action {
        enum class Kind { Ack, HashCheck, DropNak, DropSilent, None } kind = Kind::None;
        std::vector<Frame> frames;
    };

    Action on_frame(const ParsedFrame& parsed);

    // True once EOF has been seen and the chunk set reassembles consistently.
    bool transfer_complete() const { return complete_; }
    const std::vector<std::uint8_t>& delivered() const { return delivered_; }
    const ReceiverStats& stats() const { return stats_; }

private:
    Action handle_data(const ParsedFrame& parsed);
    void deliver_chunk(std::uint16_t id, std::uint16_t offset, bool more,
                       std::vector<std::uint8_t> content);
    void try_finalize();

    ReceiverConfig cfg_;
    std::map<std::uint16_t, std::vector<std::uint8_t>> chunks_by_offset_;
    std::optional<std::uint16_t> final_offset_;
    std::map<std::uint16_t, std::uint16_t> offset_by_id_;  // delivered ids
    struct Held {
        std::uint16_t offset;
        bool more;
        std::vector<std::uint8_t> content;
    };
    std::map<std::uint16_t, Held> held_;  // id -> chunk awaiting digest verdict
    bool eof_seen_ = false;
    bool complete_ = false;
    std::vector<std::uint8_t> delivered_;
    ReceiverStats stats_;
};

// ---------------------------------------------------------------------------
// Whole-transfer event loop
// ---------------------------------------------------------------------------

struct EngineParams {
    int timeout_ticks_per_hop = 8;  // retransmit timeout = this * (hops + 1)
    int max_retries = 16;
    std::uint8_t initial_ttl = 64;
    bool hash_check_on_header_correction = false;
    std::uint64_t max_ticks = 0;  // 0 = derived from transfer size
    TraceFn trace;
};

struct TransferReport {
    bool delivered_ok = false;
    bool aborted = false;
    std::uint64_t delivered_bytes = 0;
    std::uint64_t chunk_count = 0;
    std::uint64_t wasted_padding = 0;
    std::uint64_t ticks = 0;

    // Frames put on a link by any node, counted per emission.
    std::map<FrameKind, std::uint64_t> frames_sent;
    std::uint64_t frames_lost = 0;

    // Paper-style accounting: 40 bytes per digest exchange plus a full frame
    // per DATA retransmission. Full accounting: every byte on every link.
    std::uint64_t paper_cost_bytes = 0;
    std::uint64_t full_cost_bytes = 0;

    std::uint64_t data_retransmissions = 0;
    std::uint64_t hash_check_exchanges = 0;
    std::uint64_t payload_corrections = 0;
    std::uint64_t header_corrections = 0;
    std::uint64_t timeouts = 0;
    std::uint64_t naks = 0;
};

// Drives sender -> hops relays -> receiver over one Channel per link until
// the transfer completes (EOF acknowledged) or aborts. links.size() must be
// hops + 1; each link owns its RNG, so a (payload, configs, params) triple
// replays identically.
TransferReport run_transfer(std::span<const std::uint8_t> payload, int hops,
                            const std::vector<ChannelConfig>& links,
                            const EngineParams& params = {});

// Node addressing used by the event loop (also handy for tests/tools).
MacAddr node_mac(int node_index);
Ipv4Addr sender_ip();
Ipv4Addr receiver_ip(int hops);

}  // namespace hamlink
