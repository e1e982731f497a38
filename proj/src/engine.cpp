#include "hamlink/engine.hpp"

#include <algorithm>
#include <queue>
#include <stdexcept>

namespace hamlink {

// ---------------------------------------------------------------------------
// Chunking
// ---------------------------------------------------------------------------

namespace {

constexpr std::size_t kChunkBytes = kContentBytes;          // 4094
constexpr std::size_t kFinalChunkCapacity = kChunkBytes - 4;  // 4090

void write_u32be(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 24));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

std::uint32_t read_u32be(std::span<const std::uint8_t> in) {
    return (static_cast<std::uint32_t>(in[0]) << 24) | (static_cast<std::uint32_t>(in[1]) << 16) |
           (static_cast<std::uint32_t>(in[2]) << 8) | static_cast<std::uint32_t>(in[3]);
}

// Number of full (non-final) chunks for a payload of this length. When the
// remainder does not fit the final chunk's 4090-byte capacity, one extra
// zero-padded full chunk absorbs it; the length prefix makes that exact.
std::size_t full_chunk_count(std::size_t len) {
    std::size_t full = len / kChunkBytes;
    if (len % kChunkBytes > kFinalChunkCapacity) {
        ++full;
    }
    return full;
}

}  // namespace

std::vector<std::vector<std::uint8_t>> make_chunks(std::span<const std::uint8_t> payload) {
    const std::size_t len = payload.size();
    if (len > std::size_t{0xFFFFFFFF}) {
        throw std::invalid_argument("make_chunks: payload exceeds the 32-bit length prefix");
    }
    const std::size_t full = full_chunk_count(len);
    if (full + 1 > kMaxChunkOffset + 1) {
        throw std::invalid_argument("make_chunks: payload exceeds the 13-bit chunk offset space");
    }

    std::vector<std::vector<std::uint8_t>> chunks;
    chunks.reserve(full + 1);
    for (std::size_t i = 0; i < full; ++i) {
        std::vector<std::uint8_t> chunk(kChunkBytes, 0);
        std::size_t begin = i * kChunkBytes;
        std::size_t n = std::min(kChunkBytes, len - begin);
        std::copy_n(payload.begin() + static_cast<std::ptrdiff_t>(begin), n, chunk.begin());
        chunks.push_back(std::move(chunk));
    }
    std::vector<std::uint8_t> last;
    last.reserve(kChunkBytes);
    write_u32be(last, static_cast<std::uint32_t>(len));
    if (len > full * kChunkBytes) {
        last.insert(last.end(), payload.begin() + static_cast<std::ptrdiff_t>(full * kChunkBytes),
                    payload.end());
    }
    last.resize(kChunkBytes, 0);
    chunks.push_back(std::move(last));
    return chunks;
}

std::vector<std::uint8_t> reassemble_chunks(const std::vector<std::vector<std::uint8_t>>& chunks) {
    if (chunks.empty()) {
        throw std::invalid_argument("reassemble_chunks: no chunks");
    }
    for (const auto& c : chunks) {
        if (c.size() != kChunkBytes) {
            throw std::invalid_argument("reassemble_chunks: chunk size mismatch");
        }
    }
    const std::size_t full = chunks.size() - 1;
    const auto& last = chunks.back();
    const std::size_t len = read_u32be(std::span(last).first(4));
    if (full_chunk_count(len) != full) {
        throw std::invalid_argument("reassemble_chunks: length prefix inconsistent with chunk count");
    }
    std::vector<std::uint8_t> out;
    out.reserve(len);
    std::size_t from_full = std::min(len, full * kChunkBytes);
    for (std::size_t i = 0; i < full && out.size() < from_full; ++i) {
        std::size_t n = std::min(kChunkBytes, from_full - out.size());
        out.insert(out.end(), chunks[i].begin(), chunks[i].begin() + static_cast<std::ptrdiff_t>(n));
    }
    std::size_t tail = len - from_full;
    if (tail > kFinalChunkCapacity) {
        throw std::invalid_argument("reassemble_chunks: length prefix inconsistent with chunk count");
    }
    out.insert(out.end(), last.begin() + 4, last.begin() + 4 + static_cast<std::ptrdiff_t>(tail));
    return out;
}

std::uint64_t wasted_padding_bytes(std::uint64_t payload_bytes) {
    std::uint64_t chunks = full_chunk_count(payload_bytes) + 1;
    return chunks * kChunkBytes - 4 - payload_bytes;
}

std::uint64_t content_digest(std::span<const std::uint8_t> content) {
    if (content.size() != kContentBytes) {
        throw std::invalid_argument("content_digest: content must be 4094 bytes");
    }
    return fnv1a64(content);
}

// ---------------------------------------------------------------------------
// Node addressing
// ---------------------------------------------------------------------------

MacAddr node_mac(int node_index) {
    MacAddr mac;
    mac.octets = {0x02, 0x00, 0x00, 0x00, 0x00, static_cast<std::uint8_t>(node_index + 1)};
    return mac;
}

Ipv4Addr sender_ip() {
    return Ipv4Addr{{10, 0, 0, 1}};
}

Ipv4Addr receiver_ip(int hops) {
    return Ipv4Addr{{10, 0, 0, static_cast<std::uint8_t>(hops + 2)}};
}

// ---------------------------------------------------------------------------
// Relay
// ---------------------------------------------------------------------------

RelayMachine::Action RelayMachine::process(std::span<const std::uint8_t> wire,
                                           bool toward_receiver) {
    Action action;
    ParsedFrame parsed;
    try {
        parsed = parse_frame(wire);
    } catch (const FrameError&) {
        ++stats_.dropped_malformed;
        return action;  // DropSilent
    }

    if (parsed.frame.kind() == FrameKind::Data) {
        if (!toward_receiver) {
            ++stats_.dropped_malformed;  // DATA only flows toward the receiver
            return action;
        }
        if (parsed.any_uncorrectable()) {
            ++stats_.dropped_uncorrectable;
            ++stats_.naks_sent;
            action.kind = Action::Kind::DropNak;
            action.nak = Frame::control(FrameKind::Nak, toward_sender_, self_,
                                        parsed.frame.l3 ? parsed.frame.l3->id : 0);
            return action;
        }
        L3Header l3 = *parsed.frame.l3;
        if (l3.ttl <= 1) {
            ++stats_.dropped_ttl;
            return action;
        }
        l3.ttl = static_cast<std::uint8_t>(l3.ttl - 1);
        if (parsed.outcomes[2].kind == DecodeKind::Corrected) {
            l3.err_pos = static_cast<std::uint16_t>(*parsed.outcomes[2].position + 1);
            ++stats_.payload_corrections;
            action.payload_correction = *parsed.outcomes[2].position;
        }
        if (parsed.outcomes[0].kind == DecodeKind::Corrected ||
            parsed.outcomes[1].kind == DecodeKind::Corrected) {
            ++stats_.header_corrections;
            action.header_correction = true;
        }
        L2Header l2 = parsed.frame.l2;
        l2.dst = toward_receiver_;
        l2.src = self_;
        action.kind = Action::Kind::Forward;
        action.forward = Frame::data(l2, l3, std::move(parsed.frame.content));
        ++stats_.forwarded;
        return action;
    }

    // Control frames: verify, repair, pass along; no TTL to maintain.
    if (parsed.any_uncorrectable()) {
        ++stats_.dropped_uncorrectable;
        return action;
    }
    if (std::any_of(parsed.outcomes.begin(), parsed.outcomes.end(), [](const DecodeOutcome& o) {
            return o.kind == DecodeKind::Corrected;
        })) {
        ++stats_.header_corrections;
        action.header_correction = true;
    }
    Frame out = parsed.frame;
    out.l2.dst = toward_receiver ? toward_receiver_ : toward_sender_;
    out.l2.src = self_;
    action.kind = Action::Kind::Forward;
    action.forward = std::move(out);
    ++stats_.forwarded;
    return action;
}

// ---------------------------------------------------------------------------
// Sender
// ---------------------------------------------------------------------------

SenderMachine::SenderMachine(std::span<const std::uint8_t> payload, SenderConfig cfg)
    : cfg_(cfg), chunks_(make_chunks(payload)) {
    if (payload.empty()) {
        throw std::invalid_argument("SenderMachine: payload must be non-empty");
    }
}

std::optional<std::uint16_t> SenderMachine::inflight_id() const {
    if (phase_ == Phase::AwaitDataAck || phase_ == Phase::AwaitEofAck) {
        return current_id_;
    }
    return std::nullopt;
}

Frame SenderMachine::current_data_frame() const {
    L2Header l2;
    l2.dst = cfg_.next_mac;
    l2.src = cfg_.self_mac;
    L3Header l3;
    l3.src_ip = cfg_.src_ip;
    l3.dst_ip = cfg_.dst_ip;
    l3.id = current_id_;
    l3.offset = static_cast<std::uint16_t>(next_chunk_);
    l3.flags = next_chunk_ + 1 < chunks_.size() ? kFlagMoreChunks : 0;
    l3.ttl = cfg_.initial_ttl;
    l3.err_pos = 0;
    return Frame::data(l2, l3, chunks_[next_chunk_]);
}

Frame SenderMachine::eof_frame() const {
    return Frame::control(FrameKind::Eof, cfg_.next_mac, cfg_.self_mac, current_id_);
}

std::vector<Frame> SenderMachine::send_current(bool is_retransmission) {
    last_send_tick_ = now_;
    if (phase_ == Phase::AwaitEofAck) {
        return {eof_frame()};
    }
    ++stats_.data_frames_sent;
    if (is_retransmission) {
        ++stats_.retransmissions;
    }
    return {current_data_frame()};
}

std::vector<Frame> SenderMachine::advance() {
    retries_ = 0;
    ++next_chunk_;
    if (next_chunk_ < chunks_.size()) {
        current_id_ = static_cast<std::uint16_t>(next_chunk_ + 1);
        current_digest_ = content_digest(chunks_[next_chunk_]);
        return send_current(false);
    }
    // Transfer body done; EOF takes the next id.
    phase_ = Phase::AwaitEofAck;
    current_id_ = static_cast<std::uint16_t>(chunks_.size() + 1);
    return send_current(false);
}

std::vector<Frame> SenderMachine::on_event(const SenderEvent& event) {
    switch (event.type) {
        case SenderEvent::Type::Tick: {
            now_ = event.tick;
            if (phase_ == Phase::Idle) {
                phase_ = Phase::AwaitDataAck;
                next_chunk_ = 0;
                current_id_ = 1;
                current_digest_ = content_digest(chunks_[0]);
                return send_current(false);
            }
            if (phase_ != Phase::AwaitDataAck && phase_ != Phase::AwaitEofAck) {
                return {};
            }
            if (now_ - last_send_tick_ < cfg_.timeout_ticks) {
                return {};
            }
            ++stats_.timeouts;
            if (retries_ >= cfg_.max_retries) {
                phase_ = Phase::Aborted;
                return {};
            }
            ++retries_;
            return send_current(phase_ == Phase::AwaitDataAck);
        }
        case SenderEvent::Type::Ack: {
            if (inflight_id() != event.id) {
                ++stats_.ignored_events;
                return {};
            }
            if (phase_ == Phase::AwaitEofAck) {
                phase_ = Phase::Done;
                return {};
            }
            return advance();
        }
        case SenderEvent::Type::Nak: {
            if (phase_ != Phase::AwaitDataAck || event.id != current_id_) {
                ++stats_.ignored_events;
                return {};
            }
            ++stats_.naks_received;
            if (retries_ >= cfg_.max_retries) {
                phase_ = Phase::Aborted;
                return {};
            }
            ++retries_;
            return send_current(true);
        }
        case SenderEvent::Type::HashCheck: {
            if (phase_ != Phase::AwaitDataAck || event.id != current_id_) {
                ++stats_.ignored_events;
                return {};
            }
            if (event.digest == current_digest_) {
                ++stats_.hash_ok_sent;
                last_send_tick_ = now_;
                return {Frame::control(FrameKind::HashOk, cfg_.next_mac, cfg_.self_mac,
                                       current_id_)};
            }
            // Content differs despite a "successful" correction: a masked
            // multi-bit error. Tell the receiver to discard and resend.
            ++stats_.hash_fail_sent;
            std::vector<Frame> out;
            out.push_back(
                Frame::control(FrameKind::HashFail, cfg_.next_mac, cfg_.self_mac, current_id_));
            if (retries_ >= cfg_.max_retries) {
                phase_ = Phase::Aborted;
                return out;
            }
            ++retries_;
            auto resend = send_current(true);
            out.insert(out.end(), resend.begin(), resend.end());
            return out;
        }
    }
    return {};
}

// ---------------------------------------------------------------------------
// Receiver
// ---------------------------------------------------------------------------

ReceiverMachine::Action ReceiverMachine::on_frame(const ParsedFrame& parsed) {
    Action action;
    switch (parsed.frame.kind()) {
        case FrameKind::Data:
            return handle_data(parsed);
        case FrameKind::Eof: {
            if (parsed.any_uncorrectable()) {
                ++stats_.dropped_uncorrectable;
                action.kind = Action::Kind::DropSilent;
                return action;
            }
            eof_seen_ = true;
            try_finalize();
            ++stats_.acks_sent;
            action.kind = Action::Kind::Ack;
            action.frames.push_back(Frame::control(FrameKind::Ack, cfg_.prev_mac, cfg_.self_mac,
                                                   parsed.frame.l2.preserved));
            return action;
        }
        case FrameKind::HashOk: {
            if (parsed.any_uncorrectable()) {
                ++stats_.dropped_uncorrectable;
                action.kind = Action::Kind::DropSilent;
                return action;
            }
            auto it = held_.find(parsed.frame.l2.preserved);
            if (it == held_.end()) {
                ++stats_.ignored_frames;
                return action;
            }
            Held held = std::move(it->second);
            held_.erase(it);
            deliver_chunk(parsed.frame.l2.preserved, held.offset, held.more,
                          std::move(held.content));
            ++stats_.acks_sent;
            action.kind = Action::Kind::Ack;
            action.frames.push_back(Frame::control(FrameKind::Ack, cfg_.prev_mac, cfg_.self_mac,
                                                   parsed.frame.l2.preserved));
            return action;
        }
        case FrameKind::HashFail: {
            if (parsed.any_uncorrectable()) {
                ++stats_.dropped_uncorrectable;
                action.kind = Action::Kind::DropSilent;
                return action;
            }
            // Discard the suspect chunk and wait for the retransmission.
            if (held_.erase(parsed.frame.l2.preserved) == 0) {
                ++stats_.ignored_frames;
            }
            return action;
        }
        default:
            ++stats_.ignored_frames;
            return action;
    }
}

ReceiverMachine::Action ReceiverMachine::handle_data(const ParsedFrame& parsed) {
    Action action;
    if (parsed.any_uncorrectable()) {
        ++stats_.dropped_uncorrectable;
        ++stats_.naks_sent;
        action.kind = Action::Kind::DropNak;
        action.frames.push_back(Frame::control(FrameKind::Nak, cfg_.prev_mac, cfg_.self_mac,
                                               parsed.frame.l3 ? parsed.frame.l3->id : 0));
        return action;
    }
    const L3Header& l3 = *parsed.frame.l3;
    const bool payload_corrected = parsed.outcomes[2].kind == DecodeKind::Corrected;
    const bool header_corrected = parsed.outcomes[0].kind == DecodeKind::Corrected ||
                                  parsed.outcomes[1].kind == DecodeKind::Corrected;
    if (payload_corrected) {
        ++stats_.payload_corrections;
    }
    if (header_corrected) {
        ++stats_.header_corrections;
    }

    if (offset_by_id_.contains(l3.id)) {
        // Already delivered and verified; the ACK must have been lost.
        ++stats_.duplicates;
        ++stats_.acks_sent;
        action.kind = Action::Kind::Ack;
        action.frames.push_back(
            Frame::control(FrameKind::Ack, cfg_.prev_mac, cfg_.self_mac, l3.id));
        return action;
    }

    const bool needs_digest = payload_corrected || l3.err_pos != 0 ||
                              (cfg_.hash_check_on_header_correction && header_corrected);
    const bool more = (l3.flags & kFlagMoreChunks) != 0;
    if (needs_digest) {
        held_[l3.id] = Held{l3.offset, more, parsed.frame.content};
        ++stats_.hash_checks_sent;
        action.kind = Action::Kind::HashCheck;
        action.frames.push_back(Frame::hash_check(cfg_.prev_mac, cfg_.self_mac, l3.id,
                                                  content_digest(parsed.frame.content)));
        return action;
    }

    deliver_chunk(l3.id, l3.offset, more, parsed.frame.content);
    ++stats_.acks_sent;
    action.kind = Action::Kind::Ack;
    action.frames.push_back(Frame::control(FrameKind::Ack, cfg_.prev_mac, cfg_.self_mac, l3.id));
    return action;
}

void ReceiverMachine::deliver_chunk(std::uint16_t id, std::uint16_t offset, bool more,
                                    std::vector<std::uint8_t> content) {
    held_.erase(id);
    chunks_by_offset_[offset] = std::move(content);
    offset_by_id_[id] = offset;
    if (!more) {
        final_offset_ = offset;
    }
}

void ReceiverMachine::try_finalize() {
    if (complete_ || !eof_seen_ || !final_offset_.has_value()) {
        return;
    }
    std::vector<std::vector<std::uint8_t>> ordered;
    ordered.reserve(*final_offset_ + 1);
    for (std::uint16_t off = 0; off <= *final_offset_; ++off) {
        auto it = chunks_by_offset_.find(off);
        if (it == chunks_by_offset_.end()) {
            return;  // gap; leave incomplete
        }
        ordered.push_back(it->second);
    }
    try {
        delivered_ = reassemble_chunks(ordered);
    } catch (const std::invalid_argument&) {
        return;
    }
    complete_ = true;
}

// ---------------------------------------------------------------------------
// Event loop
// ---------------------------------------------------------------------------

namespace {

std::string node_name(int node, int hops) {
    if (node == 0) {
        return "sender";
    }
    if (node == hops + 1) {
        return "receiver";
    }
    return "relay" + std::to_string(node);
}

int frame_trace_id(const Frame& f) {
    if (f.l3.has_value()) {
        return f.l3->id;
    }
    if (f.hash.has_value()) {
        return f.hash->id;
    }
    return f.l2.preserved;
}

struct LinkEvent {
    std::uint64_t tick;
    std::uint64_t seq;
    int to_node;
    bool toward_receiver;
    std::vector<std::uint8_t> wire;
};

struct LinkEventLater {
    bool operator()(const LinkEvent& a, const LinkEvent& b) const {
        return a.tick != b.tick ? a.tick > b.tick : a.seq > b.seq;
    }
};

}  // namespace

TransferReport run_transfer(std::span<const std::uint8_t> payload, int hops,
                            const std::vector<ChannelConfig>& links, const EngineParams& params) {
    if (hops < 0) {
        throw std::invalid_argument("run_transfer: hops must be >= 0");
    }
    if (links.size() != static_cast<std::size_t>(hops) + 1) {
        throw std::invalid_argument("run_transfer: need one channel config per link (hops + 1)");
    }

    const int receiver_node = hops + 1;
    std::vector<Channel> channels;
    channels.reserve(links.size());
    for (const auto& cfg : links) {
        channels.emplace_back(cfg);
    }

    SenderConfig scfg;
    scfg.self_mac = node_mac(0);
    scfg.next_mac = node_mac(1);
    scfg.src_ip = sender_ip();
    scfg.dst_ip = receiver_ip(hops);
    scfg.initial_ttl = params.initial_ttl;
    scfg.timeout_ticks =
        static_cast<std::uint64_t>(params.timeout_ticks_per_hop) * static_cast<std::uint64_t>(hops + 1);
    scfg.max_retries = params.max_retries;
    SenderMachine sender(payload, scfg);

    std::vector<RelayMachine> relays;
    relays.reserve(static_cast<std::size_t>(hops));
    for (int j = 1; j <= hops; ++j) {
        relays.emplace_back(node_mac(j), node_mac(j - 1), node_mac(j + 1));
    }

    ReceiverConfig rcfg;
    rcfg.self_mac = node_mac(receiver_node);
    rcfg.prev_mac = node_mac(hops);
    rcfg.hash_check_on_header_correction = params.hash_check_on_header_correction;
    ReceiverMachine receiver(rcfg);

    TransferReport report;
    report.chunk_count = sender.chunk_count();
    report.wasted_padding = wasted_padding_bytes(payload.size());

    std::uint64_t max_ticks = params.max_ticks;
    if (max_ticks == 0) {
        max_ticks = (report.chunk_count + 2) *
                        static_cast<std::uint64_t>(params.max_retries + 2) *
                        (scfg.timeout_ticks + 4) +
                    64;
    }

    std::priority_queue<LinkEvent, std::vector<LinkEvent>, LinkEventLater> inflight;
    std::uint64_t seq = 0;
    std::uint64_t tick = 0;

    auto trace = [&](std::uint64_t t, const std::string& node, const char* event,
                     const char* kind, int id, const std::string& detail = {}) {
        if (params.trace) {
            params.trace(TraceEvent{t, node, event, kind, id, detail});
        }
    };

    auto send_frame = [&](int from_node, int to_node, const Frame& frame, std::uint64_t now) {
        std::vector<std::uint8_t> wire = build_frame(frame);
        ++report.frames_sent[frame.kind()];
        report.full_cost_bytes += wire.size();
        trace(now, node_name(from_node, hops), "send", to_string(frame.kind()),
              frame_trace_id(frame));
        int link = std::min(from_node, to_node);
        auto delivered = channels[static_cast<std::size_t>(link)].transmit(wire);
        if (!delivered.has_value()) {
            ++report.frames_lost;
            trace(now, "link" + std::to_string(link), "lost", to_string(frame.kind()),
                  frame_trace_id(frame));
            return;
        }
        inflight.push(LinkEvent{now + 1, seq++, to_node, to_node > from_node,
                                std::move(*delivered)});
    };

    auto emit_from = [&](int node, const std::vector<Frame>& frames, std::uint64_t now) {
        for (const Frame& f : frames) {
            send_frame(node, node == 0 ? 1 : node - 1, f, now);
        }
    };

    for (; tick <= max_ticks; ++tick) {
        while (!inflight.empty() && inflight.top().tick == tick) {
            LinkEvent ev = inflight.top();
            inflight.pop();
            const std::string name = node_name(ev.to_node, hops);

            if (ev.to_node == 0) {
                ParsedFrame parsed;
                try {
                    parsed = parse_frame(ev.wire);
                } catch (const FrameError&) {
                    trace(tick, name, "drop_malformed", "", -1);
                    continue;
                }
                trace(tick, name, "recv", to_string(parsed.frame.kind()),
                      frame_trace_id(parsed.frame));
                if (parsed.any_uncorrectable()) {
                    trace(tick, name, "drop_uncorrectable", to_string(parsed.frame.kind()),
                          frame_trace_id(parsed.frame));
                    continue;
                }
                SenderEvent sev;
                switch (parsed.frame.kind()) {
                    case FrameKind::Ack:
                        sev = SenderEvent::make_ack(parsed.frame.l2.preserved);
                        break;
                    case FrameKind::Nak:
                        sev = SenderEvent::make_nak(parsed.frame.l2.preserved);
                        break;
                    case FrameKind::HashCheck:
                        sev = SenderEvent::make_hash_check(parsed.frame.hash->id,
                                                           parsed.frame.hash->digest);
                        break;
                    default:
                        trace(tick, name, "ignored", to_string(parsed.frame.kind()),
                              frame_trace_id(parsed.frame));
                        continue;
                }
                emit_from(0, sender.on_event(sev), tick);
            } else if (ev.to_node == receiver_node) {
                ParsedFrame parsed;
                try {
                    parsed = parse_frame(ev.wire);
                } catch (const FrameError&) {
                    trace(tick, name, "drop_malformed", "", -1);
                    continue;
                }
                trace(tick, name, "recv", to_string(parsed.frame.kind()),
                      frame_trace_id(parsed.frame));
                for (std::size_t i = 0; i < parsed.outcomes.size(); ++i) {
                    if (parsed.outcomes[i].kind == DecodeKind::Corrected) {
                        trace(tick, name, "correct", to_string(parsed.frame.kind()),
                              frame_trace_id(parsed.frame),
                              "block " + std::to_string(i) + " bit " +
                                  std::to_string(*parsed.outcomes[i].position));
                    }
                }
                auto action = receiver.on_frame(parsed);
                if (action.kind == ReceiverMachine::Action::Kind::DropNak) {
                    trace(tick, name, "nak", to_string(parsed.frame.kind()),
                          frame_trace_id(parsed.frame));
                } else if (action.kind == ReceiverMachine::Action::Kind::DropSilent) {
                    trace(tick, name, "drop_uncorrectable", to_string(parsed.frame.kind()),
                          frame_trace_id(parsed.frame));
                }
                emit_from(receiver_node, action.frames, tick);
            } else {
                RelayMachine& relay = relays[static_cast<std::size_t>(ev.to_node - 1)];
                auto action = relay.process(ev.wire, ev.toward_receiver);
                switch (action.kind) {
                    case RelayMachine::Action::Kind::Forward: {
                        if (action.payload_correction.has_value()) {
                            trace(tick, name, "correct", "DATA", -1,
                                  "payload bit " + std::to_string(*action.payload_correction));
                        }
                        trace(tick, name, "forward", to_string(action.forward->kind()),
                              frame_trace_id(*action.forward));
                        int to = ev.toward_receiver ? ev.to_node + 1 : ev.to_node - 1;
                        send_frame(ev.to_node, to, *action.forward, tick);
                        break;
                    }
                    case RelayMachine::Action::Kind::DropNak:
                        trace(tick, name, "nak", "DATA", frame_trace_id(*action.nak));
                        send_frame(ev.to_node, ev.to_node - 1, *action.nak, tick);
                        break;
                    case RelayMachine::Action::Kind::DropSilent:
                        trace(tick, name, "drop", "", -1);
                        break;
                }
            }
        }

        if (sender.finished() || sender.aborted()) {
            break;
        }
        auto frames = sender.on_event(SenderEvent::make_tick(tick));
        if (sender.aborted()) {
            trace(tick, "sender", "abort", "", -1, "retries exhausted");
            break;
        }
        emit_from(0, frames, tick);
    }

    report.ticks = tick;
    report.aborted = sender.aborted() || (!sender.finished() && tick > max_ticks);
    report.delivered_bytes = receiver.delivered().size();
    report.delivered_ok = receiver.transfer_complete() && !report.aborted &&
                          receiver.delivered().size() == payload.size() &&
                          std::equal(payload.begin(), payload.end(), receiver.delivered().begin());

    std::uint64_t relay_payload_corr = 0;
    std::uint64_t relay_header_corr = 0;
    std::uint64_t relay_naks = 0;
    for (const auto& r : relays) {
        relay_payload_corr += r.stats().payload_corrections;
        relay_header_corr += r.stats().header_corrections;
        relay_naks += r.stats().naks_sent;
    }
    report.payload_corrections = relay_payload_corr + receiver.stats().payload_corrections;
    report.header_corrections = relay_header_corr + receiver.stats().header_corrections;
    report.naks = relay_naks + receiver.stats().naks_sent;
    report.timeouts = sender.stats().timeouts;
    report.data_retransmissions = sender.stats().retransmissions;
    report.hash_check_exchanges = receiver.stats().hash_checks_sent;
    report.paper_cost_bytes = report.hash_check_exchanges * kHashCheckFrameBytes +
                              report.data_retransmissions * kDataFrameBytes;

    if (report.delivered_ok) {
        trace(report.ticks, "receiver", "complete", "", -1,
              std::to_string(report.delivered_bytes) + " bytes");
    }
    return report;
}

}  // namespace hamlink
