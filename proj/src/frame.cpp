#include "hamlink/frame.hpp"

#include <algorithm>

namespace hamlink {

namespace {

const BlockOrder kHeaderOrder = BlockOrder::of(7);
const BlockOrder kPayloadOrder = BlockOrder::of(15);

BitBuffer pack_l2(const L2Header& l2) {
    BitWriter w;
    w.put_bytes(l2.dst.octets);
    w.put_bytes(l2.src.octets);
    w.put(l2.ether_type, 8);
    w.put(l2.preserved, 16);
    return w.take();
}

L2Header unpack_l2(const BitBuffer& bits) {
    BitReader r(bits);
    L2Header l2;
    for (auto& o : l2.dst.octets) o = static_cast<std::uint8_t>(r.get(8));
    for (auto& o : l2.src.octets) o = static_cast<std::uint8_t>(r.get(8));
    l2.ether_type = static_cast<std::uint8_t>(r.get(8));
    l2.preserved = static_cast<std::uint16_t>(r.get(16));
    return l2;
}

BitBuffer pack_l3(const L3Header& l3) {
    if (l3.flags > 0x7) {
        throw std::invalid_argument("build_frame: flags wider than 3 bits");
    }
    if (l3.offset > kMaxChunkOffset) {
        throw std::invalid_argument("build_frame: offset wider than 13 bits");
    }
    if (l3.err_pos > kMaxErrPos) {
        throw std::invalid_argument("build_frame: err_pos out of range");
    }
    BitWriter w;
    w.put_bytes(l3.src_ip.octets);
    w.put_bytes(l3.dst_ip.octets);
    w.put(l3.id, 16);
    w.put(l3.flags, 3);
    w.put(l3.offset, 13);
    w.put(l3.ttl, 8);
    w.put(l3.err_pos, 16);
    return w.take();
}

L3Header unpack_l3(const BitBuffer& bits) {
    BitReader r(bits);
    L3Header l3;
    for (auto& o : l3.src_ip.octets) o = static_cast<std::uint8_t>(r.get(8));
    for (auto& o : l3.dst_ip.octets) o = static_cast<std::uint8_t>(r.get(8));
    l3.id = static_cast<std::uint16_t>(r.get(16));
    l3.flags = static_cast<std::uint8_t>(r.get(3));
    l3.offset = static_cast<std::uint16_t>(r.get(13));
    l3.ttl = static_cast<std::uint8_t>(r.get(8));
    l3.err_pos = static_cast<std::uint16_t>(r.get(16));
    return l3;
}

BitBuffer pack_hash_body(const HashCheckBody& body) {
    BitWriter w;
    w.put(body.id, 16);
    w.put(body.digest, 64);
    w.put(0, 40);  // padding to 120 data bits
    return w.take();
}

HashCheckBody unpack_hash_body(const BitBuffer& bits) {
    BitReader r(bits);
    HashCheckBody body;
    body.id = static_cast<std::uint16_t>(r.get(16));
    body.digest = r.get(64);
    return body;
}

void append_block(std::vector<std::uint8_t>& out, const CodeBlock& block) {
    const auto& bytes = block.wire();
    out.insert(out.end(), bytes.begin(), bytes.end());
}

}  // namespace

const char* to_string(FrameKind kind) {
    switch (kind) {
        case FrameKind::Data: return "DATA";
        case FrameKind::Ack: return "ACK";
        case FrameKind::Nak: return "NAK";
        case FrameKind::HashCheck: return "HASH_CHECK";
        case FrameKind::HashOk: return "HASH_OK";
        case FrameKind::HashFail: return "HASH_FAIL";
        case FrameKind::Eof: return "EOF";
    }
    return "UNKNOWN";
}

bool is_known_ether_type(std::uint8_t ether_type) {
    return ether_type >= 0x01 && ether_type <= 0x07;
}

std::size_t wire_length(FrameKind kind) {
    switch (kind) {
        case FrameKind::Data: return kDataFrameBytes;
        case FrameKind::HashCheck: return kHashCheckFrameBytes;
        default: return kControlFrameBytes;
    }
}

Frame Frame::data(L2Header l2, L3Header l3, std::vector<std::uint8_t> content) {
    Frame f;
    f.l2 = l2;
    f.l2.ether_type = static_cast<std::uint8_t>(FrameKind::Data);
    f.l3 = l3;
    f.content = std::move(content);
    return f;
}

Frame Frame::control(FrameKind kind, MacAddr dst, MacAddr src, std::uint16_t ref_id) {
    Frame f;
    f.l2.dst = dst;
    f.l2.src = src;
    f.l2.ether_type = static_cast<std::uint8_t>(kind);
    f.l2.preserved = ref_id;
    return f;
}

Frame Frame::hash_check(MacAddr dst, MacAddr src, std::uint16_t id, std::uint64_t digest) {
    Frame f = control(FrameKind::HashCheck, dst, src, id);
    f.hash = HashCheckBody{id, digest};
    return f;
}

std::vector<std::uint8_t> build_frame(const Frame& frame) {
    if (!is_known_ether_type(frame.l2.ether_type)) {
        throw std::invalid_argument("build_frame: unknown frame kind");
    }
    FrameKind kind = frame.kind();
    if (kind == FrameKind::Data) {
        if (!frame.l3.has_value()) {
            throw std::invalid_argument("build_frame: DATA requires a payload header");
        }
        if (frame.content.size() != kContentBytes) {
            throw std::invalid_argument("build_frame: DATA content must be 4094 bytes");
        }
    } else {
        if (frame.l3.has_value() || !frame.content.empty()) {
            throw std::invalid_argument("build_frame: control frames carry no payload");
        }
        if (kind == FrameKind::HashCheck && !frame.hash.has_value()) {
            throw std::invalid_argument("build_frame: HASH_CHECK requires id and digest");
        }
    }

    std::vector<std::uint8_t> out;
    out.reserve(wire_length(kind));
    out.insert(out.end(), kPreambleBytes, kPreambleByte);
    out.push_back(kSfd);
    append_block(out, encode(pack_l2(frame.l2), kHeaderOrder));
    if (kind == FrameKind::Data) {
        append_block(out, encode(pack_l3(*frame.l3), kHeaderOrder));
        append_block(out, encode(BitBuffer::from_bytes(frame.content), kPayloadOrder));
    } else if (kind == FrameKind::HashCheck) {
        append_block(out, encode(pack_hash_body(*frame.hash), kHeaderOrder));
    }
    return out;
}

bool ParsedFrame::any_uncorrectable() const {
    return std::any_of(outcomes.begin(), outcomes.end(), [](const DecodeOutcome& o) {
        return o.kind == DecodeKind::Uncorrectable;
    });
}

bool ParsedFrame::all_clean() const {
    return std::all_of(outcomes.begin(), outcomes.end(), [](const DecodeOutcome& o) {
        return o.kind == DecodeKind::Clean;
    });
}

ParsedFrame parse_frame(std::span<const std::uint8_t> wire) {
    if (wire.size() < kControlFrameBytes) {
        throw FrameError(FrameErrorKind::Truncated, "frame shorter than 24 bytes");
    }
    for (std::size_t i = 0; i < kPreambleBytes; ++i) {
        if (wire[i] != kPreambleByte) {
            throw FrameError(FrameErrorKind::BadPreamble, "bad preamble byte");
        }
    }
    if (wire[kPreambleBytes] != kSfd) {
        throw FrameError(FrameErrorKind::BadPreamble, "bad start frame delimiter");
    }

    ParsedFrame parsed;
    DecodeResult l2r = decode(CodeBlock::from_wire(kHeaderOrder, wire.subspan(8, kHeaderBlockBytes)));
    parsed.outcomes.push_back(l2r.outcome);
    parsed.frame.l2 = unpack_l2(l2r.data);

    if (!is_known_ether_type(parsed.frame.l2.ether_type)) {
        throw FrameError(FrameErrorKind::UnknownProtocol,
                         "unknown protocol number " + std::to_string(parsed.frame.l2.ether_type));
    }
    FrameKind kind = parsed.frame.kind();
    if (wire.size() != wire_length(kind)) {
        throw FrameError(FrameErrorKind::Truncated,
                         std::string("wire length does not match ") + to_string(kind));
    }

    if (kind == FrameKind::Data) {
        DecodeResult l3r =
            decode(CodeBlock::from_wire(kHeaderOrder, wire.subspan(24, kHeaderBlockBytes)));
        parsed.outcomes.push_back(l3r.outcome);
        parsed.frame.l3 = unpack_l3(l3r.data);

        DecodeResult pr =
            decode(CodeBlock::from_wire(kPayloadOrder, wire.subspan(40, kPayloadBlockBytes)));
        parsed.outcomes.push_back(pr.outcome);
        parsed.frame.content = pr.data.bytes();
    } else if (kind == FrameKind::HashCheck) {
        DecodeResult br =
            decode(CodeBlock::from_wire(kHeaderOrder, wire.subspan(24, kHeaderBlockBytes)));
        parsed.outcomes.push_back(br.outcome);
        parsed.frame.hash = unpack_hash_body(br.data);
    }
    return parsed;
}

double payload_proportion(FrameKind kind) {
    if (kind == FrameKind::Data) {
        return static_cast<double>(kContentBytes) / static_cast<double>(kDataFrameBytes);
    }
    return 0.0;
}

double baseline_payload_proportion() {
    return static_cast<double>(kBaselineContentBytes) / static_cast<double>(kBaselineFrameBytes);
}

}  // namespace hamlink
