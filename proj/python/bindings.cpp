#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <span>
#include <vector>

#include "hamlink/channel.hpp"
#include "hamlink/engine.hpp"
#include "hamlink/frame.hpp"
#include "hamlink/hamming.hpp"
#include "hamlink/harness.hpp"
#include "hamlink/model.hpp"

#define STRINGIFY(x) #x
#define MACRO_STRINGIFY(x) STRINGIFY(x)

namespace py = pybind11;
using namespace hamlink;

namespace {

std::vector<std::uint8_t> to_vec(const py::bytes& data) {
    std::string_view view = data;
    return std::vector<std::uint8_t>(view.begin(), view.end());
}

py::bytes to_bytes(const std::vector<std::uint8_t>& data) {
    return py::bytes(reinterpret_cast<const char*>(data.data()), data.size());
}

BlockOrder byte_aligned_order(int r) {
    BlockOrder order = BlockOrder::of(r);
    if (order.data_bits() % 8 != 0) {
        throw std::invalid_argument("order r=" + std::to_string(r) +
                                    " has a non-byte-aligned data capacity; use the C++ API");
    }
    return order;
}

py::dict outcome_dict(const DecodeOutcome& o) {
    py::dict d;
    d["kind"] = to_string(o.kind);
    d["position"] = o.position.has_value() ? py::object(py::int_(*o.position)) : py::none();
    d["syndrome"] = o.syndrome;
    d["overall_parity"] = o.overall_parity;
    return d;
}

py::dict report_dict(const TransferReport& r) {
    py::dict d;
    d["delivered_ok"] = r.delivered_ok;
    d["aborted"] = r.aborted;
    d["delivered_bytes"] = r.delivered_bytes;
    d["chunks"] = r.chunk_count;
    d["wasted_padding"] = r.wasted_padding;
    d["ticks"] = r.ticks;
    py::dict frames;
    for (const auto& [kind, count] : r.frames_sent) {
        frames[to_string(kind)] = count;
    }
    d["frames_sent"] = frames;
    d["frames_lost"] = r.frames_lost;
    d["paper_cost_bytes"] = r.paper_cost_bytes;
    d["full_cost_bytes"] = r.full_cost_bytes;
    d["data_retransmissions"] = r.data_retransmissions;
    d["hash_check_exchanges"] = r.hash_check_exchanges;
    d["payload_corrections"] = r.payload_corrections;
    d["header_corrections"] = r.header_corrections;
    d["timeouts"] = r.timeouts;
    d["naks"] = r.naks;
    return d;
}

}  // namespace

PYBIND11_MODULE(_hamlink, m) {
    m.doc() = "Self-correcting frame protocol: codec, frames, channel, engine and cost model";

    // ---- block codec ----
    m.def(
        "data_capacity", [](int r) { return BlockOrder::of(r).data_bits(); }, py::arg("r"),
        "Data bits carried by an order-r block (2^r - r - 1)");

    m.def(
        "encode_block",
        [](const py::bytes& data, int r) {
            BlockOrder order = byte_aligned_order(r);
            auto raw = to_vec(data);
            if (raw.size() * 8 != order.data_bits()) {
                throw std::invalid_argument("data must be exactly " +
                                            std::to_string(order.data_bits() / 8) + " bytes");
            }
            return to_bytes(encode(BitBuffer::from_bytes(raw), order).wire());
        },
        py::arg("data"), py::arg("r"), "Encode data bytes into one SEC-DED block");

    m.def(
        "decode_block",
        [](const py::bytes& block, int r) {
            BlockOrder order = byte_aligned_order(r);
            auto result = decode(CodeBlock::from_wire(order, to_vec(block)));
            return py::make_tuple(outcome_dict(result.outcome), to_bytes(result.repaired.wire()),
                                  to_bytes(result.data.bytes()));
        },
        py::arg("block"), py::arg("r"),
        "Decode one block; returns (outcome, repaired_block, data)");

    m.def(
        "syndrome_block",
        [](const py::bytes& block, int r) {
            auto info = syndrome(CodeBlock::from_wire(BlockOrder::of(r), to_vec(block)));
            return py::make_tuple(info.syndrome, info.overall_parity,
                                  info.counter.xor_accumulations);
        },
        py::arg("block"), py::arg("r"),
        "Returns (syndrome, overall_parity, xor_accumulations)");

    m.def(
        "extract_block_data",
        [](const py::bytes& block, int r) {
            BlockOrder order = byte_aligned_order(r);
            return to_bytes(extract_data(CodeBlock::from_wire(order, to_vec(block))).bytes());
        },
        py::arg("block"), py::arg("r"));

    // ---- frames ----
    py::class_<L2Header>(m, "L2Header")
        .def(py::init<>())
        .def_property(
            "dst", [](const L2Header& h) { return py::bytes(reinterpret_cast<const char*>(h.dst.octets.data()), 6); },
            [](L2Header& h, const py::bytes& v) {
                auto raw = to_vec(v);
                if (raw.size() != 6) throw std::invalid_argument("mac is 6 bytes");
                std::copy_n(raw.begin(), 6, h.dst.octets.begin());
            })
        .def_property(
            "src", [](const L2Header& h) { return py::bytes(reinterpret_cast<const char*>(h.src.octets.data()), 6); },
            [](L2Header& h, const py::bytes& v) {
                auto raw = to_vec(v);
                if (raw.size() != 6) throw std::invalid_argument("mac is 6 bytes");
                std::copy_n(raw.begin(), 6, h.src.octets.begin());
            })
        .def_readwrite("ether_type", &L2Header::ether_type)
        .def_readwrite("preserved", &L2Header::preserved);

    py::class_<L3Header>(m, "L3Header")
        .def(py::init<>())
        .def_property(
            "src_ip", [](const L3Header& h) { return py::bytes(reinterpret_cast<const char*>(h.src_ip.octets.data()), 4); },
            [](L3Header& h, const py::bytes& v) {
                auto raw = to_vec(v);
                if (raw.size() != 4) throw std::invalid_argument("ip is 4 bytes");
                std::copy_n(raw.begin(), 4, h.src_ip.octets.begin());
            })
        .def_property(
            "dst_ip", [](const L3Header& h) { return py::bytes(reinterpret_cast<const char*>(h.dst_ip.octets.data()), 4); },
            [](L3Header& h, const py::bytes& v) {
                auto raw = to_vec(v);
                if (raw.size() != 4) throw std::invalid_argument("ip is 4 bytes");
                std::copy_n(raw.begin(), 4, h.dst_ip.octets.begin());
            })
        .def_readwrite("id", &L3Header::id)
        .def_readwrite("flags", &L3Header::flags)
        .def_readwrite("offset", &L3Header::offset)
        .def_readwrite("ttl", &L3Header::ttl)
        .def_readwrite("err_pos", &L3Header::err_pos);

    m.def(
        "build_data_frame",
        [](const L2Header& l2, const L3Header& l3, const py::bytes& content) {
            return to_bytes(build_frame(Frame::data(l2, l3, to_vec(content))));
        },
        py::arg("l2"), py::arg("l3"), py::arg("content"));

    m.def(
        "build_control_frame",
        [](int kind, const py::bytes& dst, const py::bytes& src, std::uint16_t ref_id) {
            auto d = to_vec(dst);
            auto s = to_vec(src);
            if (d.size() != 6 || s.size() != 6) throw std::invalid_argument("mac is 6 bytes");
            MacAddr dm, sm;
            std::copy_n(d.begin(), 6, dm.octets.begin());
            std::copy_n(s.begin(), 6, sm.octets.begin());
            return to_bytes(
                build_frame(Frame::control(static_cast<FrameKind>(kind), dm, sm, ref_id)));
        },
        py::arg("kind"), py::arg("dst"), py::arg("src"), py::arg("ref_id"));

    m.def(
        "parse_frame",
        [](const py::bytes& wire) {
            ParsedFrame parsed = parse_frame(to_vec(wire));
            py::dict d;
            d["kind"] = to_string(parsed.frame.kind());
            d["l2"] = parsed.frame.l2;
            if (parsed.frame.l3.has_value()) {
                d["l3"] = *parsed.frame.l3;
            }
            if (!parsed.frame.content.empty()) {
                d["content"] = to_bytes(parsed.frame.content);
            }
            if (parsed.frame.hash.has_value()) {
                d["hash_id"] = parsed.frame.hash->id;
                d["hash_digest"] = parsed.frame.hash->digest;
            }
            py::list outcomes;
            for (const auto& o : parsed.outcomes) {
                outcomes.append(outcome_dict(o));
            }
            return py::make_tuple(d, outcomes);
        },
        py::arg("wire"), "Parse a wire frame; returns (fields, per-block outcomes)");

    m.def("payload_proportion", [](const std::string& which) {
        if (which == "protocol") return payload_proportion(FrameKind::Data);
        if (which == "baseline") return baseline_payload_proportion();
        throw std::invalid_argument("which must be 'protocol' or 'baseline'");
    });

    // ---- channel ----
    py::class_<Channel>(m, "Channel")
        .def(py::init([](double ber, double loss, std::uint64_t seed) {
                 return Channel(ChannelConfig{ber, loss, seed});
             }),
             py::arg("ber") = 0.0, py::arg("loss") = 0.0, py::arg("seed") = 0)
        .def(
            "transmit",
            [](Channel& ch, const py::bytes& wire) -> py::object {
                auto out = ch.transmit(to_vec(wire));
                if (!out.has_value()) {
                    return py::none();
                }
                return to_bytes(*out);
            },
            py::arg("wire"), "Returns the mutated frame or None when lost")
        .def_property_readonly("frames_sent", [](const Channel& c) { return c.stats().frames_sent; })
        .def_property_readonly("frames_lost", [](const Channel& c) { return c.stats().frames_lost; })
        .def_property_readonly("bits_flipped",
                               [](const Channel& c) { return c.stats().bits_flipped; });

    m.def(
        "error_count_histogram",
        [](std::uint64_t n_trials, std::uint64_t frame_bits, double ber, double loss,
           std::uint64_t seed) {
            auto stats = error_count_histogram(n_trials, frame_bits, ChannelConfig{ber, loss, seed});
            py::dict d;
            d["frames_sent"] = stats.frames_sent;
            d["frames_lost"] = stats.frames_lost;
            d["bits_flipped"] = stats.bits_flipped;
            d["histogram"] = stats.histogram;
            return d;
        },
        py::arg("n_trials"), py::arg("frame_bits"), py::arg("ber"), py::arg("loss") = 0.0,
        py::arg("seed") = 0);

    // ---- analytic model ----
    m.def(
        "error_probs",
        [](std::uint64_t frame_bits, double ber) {
            ErrorProbs p = error_probs(frame_bits, ber);
            return py::make_tuple(p.p0, p.p1, p.p2plus);
        },
        py::arg("frame_bits"), py::arg("ber"));

    m.def(
        "expected_costs",
        [](double ber, bool round_probabilities) {
            ScenarioParams params;
            params.ber = ber;
            params.round_probabilities = round_probabilities;
            return py::make_tuple(expected_cost_protocol(params), expected_cost_baseline(params));
        },
        py::arg("ber") = 1e-5, py::arg("round_probabilities") = true,
        "Expected overhead bytes per packet: (protocol, baseline)");

    m.def(
        "transfer_cost",
        [](double ber, std::uint64_t transfer_bytes, bool round_probabilities,
           bool whole_packets) {
            ScenarioParams params;
            params.ber = ber;
            params.transfer_bytes = transfer_bytes;
            params.round_probabilities = round_probabilities;
            params.whole_packets = whole_packets;
            CostReport r = transfer_cost(params);
            py::dict d;
            d["p0"] = r.protocol_probs.p0;
            d["p1"] = r.protocol_probs.p1;
            d["p2plus"] = r.protocol_probs.p2plus;
            d["baseline_p0"] = r.baseline_p0;
            d["protocol_cost_per_packet"] = r.protocol_cost_per_packet;
            d["baseline_cost_per_packet"] = r.baseline_cost_per_packet;
            d["protocol_total_cost"] = r.protocol_total_cost;
            d["baseline_total_cost"] = r.baseline_total_cost;
            d["cost_ratio"] = r.cost_ratio;
            return d;
        },
        py::arg("ber") = 1e-5, py::arg("transfer_bytes") = 1048576,
        py::arg("round_probabilities") = true, py::arg("whole_packets") = false);

    m.def("xor_burden", &xor_burden, py::arg("rate_bytes_per_sec"));

    // ---- engine ----
    m.def(
        "content_digest", [](const py::bytes& content) { return content_digest(to_vec(content)); },
        py::arg("content"), "FNV-1a 64 digest of one 4094-byte chunk");

    m.def(
        "run_transfer",
        [](const py::bytes& payload, int hops, double ber, double loss, std::uint64_t seed,
           bool ber_all_hops, int max_retries, int timeout_ticks_per_hop, int ttl) {
            ExperimentConfig cfg;
            cfg.ber = ber;
            cfg.loss = loss;
            cfg.hops = hops;
            cfg.ber_all_hops = ber_all_hops;
            EngineParams params;
            params.max_retries = max_retries;
            params.timeout_ticks_per_hop = timeout_ticks_per_hop;
            params.initial_ttl = static_cast<std::uint8_t>(ttl);
            auto raw = to_vec(payload);
            return report_dict(run_transfer(raw, hops, cfg.link_configs(seed), params));
        },
        py::arg("payload"), py::arg("hops") = 1, py::arg("ber") = 1e-5, py::arg("loss") = 0.0,
        py::arg("seed") = 1, py::arg("ber_all_hops") = false, py::arg("max_retries") = 16,
        py::arg("timeout_ticks_per_hop") = 8, py::arg("ttl") = 64,
        "Run one seeded transfer; returns the transfer report as a dict");

    // ---- container ----
    m.def(
        "encode_container",
        [](const py::bytes& payload) { return to_bytes(encode_container(to_vec(payload))); },
        py::arg("payload"));

    m.def(
        "decode_container",
        [](const py::bytes& container, const std::vector<std::pair<std::size_t, std::uint64_t>>&
                                           flips) {
            std::vector<FlipSpec> specs;
            specs.reserve(flips.size());
            for (auto [frame, bit] : flips) {
                specs.push_back({frame, bit});
            }
            auto result = decode_container(to_vec(container), specs);
            py::list frames;
            for (const auto& fr : result.frames) {
                py::dict d;
                d["index"] = fr.index;
                d["uncorrectable"] = fr.uncorrectable;
                py::list outcomes;
                for (const auto& o : fr.outcomes) {
                    outcomes.append(outcome_dict(o));
                }
                d["outcomes"] = outcomes;
                frames.append(d);
            }
            return py::make_tuple(to_bytes(result.payload), frames, result.any_uncorrectable);
        },
        py::arg("container"), py::arg("flips") = std::vector<std::pair<std::size_t, std::uint64_t>>{},
        "Returns (payload, per-frame reports, any_uncorrectable)");

    py::register_exception<FrameError>(m, "FrameError", PyExc_ValueError);
    py::register_exception<ContainerError>(m, "ContainerError", PyExc_ValueError);

#ifdef VERSION_INFO
    m.attr("__version__") = MACRO_STRINGIFY(VERSION_INFO);
#else
    m.attr("__version__") = "dev";
#endif
}
