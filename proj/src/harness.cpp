#include "hamlink/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "json.hpp"

namespace hamlink {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

void ExperimentConfig::normalize() {
    if (!(ber >= 0.0 && ber <= 1.0) || !(loss >= 0.0 && loss <= 1.0)) {
        throw std::invalid_argument("config: probabilities must be in [0, 1]");
    }
    if (hops < 0) {
        throw std::invalid_argument("config: hops must be >= 0");
    }
    if (max_retries < 0 || timeout_ticks_per_hop < 1) {
        throw std::invalid_argument("config: bad retry/timeout settings");
    }
    if (format != "text" && format != "json" && format != "csv") {
        throw std::invalid_argument("config: format must be text, json or csv");
    }
    if (seeds.empty()) {
        seeds.resize(64);
        for (std::size_t i = 0; i < seeds.size(); ++i) {
            seeds[i] = i + 1;
        }
    }
}

std::vector<ChannelConfig> ExperimentConfig::link_configs(std::uint64_t seed) const {
    std::vector<ChannelConfig> links(static_cast<std::size_t>(hops) + 1);
    for (std::size_t i = 0; i < links.size(); ++i) {
        links[i].seed = seed ^ (0x9E3779B97F4A7C15ull * (i + 1));
        if (i == 0 || ber_all_hops) {
            links[i].ber = ber;
            links[i].loss_prob = loss;
        }
    }
    return links;
}

ScenarioParams ExperimentConfig::scenario() const {
    ScenarioParams p;
    p.ber = ber;
    p.transfer_bytes = transfer_bytes;
    return p;
}

void apply_config_json(ExperimentConfig& cfg, const std::string& json_text) {
    json j = json::parse(json_text);
    if (!j.is_object()) {
        throw std::invalid_argument("config: top level must be an object");
    }
    if (j.contains("ber")) cfg.ber = j.at("ber").get<double>();
    if (j.contains("loss")) cfg.loss = j.at("loss").get<double>();
    if (j.contains("bytes")) cfg.transfer_bytes = j.at("bytes").get<std::uint64_t>();
    if (j.contains("hops")) cfg.hops = j.at("hops").get<int>();
    if (j.contains("seeds")) {
        const auto& s = j.at("seeds");
        cfg.seeds.clear();
        if (s.is_number_unsigned() || s.is_number_integer()) {
            auto n = s.get<std::uint64_t>();
            for (std::uint64_t i = 1; i <= n; ++i) {
                cfg.seeds.push_back(i);
            }
        } else {
            cfg.seeds = s.get<std::vector<std::uint64_t>>();
        }
    }
    if (j.contains("max_retries")) cfg.max_retries = j.at("max_retries").get<int>();
    if (j.contains("timeout_ticks_per_hop"))
        cfg.timeout_ticks_per_hop = j.at("timeout_ticks_per_hop").get<int>();
    if (j.contains("ttl")) cfg.initial_ttl = j.at("ttl").get<std::uint8_t>();
    if (j.contains("baseline")) cfg.baseline = j.at("baseline").get<bool>();
    if (j.contains("ber_all_hops")) cfg.ber_all_hops = j.at("ber_all_hops").get<bool>();
    if (j.contains("rate")) cfg.rate_bytes_per_sec = j.at("rate").get<double>();
    if (j.contains("format")) cfg.format = j.at("format").get<std::string>();
    if (j.contains("out")) cfg.out = j.at("out").get<std::string>();
    if (j.contains("trace")) cfg.trace_path = j.at("trace").get<std::string>();
    if (j.contains("tolerance")) cfg.agreement_tolerance = j.at("tolerance").get<double>();
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::invalid_argument("config: cannot open " + path);
    }
    std::stringstream ss;
    ss << in.rdbuf();
    ExperimentConfig cfg;
    apply_config_json(cfg, ss.str());
    return cfg;
}

// ---------------------------------------------------------------------------
// Campaigns
// ---------------------------------------------------------------------------

std::vector<std::uint8_t> synth_payload(std::uint64_t bytes, std::uint64_t seed) {
    std::mt19937_64 rng(0x68616d6c696e6bull ^ seed);
    std::vector<std::uint8_t> payload(bytes);
    std::size_t i = 0;
    while (i + 8 <= payload.size()) {
        std::uint64_t word = rng();
        for (int k = 0; k < 8; ++k) {
            payload[i++] = static_cast<std::uint8_t>(word >> (8 * k));
        }
    }
    std::uint64_t word = rng();
    while (i < payload.size()) {
        payload[i++] = static_cast<std::uint8_t>(word);
        word >>= 8;
    }
    return payload;
}

TransferReport run_baseline_transfer(std::uint64_t transfer_bytes, const ChannelConfig& cfg,
                                     int max_retries) {
    Channel channel(cfg);
    constexpr std::uint64_t kFrameBits = kBaselineFrameBytes * 8;
    TransferReport report;
    report.chunk_count =
        std::max<std::uint64_t>(1, (transfer_bytes + kBaselineContentBytes - 1) / kBaselineContentBytes);
    for (std::uint64_t c = 0; c < report.chunk_count; ++c) {
        int attempts = 0;
        for (;;) {
            ++attempts;
            report.full_cost_bytes += kBaselineFrameBytes;
            bool ok = !channel.sample_loss() && channel.sample_error_count(kFrameBits) == 0;
            if (ok) {
                break;
            }
            ++report.data_retransmissions;
            report.paper_cost_bytes += kBaselineFrameBytes;
            if (attempts > max_retries) {
                report.aborted = true;
                return report;
            }
        }
    }
    report.delivered_ok = true;
    report.delivered_bytes = transfer_bytes;
    return report;
}

CampaignReport run_campaign(const ExperimentConfig& raw) {
    ExperimentConfig cfg = raw;
    cfg.normalize();

    CampaignReport campaign;
    campaign.config = cfg;

    std::ofstream trace_file;
    TraceFn trace;
    if (!cfg.trace_path.empty()) {
        trace_file.open(cfg.trace_path);
        if (!trace_file) {
            throw std::invalid_argument("cannot open trace path " + cfg.trace_path);
        }
        trace = [&trace_file](const TraceEvent& ev) { trace_file << trace_event_json(ev) << '\n'; };
    }

    std::vector<std::uint8_t> payload;
    if (!cfg.baseline) {
        payload = synth_payload(cfg.transfer_bytes);
    }

    for (std::uint64_t seed : cfg.seeds) {
        SeedOutcome row;
        row.seed = seed;
        if (cfg.baseline) {
            ChannelConfig ch{cfg.ber, cfg.loss, seed};
            row.report = run_baseline_transfer(cfg.transfer_bytes, ch, cfg.max_retries);
        } else {
            EngineParams params;
            params.timeout_ticks_per_hop = cfg.timeout_ticks_per_hop;
            params.max_retries = cfg.max_retries;
            params.initial_ttl = cfg.initial_ttl;
            params.trace = trace;
            row.report = run_transfer(payload, cfg.hops, cfg.link_configs(seed), params);
        }
        campaign.rows.push_back(std::move(row));
    }

    double sum = 0.0;
    double sumsq = 0.0;
    for (const auto& row : campaign.rows) {
        if (row.report.aborted) {
            ++campaign.aborted_seeds;
            continue;
        }
        ++campaign.completed_seeds;
        double c = static_cast<double>(row.report.paper_cost_bytes);
        sum += c;
        sumsq += c * c;
    }
    if (campaign.completed_seeds > 0) {
        double n = static_cast<double>(campaign.completed_seeds);
        campaign.mean_paper_cost = sum / n;
        double var = sumsq / n - campaign.mean_paper_cost * campaign.mean_paper_cost;
        campaign.stddev_paper_cost = var > 0.0 ? std::sqrt(var) : 0.0;
    }

    ScenarioParams scenario = cfg.scenario();
    CostReport cost = transfer_cost(scenario);
    campaign.analytic_cost_per_packet =
        cfg.baseline ? cost.baseline_cost_per_packet : cost.protocol_cost_per_packet;
    campaign.analytic_total_cost =
        cfg.baseline ? cost.baseline_total_cost : cost.protocol_total_cost;
    if (campaign.completed_seeds > 0 && campaign.analytic_total_cost > 0.0) {
        campaign.within_tolerance =
            std::abs(campaign.mean_paper_cost - campaign.analytic_total_cost) <=
            cfg.agreement_tolerance * campaign.analytic_total_cost;
    }
    return campaign;
}

// ---------------------------------------------------------------------------
// Report rendering
// ---------------------------------------------------------------------------

namespace {

json config_to_json(const ExperimentConfig& cfg) {
    return json{{"ber", cfg.ber},
                {"loss", cfg.loss},
                {"bytes", cfg.transfer_bytes},
                {"hops", cfg.hops},
                {"seeds", cfg.seeds},
                {"max_retries", cfg.max_retries},
                {"timeout_ticks_per_hop", cfg.timeout_ticks_per_hop},
                {"ttl", cfg.initial_ttl},
                {"baseline", cfg.baseline},
                {"ber_all_hops", cfg.ber_all_hops},
                {"tolerance", cfg.agreement_tolerance}};
}

json transfer_report_to_json(const TransferReport& r) {
    json frames = json::object();
    for (const auto& [kind, count] : r.frames_sent) {
        frames[to_string(kind)] = count;
    }
    return json{{"delivered_ok", r.delivered_ok},
                {"aborted", r.aborted},
                {"delivered_bytes", r.delivered_bytes},
                {"chunks", r.chunk_count},
                {"wasted_padding", r.wasted_padding},
                {"ticks", r.ticks},
                {"frames_sent", frames},
                {"frames_lost", r.frames_lost},
                {"paper_cost_bytes", r.paper_cost_bytes},
                {"full_cost_bytes", r.full_cost_bytes},
                {"data_retransmissions", r.data_retransmissions},
                {"hash_check_exchanges", r.hash_check_exchanges},
                {"payload_corrections", r.payload_corrections},
                {"header_corrections", r.header_corrections},
                {"timeouts", r.timeouts},
                {"naks", r.naks}};
}

}  // namespace

std::string CampaignReport::to_json() const {
    json rows_json = json::array();
    for (const auto& row : rows) {
        json r = transfer_report_to_json(row.report);
        r["seed"] = row.seed;
        rows_json.push_back(std::move(r));
    }
    json j{{"schema_version", schema_version},
           {"kind", config.baseline ? "simulate-baseline" : "simulate"},
           {"config", config_to_json(config)},
           {"rows", rows_json},
           {"aggregate",
            {{"seeds", rows.size()},
             {"completed_seeds", completed_seeds},
             {"aborted_seeds", aborted_seeds},
             {"mean_paper_cost", mean_paper_cost},
             {"stddev_paper_cost", stddev_paper_cost}}},
           {"analytic",
            {{"cost_per_packet", analytic_cost_per_packet},
             {"total_cost", analytic_total_cost}}},
           {"within_tolerance", within_tolerance}};
    return j.dump(2);
}

std::string CampaignReport::to_csv() const {
    std::ostringstream out;
    out << "seed,delivered_ok,aborted,delivered_bytes,paper_cost_bytes,full_cost_bytes,"
           "data_retransmissions,hash_check_exchanges,payload_corrections,header_corrections,"
           "frames_lost,ticks\n";
    for (const auto& row : rows) {
        const auto& r = row.report;
        out << row.seed << ',' << (r.delivered_ok ? 1 : 0) << ',' << (r.aborted ? 1 : 0) << ','
            << r.delivered_bytes << ',' << r.paper_cost_bytes << ',' << r.full_cost_bytes << ','
            << r.data_retransmissions << ',' << r.hash_check_exchanges << ','
            << r.payload_corrections << ',' << r.header_corrections << ',' << r.frames_lost << ','
            << r.ticks << '\n';
    }
    return out.str();
}

std::string CampaignReport::to_text() const {
    std::ostringstream out;
    char line[160];
    out << (config.baseline ? "Baseline campaign" : "Protocol campaign") << ": "
        << config.transfer_bytes << " bytes, ber " << config.ber << ", loss " << config.loss
        << ", hops " << config.hops << ", " << rows.size() << " seeds\n";
    std::snprintf(line, sizeof(line), "  completed %llu, aborted %llu\n",
                  static_cast<unsigned long long>(completed_seeds),
                  static_cast<unsigned long long>(aborted_seeds));
    out << line;
    std::snprintf(line, sizeof(line),
                  "  mean paper-style cost %.1f B (stddev %.1f), analytic %.1f B -> %s\n",
                  mean_paper_cost, stddev_paper_cost, analytic_total_cost,
                  within_tolerance ? "within tolerance" : "OUTSIDE tolerance");
    out << line;
    return out.str();
}

std::string CampaignReport::render(const std::string& format) const {
    if (format == "json") return to_json();
    if (format == "csv") return to_csv();
    return to_text();
}

// ---------------------------------------------------------------------------
// Analysis
// ---------------------------------------------------------------------------

AnalysisReport analyze(const ScenarioParams& params, double rate_bytes_per_sec) {
    AnalysisReport report;
    report.params = params;
    report.cost = transfer_cost(params);
    report.protocol_payload_proportion = payload_proportion(FrameKind::Data);
    report.baseline_payload_proportion = baseline_payload_proportion();
    report.rate_bytes_per_sec = rate_bytes_per_sec;
    report.xor_ops_per_block = kXorOpsPerPayloadBlock;
    report.xor_ops_per_sec = xor_burden(rate_bytes_per_sec);
    return report;
}

std::string AnalysisReport::to_json() const {
    json j{{"schema_version", schema_version},
           {"kind", "analyze"},
           {"params",
            {{"ber", params.ber},
             {"protocol_frame_bytes", params.protocol_frame_bytes},
             {"protocol_content_bytes", params.protocol_content_bytes},
             {"baseline_frame_bytes", params.baseline_frame_bytes},
             {"baseline_content_bytes", params.baseline_content_bytes},
             {"hash_check_bytes", params.hash_check_bytes},
             {"transfer_bytes", params.transfer_bytes},
             {"round_probabilities", params.round_probabilities},
             {"whole_packets", params.whole_packets}}},
           {"error_probs",
            {{"p0", cost.protocol_probs.p0},
             {"p1", cost.protocol_probs.p1},
             {"p2plus", cost.protocol_probs.p2plus},
             {"baseline_p0", cost.baseline_p0}}},
           {"cost_per_packet",
            {{"protocol", cost.protocol_cost_per_packet},
             {"baseline", cost.baseline_cost_per_packet}}},
           {"total_cost",
            {{"protocol", cost.protocol_total_cost},
             {"baseline", cost.baseline_total_cost},
             {"ratio", cost.cost_ratio}}},
           {"payload_proportion",
            {{"protocol", protocol_payload_proportion},
             {"baseline", baseline_payload_proportion}}},
           {"xor_burden",
            {{"ops_per_block", xor_ops_per_block},
             {"rate_bytes_per_sec", rate_bytes_per_sec},
             {"ops_per_sec", xor_ops_per_sec}}}};
    return j.dump(2);
}

std::string AnalysisReport::to_csv() const {
    std::ostringstream out;
    out << "key,value\n";
    out << "ber," << params.ber << '\n';
    out << "p0," << cost.protocol_probs.p0 << '\n';
    out << "p1," << cost.protocol_probs.p1 << '\n';
    out << "p2plus," << cost.protocol_probs.p2plus << '\n';
    out << "baseline_p0," << cost.baseline_p0 << '\n';
    out << "protocol_cost_per_packet," << cost.protocol_cost_per_packet << '\n';
    out << "baseline_cost_per_packet," << cost.baseline_cost_per_packet << '\n';
    out << "protocol_total_cost," << cost.protocol_total_cost << '\n';
    out << "baseline_total_cost," << cost.baseline_total_cost << '\n';
    out << "cost_ratio," << cost.cost_ratio << '\n';
    out << "protocol_payload_proportion," << protocol_payload_proportion << '\n';
    out << "baseline_payload_proportion," << baseline_payload_proportion << '\n';
    out << "xor_ops_per_block," << xor_ops_per_block << '\n';
    out << "xor_ops_per_sec," << xor_ops_per_sec << '\n';
    return out.str();
}

std::string AnalysisReport::to_text() const {
    std::ostringstream out;
    char line[200];
    std::snprintf(line, sizeof(line),
                  "Scenario: ber %.3g, frame %llu B (%llu bits), baseline frame %llu B\n",
                  params.ber, static_cast<unsigned long long>(params.protocol_frame_bytes),
                  static_cast<unsigned long long>(params.protocol_frame_bytes * 8),
                  static_cast<unsigned long long>(params.baseline_frame_bytes));
    out << line;
    std::snprintf(line, sizeof(line),
                  "Per-frame error probabilities: P0 %.3f  P1 %.3f  P2+ %.3f  (baseline P0 %.3f)\n",
                  cost.protocol_probs.p0, cost.protocol_probs.p1, cost.protocol_probs.p2plus,
                  cost.baseline_p0);
    out << line;
    std::snprintf(line, sizeof(line),
                  "Expected cost per packet: protocol %.1f B, baseline %.1f B\n",
                  cost.protocol_cost_per_packet, cost.baseline_cost_per_packet);
    out << line;
    std::snprintf(line, sizeof(line),
                  "Transfer of %llu B: protocol %.0f B, baseline %.0f B, ratio %.3f (%.1f%%)\n",
                  static_cast<unsigned long long>(params.transfer_bytes),
                  cost.protocol_total_cost, cost.baseline_total_cost, cost.cost_ratio,
                  cost.cost_ratio * 100.0);
    out << line;
    std::snprintf(line, sizeof(line),
                  "Payload proportion: protocol %.1f%%, baseline %.1f%%\n",
                  protocol_payload_proportion * 100.0, baseline_payload_proportion * 100.0);
    out << line;
    std::snprintf(line, sizeof(line),
                  "Syndrome scan: %llu XOR accumulations per payload block; %.4g ops/s at %.0f B/s\n",
                  static_cast<unsigned long long>(xor_ops_per_block), xor_ops_per_sec,
                  rate_bytes_per_sec);
    out << line;
    return out.str();
}

std::string AnalysisReport::render(const std::string& format) const {
    if (format == "json") return to_json();
    if (format == "csv") return to_csv();
    return to_text();
}

// ---------------------------------------------------------------------------
// Framed-file container
// ---------------------------------------------------------------------------

std::vector<std::uint8_t> encode_container(std::span<const std::uint8_t> payload) {
    auto chunks = make_chunks(payload);
    std::uint32_t count = static_cast<std::uint32_t>(chunks.size());
    std::vector<std::uint8_t> out(8);
    out.reserve(8 + chunks.size() * kDataFrameBytes);
    std::copy(kContainerMagic.begin(), kContainerMagic.end(), out.begin());
    out[4] = static_cast<std::uint8_t>(count >> 24);
    out[5] = static_cast<std::uint8_t>(count >> 16);
    out[6] = static_cast<std::uint8_t>(count >> 8);
    out[7] = static_cast<std::uint8_t>(count);

    for (std::size_t i = 0; i < chunks.size(); ++i) {
        L2Header l2;
        l2.dst = node_mac(1);
        l2.src = node_mac(0);
        L3Header l3;
        l3.src_ip = sender_ip();
        l3.dst_ip = receiver_ip(0);
        l3.id = static_cast<std::uint16_t>(i + 1);
        l3.offset = static_cast<std::uint16_t>(i);
        l3.flags = i + 1 < chunks.size() ? kFlagMoreChunks : 0;
        l3.ttl = 64;
        auto wire = build_frame(Frame::data(l2, l3, std::move(chunks[i])));
        out.insert(out.end(), wire.begin(), wire.end());
    }
    return out;
}

ContainerDecode decode_container(std::span<const std::uint8_t> container,
                                 const std::vector<FlipSpec>& flips) {
    if (container.size() < 8 ||
        !std::equal(kContainerMagic.begin(), kContainerMagic.end(), container.begin())) {
        throw ContainerError("not a framed container (bad magic)");
    }
    std::uint32_t count = (static_cast<std::uint32_t>(container[4]) << 24) |
                          (static_cast<std::uint32_t>(container[5]) << 16) |
                          (static_cast<std::uint32_t>(container[6]) << 8) |
                          static_cast<std::uint32_t>(container[7]);
    if (container.size() != 8 + static_cast<std::size_t>(count) * kDataFrameBytes) {
        throw ContainerError("truncated container: expected " + std::to_string(count) +
                             " frames of " + std::to_string(kDataFrameBytes) + " bytes");
    }

    std::vector<std::vector<std::uint8_t>> wires(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        auto frame = container.subspan(8 + static_cast<std::size_t>(i) * kDataFrameBytes,
                                       kDataFrameBytes);
        wires[i].assign(frame.begin(), frame.end());
    }
    for (const FlipSpec& flip : flips) {
        if (flip.frame_index >= wires.size() || flip.bit >= kDataFrameBytes * 8) {
            throw ContainerError("flip out of bounds: frame " + std::to_string(flip.frame_index) +
                                 " bit " + std::to_string(flip.bit));
        }
        wires[flip.frame_index][flip.bit >> 3] ^=
            static_cast<std::uint8_t>(1u << (7 - (flip.bit & 7)));
    }

    ContainerDecode result;
    std::vector<std::vector<std::uint8_t>> chunks;
    chunks.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        ContainerDecode::FrameReport fr;
        fr.index = i;
        try {
            ParsedFrame parsed = parse_frame(wires[i]);
            fr.outcomes = parsed.outcomes;
            fr.uncorrectable = parsed.any_uncorrectable();
            if (parsed.frame.kind() != FrameKind::Data) {
                fr.uncorrectable = true;
            } else {
                chunks.push_back(std::move(parsed.frame.content));
            }
        } catch (const FrameError&) {
            fr.uncorrectable = true;
        }
        result.any_uncorrectable |= fr.uncorrectable;
        result.frames.push_back(std::move(fr));
    }
    if (!result.any_uncorrectable) {
        try {
            result.payload = reassemble_chunks(chunks);
        } catch (const std::invalid_argument& e) {
            throw ContainerError(std::string("inconsistent chunk set: ") + e.what());
        }
    }
    return result;
}

std::string trace_event_json(const TraceEvent& event) {
    json j{{"tick", event.tick}, {"node", event.node}, {"event", event.event}};
    if (!event.kind.empty()) {
        j["kind"] = event.kind;
    }
    if (event.id >= 0) {
        j["id"] = event.id;
    }
    if (!event.detail.empty()) {
        j["detail"] = event.detail;
    }
    return j.dump();
}

}  // namespace hamlink
