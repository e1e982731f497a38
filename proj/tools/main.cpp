// hamlink: analyze / simulate / encode / decode / trace front-end for the
// self-correcting frame protocol.
//
// Exit codes: 0 success, 2 usage or configuration error, 3 uncorrectable
// data while decoding, 4 transfer aborted (trace) or no seed completed
// (simulate).

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hamlink/harness.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitUncorrectable = 3;
constexpr int kExitAborted = 4;

std::vector<std::uint8_t> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::invalid_argument("cannot open " + path);
    }
    std::vector<std::uint8_t> data((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
    return data;
}

void write_file(const std::string& path, std::span<const std::uint8_t> data) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::invalid_argument("cannot open " + path + " for writing");
    }
    out.write(reinterpret_cast<const char*>(data.data()),
              static_cast<std::streamsize>(data.size()));
}

void write_report(const std::string& out_path, const std::string& text) {
    if (out_path.empty()) {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') {
            std::cout << '\n';
        }
        return;
    }
    std::ofstream out(out_path);
    if (!out) {
        throw std::invalid_argument("cannot open " + out_path + " for writing");
    }
    out << text;
}

hamlink::FlipSpec parse_flip(const std::string& spec) {
    auto colon = spec.find(':');
    if (colon == std::string::npos) {
        throw std::invalid_argument("--flip expects FRAME:BIT, got '" + spec + "'");
    }
    hamlink::FlipSpec flip;
    flip.frame_index = std::stoull(spec.substr(0, colon));
    flip.bit = std::stoull(spec.substr(colon + 1));
    return flip;
}

std::vector<std::uint64_t> parse_seed_list(const std::string& text) {
    std::vector<std::uint64_t> seeds;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) {
            seeds.push_back(std::stoull(item));
        }
    }
    if (seeds.empty()) {
        throw std::invalid_argument("--seeds expects a comma-separated list");
    }
    return seeds;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Self-correcting frame protocol toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    app.add_option("--config", config_path,
                   "JSON config file (default: $HAMLINK_CONFIG when set)");

    // Shared experiment flags; only flags the user passes override the
    // config file.
    double ber = 1e-5;
    double loss = 0.0;
    std::uint64_t bytes = 1048576;
    int hops = 1;
    std::string seeds_text;
    std::uint64_t single_seed = 1;
    int max_retries = 16;
    int timeout_ticks = 8;
    unsigned ttl = 64;
    bool baseline = false;
    bool ber_all_hops = false;
    double rate = 1048576.0;
    double tolerance = 0.10;
    std::string format = "text";
    std::string out_path;
    std::string trace_path;

    auto add_common = [&](CLI::App* cmd, bool with_channel) {
        cmd->add_option("--format", format, "Report format: text, json or csv");
        cmd->add_option("--out", out_path, "Write the report to this path instead of stdout");
        if (with_channel) {
            cmd->add_option("--ber", ber, "Bit error probability per transmitted bit");
            cmd->add_option("--loss", loss, "Frame loss probability");
            cmd->add_option("--bytes", bytes, "Transfer size in bytes");
        }
    };

    CLI::App* analyze_cmd = app.add_subcommand("analyze", "Closed-form cost model report");
    bool exact_probs = false;
    bool whole_packets = false;
    add_common(analyze_cmd, true);
    analyze_cmd->add_option("--rate", rate, "Line rate in bytes/s for the XOR burden figure");
    analyze_cmd->add_flag("--exact", exact_probs,
                          "Use full-precision probabilities in the cost arithmetic");
    analyze_cmd->add_flag("--whole-packets", whole_packets,
                          "Bill whole packets instead of fractional counts");

    CLI::App* simulate_cmd = app.add_subcommand("simulate", "Seeded Monte Carlo campaign");
    add_common(simulate_cmd, true);
    simulate_cmd->add_option("--hops", hops, "Number of relays between sender and receiver");
    simulate_cmd->add_option("--seeds", seeds_text, "Comma-separated seed list (default 1..64)");
    simulate_cmd->add_option("--max-retries", max_retries, "Retries before aborting a packet");
    simulate_cmd->add_option("--timeout", timeout_ticks, "Timeout ticks per hop round-trip");
    simulate_cmd->add_option("--ttl", ttl, "Initial TTL on DATA frames");
    simulate_cmd->add_flag("--baseline", baseline, "Simulate the discard-on-error baseline");
    simulate_cmd->add_flag("--ber-all-hops", ber_all_hops,
                           "Apply ber/loss on every hop, not just the first");
    simulate_cmd->add_option("--tolerance", tolerance,
                             "Relative tolerance for the analytic comparison");
    simulate_cmd->add_option("--trace", trace_path, "Write a JSONL event trace to this path");

    CLI::App* encode_cmd = app.add_subcommand("encode", "Shard a file into a framed container");
    std::string encode_in;
    encode_cmd->add_option("input", encode_in, "File to encode")->required();
    encode_cmd->add_option("--out", out_path, "Container output path")->required();

    CLI::App* decode_cmd = app.add_subcommand("decode", "Decode a framed container back to a file");
    std::string decode_in;
    std::vector<std::string> flip_specs;
    decode_cmd->add_option("input", decode_in, "Container to decode")->required();
    decode_cmd->add_option("--out", out_path, "Decoded output path")->required();
    decode_cmd->add_option("--flip", flip_specs,
                           "Inject a bit flip before decoding, as FRAME:BIT (repeatable)");

    CLI::App* trace_cmd = app.add_subcommand("trace", "Run one seeded transfer, emit a JSONL trace");
    add_common(trace_cmd, true);
    trace_cmd->add_option("--hops", hops, "Number of relays between sender and receiver");
    trace_cmd->add_option("--seed", single_seed, "Seed for the transfer");
    trace_cmd->add_option("--max-retries", max_retries, "Retries before aborting a packet");
    trace_cmd->add_option("--timeout", timeout_ticks, "Timeout ticks per hop round-trip");
    trace_cmd->add_option("--ttl", ttl, "Initial TTL on DATA frames");
    trace_cmd->add_flag("--ber-all-hops", ber_all_hops,
                        "Apply ber/loss on every hop, not just the first");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        hamlink::ExperimentConfig cfg;
        if (config_path.empty()) {
            if (const char* env = std::getenv("HAMLINK_CONFIG"); env != nullptr && *env != '\0') {
                config_path = env;
            }
        }
        if (!config_path.empty()) {
            cfg = hamlink::load_config_file(config_path);
        }

        auto passed = [&](CLI::App* cmd, const std::string& flag) {
            return cmd->count(flag) > 0;
        };
        auto apply_common = [&](CLI::App* cmd) {
            if (passed(cmd, "--ber")) cfg.ber = ber;
            if (passed(cmd, "--loss")) cfg.loss = loss;
            if (passed(cmd, "--bytes")) cfg.transfer_bytes = bytes;
            if (passed(cmd, "--format")) cfg.format = format;
            if (passed(cmd, "--out")) cfg.out = out_path;
        };

        if (app.got_subcommand(analyze_cmd)) {
            apply_common(analyze_cmd);
            if (passed(analyze_cmd, "--rate")) cfg.rate_bytes_per_sec = rate;
            cfg.normalize();
            hamlink::ScenarioParams params = cfg.scenario();
            params.round_probabilities = !exact_probs;
            params.whole_packets = whole_packets;
            auto report = hamlink::analyze(params, cfg.rate_bytes_per_sec);
            write_report(cfg.out, report.render(cfg.format));
            return kExitOk;
        }

        if (app.got_subcommand(simulate_cmd)) {
            apply_common(simulate_cmd);
            if (passed(simulate_cmd, "--hops")) cfg.hops = hops;
            if (passed(simulate_cmd, "--seeds")) cfg.seeds = parse_seed_list(seeds_text);
            if (passed(simulate_cmd, "--max-retries")) cfg.max_retries = max_retries;
            if (passed(simulate_cmd, "--timeout")) cfg.timeout_ticks_per_hop = timeout_ticks;
            if (passed(simulate_cmd, "--ttl")) cfg.initial_ttl = static_cast<std::uint8_t>(ttl);
            if (passed(simulate_cmd, "--baseline")) cfg.baseline = baseline;
            if (passed(simulate_cmd, "--ber-all-hops")) cfg.ber_all_hops = ber_all_hops;
            if (passed(simulate_cmd, "--tolerance")) cfg.agreement_tolerance = tolerance;
            if (passed(simulate_cmd, "--trace")) cfg.trace_path = trace_path;
            cfg.normalize();
            auto campaign = hamlink::run_campaign(cfg);
            write_report(cfg.out, campaign.render(cfg.format));
            if (campaign.completed_seeds == 0) {
                std::cerr << "simulate: no seed completed (all transfers aborted)\n";
                return kExitAborted;
            }
            return kExitOk;
        }

        if (app.got_subcommand(encode_cmd)) {
            auto payload = read_file(encode_in);
            auto container = hamlink::encode_container(payload);
            write_file(out_path, container);
            std::cerr << "encoded " << payload.size() << " bytes into "
                      << (container.size() - 8) / hamlink::kDataFrameBytes << " frames ("
                      << container.size() << " bytes)\n";
            return kExitOk;
        }

        if (app.got_subcommand(decode_cmd)) {
            std::vector<hamlink::FlipSpec> flips;
            flips.reserve(flip_specs.size());
            for (const auto& spec : flip_specs) {
                flips.push_back(parse_flip(spec));
            }
            auto container = read_file(decode_in);
            auto result = hamlink::decode_container(container, flips);
            for (const auto& fr : result.frames) {
                for (std::size_t b = 0; b < fr.outcomes.size(); ++b) {
                    const auto& o = fr.outcomes[b];
                    if (o.kind != hamlink::DecodeKind::Clean) {
                        std::cerr << "frame " << fr.index << " block " << b << ": "
                                  << hamlink::to_string(o.kind);
                        if (o.position.has_value()) {
                            std::cerr << " at bit " << *o.position;
                        }
                        std::cerr << '\n';
                    }
                }
            }
            if (result.any_uncorrectable) {
                for (const auto& fr : result.frames) {
                    if (fr.uncorrectable) {
                        std::cerr << "decode: frame " << fr.index << " is uncorrectable\n";
                    }
                }
                return kExitUncorrectable;
            }
            write_file(out_path, result.payload);
            std::cerr << "decoded " << result.payload.size() << " bytes from "
                      << result.frames.size() << " frames\n";
            return kExitOk;
        }

        if (app.got_subcommand(trace_cmd)) {
            apply_common(trace_cmd);
            if (passed(trace_cmd, "--hops")) cfg.hops = hops;
            if (passed(trace_cmd, "--max-retries")) cfg.max_retries = max_retries;
            if (passed(trace_cmd, "--timeout")) cfg.timeout_ticks_per_hop = timeout_ticks;
            if (passed(trace_cmd, "--ttl")) cfg.initial_ttl = static_cast<std::uint8_t>(ttl);
            if (passed(trace_cmd, "--ber-all-hops")) cfg.ber_all_hops = ber_all_hops;
            cfg.seeds = {single_seed};
            cfg.normalize();

            std::ofstream trace_file;
            std::ostream* sink = &std::cout;
            if (!cfg.out.empty()) {
                trace_file.open(cfg.out);
                if (!trace_file) {
                    throw std::invalid_argument("cannot open " + cfg.out + " for writing");
                }
                sink = &trace_file;
            }
            hamlink::EngineParams params;
            params.timeout_ticks_per_hop = cfg.timeout_ticks_per_hop;
            params.max_retries = cfg.max_retries;
            params.initial_ttl = cfg.initial_ttl;
            params.trace = [&](const hamlink::TraceEvent& ev) {
                *sink << hamlink::trace_event_json(ev) << '\n';
            };
            auto payload = hamlink::synth_payload(cfg.transfer_bytes);
            auto report = hamlink::run_transfer(payload, cfg.hops,
                                                cfg.link_configs(single_seed), params);
            std::cerr << "transfer " << (report.delivered_ok ? "delivered" : "failed") << ": "
                      << report.delivered_bytes << " bytes, paper-style cost "
                      << report.paper_cost_bytes << " B, " << report.ticks << " ticks\n";
            return report.aborted ? kExitAborted : kExitOk;
        }
    } catch (const hamlink::ContainerError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUncorrectable;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}
