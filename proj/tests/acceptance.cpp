// Acceptance suite: one line per criterion, nonzero exit when any fails.
// Run through ctest (test name "acceptance") or directly from the build dir.

#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "hamlink/channel.hpp"
#include "hamlink/engine.hpp"
#include "hamlink/frame.hpp"
#include "hamlink/hamming.hpp"
#include "hamlink/harness.hpp"
#include "hamlink/model.hpp"

using namespace hamlink;

namespace {

int g_failures = 0;

struct Criterion {
    std::string name;
    std::vector<std::string> problems;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            problems.push_back(what);
        }
    }
    void finish() const {
        if (problems.empty()) {
            std::printf("[PASS] %s%s%s\n", name.c_str(), detail.empty() ? "" : " — ",
                        detail.c_str());
        } else {
            ++g_failures;
            std::printf("[FAIL] %s\n", name.c_str());
            for (const auto& p : problems) {
                std::printf("       %s\n", p.c_str());
            }
        }
        std::fflush(stdout);
    }
};

std::string fmt(const char* format, ...) {
    char buf[256];
    va_list args;
    va_start(args, format);
    std::vsnprintf(buf, sizeof(buf), format, args);
    va_end(args);
    return buf;
}

bool within(double value, double target, double tol) {
    return std::abs(value - target) <= tol;
}

BitBuffer random_bits(std::size_t n, std::mt19937_64& rng) {
    BitBuffer bits(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (rng() & 1) {
            bits.set(i, true);
        }
    }
    return bits;
}

std::vector<std::uint8_t> random_bytes(std::size_t n, std::mt19937_64& rng) {
    std::vector<std::uint8_t> out(n);
    for (auto& b : out) {
        b = static_cast<std::uint8_t>(rng());
    }
    return out;
}

// --------------------------------------------------------------------------

void criterion1_analytic_probabilities() {
    Criterion c{"criterion 1: per-frame error probabilities", {}, {}};
    ErrorProbs p = error_probs(33088, 1e-5);
    c.require(within(p.p0, 0.718, 0.0005), fmt("p0 = %.6f not within 0.718±0.0005", p.p0));
    c.require(within(p.p1, 0.238, 0.0005), fmt("p1 = %.6f not within 0.238±0.0005", p.p1));
    c.require(within(p.p2plus, 0.044, 0.0005),
              fmt("p2plus = %.6f not within 0.044±0.0005", p.p2plus));
    c.detail = fmt("p0 %.4f, p1 %.4f, p2+ %.4f", p.p0, p.p1, p.p2plus);
    c.finish();
}

void criterion2_analytic_costs() {
    Criterion c{"criterion 2: expected costs and totals", {}, {}};
    ScenarioParams params;
    CostReport report = transfer_cost(params);
    c.require(within(report.protocol_cost_per_packet, 191.5, 0.05),
              fmt("protocol per-packet %.3f not within 191.5±0.05", report.protocol_cost_per_packet));
    c.require(within(report.baseline_cost_per_packet, 198.3, 0.1),
              fmt("baseline per-packet %.3f not within 198.3±0.1", report.baseline_cost_per_packet));
    c.require(within(report.protocol_total_cost, 49049.0, 50.0),
              fmt("protocol total %.1f not within 49049±50", report.protocol_total_cost));
    c.require(within(report.baseline_total_cost, 140491.0, 150.0),
              fmt("baseline total %.1f not within 140491±150", report.baseline_total_cost));
    c.require(within(report.cost_ratio, 0.349, 0.005),
              fmt("ratio %.4f not within 0.349±0.005", report.cost_ratio));
    c.detail = fmt("%.1f vs %.1f B/packet, %.0f vs %.0f B/MiB, ratio %.3f",
                   report.protocol_cost_per_packet, report.baseline_cost_per_packet,
                   report.protocol_total_cost, report.baseline_total_cost, report.cost_ratio);
    c.finish();
}

void criterion3_payload_proportions() {
    Criterion c{"criterion 3: payload proportions", {}, {}};
    double protocol_pct = std::round(payload_proportion(FrameKind::Data) * 1000.0) / 10.0;
    double baseline_pct = std::round(baseline_payload_proportion() * 1000.0) / 10.0;
    c.require(protocol_pct == 99.0, fmt("protocol proportion %.1f%% != 99.0%%", protocol_pct));
    c.require(baseline_pct == 97.0, fmt("baseline proportion %.1f%% != 97.0%%", baseline_pct));
    c.detail = fmt("%.1f%% vs %.1f%%", protocol_pct, baseline_pct);
    c.finish();
}

void criterion4_xor_burden() {
    Criterion c{"criterion 4: XOR burden", {}, {}};
    CodeBlock block = CodeBlock::zero(BlockOrder::of(15));
    std::uint64_t per_block = syndrome(block).counter.xor_accumulations;
    c.require(per_block == 491520, fmt("per-block scan reports %llu != 491520",
                                       static_cast<unsigned long long>(per_block)));
    double burden = xor_burden(1048576.0);
    c.require(burden == 251658240.0, fmt("burden %.0f != 251658240", burden));
    c.detail = fmt("%llu ops/block, %.4g ops/s",
                   static_cast<unsigned long long>(per_block), burden);
    c.finish();
}

void criterion5_codec_exhaustive() {
    Criterion c{"criterion 5: codec single/double error behavior", {}, {}};
    std::mt19937_64 rng(501);
    const BlockOrder r7 = BlockOrder::of(7);
    const BlockOrder r15 = BlockOrder::of(15);

    std::uint64_t singles = 0;
    for (int w = 0; w < 100 && c.problems.size() < 5; ++w) {
        CodeBlock codeword = encode(random_bits(r7.data_bits(), rng), r7);
        for (std::uint32_t pos = 0; pos < 128; ++pos) {
            CodeBlock damaged = codeword;
            damaged.bits.flip(pos);
            auto result = decode(damaged);
            if (result.outcome.kind != DecodeKind::Corrected ||
                result.outcome.position != pos || !(result.repaired.bits == codeword.bits)) {
                c.require(false, fmt("r7 flip at %u not corrected to the original", pos));
                break;
            }
            ++singles;
        }
    }

    CodeBlock pair_word = encode(random_bits(r7.data_bits(), rng), r7);
    std::uint64_t pairs = 0;
    for (std::uint32_t a = 0; a < 128 && c.problems.size() < 5; ++a) {
        for (std::uint32_t b = a + 1; b < 128; ++b) {
            CodeBlock damaged = pair_word;
            damaged.bits.flip(a);
            damaged.bits.flip(b);
            if (decode(damaged).outcome.kind != DecodeKind::Uncorrectable) {
                c.require(false, fmt("r7 double flip (%u, %u) not flagged", a, b));
                break;
            }
            ++pairs;
        }
    }
    c.require(pairs == 8128 || !c.problems.empty(),
              fmt("expected 8128 double-flip pairs, ran %llu",
                  static_cast<unsigned long long>(pairs)));

    CodeBlock medium = encode(random_bits(r15.data_bits(), rng), r15);
    for (int i = 0; i < 10000 && c.problems.size() < 5; ++i) {
        std::uint32_t pos = static_cast<std::uint32_t>(rng() % 32768);
        CodeBlock damaged = medium;
        damaged.bits.flip(pos);
        auto result = decode(damaged);
        if (result.outcome.kind != DecodeKind::Corrected || result.outcome.position != pos ||
            !(result.repaired.bits == medium.bits)) {
            c.require(false, fmt("r15 flip at %u not corrected", pos));
        }
    }
    for (int i = 0; i < 10000 && c.problems.size() < 5; ++i) {
        std::uint32_t a = static_cast<std::uint32_t>(rng() % 32768);
        std::uint32_t b;
        do {
            b = static_cast<std::uint32_t>(rng() % 32768);
        } while (b == a);
        CodeBlock damaged = medium;
        damaged.bits.flip(a);
        damaged.bits.flip(b);
        if (decode(damaged).outcome.kind != DecodeKind::Uncorrectable) {
            c.require(false, fmt("r15 double flip (%u, %u) not flagged", a, b));
        }
    }
    c.detail = fmt("12800 r7 singles, 8128 r7 pairs, 10^4 r15 singles + 10^4 pairs");
    c.finish();
}

void criterion6_frame_round_trip() {
    Criterion c{"criterion 6: frame round trip with flip recovery", {}, {}};
    std::mt19937_64 rng(601);
    for (int t = 0; t < 1000 && c.problems.size() < 5; ++t) {
        L2Header l2;
        for (auto& o : l2.dst.octets) o = static_cast<std::uint8_t>(rng());
        for (auto& o : l2.src.octets) o = static_cast<std::uint8_t>(rng());
        L3Header l3;
        for (auto& o : l3.src_ip.octets) o = static_cast<std::uint8_t>(rng());
        for (auto& o : l3.dst_ip.octets) o = static_cast<std::uint8_t>(rng());
        l3.id = static_cast<std::uint16_t>(rng());
        l3.flags = static_cast<std::uint8_t>(rng() & 0x7);
        l3.offset = static_cast<std::uint16_t>(rng() & 0x1FFF);
        l3.ttl = static_cast<std::uint8_t>(rng());
        l3.err_pos = static_cast<std::uint16_t>(rng() % 32769);
        Frame frame = Frame::data(l2, l3, random_bytes(kContentBytes, rng));

        auto wire = build_frame(frame);
        auto parsed = parse_frame(wire);
        if (!parsed.all_clean() || !(parsed.frame.l2 == frame.l2) ||
            !(parsed.frame.l3 == frame.l3) || parsed.frame.content != frame.content ||
            build_frame(parsed.frame) != wire) {
            c.require(false, fmt("round trip mismatch at trial %d", t));
            continue;
        }

        // one flip anywhere within the three coded blocks
        std::uint64_t bit = 8 * 8 + rng() % ((kDataFrameBytes - 8) * 8);
        auto damaged = wire;
        damaged[bit >> 3] ^= static_cast<std::uint8_t>(1u << (7 - (bit & 7)));
        auto repaired = parse_frame(damaged);
        if (repaired.any_uncorrectable() || !(repaired.frame.l2 == frame.l2) ||
            !(repaired.frame.l3 == frame.l3) || repaired.frame.content != frame.content) {
            c.require(false, fmt("flip at wire bit %llu not recovered at trial %d",
                                 static_cast<unsigned long long>(bit), t));
        }
    }
    c.detail = "1000 random DATA frames, bit-exact, single-flip recovery";
    c.finish();
}

void criterion7_monte_carlo_vs_analytic() {
    Criterion c{"criterion 7: Monte Carlo campaign vs analytic model", {}, {}};

    ExperimentConfig cfg;
    cfg.ber = 1e-5;
    cfg.loss = 0.0;
    cfg.transfer_bytes = 1048576;
    cfg.hops = 1;
    cfg.max_retries = 64;
    cfg.seeds.resize(64);
    for (std::size_t i = 0; i < 64; ++i) {
        cfg.seeds[i] = i + 1;
    }
    CampaignReport campaign = run_campaign(cfg);
    c.require(campaign.completed_seeds == 64,
              fmt("%llu of 64 seeds completed",
                  static_cast<unsigned long long>(campaign.completed_seeds)));
    double target = 49049.0;
    c.require(std::abs(campaign.mean_paper_cost - target) <= 0.10 * target,
              fmt("mean paper-style cost %.1f not within 10%% of 49049",
                  campaign.mean_paper_cost));

    const std::uint64_t n = 1000000;
    auto stats = error_count_histogram(n, 33088, ChannelConfig{1e-5, 0.0, 7001});
    double lambda = 0.33088;
    double nn = static_cast<double>(n);
    for (unsigned k = 0; k <= 1; ++k) {
        double pmf = std::exp(-lambda) * (k == 0 ? 1.0 : lambda);
        double f = stats.histogram.size() > k
                       ? static_cast<double>(stats.histogram[k]) / nn
                       : 0.0;
        double se = std::sqrt(pmf * (1.0 - pmf) / nn);
        c.require(std::abs(f - pmf) <= 3.0 * se,
                  fmt("histogram at k=%u: %.5f vs Poisson %.5f (3se = %.5f)", k, f, pmf,
                      3.0 * se));
    }
    c.detail = fmt("mean cost %.0f B (analytic %.0f), histogram within 3se",
                   campaign.mean_paper_cost, campaign.analytic_total_cost);
    c.finish();
}

void criterion8_delivery_integrity() {
    Criterion c{"criterion 8: delivery integrity sweep", {}, {}};
    const std::uint64_t bytes = 65536;
    auto payload = synth_payload(bytes);
    int runs = 0;
    int delivered = 0;
    int aborted = 0;
    std::uint64_t seed = 0;
    for (double ber : {1e-5, 1e-4, 1e-3}) {
        for (double loss : {0.0, 0.1}) {
            for (int i = 0; i < 17 && runs < 100; ++i) {
                ++runs;
                ++seed;
                EngineParams params;
                params.max_retries = 64;
                std::vector<ChannelConfig> links{{ber, loss, seed * 2 + 1},
                                                 {0.0, loss, seed * 2 + 2}};
                TransferReport report = run_transfer(payload, 1, links, params);
                if (report.delivered_ok) {
                    ++delivered;
                } else if (report.aborted && report.delivered_bytes == 0) {
                    ++aborted;
                } else {
                    c.require(false,
                              fmt("ber %.0e loss %.2f seed %llu: corrupted or partial delivery "
                                  "(ok=%d aborted=%d bytes=%llu)",
                                  ber, loss, static_cast<unsigned long long>(seed),
                                  report.delivered_ok ? 1 : 0, report.aborted ? 1 : 0,
                                  static_cast<unsigned long long>(report.delivered_bytes)));
                }
            }
        }
    }

    // injected 3-bit alias: relay mis-corrects, the digest exchange catches it
    {
        std::mt19937_64 rng(808);
        auto small = random_bytes(3000, rng);
        SenderConfig scfg;
        scfg.self_mac = node_mac(0);
        scfg.next_mac = node_mac(1);
        scfg.src_ip = sender_ip();
        scfg.dst_ip = receiver_ip(1);
        SenderMachine tx(small, scfg);
        auto first = tx.on_event(SenderEvent::make_tick(0));
        auto wire = build_frame(first[0]);
        for (std::uint32_t bit : {1u, 2u, 4u}) {  // xor = 7, aliases to position 7
            wire[40 + (bit >> 3)] ^= static_cast<std::uint8_t>(1u << (7 - (bit & 7)));
        }
        RelayMachine relay(node_mac(1), node_mac(0), node_mac(2));
        auto relayed = relay.process(wire, true);
        c.require(relayed.kind == RelayMachine::Action::Kind::Forward &&
                      relayed.payload_correction.has_value(),
                  "alias injection: relay did not mis-correct as expected");
        if (relayed.kind == RelayMachine::Action::Kind::Forward) {
            ReceiverConfig rcfg;
            rcfg.self_mac = node_mac(2);
            rcfg.prev_mac = node_mac(1);
            ReceiverMachine rx(rcfg);
            auto action = rx.on_frame(parse_frame(build_frame(*relayed.forward)));
            c.require(action.kind == ReceiverMachine::Action::Kind::HashCheck,
                      "alias injection: receiver did not request a digest check");
            if (action.kind == ReceiverMachine::Action::Kind::HashCheck) {
                auto verdict = tx.on_event(
                    SenderEvent::make_hash_check(1, action.frames[0].hash->digest));
                c.require(verdict.size() == 2 && verdict[0].kind() == FrameKind::HashFail &&
                              verdict[1].kind() == FrameKind::Data,
                          "alias injection: sender did not fail the digest and retransmit");
            }
        }
    }

    c.detail = fmt("%d runs: %d delivered byte-identical, %d aborted cleanly; alias caught",
                   runs, delivered, aborted);
    c.finish();
}

}  // namespace

int main() {
    criterion1_analytic_probabilities();
    criterion2_analytic_costs();
    criterion3_payload_proportions();
    criterion4_xor_burden();
    criterion5_codec_exhaustive();
    criterion6_frame_round_trip();
    criterion7_monte_carlo_vs_analytic();
    criterion8_delivery_integrity();
    if (g_failures == 0) {
        std::printf("all 8 acceptance criteria passed\n");
    } else {
        std::printf("%d acceptance criteria FAILED\n", g_failures);
    }
    return g_failures;
}
