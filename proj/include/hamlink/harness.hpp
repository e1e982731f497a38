#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hamlink/engine.hpp"
#include "hamlink/model.hpp"

namespace hamlink {

// ---------------------------------------------------------------------------
// Experiment configuration: one struct mirrors the CLI flags and the JSON
// config file; flags override file values.
// ---------------------------------------------------------------------------

struct ExperimentConfig {
    double ber = 1e-5;
    double loss = 0.0;
    std::uint64_t transfer_bytes = 1048576;
    int hops = 1;
    std::vector<std::uint64_t> seeds;  // empty = 1..64
    int max_retries = 16;
    int timeout_ticks_per_hop = 8;
    std::uint8_t initial_ttl = 64;
    bool baseline = false;
    // By default only the first link is lossy (the degraded leg the model
    // describes); set to apply ber/loss on every hop instead.
    bool ber_all_hops = false;
    double rate_bytes_per_sec = 1048576.0;
    std::string format = "text";  // text | json | csv
    std::string out;              // output path; empty = stdout
    std::string trace_path;       // JSONL event trace; empty = off
    double agreement_tolerance = 0.10;

    void normalize();  // fills default seeds, validates ranges
    std::vector<ChannelConfig> link_configs(std::uint64_t seed) const;
    ScenarioParams scenario() const;
};

// Parses a JSON config file / string into `cfg`, touching only present keys.
void apply_config_json(ExperimentConfig& cfg, const std::string& json_text);
ExperimentConfig load_config_file(const std::string& path);

// ---------------------------------------------------------------------------
// Campaigns
// ---------------------------------------------------------------------------

struct SeedOutcome {
    std::uint64_t seed = 0;
    TransferReport report;
};

struct CampaignReport {
    int schema_version = 1;
    ExperimentConfig config;
    std::vector<SeedOutcome> rows;

    std::uint64_t completed_seeds = 0;
    std::uint64_t aborted_seeds = 0;
    // Aggregates over completed (non-aborted) seeds.
    double mean_paper_cost = 0.0;
    double stddev_paper_cost = 0.0;
    double analytic_cost_per_packet = 0.0;
    double analytic_total_cost = 0.0;
    bool within_tolerance = false;

    std::string render(const std::string& format) const;
    std::string to_json() const;
    std::string to_csv() const;
    std::string to_text() const;
};

CampaignReport run_campaign(const ExperimentConfig& cfg);

// One conventional discard-on-error transfer: whole frames are retransmitted
// until they arrive with zero errors. Only the cost fields of the report are
// meaningful.
TransferReport run_baseline_transfer(std::uint64_t transfer_bytes, const ChannelConfig& cfg,
                                     int max_retries);

// Deterministic pseudorandom payload shared by campaigns and tools.
std::vector<std::uint8_t> synth_payload(std::uint64_t bytes, std::uint64_t seed = 1);

// ---------------------------------------------------------------------------
// Analysis report (closed-form numbers + frame facts)
// ---------------------------------------------------------------------------

struct AnalysisReport {
    int schema_version = 1;
    ScenarioParams params;
    CostReport cost;
    double protocol_payload_proportion = 0.0;
    double baseline_payload_proportion = 0.0;
    double rate_bytes_per_sec = 0.0;
    std::uint64_t xor_ops_per_block = 0;
    double xor_ops_per_sec = 0.0;

    std::string render(const std::string& format) const;
    std::string to_json() const;
    std::string to_csv() const;
    std::string to_text() const;
};

AnalysisReport analyze(const ScenarioParams& params, double rate_bytes_per_sec);

// ---------------------------------------------------------------------------
// Framed-file container: magic, big-endian frame count, then the DATA frames
// of the chunked payload, each 4136 bytes.
// ---------------------------------------------------------------------------

inline constexpr std::array<std::uint8_t, 4> kContainerMagic = {'H', 'L', 'F', '1'};

class ContainerError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::vector<std::uint8_t> encode_container(std::span<const std::uint8_t> payload);

struct FlipSpec {
    std::size_t frame_index = 0;
    std::uint64_t bit = 0;  // bit offset within the frame's wire bytes
};

struct ContainerDecode {
    std::vector<std::uint8_t> payload;
    struct FrameReport {
        std::size_t index = 0;
        std::vector<DecodeOutcome> outcomes;
        bool uncorrectable = false;
    };
    std::vector<FrameReport> frames;
    bool any_uncorrectable = false;
};

// Throws ContainerError on structural problems (bad magic, truncation, flip
// out of bounds). Uncorrectable frames are reported, not thrown.
ContainerDecode decode_container(std::span<const std::uint8_t> container,
                                 const std::vector<FlipSpec>& flips = {});

// One JSONL line (no trailing newline) for a trace event.
std::string trace_event_json(const TraceEvent& event);

}  // namespace hamlink
