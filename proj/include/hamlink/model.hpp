#pragma once

#include <cstdint>

namespace hamlink {

// Closed-form cost model for the self-correcting protocol against the
// conventional discard-on-error baseline, over a link with i.i.d. bit-error
// probability `ber`. Error counts per frame are modeled as Poisson(ber * L).
struct ScenarioParams {
    double ber = 1e-5;
    std::uint64_t protocol_frame_bytes = 4136;
    std::uint64_t protocol_content_bytes = 4094;
    std::uint64_t baseline_frame_bytes = 1526;
    std::uint64_t baseline_content_bytes = 1480;
    std::uint64_t hash_check_bytes = 40;
    std::uint64_t transfer_bytes = 1048576;

    // Probabilities are rounded to three decimals before entering the cost
    // arithmetic (the published figures are computed that way); switch off
    // for full-precision results.
    bool round_probabilities = true;
    // Bill whole packets instead of the fractional packet counts the
    // reference arithmetic uses.
    bool whole_packets = false;

    void validate() const;
};

struct ErrorProbs {
    double p0 = 0.0;      // no error in the frame
    double p1 = 0.0;      // exactly one error (self-correctable)
    double p2plus = 0.0;  // two or more errors
};

// Poisson(ber * frame_bits) probabilities at k = 0, 1, >= 2.
ErrorProbs error_probs(std::uint64_t frame_bits, double ber);

// Expected retransmission-overhead bytes per protocol packet: a single error
// costs one 40-byte digest exchange, two or more cost a full-frame
// retransmission (re-errors on the retransmitted copy are neglected).
double expected_cost_protocol(const ScenarioParams& params);

// Expected overhead per baseline packet: any detected error discards the
// frame, and retransmissions themselves re-fail, giving the geometric series
// p_err * L / (1 - p_err).
double expected_cost_baseline(const ScenarioParams& params);

struct CostReport {
    ErrorProbs protocol_probs;        // full precision
    double baseline_p0 = 0.0;
    double protocol_cost_per_packet = 0.0;
    double baseline_cost_per_packet = 0.0;
    double protocol_packets = 0.0;    // fractional unless whole_packets
    double baseline_packets = 0.0;
    double protocol_total_cost = 0.0;
    double baseline_total_cost = 0.0;
    double cost_ratio = 0.0;          // protocol total / baseline total
};

CostReport transfer_cost(const ScenarioParams& params);

// XOR accumulations per second spent scanning payload blocks at the given
// line rate: 15 * 32768 per block, one block per 4096 wire bytes, doubled
// for the receive and send passes. Rejects rate <= 0.
double xor_burden(double rate_bytes_per_sec);

inline constexpr std::uint64_t kXorOpsPerPayloadBlock = 15ull * 32768ull;  // 491520

}  // namespace hamlink
