#include "hamlink/model.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace hamlink {

namespace {

double round3(double x) {
    return std::round(x * 1000.0) / 1000.0;
}

double maybe_round(double x, const ScenarioParams& params) {
    return params.round_probabilities ? round3(x) : x;
}

double packets_for(double content_bytes, const ScenarioParams& params) {
    double n = static_cast<double>(params.transfer_bytes) / content_bytes;
    return params.whole_packets ? std::ceil(n) : n;
}

}  // namespace

void ScenarioParams::validate() const {
    if (!(ber >= 0.0 && ber <= 1.0)) {
        throw std::invalid_argument("ScenarioParams: ber must be in [0, 1]");
    }
    if (protocol_frame_bytes == 0 || protocol_content_bytes == 0 || baseline_frame_bytes == 0 ||
        baseline_content_bytes == 0 || hash_check_bytes == 0) {
        throw std::invalid_argument("ScenarioParams: sizes must be positive");
    }
}

ErrorProbs error_probs(std::uint64_t frame_bits, double ber) {
    if (frame_bits < 1) {
        throw std::invalid_argument("error_probs: frame_bits must be >= 1");
    }
    if (!(ber >= 0.0 && ber <= 1.0)) {
        throw std::invalid_argument("error_probs: ber must be in [0, 1]");
    }
    double lambda = ber * static_cast<double>(frame_bits);
    ErrorProbs p;
    p.p0 = std::exp(-lambda);
    p.p1 = lambda * p.p0;
    p.p2plus = 1.0 - p.p0 - p.p1;
    return p;
}

double expected_cost_protocol(const ScenarioParams& params) {
    params.validate();
    ErrorProbs p = error_probs(params.protocol_frame_bytes * 8, params.ber);
    double p1 = maybe_round(p.p1, params);
    double p2plus = maybe_round(p.p2plus, params);
    return p1 * static_cast<double>(params.hash_check_bytes) +
           p2plus * static_cast<double>(params.protocol_frame_bytes);
}

double expected_cost_baseline(const ScenarioParams& params) {
    params.validate();
    ErrorProbs p = error_probs(params.baseline_frame_bytes * 8, params.ber);
    double p_err = maybe_round(1.0 - p.p0, params);
    if (p_err >= 1.0) {
        return std::numeric_limits<double>::infinity();
    }
    return p_err * static_cast<double>(params.baseline_frame_bytes) / (1.0 - p_err);
}

CostReport transfer_cost(const ScenarioParams& params) {
    params.validate();
    CostReport report;
    report.protocol_probs = error_probs(params.protocol_frame_bytes * 8, params.ber);
    report.baseline_p0 = error_probs(params.baseline_frame_bytes * 8, params.ber).p0;
    report.protocol_cost_per_packet = expected_cost_protocol(params);
    report.baseline_cost_per_packet = expected_cost_baseline(params);
    if (params.transfer_bytes == 0) {
        return report;
    }
    report.protocol_packets = packets_for(static_cast<double>(params.protocol_content_bytes), params);
    report.baseline_packets = packets_for(static_cast<double>(params.baseline_content_bytes), params);
    report.protocol_total_cost = report.protocol_cost_per_packet * report.protocol_packets;
    report.baseline_total_cost = report.baseline_cost_per_packet * report.baseline_packets;
    if (report.baseline_total_cost > 0.0) {
        report.cost_ratio = report.protocol_total_cost / report.baseline_total_cost;
    }
    return report;
}

double xor_burden(double rate_bytes_per_sec) {
    if (!(rate_bytes_per_sec > 0.0)) {
        throw std::invalid_argument("xor_burden: rate must be positive");
    }
    double packets_per_sec = rate_bytes_per_sec / 4096.0;
    return static_cast<double>(kXorOpsPerPayloadBlock) * packets_per_sec * 2.0;
}

}  // namespace hamlink
