#include "doctest.h"

#include <cmath>

#include "hamlink/channel.hpp"
#include "hamlink/model.hpp"

using namespace hamlink;

namespace {

// Exact Binomial(n, p) pmf, evaluated in log space; test-side oracle for the
// Poisson simplification.
double binomial_pmf(std::uint64_t n, double p, unsigned k) {
    if (p == 0.0) {
        return k == 0 ? 1.0 : 0.0;
    }
    double log_c = std::lgamma(static_cast<double>(n) + 1.0) -
                   std::lgamma(static_cast<double>(k) + 1.0) -
                   std::lgamma(static_cast<double>(n - k) + 1.0);
    double log_pmf = log_c + static_cast<double>(k) * std::log(p) +
                     static_cast<double>(n - k) * std::log1p(-p);
    return std::exp(log_pmf);
}

}  // namespace

TEST_CASE("error probabilities at the reference operating point") {
    ErrorProbs p = error_probs(33088, 1e-5);
    CHECK(p.p0 == doctest::Approx(0.718).epsilon(0.001));
    CHECK(p.p1 == doctest::Approx(0.238).epsilon(0.002));
    CHECK(p.p2plus == doctest::Approx(0.044).epsilon(0.01));
    CHECK(p.p0 + p.p1 + p.p2plus == doctest::Approx(1.0).epsilon(1e-12));

    ErrorProbs b = error_probs(12208, 1e-5);
    CHECK(b.p0 == doctest::Approx(0.885).epsilon(0.001));

    ErrorProbs zero = error_probs(33088, 0.0);
    CHECK(zero.p0 == 1.0);
    CHECK(zero.p1 == 0.0);
    CHECK(zero.p2plus == 0.0);
}

TEST_CASE("probabilities normalize for arbitrary inputs") {
    for (double ber : {0.0, 1e-6, 1e-5, 1e-4, 1e-3, 0.5, 1.0}) {
        for (std::uint64_t bits : {1ull, 128ull, 12208ull, 33088ull}) {
            ErrorProbs p = error_probs(bits, ber);
            CHECK(p.p0 + p.p1 + p.p2plus == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(p.p0 >= 0.0);
            CHECK(p.p1 >= 0.0);
            CHECK(p.p2plus >= -1e-15);
        }
    }
    CHECK_THROWS_AS(error_probs(0, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(error_probs(10, -0.5), std::invalid_argument);
}

TEST_CASE("Poisson tracks the exact binomial at the scenario scale") {
    const std::uint64_t bits = 33088;
    const double p = 1e-5;
    const double lambda = p * static_cast<double>(bits);
    for (unsigned k = 0; k <= 2; ++k) {
        double pois = std::exp(-lambda) * std::pow(lambda, k) / std::tgamma(k + 1.0);
        double bino = binomial_pmf(bits, p, k);
        CHECK(std::abs(pois - bino) < 1e-4);
    }
}

TEST_CASE("expected protocol cost reproduces the reference figures") {
    ScenarioParams params;
    CHECK(expected_cost_protocol(params) == doctest::Approx(191.5).epsilon(0.0003));
    CHECK(expected_cost_baseline(params) == doctest::Approx(198.3).epsilon(0.0006));

    params.ber = 0.0;
    CHECK(expected_cost_protocol(params) == 0.0);
    CHECK(expected_cost_baseline(params) == 0.0);
}

TEST_CASE("baseline closed form at 50% frame error rate") {
    // choose ber so 1 - exp(-ber * 12208) = 0.5
    ScenarioParams params;
    params.ber = std::log(2.0) / 12208.0;
    params.round_probabilities = false;
    double cost = expected_cost_baseline(params);
    CHECK(cost == doctest::Approx(0.5 * 1526.0 / 0.5).epsilon(1e-9));  // = 1526
}

TEST_CASE("transfer cost over one mebibyte") {
    ScenarioParams params;
    CostReport report = transfer_cost(params);
    CHECK(report.protocol_total_cost == doctest::Approx(49049.0).epsilon(50.0 / 49049.0));
    CHECK(report.baseline_total_cost == doctest::Approx(140491.0).epsilon(150.0 / 140491.0));
    CHECK(report.cost_ratio == doctest::Approx(0.349).epsilon(0.005 / 0.349));
    CHECK(report.protocol_packets == doctest::Approx(1048576.0 / 4094.0));
    CHECK(report.baseline_packets == doctest::Approx(1048576.0 / 1480.0));

    params.transfer_bytes = 0;
    CostReport zero = transfer_cost(params);
    CHECK(zero.protocol_total_cost == 0.0);
    CHECK(zero.baseline_total_cost == 0.0);
}

TEST_CASE("whole-packet accounting rounds packet counts up") {
    ScenarioParams params;
    params.whole_packets = true;
    CostReport report = transfer_cost(params);
    CHECK(report.protocol_packets == 257.0);
    CHECK(report.baseline_packets == 709.0);
}

TEST_CASE("costs are strictly monotone in ber (exact mode)") {
    ScenarioParams params;
    params.round_probabilities = false;
    double prev_p = 0.0;
    double prev_b = 0.0;
    for (double ber = 1e-6; ber < 1e-3; ber *= 1.7) {
        params.ber = ber;
        double cp = expected_cost_protocol(params);
        double cb = expected_cost_baseline(params);
        CHECK(cp > prev_p);
        CHECK(cb > prev_b);
        prev_p = cp;
        prev_b = cb;
    }
}

TEST_CASE("analytic protocol cost agrees with a Monte Carlo histogram at 1e-4") {
    ScenarioParams params;
    params.ber = 1e-4;
    double analytic = expected_cost_protocol(params);

    const std::uint64_t n = 100000;
    auto stats = error_count_histogram(n, 33088, ChannelConfig{1e-4, 0.0, 4242});
    double cost_sum = 0.0;
    for (std::size_t k = 0; k < stats.histogram.size(); ++k) {
        double frames = static_cast<double>(stats.histogram[k]);
        if (k == 1) {
            cost_sum += frames * 40.0;
        } else if (k >= 2) {
            cost_sum += frames * 4136.0;
        }
    }
    double empirical = cost_sum / static_cast<double>(n);
    CHECK(std::abs(empirical - analytic) / analytic < 0.05);
}

TEST_CASE("xor burden arithmetic") {
    CHECK(kXorOpsPerPayloadBlock == 491520);
    CHECK(xor_burden(1048576.0) == 251658240.0);  // 491520 * 256 * 2
    CHECK(xor_burden(4096.0) == 983040.0);
    CHECK_THROWS_AS(xor_burden(0.0), std::invalid_argument);
    CHECK_THROWS_AS(xor_burden(-5.0), std::invalid_argument);
}
