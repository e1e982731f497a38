#include "doctest.h"

#include <cmath>
#include <random>

#include "hamlink/channel.hpp"
#include "helpers.hpp"

using namespace hamlink;
using testutil::random_bytes;

TEST_CASE("noiseless channel is the identity") {
    std::mt19937_64 rng(1);
    auto wire = random_bytes(4136, rng);
    Channel channel({0.0, 0.0, 9});
    auto out = channel.transmit(wire);
    REQUIRE(out.has_value());
    CHECK(*out == wire);
    CHECK(channel.stats().bits_flipped == 0);
}

TEST_CASE("ber 1 inverts every bit after the preamble") {
    std::mt19937_64 rng(2);
    auto wire = random_bytes(100, rng);
    Channel channel({1.0, 0.0, 9});
    auto out = channel.transmit(wire);
    REQUIRE(out.has_value());
    for (std::size_t i = 0; i < 8; ++i) {
        CHECK((*out)[i] == wire[i]);
    }
    for (std::size_t i = 8; i < wire.size(); ++i) {
        CHECK((*out)[i] == static_cast<std::uint8_t>(~wire[i]));
    }
}

TEST_CASE("loss 1 drops every frame") {
    std::mt19937_64 rng(3);
    auto wire = random_bytes(24, rng);
    Channel channel({0.0, 1.0, 5});
    for (int i = 0; i < 10; ++i) {
        CHECK(!channel.transmit(wire).has_value());
    }
    CHECK(channel.stats().frames_lost == 10);
}

TEST_CASE("identical configs replay identical streams") {
    std::mt19937_64 rng(4);
    auto wire = random_bytes(4136, rng);
    ChannelConfig cfg{1e-3, 0.25, 1234};
    Channel a(cfg);
    Channel b(cfg);
    for (int i = 0; i < 200; ++i) {
        auto oa = a.transmit(wire);
        auto ob = b.transmit(wire);
        CHECK(oa == ob);
    }
    CHECK(a.stats().bits_flipped == b.stats().bits_flipped);
    CHECK(a.stats().frames_lost == b.stats().frames_lost);
}

TEST_CASE("the first 8 bytes are never flipped") {
    std::mt19937_64 rng(5);
    auto wire = random_bytes(64, rng);
    Channel channel({0.5, 0.0, 77});
    for (int i = 0; i < 200; ++i) {
        auto out = channel.transmit(wire);
        REQUIRE(out.has_value());
        for (std::size_t b = 0; b < 8; ++b) {
            CHECK((*out)[b] == wire[b]);
        }
    }
}

TEST_CASE("flip positions follow the configured ber") {
    // mean flips over many frames should be close to p * bits
    auto wire = std::vector<std::uint8_t>(4136, 0);
    Channel channel({1e-3, 0.0, 42});
    const int frames = 2000;
    for (int i = 0; i < frames; ++i) {
        (void)channel.transmit(wire);
    }
    double bits_per_frame = (4136 - 8) * 8;
    double expected = 1e-3 * bits_per_frame * frames;
    double got = static_cast<double>(channel.stats().bits_flipped);
    // 5 sigma band, sigma ~ sqrt(expected)
    CHECK(std::abs(got - expected) < 5.0 * std::sqrt(expected));
}

TEST_CASE("config validation") {
    CHECK_THROWS_AS(Channel({-0.1, 0.0, 1}), std::invalid_argument);
    CHECK_THROWS_AS(Channel({0.0, 1.5, 1}), std::invalid_argument);
    CHECK_THROWS_AS(error_count_histogram(0, 100, ChannelConfig{}), std::invalid_argument);
}

TEST_CASE("histogram with zero ber is a point mass at zero errors") {
    auto stats = error_count_histogram(1000, 33088, ChannelConfig{0.0, 0.0, 3});
    REQUIRE(stats.histogram.size() == 1);
    CHECK(stats.histogram[0] == 1000);
    CHECK(stats.frames_sent == 1000);
    CHECK(stats.frames_lost == 0);
}

TEST_CASE("histogram matches the Poisson profile of the scenario") {
    // 2e5 trials keep this fast; the acceptance suite runs the 1e6 version.
    const std::uint64_t n = 200000;
    auto stats = error_count_histogram(n, 33088, ChannelConfig{1e-5, 0.0, 2025});
    REQUIRE(stats.histogram.size() >= 2);
    double f0 = static_cast<double>(stats.histogram[0]) / static_cast<double>(n);
    double f1 = static_cast<double>(stats.histogram[1]) / static_cast<double>(n);
    CHECK(f0 == doctest::Approx(0.718).epsilon(0.01));
    CHECK(f1 == doctest::Approx(0.238).epsilon(0.03));

    std::uint64_t total = 0;
    for (auto count : stats.histogram) {
        total += count;
    }
    CHECK(total == stats.frames_sent - stats.frames_lost);
}

TEST_CASE("histogram of the baseline frame length") {
    const std::uint64_t n = 200000;
    auto stats = error_count_histogram(n, 12208, ChannelConfig{1e-5, 0.0, 99});
    double f0 = static_cast<double>(stats.histogram[0]) / static_cast<double>(n);
    CHECK(f0 == doctest::Approx(0.885).epsilon(0.01));
}

TEST_CASE("lost frames are excluded from the histogram") {
    const std::uint64_t n = 50000;
    auto stats = error_count_histogram(n, 1000, ChannelConfig{1e-4, 0.3, 11});
    CHECK(stats.frames_lost > n / 4);
    CHECK(stats.frames_lost < n / 2);
    std::uint64_t total = 0;
    for (auto count : stats.histogram) {
        total += count;
    }
    CHECK(total == stats.frames_sent - stats.frames_lost);
}
