#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

namespace hamlink {

// I.i.d. bit-error / frame-loss model. The first 8 bytes of a frame
// (preamble + SFD) are exempt from bit flips: losing synchronization is what
// the loss probability models.
struct ChannelConfig {
    double ber = 0.0;        // per-bit flip probability p
    double loss_prob = 0.0;  // per-frame loss probability q
    std::uint64_t seed = 0;

    void validate() const;
};

struct ChannelStats {
    std::uint64_t frames_sent = 0;
    std::uint64_t frames_lost = 0;
    std::uint64_t bits_flipped = 0;
    // histogram[k] = delivered frames that suffered exactly k bit errors;
    // sums to frames_sent - frames_lost.
    std::vector<std::uint64_t> histogram;

    void record_errors(std::uint64_t count);
};

// Owns its RNG (mt19937_64 seeded from the config); a given (config, call
// sequence) reproduces the same outputs bit for bit. Uniform doubles are
// derived as (x >> 11) * 2^-53 rather than through std::distributions so the
// stream depends only on the generator.
class Channel {
public:
    explicit Channel(ChannelConfig cfg);

    // Loss is drawn first; on survival each bit after the 8 exempt bytes is
    // flipped independently with probability ber.
    std::optional<std::vector<std::uint8_t>> transmit(std::span<const std::uint8_t> wire);

    // One loss draw; true means the frame would be dropped.
    bool sample_loss();

    // Number of flipped bits among `bits` independent trials, without
    // materializing a frame. Exact Binomial(bits, ber) sampling via
    // geometric gap skipping.
    std::uint64_t sample_error_count(std::uint64_t bits);

    const ChannelStats& stats() const { return stats_; }
    const ChannelConfig& config() const { return cfg_; }

private:
    double next_uniform();           // [0, 1)
    std::uint64_t next_gap();        // bits skipped before the next flip

    ChannelConfig cfg_;
    std::mt19937_64 rng_;
    ChannelStats stats_;
    double log1m_p_ = 0.0;
};

// Empirical per-frame error-count distribution over n_trials frames of
// frame_bits bits each, under cfg. Lost frames are counted but contribute no
// histogram entry.
ChannelStats error_count_histogram(std::uint64_t n_trials, std::uint64_t frame_bits,
                                   const ChannelConfig& cfg);

inline constexpr std::size_t kFlipExemptBytes = 8;

}  // namespace hamlink
