#include "hamlink/channel.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace hamlink {

void ChannelConfig::validate() const {
    if (!(ber >= 0.0 && ber <= 1.0)) {
        throw std::invalid_argument("ChannelConfig: ber must be in [0, 1]");
    }
    if (!(loss_prob >= 0.0 && loss_prob <= 1.0)) {
        throw std::invalid_argument("ChannelConfig: loss_prob must be in [0, 1]");
    }
}

void ChannelStats::record_errors(std::uint64_t count) {
    if (histogram.size() <= count) {
        histogram.resize(count + 1, 0);
    }
    ++histogram[count];
}

Channel::Channel(ChannelConfig cfg) : cfg_(cfg), rng_(cfg.seed) {
    cfg_.validate();
    if (cfg_.ber > 0.0 && cfg_.ber < 1.0) {
        log1m_p_ = std::log1p(-cfg_.ber);
    }
}

double Channel::next_uniform() {
    return static_cast<double>(rng_() >> 11) * 0x1.0p-53;
}

std::uint64_t Channel::next_gap() {
    if (cfg_.ber >= 1.0) {
        return 0;
    }
    // u in (0, 1]; floor(log(u) / log(1-p)) is the number of unflipped bits
    // preceding the next flip.
    double u = 1.0 - next_uniform();
    double g = std::floor(std::log(u) / log1m_p_);
    if (g >= static_cast<double>(std::numeric_limits<std::uint64_t>::max())) {
        return std::numeric_limits<std::uint64_t>::max();
    }
    return static_cast<std::uint64_t>(g);
}

bool Channel::sample_loss() {
    return next_uniform() < cfg_.loss_prob;
}

std::uint64_t Channel::sample_error_count(std::uint64_t bits) {
    if (cfg_.ber <= 0.0 || bits == 0) {
        return 0;
    }
    if (cfg_.ber >= 1.0) {
        return bits;
    }
    std::uint64_t count = 0;
    std::uint64_t pos = next_gap();
    while (pos < bits) {
        ++count;
        std::uint64_t gap = next_gap();
        if (bits - pos <= gap) {
            break;
        }
        pos += gap + 1;
    }
    return count;
}

std::optional<std::vector<std::uint8_t>> Channel::transmit(std::span<const std::uint8_t> wire) {
    ++stats_.frames_sent;
    if (sample_loss()) {
        ++stats_.frames_lost;
        return std::nullopt;
    }
    std::vector<std::uint8_t> out(wire.begin(), wire.end());
    std::uint64_t flipped = 0;
    if (cfg_.ber > 0.0 && out.size() > kFlipExemptBytes) {
        const std::uint64_t bits = (out.size() - kFlipExemptBytes) * 8;
        if (cfg_.ber >= 1.0) {
            for (std::size_t i = kFlipExemptBytes; i < out.size(); ++i) {
                out[i] = static_cast<std::uint8_t>(~out[i]);
            }
            flipped = bits;
        } else {
            std::uint64_t pos = next_gap();
            while (pos < bits) {
                out[kFlipExemptBytes + (pos >> 3)] ^=
                    static_cast<std::uint8_t>(1u << (7 - (pos & 7)));
                ++flipped;
                std::uint64_t gap = next_gap();
                if (bits - pos <= gap) {
                    break;
                }
                pos += gap + 1;
            }
        }
    }
    stats_.bits_flipped += flipped;
    stats_.record_errors(flipped);
    return out;
}

ChannelStats error_count_histogram(std::uint64_t n_trials, std::uint64_t frame_bits,
                                   const ChannelConfig& cfg) {
    if (n_trials < 1) {
        throw std::invalid_argument("error_count_histogram: n_trials must be >= 1");
    }
    Channel channel(cfg);
    ChannelStats stats;
    for (std::uint64_t t = 0; t < n_trials; ++t) {
        ++stats.frames_sent;
        if (channel.sample_loss()) {
            ++stats.frames_lost;
            continue;
        }
        std::uint64_t count = channel.sample_error_count(frame_bits);
        stats.bits_flipped += count;
        stats.record_errors(count);
    }
    return stats;
}

}  // namespace hamlink
