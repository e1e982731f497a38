#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

namespace hamlink {

// Bit i of a buffer lives in byte i/8 at bit 7 - (i % 8): the first bit of a
// sequence is the most significant bit of the first byte, matching network
// transmission order. Trailing bits of the last byte are kept zero.
class BitBuffer {
public:
    BitBuffer() = default;

    explicit BitBuffer(std::size_t bit_count)
        : bit_count_(bit_count), bytes_((bit_count + 7) / 8, 0) {}

    static BitBuffer from_bytes(std::span<const std::uint8_t> bytes) {
        return from_bytes(bytes, bytes.size() * 8);
    }

    static BitBuffer from_bytes(std::span<const std::uint8_t> bytes, std::size_t bit_count) {
        if (bit_count > bytes.size() * 8) {
            throw std::invalid_argument("BitBuffer: bit_count exceeds supplied bytes");
        }
        BitBuffer buf(bit_count);
        std::size_t used = (bit_count + 7) / 8;
        for (std::size_t i = 0; i < used; ++i) {
            buf.bytes_[i] = bytes[i];
        }
        // keep the tail of the last byte zeroed
        if (bit_count % 8 != 0 && used > 0) {
            buf.bytes_[used - 1] &= static_cast<std::uint8_t>(0xFF << (8 - bit_count % 8));
        }
        return buf;
    }

    std::size_t size() const { return bit_count_; }
    bool empty() const { return bit_count_ == 0; }

    bool get(std::size_t i) const {
        check(i);
        return (bytes_[i >> 3] >> (7 - (i & 7))) & 1;
    }

    void set(std::size_t i, bool value) {
        check(i);
        std::uint8_t mask = static_cast<std::uint8_t>(1u << (7 - (i & 7)));
        if (value) {
            bytes_[i >> 3] |= mask;
        } else {
            bytes_[i >> 3] &= static_cast<std::uint8_t>(~mask);
        }
    }

    void flip(std::size_t i) {
        check(i);
        bytes_[i >> 3] ^= static_cast<std::uint8_t>(1u << (7 - (i & 7)));
    }

    std::size_t popcount() const {
        std::size_t n = 0;
        for (std::uint8_t b : bytes_) {
            n += static_cast<std::size_t>(__builtin_popcount(b));
        }
        return n;
    }

    const std::vector<std::uint8_t>& bytes() const { return bytes_; }

    friend bool operator==(const BitBuffer&, const BitBuffer&) = default;

private:
    void check(std::size_t i) const {
        if (i >= bit_count_) {
            throw std::out_of_range("BitBuffer: bit index out of range");
        }
    }

    std::size_t bit_count_ = 0;
    std::vector<std::uint8_t> bytes_;
};

// MSB-first field packer: values are written most significant bit first, in
// call order, with no padding between fields.
class BitWriter {
public:
    void put(std::uint64_t value, unsigned width) {
        if (width > 64) {
            throw std::invalid_argument("BitWriter: width > 64");
        }
        if (width < 64 && (value >> width) != 0) {
            throw std::invalid_argument("BitWriter: value does not fit in width");
        }
        for (unsigned i = width; i-- > 0;) {
            bits_.push_back(((value >> i) & 1) != 0);
        }
    }

    void put_bytes(std::span<const std::uint8_t> bytes) {
        for (std::uint8_t b : bytes) {
            put(b, 8);
        }
    }

    std::size_t size() const { return bits_.size(); }

    BitBuffer take() const {
        BitBuffer buf(bits_.size());
        for (std::size_t i = 0; i < bits_.size(); ++i) {
            if (bits_[i]) {
                buf.set(i, true);
            }
        }
        return buf;
    }

private:
    std::vector<bool> bits_;
};

class BitReader {
public:
    explicit BitReader(const BitBuffer& buf) : buf_(buf) {}

    std::uint64_t get(unsigned width) {
        if (width > 64) {
            throw std::invalid_argument("BitReader: width > 64");
        }
        if (pos_ + width > buf_.size()) {
            throw std::out_of_range("BitReader: read past end");
        }
        std::uint64_t v = 0;
        for (unsigned i = 0; i < width; ++i) {
            v = (v << 1) | static_cast<std::uint64_t>(buf_.get(pos_++));
        }
        return v;
    }

    std::vector<std::uint8_t> get_bytes(std::size_t n) {
        std::vector<std::uint8_t> out(n);
        for (std::size_t i = 0; i < n; ++i) {
            out[i] = static_cast<std::uint8_t>(get(8));
        }
        return out;
    }

    std::size_t remaining() const { return buf_.size() - pos_; }

private:
    const BitBuffer& buf_;
    std::size_t pos_ = 0;
};

}  // namespace hamlink
