#pragma once

#include <cstdint>
#include <cstddef>
#include <vector>

#include "sgs/errors.hpp"

namespace sgs {

// MSB-first bit writer. The first bit written lands in bit 7 of the first
// byte; the final partial byte is zero-padded.
class BitWriter {
public:
    void put(unsigned bit) {
        cur_ = static_cast<std::uint8_t>((cur_ << 1) | (bit & 1u));
        if (++filled_ == 8) {
            buf_.push_back(cur_);
            cur_ = 0;
            filled_ = 0;
        }
        ++count_;
    }

    // Writes the low `width` bits of `value`, most significant first.
    void put_bits(std::uint32_t value, unsigned width) {
        for (unsigned i = width; i-- > 0;) put((value >> i) & 1u);
    }

    std::size_t bit_count() const noexcept { return count_; }

    // Flushes the partial byte and returns the packed buffer.
    std::vector<std::uint8_t> finish() {
        if (filled_ != 0) {
            buf_.push_back(static_cast<std::uint8_t>(cur_ << (8 - filled_)));
            cur_ = 0;
            filled_ = 0;
        }
        return std::move(buf_);
    }

private:
    std::vector<std::uint8_t> buf_;
    std::uint8_t cur_ = 0;
    unsigned filled_ = 0;
    std::size_t count_ = 0;
};

// MSB-first reader over a fixed byte range with a hard bit limit.
class BitReader {
public:
    BitReader(const std::uint8_t* data, std::size_t bit_limit)
        : data_(data), limit_(bit_limit) {}

    unsigned get() {
        if (pos_ >= limit_) throw MalformedInput("bit stream exhausted", pos_ / 8);
        unsigned bit = (data_[pos_ >> 3] >> (7 - (pos_ & 7))) & 1u;
        ++pos_;
        return bit;
    }

    std::size_t consumed() const noexcept { return pos_; }
    bool exhausted() const noexcept { return pos_ >= limit_; }

private:
    const std::uint8_t* data_;
    std::size_t limit_;
    std::size_t pos_ = 0;
};

}  // namespace sgs
