#pragma once

#include <cstdint>
#include <cstring>
#include <span>
#include <string_view>
#include <vector>

#include "sgs/bitio.hpp"
#include "sgs/bwt.hpp"
#include "sgs/errors.hpp"
#include "sgs/huffman.hpp"
#include "sgs/mtf.hpp"
#include "sgs/rle.hpp"

namespace sgs {

inline constexpr std::size_t kDefaultBlockSize = 65536;
inline constexpr std::size_t kMaxBlockSize = std::size_t{1} << 26;
inline constexpr char kBlobMagic[4] = {'S', 'G', 'S', '1'};

// Blob layout, all integers big-endian, bits packed MSB-first:
//   magic "SGS1" | block_size u32 | block records...
// record:
//   orig_len u32 | primary_index u32 | 258 code-length bytes |
//   payload_bit_count u32 | payload bits, zero-padded to a byte
namespace detail {

inline void put_u32be(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 24));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

inline std::uint32_t get_u32be(std::span<const std::uint8_t> blob, std::size_t off) {
    if (off + 4 > blob.size())
        throw MalformedInput("blob truncated inside integer field", blob.size());
    return (std::uint32_t{blob[off]} << 24) | (std::uint32_t{blob[off + 1]} << 16) |
           (std::uint32_t{blob[off + 2]} << 8) | std::uint32_t{blob[off + 3]};
}

inline void compress_block(std::span<const std::uint8_t> block,
                           std::vector<std::uint8_t>& out) {
    BwtOutput bwt = bwt_forward(block);
    std::vector<std::uint8_t> mtf = mtf_encode(bwt.transformed);
    std::vector<std::uint16_t> syms = rle_encode(mtf);

    FreqTable freqs{};
    for (std::uint16_t s : syms) ++freqs[s];
    std::vector<std::uint8_t> lengths = huffman_build(freqs);
    CanonicalCode code = CanonicalCode::from_lengths(lengths);

    BitWriter bits;
    for (std::uint16_t s : syms) code.encode(s, bits);
    const std::uint32_t bit_count = static_cast<std::uint32_t>(bits.bit_count());

    put_u32be(out, static_cast<std::uint32_t>(block.size()));
    put_u32be(out, bwt.primary_index);
    out.insert(out.end(), lengths.begin(), lengths.end());
    put_u32be(out, bit_count);
    std::vector<std::uint8_t> payload = bits.finish();
    out.insert(out.end(), payload.begin(), payload.end());
}

}  // namespace detail

// Deterministic block compressor: equal inputs produce bit-identical blobs.
// Empty input compresses to the 8-byte header alone.
inline std::vector<std::uint8_t> compress(std::span<const std::uint8_t> data,
                                          std::size_t block_size = kDefaultBlockSize) {
    if (block_size == 0 || block_size > kMaxBlockSize)
        throw Error("compress: block_size out of range");
    std::vector<std::uint8_t> out;
    out.reserve(data.size() / 2 + 280);
    out.insert(out.end(), kBlobMagic, kBlobMagic + 4);
    detail::put_u32be(out, static_cast<std::uint32_t>(block_size));
    for (std::size_t off = 0; off < data.size(); off += block_size) {
        std::size_t len = std::min(block_size, data.size() - off);
        detail::compress_block(data.subspan(off, len), out);
    }
    return out;
}

inline std::vector<std::uint8_t> compress(std::string_view data,
                                          std::size_t block_size = kDefaultBlockSize) {
    return compress(std::span<const std::uint8_t>(
                        reinterpret_cast<const std::uint8_t*>(data.data()), data.size()),
                    block_size);
}

inline std::vector<std::uint8_t> decompress(std::span<const std::uint8_t> blob) {
    if (blob.size() < 4 || std::memcmp(blob.data(), kBlobMagic, 4) != 0)
        throw MalformedInput("bad magic", 0);
    const std::uint32_t block_size = detail::get_u32be(blob, 4);
    if (block_size == 0 || block_size > kMaxBlockSize)
        throw MalformedInput("block_size out of range", 4);

    std::vector<std::uint8_t> out;
    std::size_t off = 8;
    while (off < blob.size()) {
        const std::size_t record_off = off;
        const std::uint32_t orig_len = detail::get_u32be(blob, off);
        if (orig_len == 0 || orig_len > block_size)
            throw MalformedInput("block length out of range", record_off);
        const std::uint32_t primary = detail::get_u32be(blob, off + 4);
        if (primary >= orig_len)
            throw MalformedInput("primary index out of range", record_off + 4);
        off += 8;

        if (off + kExtendedAlphabet > blob.size())
            throw MalformedInput("blob truncated inside length table", blob.size());
        std::span<const std::uint8_t> lengths = blob.subspan(off, kExtendedAlphabet);
        CanonicalCode code = CanonicalCode::from_lengths(lengths);
        off += kExtendedAlphabet;

        const std::uint32_t bit_count = detail::get_u32be(blob, off);
        off += 4;
        const std::size_t payload_bytes = (std::size_t{bit_count} + 7) / 8;
        if (off + payload_bytes > blob.size())
            throw MalformedInput("blob truncated inside payload", blob.size());

        BitReader bits(blob.data() + off, bit_count);
        std::vector<std::uint16_t> syms;
        syms.reserve(orig_len);
        while (!bits.exhausted()) syms.push_back(code.decode(bits));
        // padding bits of the final byte must be zero
        if (bit_count % 8 != 0) {
            std::uint8_t tail = blob[off + payload_bytes - 1];
            if ((tail & ((1u << (8 - bit_count % 8)) - 1)) != 0)
                throw MalformedInput("nonzero padding bits", off + payload_bytes - 1);
        }

        std::vector<std::uint8_t> mtf = rle_decode(syms, orig_len);
        if (mtf.size() != orig_len)
            throw MalformedInput("decoded symbol count mismatch", record_off);
        std::vector<std::uint8_t> transformed = mtf_decode(mtf);
        std::vector<std::uint8_t> block = bwt_inverse(transformed, primary);
        out.insert(out.end(), block.begin(), block.end());
        off += payload_bytes;
    }
    return out;
}

inline std::size_t compressed_size(std::span<const std::uint8_t> data,
                                   std::size_t block_size = kDefaultBlockSize) {
    return compress(data, block_size).size();
}

inline std::size_t compressed_size(std::string_view data,
                                   std::size_t block_size = kDefaultBlockSize) {
    return compress(data, block_size).size();
}

}  // namespace sgs
