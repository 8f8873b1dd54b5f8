#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sgs/errors.hpp"

namespace sgs {

// Two run symbols extend the byte alphabet to 258 entries.
inline constexpr std::uint16_t kRunA = 256;  // bijective base-2 digit 1
inline constexpr std::uint16_t kRunB = 257;  // bijective base-2 digit 2
inline constexpr std::size_t kExtendedAlphabet = 258;

// Replaces each run of k >= 1 zeros with the bijective base-2 numeral of k
// written in RUNA/RUNB digits, least significant first. Nonzero symbols
// pass through.
inline std::vector<std::uint16_t> rle_encode(std::span<const std::uint8_t> symbols) {
    std::vector<std::uint16_t> out;
    out.reserve(symbols.size());
    std::size_t i = 0;
    while (i < symbols.size()) {
        if (symbols[i] != 0) {
            out.push_back(symbols[i]);
            ++i;
            continue;
        }
        std::uint64_t k = 0;
        while (i < symbols.size() && symbols[i] == 0) {
            ++k;
            ++i;
        }
        while (k > 0) {
            if (k & 1) {
                out.push_back(kRunA);
                k = (k - 1) / 2;
            } else {
                out.push_back(kRunB);
                k = (k - 2) / 2;
            }
        }
    }
    return out;
}

// `max_output` lets callers that know the decoded size up front reject
// oversized runs before allocating for them.
inline std::vector<std::uint8_t> rle_decode(std::span<const std::uint16_t> symbols,
                                            std::size_t max_output = SIZE_MAX) {
    std::vector<std::uint8_t> out;
    out.reserve(symbols.size());
    std::size_t i = 0;
    while (i < symbols.size()) {
        std::uint16_t s = symbols[i];
        if (s == kRunA || s == kRunB) {
            std::uint64_t k = 0;
            std::uint64_t place = 1;
            while (i < symbols.size() && (symbols[i] == kRunA || symbols[i] == kRunB)) {
                k += place * (symbols[i] == kRunA ? 1 : 2);
                place *= 2;
                ++i;
                if (k > 0xFFFFFFFFull)
                    throw MalformedInput("rle_decode: run length overflows 32 bits", i);
            }
            if (k > max_output - out.size())
                throw MalformedInput("rle_decode: run exceeds expected output size", i);
            out.insert(out.end(), static_cast<std::size_t>(k), std::uint8_t{0});
        } else if (s == 0) {
            // literal zeros are never emitted by the encoder
            throw MalformedInput("rle_decode: literal zero symbol", i);
        } else if (s > 255) {
            throw MalformedInput("rle_decode: symbol out of range", i);
        } else {
            if (out.size() >= max_output)
                throw MalformedInput("rle_decode: output exceeds expected size", i);
            out.push_back(static_cast<std::uint8_t>(s));
            ++i;
        }
    }
    return out;
}

}  // namespace sgs
