#pragma once

#include <cstdint>
#include <cstring>
#include <numeric>
#include <span>
#include <vector>

namespace sgs {

// Move-to-front over an alphabet list initialized to 0,1,...,255.
inline std::vector<std::uint8_t> mtf_encode(std::span<const std::uint8_t> data) {
    std::uint8_t table[256];
    for (unsigned i = 0; i < 256; ++i) table[i] = static_cast<std::uint8_t>(i);
    std::vector<std::uint8_t> out;
    out.reserve(data.size());
    for (std::uint8_t b : data) {
        unsigned idx = 0;
        while (table[idx] != b) ++idx;
        out.push_back(static_cast<std::uint8_t>(idx));
        std::memmove(table + 1, table, idx);
        table[0] = b;
    }
    return out;
}

inline std::vector<std::uint8_t> mtf_decode(std::span<const std::uint8_t> symbols) {
    std::uint8_t table[256];
    for (unsigned i = 0; i < 256; ++i) table[i] = static_cast<std::uint8_t>(i);
    std::vector<std::uint8_t> out;
    out.reserve(symbols.size());
    for (std::uint8_t idx : symbols) {
        std::uint8_t b = table[idx];
        out.push_back(b);
        std::memmove(table + 1, table, idx);
        table[0] = b;
    }
    return out;
}

}  // namespace sgs
