#pragma once

#include <array>
#include <cstdint>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

#include "sgs/errors.hpp"

namespace sgs {

struct BwtOutput {
    std::vector<std::uint8_t> transformed;
    std::uint32_t primary_index = 0;
};

// Burrows-Wheeler transform of one block: all rotations sorted as byte
// strings, ties broken by rotation start index ascending, last column out.
// No sentinel is appended. Rotation order is computed by prefix doubling
// over cyclic shifts with counting sorts, O(n log n).
inline BwtOutput bwt_forward(std::span<const std::uint8_t> data) {
    const std::size_t n = data.size();
    if (n == 0) throw Error("bwt_forward: empty block");

    std::vector<std::uint32_t> sa(n), rnk(n), next_rnk(n), cnt, pos(n);
    std::uint32_t classes = 0;

    // round 0: order by single byte, dense class ids
    {
        std::array<std::uint32_t, 256> count{};
        for (std::uint8_t b : data) ++count[b];
        std::array<std::uint32_t, 256> start{};
        std::uint32_t acc = 0;
        for (unsigned v = 0; v < 256; ++v) {
            start[v] = acc;
            acc += count[v];
        }
        auto at = start;
        for (std::uint32_t i = 0; i < n; ++i) sa[at[data[i]]++] = i;
        rnk[sa[0]] = 0;
        for (std::uint32_t i = 1; i < n; ++i)
            rnk[sa[i]] = rnk[sa[i - 1]] + (data[sa[i]] != data[sa[i - 1]] ? 1 : 0);
        classes = rnk[sa[n - 1]] + 1;
    }

    // each round sorts by the pair (rank[i], rank[i+len mod n])
    for (std::size_t len = 1; len < n && classes < n; len <<= 1) {
        for (std::uint32_t i = 0; i < n; ++i) {
            std::uint32_t s = sa[i];
            sa[i] = static_cast<std::uint32_t>((s + n - len) % n);
        }
        // sa is now ordered by second key; stable counting sort by first
        cnt.assign(classes, 0);
        for (std::uint32_t i = 0; i < n; ++i) ++cnt[rnk[i]];
        std::uint32_t acc = 0;
        std::vector<std::uint32_t> at(classes);
        for (std::uint32_t c = 0; c < classes; ++c) {
            at[c] = acc;
            acc += cnt[c];
        }
        for (std::uint32_t i = 0; i < n; ++i) pos[at[rnk[sa[i]]]++] = sa[i];
        sa.swap(pos);

        next_rnk[sa[0]] = 0;
        for (std::uint32_t i = 1; i < n; ++i) {
            std::uint32_t a = sa[i], b = sa[i - 1];
            std::uint32_t a2 = static_cast<std::uint32_t>((a + len) % n);
            std::uint32_t b2 = static_cast<std::uint32_t>((b + len) % n);
            bool differ = rnk[a] != rnk[b] || rnk[a2] != rnk[b2];
            next_rnk[a] = next_rnk[b] + (differ ? 1 : 0);
        }
        rnk.swap(next_rnk);
        classes = rnk[sa[n - 1]] + 1;
    }

    // equal rotations (periodic input) keep start-index order: stable
    // counting sort of 0..n-1 by final rank
    {
        cnt.assign(classes, 0);
        for (std::uint32_t i = 0; i < n; ++i) ++cnt[rnk[i]];
        std::uint32_t acc = 0;
        std::vector<std::uint32_t> at(classes);
        for (std::uint32_t c = 0; c < classes; ++c) {
            at[c] = acc;
            acc += cnt[c];
        }
        for (std::uint32_t i = 0; i < n; ++i) sa[at[rnk[i]]++] = i;
    }

    BwtOutput out;
    out.transformed.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        std::uint32_t s = sa[j];
        out.transformed[j] = data[(s + n - 1) % n];
        if (s == 0) out.primary_index = static_cast<std::uint32_t>(j);
    }
    return out;
}

inline BwtOutput bwt_forward(std::string_view data) {
    return bwt_forward(std::span<const std::uint8_t>(
        reinterpret_cast<const std::uint8_t*>(data.data()), data.size()));
}

// Inverse transform via the last-to-first mapping from a stable counting
// sort of the transformed bytes.
inline std::vector<std::uint8_t> bwt_inverse(std::span<const std::uint8_t> transformed,
                                             std::size_t primary_index) {
    const std::size_t n = transformed.size();
    if (primary_index >= n)
        throw MalformedInput("bwt_inverse: primary_index out of range");

    std::array<std::uint32_t, 256> count{};
    for (std::uint8_t b : transformed) ++count[b];
    std::array<std::uint32_t, 256> first{};
    std::uint32_t acc = 0;
    for (unsigned v = 0; v < 256; ++v) {
        first[v] = acc;
        acc += count[v];
    }

    std::vector<std::uint32_t> lf(n);
    {
        std::array<std::uint32_t, 256> seen{};
        for (std::size_t i = 0; i < n; ++i) {
            std::uint8_t b = transformed[i];
            lf[i] = first[b] + seen[b]++;
        }
    }

    std::vector<std::uint8_t> out(n);
    std::size_t row = primary_index;
    for (std::size_t j = n; j-- > 0;) {
        out[j] = transformed[row];
        row = lf[row];
    }
    return out;
}

inline std::vector<std::uint8_t> bwt_inverse(const BwtOutput& o) {
    return bwt_inverse(std::span<const std::uint8_t>(o.transformed), o.primary_index);
}

}  // namespace sgs
