#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <queue>
#include <span>
#include <vector>

#include "sgs/bitio.hpp"
#include "sgs/errors.hpp"
#include "sgs/rle.hpp"

namespace sgs {

using FreqTable = std::array<std::uint64_t, kExtendedAlphabet>;

// Optimal prefix code lengths by the standard heap construction. Ties on
// equal weight are resolved by smaller symbol value first, then by earlier
// creation order of internal nodes, so the result is deterministic. A
// single-symbol alphabet gets code length 1.
inline std::vector<std::uint8_t> huffman_build(const FreqTable& freqs) {
    struct Node {
        std::int32_t left = -1;
        std::int32_t right = -1;
        std::uint16_t symbol = 0;
    };
    struct HeapEntry {
        std::uint64_t weight;
        std::uint32_t ordinal;  // symbol for leaves, 258+creation for internals
        std::int32_t node;
        bool operator>(const HeapEntry& o) const {
            return weight != o.weight ? weight > o.weight : ordinal > o.ordinal;
        }
    };

    std::vector<Node> nodes;
    std::priority_queue<HeapEntry, std::vector<HeapEntry>, std::greater<>> heap;
    for (std::uint16_t s = 0; s < kExtendedAlphabet; ++s) {
        if (freqs[s] == 0) continue;
        nodes.push_back(Node{-1, -1, s});
        heap.push(HeapEntry{freqs[s], s, static_cast<std::int32_t>(nodes.size() - 1)});
    }

    std::vector<std::uint8_t> lengths(kExtendedAlphabet, 0);
    if (heap.empty()) throw EmptyInput("huffman_build: no nonzero frequency");
    if (heap.size() == 1) {
        lengths[nodes[0].symbol] = 1;
        return lengths;
    }

    std::uint32_t creation = 0;
    while (heap.size() > 1) {
        HeapEntry a = heap.top();
        heap.pop();
        HeapEntry b = heap.top();
        heap.pop();
        nodes.push_back(Node{a.node, b.node, 0});
        heap.push(HeapEntry{a.weight + b.weight,
                            static_cast<std::uint32_t>(kExtendedAlphabet) + creation,
                            static_cast<std::int32_t>(nodes.size() - 1)});
        ++creation;
    }

    std::vector<std::pair<std::int32_t, std::uint8_t>> stack{{heap.top().node, 0}};
    while (!stack.empty()) {
        auto [idx, depth] = stack.back();
        stack.pop_back();
        const Node& nd = nodes[idx];
        if (nd.left < 0) {
            lengths[nd.symbol] = depth;
        } else {
            stack.push_back({nd.left, static_cast<std::uint8_t>(depth + 1)});
            stack.push_back({nd.right, static_cast<std::uint8_t>(depth + 1)});
        }
    }
    return lengths;
}

// Canonical prefix code reconstructible from the length table alone; codes
// are assigned in (length, symbol) order.
class CanonicalCode {
public:
    static constexpr unsigned kMaxLen = 63;

    static CanonicalCode from_lengths(std::span<const std::uint8_t> lengths) {
        CanonicalCode c;
        c.count_.assign(kMaxLen + 1, 0);
        for (std::size_t s = 0; s < lengths.size(); ++s) {
            if (lengths[s] == 0) continue;
            if (lengths[s] > kMaxLen)
                throw MalformedInput("huffman: code length too large", s);
            ++c.count_[lengths[s]];
        }

        // Kraft sum over max length; > 1 cannot be prefix-free. The budget is
        // compared pre-shift so a huge count cannot overflow the sum.
        {
            std::uint64_t kraft = 0;
            for (unsigned l = 1; l <= kMaxLen; ++l) {
                std::uint64_t budget = ((1ull << kMaxLen) - kraft) >> (kMaxLen - l);
                if (c.count_[l] > budget)
                    throw MalformedInput("huffman: length table violates Kraft inequality");
                kraft += static_cast<std::uint64_t>(c.count_[l]) << (kMaxLen - l);
            }
        }

        c.first_code_.assign(kMaxLen + 2, 0);
        c.offset_.assign(kMaxLen + 2, 0);
        std::uint64_t code = 0;
        std::uint32_t index = 0;
        for (unsigned l = 1; l <= kMaxLen; ++l) {
            c.first_code_[l] = code;
            c.offset_[l] = index;
            code = (code + c.count_[l]) << 1;
            index += c.count_[l];
        }

        c.symbols_.resize(index);
        c.encode_code_.assign(lengths.size(), 0);
        c.encode_len_.assign(lengths.size(), 0);
        std::vector<std::uint32_t> next(kMaxLen + 1, 0);
        for (std::size_t s = 0; s < lengths.size(); ++s) {
            unsigned l = lengths[s];
            if (l == 0) continue;
            std::uint32_t slot = c.offset_[l] + next[l]++;
            c.symbols_[slot] = static_cast<std::uint16_t>(s);
            c.encode_code_[s] = c.first_code_[l] + (slot - c.offset_[l]);
            c.encode_len_[s] = static_cast<std::uint8_t>(l);
        }
        return c;
    }

    void encode(std::uint16_t symbol, BitWriter& out) const {
        unsigned len = encode_len_[symbol];
        if (len == 0) throw Error("huffman: encoding symbol with no code");
        std::uint64_t code = encode_code_[symbol];
        for (unsigned i = len; i-- > 0;) out.put((code >> i) & 1u);
    }

    std::uint16_t decode(BitReader& in) const {
        std::uint64_t code = 0;
        for (unsigned l = 1; l <= kMaxLen; ++l) {
            code = (code << 1) | in.get();
            std::uint64_t rel = code - first_code_[l];
            if (code >= first_code_[l] && rel < count_[l])
                return symbols_[offset_[l] + rel];
        }
        throw MalformedInput("huffman: invalid code word");
    }

    unsigned length_of(std::uint16_t symbol) const { return encode_len_[symbol]; }

private:
    std::vector<std::uint32_t> count_;
    std::vector<std::uint64_t> first_code_;
    std::vector<std::uint32_t> offset_;
    std::vector<std::uint16_t> symbols_;
    std::vector<std::uint64_t> encode_code_;
    std::vector<std::uint8_t> encode_len_;
};

}  // namespace sgs
