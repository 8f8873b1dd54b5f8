#pragma once

#include <bit>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "sgs/errors.hpp"
#include "sgs/grammar.hpp"

namespace sgs {

// One element per bit, each 0 or 1.
using BitStream = std::vector<std::uint8_t>;

// xorshift64* generator; bits are taken from each 64-bit output most
// significant first. Seed 0 is remapped to 1.
class Xorshift64Star {
public:
    explicit Xorshift64Star(std::uint64_t seed) : state_(seed == 0 ? 1 : seed) {}

    std::uint64_t next_word() {
        state_ ^= state_ >> 12;
        state_ ^= state_ << 25;
        state_ ^= state_ >> 27;
        return state_ * 2685821657736338717ull;
    }

    unsigned next_bit() {
        if (avail_ == 0) {
            word_ = next_word();
            avail_ = 64;
        }
        --avail_;
        return static_cast<unsigned>((word_ >> avail_) & 1u);
    }

private:
    std::uint64_t state_;
    std::uint64_t word_ = 0;
    unsigned avail_ = 0;
};

inline BitStream random_bits(std::uint64_t seed, std::size_t n) {
    if (n == 0) throw Error("random_bits: n must be >= 1");
    Xorshift64Star rng(seed);
    BitStream out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        out.push_back(static_cast<std::uint8_t>(rng.next_bit()));
    return out;
}

namespace detail {

inline void require_valid(const Grammar& g) {
    std::vector<Violation> v = validate_grammar(g);
    if (!v.empty())
        throw InvalidGrammar("grammar rejected: " + v.front().nonterminal + ": " +
                             v.front().message);
}

inline unsigned bits_for_alternatives(std::size_t count) {
    return static_cast<unsigned>(std::bit_width(count) - 1);
}

// Leftmost derivation of one sentence. `choose(m)` supplies the index for a
// 2^m-way choice point, m >= 1. A step budget guards grammars whose padding
// path never terminates.
inline constexpr std::size_t kDerivationStepBudget = 1u << 20;

inline void derive_sentence(const Grammar& g,
                            const std::function<std::uint32_t(unsigned)>& choose,
                            std::string& out) {
    std::vector<const Symbol*> stack;
    Symbol start = Symbol::nonterm(g.start());
    stack.push_back(&start);
    std::size_t steps = 0;
    bool first_word = true;
    while (!stack.empty()) {
        if (++steps > kDerivationStepBudget)
            throw InvalidGrammar("derivation exceeded step budget");
        const Symbol* sym = stack.back();
        stack.pop_back();
        if (!sym->is_nonterminal) {
            if (!first_word) out.push_back(' ');
            out.append(sym->text);
            first_word = false;
            continue;
        }
        const Rule* rule = g.find(sym->text);
        unsigned m = bits_for_alternatives(rule->alternatives.size());
        std::uint32_t idx = m == 0 ? 0 : choose(m);
        const Alternative& alt = rule->alternatives[idx];
        for (auto it = alt.rbegin(); it != alt.rend(); ++it) stack.push_back(&*it);
    }
}

}  // namespace detail

// Embeds the payload by production choice: at each nonterminal with 2^m
// alternatives the next m bits (most significant first) pick the
// alternative. Derivation restarts from the start symbol, one sentence per
// line, until every payload bit is consumed; the final sentence is finished
// with zero-valued padding bits.
inline std::string embed(const Grammar& g, const BitStream& payload) {
    detail::require_valid(g);
    if (payload.empty()) throw Error("embed: payload must be nonempty");

    std::string out;
    std::size_t cursor = 0;
    auto choose = [&](unsigned m) {
        std::uint32_t idx = 0;
        for (unsigned i = 0; i < m; ++i) {
            unsigned bit = cursor < payload.size() ? payload[cursor] : 0;
            if (cursor < payload.size()) ++cursor;
            idx = (idx << 1) | bit;
        }
        return idx;
    };

    while (cursor < payload.size()) {
        std::size_t before = cursor;
        if (!out.empty()) out.push_back('\n');
        detail::derive_sentence(g, choose, out);
        if (cursor == before)
            throw InvalidGrammar("grammar has no choice points; nothing can be embedded");
    }
    return out;
}

// Re-derives the leftmost derivation word by word and emits the bits
// implied by each resolved choice, padding included. The first-terminal
// disjointness invariant makes every choice unambiguous.
inline BitStream extract(const Grammar& g, std::string_view text) {
    detail::require_valid(g);

    // first terminal word -> alternative index, per rule
    std::unordered_map<std::string, std::unordered_map<std::string, std::uint32_t>> first_of;
    for (const Rule& rule : g.rules()) {
        auto& m = first_of[rule.lhs];
        for (std::size_t a = 0; a < rule.alternatives.size(); ++a) {
            std::set<std::string> firsts, visiting;
            detail::first_terminals(g, rule.alternatives[a].front(), firsts, visiting);
            for (const std::string& w : firsts) m.emplace(w, static_cast<std::uint32_t>(a));
        }
    }

    std::vector<std::string_view> words;
    {
        std::size_t i = 0;
        while (i < text.size()) {
            while (i < text.size() && (text[i] == ' ' || text[i] == '\n')) ++i;
            std::size_t j = i;
            while (j < text.size() && text[j] != ' ' && text[j] != '\n') ++j;
            if (j > i) words.push_back(text.substr(i, j - i));
            i = j;
        }
    }
    if (words.empty()) throw ParseFailure("extract: no words in text");

    BitStream bits;
    std::size_t w = 0;
    while (w < words.size()) {
        std::vector<Symbol> stack{Symbol::nonterm(g.start())};
        while (!stack.empty()) {
            Symbol sym = std::move(stack.back());
            stack.pop_back();
            if (!sym.is_nonterminal) {
                if (w >= words.size())
                    throw ParseFailure("extract: text ends inside a sentence, expected `" +
                                       sym.text + "`");
                if (words[w] != sym.text)
                    throw ParseFailure("extract: expected `" + sym.text + "`, found `" +
                                       std::string(words[w]) + "`");
                ++w;
                continue;
            }
            const Rule* rule = g.find(sym.text);
            unsigned m = detail::bits_for_alternatives(rule->alternatives.size());
            std::uint32_t idx = 0;
            if (m > 0) {
                if (w >= words.size())
                    throw ParseFailure("extract: text ends at a choice point of `" +
                                       sym.text + "`");
                const auto& table = first_of[sym.text];
                auto hit = table.find(std::string(words[w]));
                if (hit == table.end())
                    throw ParseFailure("extract: word `" + std::string(words[w]) +
                                       "` matches no alternative of `" + sym.text + "`");
                idx = hit->second;
                for (unsigned i = m; i-- > 0;)
                    bits.push_back(static_cast<std::uint8_t>((idx >> i) & 1u));
            }
            const Alternative& alt = rule->alternatives[idx];
            for (auto it = alt.rbegin(); it != alt.rend(); ++it) stack.push_back(*it);
        }
    }
    return bits;
}

namespace detail {

inline constexpr std::size_t kFrameHeaderBits = 32;

}  // namespace detail

// Framed variants carry a 32-bit big-endian bit-length header so the exact
// payload comes back without padding ambiguity.
inline std::string embed_framed(const Grammar& g, const BitStream& payload) {
    if (payload.empty()) throw FrameError("embed_framed: empty payload");
    if (payload.size() > 0xFFFFFFFFull)
        throw FrameError("embed_framed: payload too long for 32-bit header");
    BitStream framed;
    framed.reserve(detail::kFrameHeaderBits + payload.size());
    std::uint32_t len = static_cast<std::uint32_t>(payload.size());
    for (unsigned i = detail::kFrameHeaderBits; i-- > 0;)
        framed.push_back(static_cast<std::uint8_t>((len >> i) & 1u));
    framed.insert(framed.end(), payload.begin(), payload.end());
    return embed(g, framed);
}

inline BitStream extract_framed(const Grammar& g, std::string_view text) {
    BitStream bits = extract(g, text);
    if (bits.size() < detail::kFrameHeaderBits)
        throw FrameError("extract_framed: text too short for length header");
    std::uint64_t len = 0;
    for (std::size_t i = 0; i < detail::kFrameHeaderBits; ++i)
        len = (len << 1) | bits[i];
    if (len > bits.size() - detail::kFrameHeaderBits)
        throw FrameError("extract_framed: declared length " + std::to_string(len) +
                         " exceeds " + std::to_string(bits.size() - detail::kFrameHeaderBits) +
                         " available bits");
    return BitStream(bits.begin() + detail::kFrameHeaderBits,
                     bits.begin() + detail::kFrameHeaderBits + len);
}

// Deterministic stegotext of at least `min_bytes` from a seeded pseudorandom
// payload stream; used to build references and experiment samples.
inline std::string generate_stegotext(const Grammar& g, std::uint64_t seed,
                                      std::size_t min_bytes) {
    detail::require_valid(g);
    Xorshift64Star rng(seed);
    auto choose = [&](unsigned m) {
        std::uint32_t idx = 0;
        for (unsigned i = 0; i < m; ++i) idx = (idx << 1) | rng.next_bit();
        return idx;
    };
    std::string out;
    while (out.size() < min_bytes) {
        if (!out.empty()) out.push_back('\n');
        detail::derive_sentence(g, choose, out);
    }
    return out;
}

}  // namespace sgs
