#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>

#include "sgs/errors.hpp"

namespace sgs {

// Punctuation kept by the normalizer. Everything else outside digits,
// Latin letters, space and newline is deleted.
inline constexpr std::string_view kDefaultPunctuation = ".,;:!?'\"-()";

inline constexpr std::size_t kDefaultSegmentSize = 400;

// Cleaned, fixed-size container text ready for analysis.
struct NormalizedSegment {
    std::string text;
    std::size_t declared_size = 0;
};

namespace detail {

inline std::array<bool, 256> allowed_table(std::string_view punctuation) {
    std::array<bool, 256> t{};
    for (unsigned c = '0'; c <= '9'; ++c) t[c] = true;
    for (unsigned c = 'a'; c <= 'z'; ++c) t[c] = true;
    for (unsigned c = 'A'; c <= 'Z'; ++c) t[c] = true;
    t[' '] = true;
    t['\n'] = true;
    for (unsigned char c : punctuation) t[c] = true;
    return t;
}

}  // namespace detail

inline bool is_allowed_byte(unsigned char b,
                            std::string_view punctuation = kDefaultPunctuation) {
    return detail::allowed_table(punctuation)[b];
}

// Filtering and run-collapsing passes without the size cut: deletes
// disallowed bytes, then replaces runs of two or more spaces (or newlines)
// with a single one. Tabs and carriage returns count as disallowed.
inline std::string clean_text(std::string_view raw,
                              std::string_view punctuation = kDefaultPunctuation) {
    const auto allowed = detail::allowed_table(punctuation);
    std::string out;
    out.reserve(raw.size());
    char prev = '\0';
    for (unsigned char c : raw) {
        if (!allowed[c]) continue;
        if ((c == ' ' || c == '\n') && static_cast<char>(c) == prev) continue;
        out.push_back(static_cast<char>(c));
        prev = static_cast<char>(c);
    }
    return out;
}

// Fixed processing order: delete disallowed bytes, collapse space runs then
// newline runs, truncate to segment_size keeping the prefix.
inline NormalizedSegment normalize(std::string_view raw, std::size_t segment_size,
                                   std::string_view punctuation = kDefaultPunctuation) {
    if (segment_size == 0) throw Error("normalize: segment_size must be >= 1");
    std::string cleaned = clean_text(raw, punctuation);
    if (cleaned.size() < segment_size) {
        throw InsufficientInput("normalize: cleaned text has " +
                                std::to_string(cleaned.size()) + " bytes, need " +
                                std::to_string(segment_size));
    }
    cleaned.resize(segment_size);
    return NormalizedSegment{std::move(cleaned), segment_size};
}

}  // namespace sgs
