#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>

#include "sgs/compressor.hpp"
#include "sgs/errors.hpp"
#include "sgs/textnorm.hpp"

namespace sgs {

enum class Label { Plain, Stego };

inline const char* to_string(Label l) { return l == Label::Plain ? "Plain" : "Stego"; }

struct Thresholds {
    double alpha_gt = 0.9;
    double beta_lt = 1.0;
};

struct DetectionStats {
    double alpha = 0.0;
    double beta = 0.0;
    std::size_t n = 0;    // natural reference bytes
    std::size_t n_x = 0;  // n + suspect bytes
    std::size_t t = 0;    // stego reference bytes
    std::size_t t_x = 0;  // t + suspect bytes
    std::size_t n_compressed = 0;
    std::size_t n_x_compressed = 0;
    std::size_t t_compressed = 0;
    std::size_t t_x_compressed = 0;
};

struct Verdict {
    Label label = Label::Plain;
    DetectionStats stats;
    Thresholds thresholds;
};

namespace detail {

inline void check_reference_text(std::string_view text, const char* which,
                                 std::string_view punctuation) {
    if (text.empty()) throw Error(std::string(which) + " reference is empty");
    const auto& allowed = allowed_table(punctuation);
    char prev = '\0';
    for (std::size_t i = 0; i < text.size(); ++i) {
        unsigned char c = static_cast<unsigned char>(text[i]);
        if (!allowed[c])
            throw MalformedInput(std::string(which) + " reference holds disallowed byte " +
                                     std::to_string(static_cast<int>(c)),
                                 i);
        if ((c == ' ' || c == '\n') && text[i] == prev)
            throw MalformedInput(std::string(which) + " reference holds a whitespace run", i);
        prev = text[i];
    }
}

// Reference and suspect are glued with one newline so the boundary never
// fuses two words; an empty suspect leaves the reference bit-identical.
inline std::string join_for_compression(std::string_view reference, std::string_view suspect) {
    std::string out(reference);
    if (!suspect.empty() && !out.empty() && out.back() != '\n') out.push_back('\n');
    out.append(suspect);
    return out;
}

}  // namespace detail

// Immutable pair of reference texts; their stand-alone compressed sizes are
// cached because every score() call reuses them.
class ReferencePair {
public:
    ReferencePair(std::string natural_ref, std::string stego_ref,
                  std::size_t block_size = kDefaultBlockSize,
                  std::string_view punctuation = kDefaultPunctuation)
        : natural_(std::move(natural_ref)),
          stego_(std::move(stego_ref)),
          block_size_(block_size) {
        detail::check_reference_text(natural_, "natural", punctuation);
        detail::check_reference_text(stego_, "stego", punctuation);
        natural_compressed_ = compressed_size(natural_, block_size_);
        stego_compressed_ = compressed_size(stego_, block_size_);
    }

    const std::string& natural() const { return natural_; }
    const std::string& stego() const { return stego_; }
    std::size_t n() const { return natural_.size(); }
    std::size_t t() const { return stego_.size(); }
    std::size_t natural_compressed() const { return natural_compressed_; }
    std::size_t stego_compressed() const { return stego_compressed_; }
    std::size_t block_size() const { return block_size_; }

private:
    std::string natural_;
    std::string stego_;
    std::size_t block_size_;
    std::size_t natural_compressed_;
    std::size_t stego_compressed_;
};

struct AppendGain {
    std::size_t raw_added = 0;
    long long compressed_added = 0;
};

inline AppendGain append_gain(std::string_view reference, std::string_view suspect,
                              std::size_t block_size = kDefaultBlockSize) {
    if (reference.empty()) throw EmptyInput("append_gain: reference is empty");
    std::string joined(reference);
    joined.append(suspect);
    long long base = static_cast<long long>(compressed_size(reference, block_size));
    long long grown = static_cast<long long>(compressed_size(joined, block_size));
    return {suspect.size(), grown - base};
}

inline DetectionStats score(std::string_view suspect, const ReferencePair& refs) {
    std::string joined_n = detail::join_for_compression(refs.natural(), suspect);
    std::string joined_t = detail::join_for_compression(refs.stego(), suspect);
    if (joined_n.size() > refs.block_size())
        throw BlockOverflow("natural reference + suspect spans " +
                            std::to_string(joined_n.size()) + " bytes, above the " +
                            std::to_string(refs.block_size()) + "-byte block");
    if (joined_t.size() > refs.block_size())
        throw BlockOverflow("stego reference + suspect spans " +
                            std::to_string(joined_t.size()) + " bytes, above the " +
                            std::to_string(refs.block_size()) + "-byte block");

    DetectionStats s;
    s.n = refs.n();
    s.t = refs.t();
    s.n_x = s.n + suspect.size();
    s.t_x = s.t + suspect.size();
    s.n_compressed = refs.natural_compressed();
    s.t_compressed = refs.stego_compressed();
    s.n_x_compressed = compressed_size(joined_n, refs.block_size());
    s.t_x_compressed = compressed_size(joined_t, refs.block_size());
    s.alpha = (static_cast<double>(s.n_compressed) / static_cast<double>(s.n) -
               static_cast<double>(s.n_x_compressed) / static_cast<double>(s.n_x)) *
              100.0;
    s.beta = (static_cast<double>(s.t_compressed) / static_cast<double>(s.t) -
              static_cast<double>(s.t_x_compressed) / static_cast<double>(s.t_x)) *
             100.0;
    return s;
}

inline DetectionStats score(const NormalizedSegment& suspect, const ReferencePair& refs) {
    return score(std::string_view(suspect.text), refs);
}

inline Verdict classify(const DetectionStats& stats, const Thresholds& th = {}) {
    Verdict v;
    v.stats = stats;
    v.thresholds = th;
    v.label = (stats.alpha > th.alpha_gt) || (stats.beta < th.beta_lt) ? Label::Plain
                                                                       : Label::Stego;
    return v;
}

inline Verdict detect(std::string_view raw, const ReferencePair& refs,
                      std::size_t segment_size = kDefaultSegmentSize,
                      const Thresholds& th = {}) {
    NormalizedSegment segment = normalize(raw, segment_size);
    return classify(score(segment, refs), th);
}

}  // namespace sgs
