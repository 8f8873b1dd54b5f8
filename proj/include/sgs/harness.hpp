#pragma once

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <ostream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sgs/detector.hpp"
#include "sgs/errors.hpp"
#include "sgs/grammar.hpp"
#include "sgs/stego.hpp"
#include "sgs/textnorm.hpp"

namespace sgs {

struct LabeledSample {
    std::string text;
    Label label = Label::Plain;
    std::string origin;  // source file + offset, or generation seed
};

struct ExperimentConfig {
    std::size_t segment_size = kDefaultSegmentSize;
    std::size_t count_per_class = 200;
    double calibration_split = 0.5;
    std::uint64_t plain_seed = 1;      // picks plain segment positions
    std::uint64_t stego_seed = 2;      // base for per-sample payload seeds
    std::uint64_t stego_ref_seed = 42; // drives the stego reference text
    std::size_t natural_ref_size = 8192;
    std::size_t stego_ref_size = 2048;
    std::size_t block_size = kDefaultBlockSize;
};

struct CurvePoint {
    std::size_t size = 0;
    double accuracy = 0.0;
};

struct ExperimentReport {
    std::size_t n_plain = 0;
    std::size_t n_stego = 0;
    std::size_t tp = 0;  // stego called stego
    std::size_t tn = 0;  // plain called plain
    std::size_t fp = 0;  // plain called stego (Type I)
    std::size_t fn = 0;  // stego called plain (Type II)
    std::size_t failures = 0;
    double accuracy_pct = 0.0;
    double type1_pct = 0.0;
    double type2_pct = 0.0;
    double ms_per_detect = 0.0;
};

struct CorpusFile {
    std::string name;
    std::string cleaned;
};

struct CorpusSplit {
    std::vector<CorpusFile> reference;  // files consumed by the natural reference
    std::vector<CorpusFile> samples;    // files left for dataset segments
};

struct GridSpec {
    double lo = -2.0;
    double hi = 3.0;
    double step = 0.05;
};

namespace detail {

inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t i) {
    std::uint64_t z = base + 0x9E3779B97F4A7C15ull * (i + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

inline std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error("cannot open " + p.string());
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return data;
}

inline double pct(std::size_t part, std::size_t whole) {
    return whole == 0 ? 0.0 : static_cast<double>(part) / static_cast<double>(whole) * 100.0;
}

}  // namespace detail

inline std::vector<CorpusFile> load_corpus(const std::filesystem::path& dir,
                                           std::string_view punctuation = kDefaultPunctuation) {
    if (!std::filesystem::is_directory(dir))
        throw Error("corpus directory not found: " + dir.string());
    std::vector<std::filesystem::path> paths;
    for (const auto& entry : std::filesystem::directory_iterator(dir))
        if (entry.is_regular_file()) paths.push_back(entry.path());
    std::sort(paths.begin(), paths.end(),
              [](const auto& a, const auto& b) { return a.filename() < b.filename(); });
    std::vector<CorpusFile> out;
    out.reserve(paths.size());
    for (const auto& p : paths)
        out.push_back({p.filename().string(), clean_text(detail::read_file(p), punctuation)});
    return out;
}

// Leading files are dedicated to the natural reference until it is covered;
// the rest feed the dataset, so reference and samples never share a file.
inline CorpusSplit split_for_reference(std::vector<CorpusFile> corpus,
                                       std::size_t natural_ref_size) {
    CorpusSplit split;
    std::size_t covered = 0;
    std::size_t i = 0;
    for (; i < corpus.size() && covered < natural_ref_size; ++i) {
        covered += corpus[i].cleaned.size();
        split.reference.push_back(std::move(corpus[i]));
    }
    if (covered < natural_ref_size)
        throw InsufficientCorpus("corpus supplies " + std::to_string(covered) +
                                 " cleaned bytes, natural reference needs " +
                                 std::to_string(natural_ref_size));
    for (; i < corpus.size(); ++i) split.samples.push_back(std::move(corpus[i]));
    return split;
}

inline ReferencePair make_references(const CorpusSplit& split, const Grammar& grammar,
                                     const ExperimentConfig& cfg) {
    std::string natural_raw;
    for (const CorpusFile& f : split.reference) {
        if (!natural_raw.empty()) natural_raw.push_back('\n');
        natural_raw.append(f.cleaned);
    }
    std::string natural = normalize(natural_raw, cfg.natural_ref_size).text;
    std::string stego =
        normalize(generate_stegotext(grammar, cfg.stego_ref_seed, cfg.stego_ref_size),
                  cfg.stego_ref_size)
            .text;
    return ReferencePair(std::move(natural), std::move(stego), cfg.block_size);
}

// Plain samples: seeded choice of disjoint segment-size windows over the
// cleaned sample files. Stego samples: embed() with seeded random payloads,
// normalized to the same size.
inline std::vector<LabeledSample> build_dataset(const std::vector<CorpusFile>& files,
                                                const Grammar& grammar,
                                                const ExperimentConfig& cfg) {
    if (cfg.count_per_class == 0) throw Error("count_per_class must be >= 1");
    if (cfg.segment_size == 0) throw Error("segment_size must be >= 1");

    std::string pool;
    std::vector<std::pair<std::size_t, std::string>> file_starts;  // pool offset -> name
    for (const CorpusFile& f : files) {
        if (f.cleaned.empty()) continue;
        if (!pool.empty()) {
            // keep the seam clean: separate joined words, never stack whitespace
            char last = pool.back(), first = f.cleaned.front();
            bool last_ws = last == ' ' || last == '\n';
            bool first_ws = first == ' ' || first == '\n';
            if (!last_ws && !first_ws)
                pool.push_back('\n');
            else if (last_ws && last == first)
                pool.pop_back();
        }
        file_starts.emplace_back(pool.size(), f.name);
        pool.append(f.cleaned);
    }

    std::size_t slots = pool.size() / cfg.segment_size;
    if (slots < cfg.count_per_class)
        throw InsufficientCorpus("sample files supply " + std::to_string(pool.size()) +
                                 " cleaned bytes (" + std::to_string(slots) +
                                 " disjoint segments), need " +
                                 std::to_string(cfg.count_per_class) + " of " +
                                 std::to_string(cfg.segment_size) + " bytes");

    std::vector<std::size_t> order(slots);
    for (std::size_t i = 0; i < slots; ++i) order[i] = i;
    Xorshift64Star rng(cfg.plain_seed);
    for (std::size_t i = slots; i > 1; --i)
        std::swap(order[i - 1], order[rng.next_word() % i]);

    std::vector<LabeledSample> dataset;
    dataset.reserve(2 * cfg.count_per_class);
    for (std::size_t i = 0; i < cfg.count_per_class; ++i) {
        std::size_t offset = order[i] * cfg.segment_size;
        std::string name = "corpus";
        for (const auto& [start, fname] : file_starts)
            if (start <= offset) name = fname;
        dataset.push_back({pool.substr(offset, cfg.segment_size), Label::Plain,
                           name + "@" + std::to_string(offset)});
    }

    for (std::size_t i = 0; i < cfg.count_per_class; ++i) {
        std::uint64_t seed = detail::mix_seed(cfg.stego_seed, i);
        std::size_t n_bits = std::max<std::size_t>(64, cfg.segment_size);
        std::string cleaned;
        for (;;) {
            cleaned = clean_text(embed(grammar, random_bits(seed, n_bits)));
            if (cleaned.size() >= cfg.segment_size) break;
            if (n_bits > (std::size_t{1} << 28))
                throw Error("grammar produces too little text per payload bit");
            n_bits *= 2;
        }
        dataset.push_back({cleaned.substr(0, cfg.segment_size), Label::Stego,
                           "stego:seed=" + std::to_string(seed)});
    }
    return dataset;
}

inline std::vector<LabeledSample> build_dataset(const std::filesystem::path& corpus_dir,
                                                const Grammar& grammar,
                                                const ExperimentConfig& cfg) {
    CorpusSplit split = split_for_reference(load_corpus(corpus_dir), cfg.natural_ref_size);
    return build_dataset(split.samples, grammar, cfg);
}

inline ExperimentReport run_experiment(const std::vector<LabeledSample>& dataset,
                                       const ReferencePair& refs, const Thresholds& th = {}) {
    if (dataset.empty()) throw EmptyDataset("run_experiment: dataset is empty");
    ExperimentReport r;
    double total_ms = 0.0;
    for (const LabeledSample& s : dataset) {
        if (s.label == Label::Plain)
            ++r.n_plain;
        else
            ++r.n_stego;
        auto t0 = std::chrono::steady_clock::now();
        Label got;
        try {
            got = classify(score(std::string_view(s.text), refs), th).label;
        } catch (const Error&) {
            ++r.failures;
            continue;
        }
        auto t1 = std::chrono::steady_clock::now();
        total_ms += std::chrono::duration<double, std::milli>(t1 - t0).count();
        if (s.label == Label::Plain) {
            if (got == Label::Plain)
                ++r.tn;
            else
                ++r.fp;
        } else {
            if (got == Label::Stego)
                ++r.tp;
            else
                ++r.fn;
        }
    }
    std::size_t analyzed = dataset.size() - r.failures;
    r.accuracy_pct = detail::pct(r.tp + r.tn, dataset.size());
    r.type1_pct = detail::pct(r.fp, r.n_plain);
    r.type2_pct = detail::pct(r.fn, r.n_stego);
    r.ms_per_detect = analyzed == 0 ? 0.0 : total_ms / static_cast<double>(analyzed);
    return r;
}

using DatasetBuilder = std::function<std::vector<LabeledSample>(std::size_t segment_size)>;

namespace detail {

inline void check_sweep_sizes(const std::vector<std::size_t>& sizes) {
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        if (sizes[i] < 50) throw Error("sweep sizes must be >= 50");
        if (i > 0 && sizes[i] <= sizes[i - 1]) throw Error("sweep sizes must be ascending");
    }
}

}  // namespace detail

inline std::vector<std::pair<std::size_t, ExperimentReport>> size_sweep_reports(
    const DatasetBuilder& builder, const std::vector<std::size_t>& sizes,
    const ReferencePair& refs, const Thresholds& th = {}) {
    detail::check_sweep_sizes(sizes);
    std::vector<std::pair<std::size_t, ExperimentReport>> out;
    out.reserve(sizes.size());
    for (std::size_t size : sizes)
        out.emplace_back(size, run_experiment(builder(size), refs, th));
    return out;
}

inline std::vector<CurvePoint> size_sweep(const DatasetBuilder& builder,
                                          const std::vector<std::size_t>& sizes,
                                          const ReferencePair& refs, const Thresholds& th = {}) {
    std::vector<CurvePoint> curve;
    for (const auto& [size, report] : size_sweep_reports(builder, sizes, refs, th))
        curve.push_back({size, report.accuracy_pct});
    return curve;
}

// Exhaustive grid search; thresholds are exact hundredths so the stock
// defaults (0.9, 1.0) are representable grid points.
inline Thresholds calibrate_thresholds(const std::vector<LabeledSample>& training,
                                       const ReferencePair& refs, const GridSpec& grid = {}) {
    if (training.empty()) throw EmptyDataset("calibrate_thresholds: dataset is empty");
    if (!(grid.step > 0) || !(grid.hi >= grid.lo)) throw Error("malformed grid spec");

    struct Scored {
        double alpha, beta;
        Label label;
    };
    std::vector<Scored> scored;
    scored.reserve(training.size());
    std::size_t failures = 0;
    for (const LabeledSample& s : training) {
        try {
            DetectionStats st = score(std::string_view(s.text), refs);
            scored.push_back({st.alpha, st.beta, s.label});
        } catch (const Error&) {
            ++failures;  // never counted correct under any thresholds
        }
    }

    std::size_t steps = static_cast<std::size_t>((grid.hi - grid.lo) / grid.step + 0.5);
    auto grid_value = [&](std::size_t i) {
        return grid.lo + static_cast<double>(i) * grid.step;
    };

    struct Best {
        std::size_t correct = 0;
        std::size_t type1 = 0;
        double alpha_gt = 0.0, beta_lt = 0.0;
        bool set = false;
    } best;

    for (std::size_t ia = 0; ia <= steps; ++ia) {
        double a = grid_value(ia);
        for (std::size_t ib = 0; ib <= steps; ++ib) {
            double b = grid_value(ib);
            std::size_t correct = 0, type1 = 0;
            for (const Scored& s : scored) {
                bool plain = (s.alpha > a) || (s.beta < b);
                if (plain == (s.label == Label::Plain))
                    ++correct;
                else if (s.label == Label::Plain)
                    ++type1;
            }
            bool wins = !best.set || correct > best.correct ||
                        (correct == best.correct &&
                         (type1 < best.type1 ||
                          (type1 == best.type1 &&
                           (a < best.alpha_gt ||
                            (a == best.alpha_gt && b > best.beta_lt)))));
            if (wins) best = {correct, type1, a, b, true};
        }
    }
    return {best.alpha_gt, best.beta_lt};
}

// Sweep with a per-size operating point: the deltas scale with suspect size,
// so thresholds are re-fit on the calibration dataset at each size before the
// evaluation dataset is scored.
inline std::vector<std::pair<std::size_t, ExperimentReport>> calibrated_sweep_reports(
    const DatasetBuilder& calib_builder, const DatasetBuilder& eval_builder,
    const std::vector<std::size_t>& sizes, const ReferencePair& refs,
    const GridSpec& grid = {}) {
    detail::check_sweep_sizes(sizes);
    std::vector<std::pair<std::size_t, ExperimentReport>> out;
    out.reserve(sizes.size());
    for (std::size_t size : sizes) {
        Thresholds th = calibrate_thresholds(calib_builder(size), refs, grid);
        out.emplace_back(size, run_experiment(eval_builder(size), refs, th));
    }
    return out;
}

// One CSV row per (size, report); timing is an opt-out column so equal-seed
// runs can be compared byte for byte.
inline void write_report_csv(std::ostream& out,
                             const std::vector<std::pair<std::size_t, ExperimentReport>>& rows,
                             bool include_timing = true) {
    out << "size,n_plain,n_stego,tp,tn,fp,fn,failures,accuracy_pct,type1_pct,type2_pct,"
           "ms_per_detect\n";
    char buf[64];
    for (const auto& [size, r] : rows) {
        out << size << ',' << r.n_plain << ',' << r.n_stego << ',' << r.tp << ',' << r.tn << ','
            << r.fp << ',' << r.fn << ',' << r.failures << ',';
        std::snprintf(buf, sizeof buf, "%.4f,%.4f,%.4f,", r.accuracy_pct, r.type1_pct,
                      r.type2_pct);
        out << buf;
        std::snprintf(buf, sizeof buf, "%.3f", include_timing ? r.ms_per_detect : 0.0);
        out << buf << '\n';
    }
}

}  // namespace sgs
