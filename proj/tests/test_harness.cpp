#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "sgs/harness.hpp"

namespace {

std::string data_dir() { return std::string(SGS_DATA_DIR); }

sgs::Grammar shipped_grammar() {
    std::ifstream in(data_dir() + "/grammar.txt");
    REQUIRE(in);
    std::string text((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
    return sgs::load_grammar(text);
}

// Shared, lazily built experiment state so the expensive pieces run once.
struct Desk {
    sgs::Grammar grammar;
    sgs::CorpusSplit split;
    sgs::ExperimentConfig cfg;
    sgs::ReferencePair refs;
    std::vector<sgs::LabeledSample> small;  // 25 per class at 400 bytes

    static sgs::ExperimentConfig small_cfg() {
        sgs::ExperimentConfig c;
        c.count_per_class = 25;
        return c;
    }

    Desk()
        : grammar(shipped_grammar()),
          split(sgs::split_for_reference(sgs::load_corpus(data_dir() + "/corpus"),
                                         small_cfg().natural_ref_size)),
          cfg(small_cfg()),
          refs(sgs::make_references(split, grammar, cfg)),
          small(sgs::build_dataset(split.samples, grammar, cfg)) {}
};

const Desk& desk() {
    static Desk d;
    return d;
}

// Grid argmax re-derived from scratch, mirroring the documented tie-breaks:
// most correct, then fewest Type I errors, then smallest alpha_gt, then
// largest beta_lt.
sgs::Thresholds oracle_calibrate(const std::vector<sgs::LabeledSample>& training,
                                 const sgs::ReferencePair& refs,
                                 const sgs::GridSpec& grid) {
    struct Pt {
        double alpha, beta;
        bool is_plain;
    };
    std::vector<Pt> pts;
    for (const auto& s : training) {
        try {
            sgs::DetectionStats st = sgs::score(std::string_view(s.text), refs);
            pts.push_back({st.alpha, st.beta, s.label == sgs::Label::Plain});
        } catch (const sgs::Error&) {
        }
    }
    std::size_t steps = static_cast<std::size_t>((grid.hi - grid.lo) / grid.step + 0.5);
    bool have = false;
    std::size_t best_correct = 0, best_type1 = 0;
    double best_a = 0, best_b = 0;
    for (std::size_t ia = 0; ia <= steps; ++ia) {
        double a = grid.lo + static_cast<double>(ia) * grid.step;
        for (std::size_t ib = 0; ib <= steps; ++ib) {
            double b = grid.lo + static_cast<double>(ib) * grid.step;
            std::size_t correct = 0, type1 = 0;
            for (const Pt& p : pts) {
                bool plain = (p.alpha > a) || (p.beta < b);
                if (plain == p.is_plain)
                    ++correct;
                else if (p.is_plain)
                    ++type1;
            }
            bool wins = !have || correct > best_correct ||
                        (correct == best_correct &&
                         (type1 < best_type1 ||
                          (type1 == best_type1 &&
                           (a < best_a || (a == best_a && b > best_b)))));
            if (wins) {
                have = true;
                best_correct = correct;
                best_type1 = type1;
                best_a = a;
                best_b = b;
            }
        }
    }
    return {best_a, best_b};
}

}  // namespace

TEST_CASE("load_corpus returns cleaned files in name order") {
    std::vector<sgs::CorpusFile> corpus = sgs::load_corpus(data_dir() + "/corpus");
    REQUIRE(corpus.size() >= 20);
    for (std::size_t i = 1; i < corpus.size(); ++i)
        CHECK(corpus[i - 1].name < corpus[i].name);
    for (const sgs::CorpusFile& f : corpus) {
        REQUIRE_FALSE(f.cleaned.empty());
        char prev = '\0';
        for (char c : f.cleaned) {
            CHECK(sgs::is_allowed_byte(static_cast<unsigned char>(c)));
            if (c == ' ' || c == '\n') CHECK(c != prev);
            prev = c;
        }
    }
    CHECK_THROWS_AS(sgs::load_corpus(data_dir() + "/no-such-dir"), sgs::Error);
}

TEST_CASE("split_for_reference partitions the corpus") {
    std::vector<sgs::CorpusFile> corpus = sgs::load_corpus(data_dir() + "/corpus");
    std::size_t total_files = corpus.size();
    sgs::CorpusSplit split = sgs::split_for_reference(corpus, 8192);

    CHECK(split.reference.size() + split.samples.size() == total_files);
    std::size_t ref_bytes = 0;
    for (const auto& f : split.reference) ref_bytes += f.cleaned.size();
    CHECK(ref_bytes >= 8192);
    // minimal cover: dropping the last reference file falls short
    std::size_t without_last = ref_bytes - split.reference.back().cleaned.size();
    CHECK(without_last < 8192);

    std::set<std::string> ref_names, sample_names;
    for (const auto& f : split.reference) ref_names.insert(f.name);
    for (const auto& f : split.samples) sample_names.insert(f.name);
    for (const auto& n : ref_names) CHECK(sample_names.count(n) == 0);

    CHECK_THROWS_AS(
        sgs::split_for_reference({{"a.txt", std::string(100, 'x')}}, 1000000),
        sgs::InsufficientCorpus);
}

TEST_CASE("make_references produces fixed-size cleaned references") {
    const Desk& d = desk();
    CHECK(d.refs.n() == d.cfg.natural_ref_size);
    CHECK(d.refs.t() == d.cfg.stego_ref_size);

    // natural reference is the cleaned leading corpus prefix
    std::string joined;
    for (const auto& f : d.split.reference) {
        if (!joined.empty()) joined.push_back('\n');
        joined.append(f.cleaned);
    }
    CHECK(d.refs.natural() == sgs::normalize(joined, d.cfg.natural_ref_size).text);

    // stego reference is reproducible from its seed
    std::string expect = sgs::normalize(
        sgs::generate_stegotext(d.grammar, d.cfg.stego_ref_seed, d.cfg.stego_ref_size),
        d.cfg.stego_ref_size).text;
    CHECK(d.refs.stego() == expect);
}

TEST_CASE("build_dataset yields balanced fixed-size labeled segments") {
    const Desk& d = desk();
    sgs::ExperimentConfig cfg = d.cfg;
    cfg.count_per_class = 200;
    std::vector<sgs::LabeledSample> ds = sgs::build_dataset(d.split.samples, d.grammar, cfg);

    REQUIRE(ds.size() == 400);
    std::size_t n_plain = 0, n_stego = 0;
    std::set<std::string> plain_texts;
    for (const sgs::LabeledSample& s : ds) {
        REQUIRE(s.text.size() == cfg.segment_size);
        char prev = '\0';
        for (char c : s.text) {
            CHECK(sgs::is_allowed_byte(static_cast<unsigned char>(c)));
            if (c == ' ' || c == '\n') CHECK(c != prev);
            prev = c;
        }
        if (s.label == sgs::Label::Plain) {
            ++n_plain;
            CHECK(s.origin.find('@') != std::string::npos);
            plain_texts.insert(s.text);
        } else {
            ++n_stego;
            CHECK(s.origin.rfind("stego:seed=", 0) == 0);
        }
    }
    CHECK(n_plain == 200);
    CHECK(n_stego == 200);
    // disjoint windows: no duplicated plain segment
    CHECK(plain_texts.size() == 200);
}

TEST_CASE("build_dataset is deterministic per seed pair") {
    const Desk& d = desk();
    std::vector<sgs::LabeledSample> again =
        sgs::build_dataset(d.split.samples, d.grammar, d.cfg);
    REQUIRE(again.size() == d.small.size());
    for (std::size_t i = 0; i < again.size(); ++i) {
        CHECK(again[i].text == d.small[i].text);
        CHECK(again[i].origin == d.small[i].origin);
        CHECK(again[i].label == d.small[i].label);
    }

    sgs::ExperimentConfig other = d.cfg;
    other.plain_seed += 1;
    other.stego_seed += 1;
    std::vector<sgs::LabeledSample> moved =
        sgs::build_dataset(d.split.samples, d.grammar, other);
    bool any_differs = false;
    for (std::size_t i = 0; i < moved.size(); ++i)
        if (moved[i].text != d.small[i].text) any_differs = true;
    CHECK(any_differs);
}

TEST_CASE("build_dataset rejects a corpus with too few segments") {
    const Desk& d = desk();
    std::vector<sgs::CorpusFile> tiny = {{"tiny.txt", "a few clean words only"}};
    CHECK_THROWS_AS(sgs::build_dataset(tiny, d.grammar, d.cfg), sgs::InsufficientCorpus);

    sgs::ExperimentConfig bad = d.cfg;
    bad.count_per_class = 0;
    CHECK_THROWS_AS(sgs::build_dataset(d.split.samples, d.grammar, bad), sgs::Error);
}

TEST_CASE("run_experiment keeps the confusion counts conserved") {
    const Desk& d = desk();
    sgs::ExperimentReport r = sgs::run_experiment(d.small, d.refs);

    CHECK(r.n_plain == 25);
    CHECK(r.n_stego == 25);
    CHECK(r.failures == 0);
    CHECK(r.tp + r.fn == r.n_stego);
    CHECK(r.tn + r.fp == r.n_plain);
    CHECK(r.tp + r.tn + r.fp + r.fn + r.failures == d.small.size());
    CHECK(r.accuracy_pct ==
          100.0 * double(r.tp + r.tn) / double(d.small.size()));
    CHECK(r.type1_pct == 100.0 * double(r.fp) / double(r.n_plain));
    CHECK(r.type2_pct == 100.0 * double(r.fn) / double(r.n_stego));
    CHECK(r.ms_per_detect >= 0.0);

    CHECK_THROWS_AS(sgs::run_experiment({}, d.refs), sgs::EmptyDataset);
}

TEST_CASE("swapping every label mirrors the report") {
    const Desk& d = desk();
    std::vector<sgs::LabeledSample> flipped = d.small;
    for (auto& s : flipped)
        s.label = s.label == sgs::Label::Plain ? sgs::Label::Stego : sgs::Label::Plain;

    sgs::ExperimentReport r = sgs::run_experiment(d.small, d.refs);
    sgs::ExperimentReport f = sgs::run_experiment(flipped, d.refs);
    REQUIRE(r.failures == 0);
    REQUIRE(f.failures == 0);
    CHECK(f.tp == r.fp);
    CHECK(f.tn == r.fn);
    CHECK(f.fp == r.tp);
    CHECK(f.fn == r.tn);
    CHECK(f.accuracy_pct == Catch::Approx(100.0 - r.accuracy_pct).margin(1e-9));
}

TEST_CASE("segments copied from the reference read as plain text") {
    const Desk& d = desk();
    std::vector<sgs::LabeledSample> echoes;
    for (std::size_t k = 0; k < 10; ++k)
        echoes.push_back({d.refs.natural().substr(k * 400, 400), sgs::Label::Plain,
                          "echo@" + std::to_string(k * 400)});
    sgs::ExperimentReport r = sgs::run_experiment(echoes, d.refs);
    CHECK(r.failures == 0);
    CHECK(r.fp == 0);
    CHECK(r.accuracy_pct == 100.0);
}

TEST_CASE("calibrate_thresholds matches an independent grid argmax") {
    const Desk& d = desk();
    sgs::GridSpec grid;  // default -2..3 step 0.05
    sgs::Thresholds got = sgs::calibrate_thresholds(d.small, d.refs, grid);
    sgs::Thresholds want = oracle_calibrate(d.small, d.refs, grid);
    CHECK(got.alpha_gt == want.alpha_gt);
    CHECK(got.beta_lt == want.beta_lt);

    // both axes land on exact grid points
    auto on_grid = [&](double v) {
        double k = std::round((v - grid.lo) / grid.step);
        return k >= 0 && grid.lo + k * grid.step == v;
    };
    CHECK(on_grid(got.alpha_gt));
    CHECK(on_grid(got.beta_lt));

    // the desk classes separate, so training accuracy is perfect
    sgs::ExperimentReport trained = sgs::run_experiment(d.small, d.refs, got);
    CHECK(trained.accuracy_pct == 100.0);

    CHECK_THROWS_AS(sgs::calibrate_thresholds({}, d.refs, grid), sgs::EmptyDataset);
    CHECK_THROWS_AS(sgs::calibrate_thresholds(d.small, d.refs, {0.0, 1.0, 0.0}),
                    sgs::Error);
    CHECK_THROWS_AS(sgs::calibrate_thresholds(d.small, d.refs, {1.0, 0.0, 0.1}),
                    sgs::Error);
}

TEST_CASE("restricted grids pin the calibration result") {
    const Desk& d = desk();
    // single-point grid: the only candidate wins whatever the data says
    sgs::Thresholds o = sgs::calibrate_thresholds(d.small, d.refs, {0.7, 0.7, 0.05});
    CHECK(o.alpha_gt == 0.7);
    CHECK(o.beta_lt == 0.7);

    // two points per axis around the stock thresholds: ties resolve to the
    // smallest alpha_gt and largest beta_lt, reproducing (0.9, 1.0)
    sgs::Thresholds s = sgs::calibrate_thresholds(d.small, d.refs, {0.9, 1.0, 0.1});
    CHECK(s.alpha_gt == 0.9);
    CHECK(s.beta_lt == 1.0);
}

TEST_CASE("size_sweep mirrors run_experiment and validates its sizes") {
    const Desk& d = desk();
    sgs::DatasetBuilder fixed = [&](std::size_t) { return d.small; };
    std::vector<sgs::CurvePoint> curve = sgs::size_sweep(fixed, {400}, d.refs);
    REQUIRE(curve.size() == 1);
    CHECK(curve[0].size == 400);
    CHECK(curve[0].accuracy == sgs::run_experiment(d.small, d.refs).accuracy_pct);

    CHECK(sgs::size_sweep(fixed, {}, d.refs).empty());
    CHECK_THROWS_AS(sgs::size_sweep(fixed, {40}, d.refs), sgs::Error);
    CHECK_THROWS_AS(sgs::size_sweep(fixed, {100, 100}, d.refs), sgs::Error);
    CHECK_THROWS_AS(sgs::size_sweep(fixed, {400, 200}, d.refs), sgs::Error);

    sgs::DatasetBuilder real = [&](std::size_t sz) {
        sgs::ExperimentConfig c = d.cfg;
        c.segment_size = sz;
        c.count_per_class = 10;
        return sgs::build_dataset(d.split.samples, d.grammar, c);
    };
    auto rows = sgs::size_sweep_reports(real, {100, 400}, d.refs);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].first == 100);
    CHECK(rows[1].first == 400);
    for (const auto& [size, rep] : rows) {
        CHECK(rep.n_plain == 10);
        CHECK(rep.n_stego == 10);
        CHECK(rep.tp + rep.tn + rep.fp + rep.fn + rep.failures == 20);
    }
}

TEST_CASE("calibrated_sweep_reports composes calibration and evaluation") {
    const Desk& d = desk();
    sgs::ExperimentConfig eval_cfg = d.cfg;
    eval_cfg.count_per_class = 10;
    eval_cfg.plain_seed = 101;
    eval_cfg.stego_seed = 202;
    std::vector<sgs::LabeledSample> eval_ds =
        sgs::build_dataset(d.split.samples, d.grammar, eval_cfg);

    sgs::DatasetBuilder calib_builder = [&](std::size_t) { return d.small; };
    sgs::DatasetBuilder eval_builder = [&](std::size_t) { return eval_ds; };

    auto rows = sgs::calibrated_sweep_reports(calib_builder, eval_builder, {400}, d.refs);
    REQUIRE(rows.size() == 1);
    CHECK(rows[0].first == 400);

    sgs::Thresholds th = sgs::calibrate_thresholds(d.small, d.refs);
    sgs::ExperimentReport direct = sgs::run_experiment(eval_ds, d.refs, th);
    CHECK(rows[0].second.accuracy_pct == direct.accuracy_pct);
    CHECK(rows[0].second.tp == direct.tp);
    CHECK(rows[0].second.tn == direct.tn);
    CHECK(rows[0].second.fp == direct.fp);
    CHECK(rows[0].second.fn == direct.fn);

    CHECK_THROWS_AS(
        sgs::calibrated_sweep_reports(calib_builder, eval_builder, {40}, d.refs),
        sgs::Error);
    CHECK_THROWS_AS(
        sgs::calibrated_sweep_reports(calib_builder, eval_builder, {400, 100}, d.refs),
        sgs::Error);
}

TEST_CASE("write_report_csv emits the fixed column format") {
    sgs::ExperimentReport r;
    r.n_plain = 8;
    r.n_stego = 8;
    r.tp = 7;
    r.tn = 7;
    r.fp = 1;
    r.fn = 1;
    r.failures = 0;
    r.accuracy_pct = 87.5;
    r.type1_pct = 12.5;
    r.type2_pct = 12.5;
    r.ms_per_detect = 1.25;

    std::ostringstream with_timing;
    sgs::write_report_csv(with_timing, {{400, r}});
    CHECK(with_timing.str() ==
          "size,n_plain,n_stego,tp,tn,fp,fn,failures,accuracy_pct,type1_pct,type2_pct,"
          "ms_per_detect\n"
          "400,8,8,7,7,1,1,0,87.5000,12.5000,12.5000,1.250\n");

    std::ostringstream no_timing;
    sgs::write_report_csv(no_timing, {{400, r}}, false);
    CHECK(no_timing.str().find(",0.000\n") != std::string::npos);
    CHECK(no_timing.str().find("1.250") == std::string::npos);
}
