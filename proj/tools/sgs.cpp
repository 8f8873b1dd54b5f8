// sgs: text-steganalysis toolbox. Subcommands: normalize | embed | extract |
// compress | decompress | detect | bench. Exit codes: 0 success, 2 usage or
// input error, 3 internal failure.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sgs/detector.hpp"
#include "sgs/harness.hpp"
#include "sgs/stego.hpp"

namespace {

std::string read_stream(std::istream& in) {
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string read_input(const std::string& path) {
    if (path.empty()) return read_stream(std::cin);
    std::ifstream f(path, std::ios::binary);
    if (!f) throw sgs::Error("cannot open " + path);
    return read_stream(f);
}

void write_output(const std::string& path, std::string_view data) {
    if (path.empty()) {
        std::cout.write(data.data(), static_cast<std::streamsize>(data.size()));
        std::cout.flush();
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw sgs::Error("cannot open " + path + " for writing");
    f.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!f) throw sgs::Error("write to " + path + " failed");
}

std::vector<std::uint8_t> to_bytes(std::string_view s) {
    return std::vector<std::uint8_t>(s.begin(), s.end());
}

std::string to_string(const std::vector<std::uint8_t>& v) {
    return std::string(v.begin(), v.end());
}

struct BenchOptions {
    std::string corpus_dir;
    std::string grammar_path;
    std::size_t count = 200;
    std::size_t size = sgs::kDefaultSegmentSize;
    bool calibrate = false;
    std::vector<std::size_t> sweep;
    std::string report_path;
    bool json = false;
    bool no_timing = false;
    std::uint64_t seed = 1;
    std::size_t natural_ref_size = 8192;
    std::size_t stego_ref_size = 2048;
    std::uint64_t stego_ref_seed = 42;
    std::size_t block_size = sgs::kDefaultBlockSize;
};

nlohmann::json report_to_json(std::size_t size, const sgs::ExperimentReport& r,
                              bool include_timing) {
    return {{"size", size},
            {"n_plain", r.n_plain},
            {"n_stego", r.n_stego},
            {"tp", r.tp},
            {"tn", r.tn},
            {"fp", r.fp},
            {"fn", r.fn},
            {"failures", r.failures},
            {"accuracy_pct", r.accuracy_pct},
            {"type1_pct", r.type1_pct},
            {"type2_pct", r.type2_pct},
            {"ms_per_detect", include_timing ? r.ms_per_detect : 0.0}};
}

int run_bench(const BenchOptions& opt) {
    sgs::Grammar grammar = sgs::load_grammar(read_input(opt.grammar_path));

    sgs::ExperimentConfig cfg;
    cfg.segment_size = opt.size;
    cfg.count_per_class = opt.count;
    cfg.natural_ref_size = opt.natural_ref_size;
    cfg.stego_ref_size = opt.stego_ref_size;
    cfg.stego_ref_seed = opt.stego_ref_seed;
    cfg.block_size = opt.block_size;

    sgs::CorpusSplit split =
        sgs::split_for_reference(sgs::load_corpus(opt.corpus_dir), cfg.natural_ref_size);
    sgs::ReferencePair refs = sgs::make_references(split, grammar, cfg);

    std::vector<sgs::CorpusFile> calib_files, eval_files;
    if (opt.calibrate) {
        for (std::size_t i = 0; i < split.samples.size(); ++i)
            (i % 2 == 0 ? calib_files : eval_files).push_back(split.samples[i]);
    } else {
        eval_files = split.samples;
    }

    sgs::ExperimentConfig calib_cfg = cfg;
    calib_cfg.plain_seed = opt.seed + 7;
    calib_cfg.stego_seed = opt.seed + 2000003;

    sgs::ExperimentConfig eval_cfg = cfg;
    eval_cfg.plain_seed = opt.seed;
    eval_cfg.stego_seed = opt.seed + 1000003;

    std::vector<std::pair<std::size_t, sgs::ExperimentReport>> rows;
    if (!opt.sweep.empty()) {
        sgs::DatasetBuilder eval_builder = [&](std::size_t segment_size) {
            sgs::ExperimentConfig c = eval_cfg;
            c.segment_size = segment_size;
            return sgs::build_dataset(eval_files, grammar, c);
        };
        if (opt.calibrate) {
            // thresholds are size-dependent; re-fit at every sweep point
            sgs::DatasetBuilder calib_builder = [&](std::size_t segment_size) {
                sgs::ExperimentConfig c = calib_cfg;
                c.segment_size = segment_size;
                return sgs::build_dataset(calib_files, grammar, c);
            };
            rows = sgs::calibrated_sweep_reports(calib_builder, eval_builder, opt.sweep, refs);
        } else {
            rows = sgs::size_sweep_reports(eval_builder, opt.sweep, refs, sgs::Thresholds{});
        }
    } else {
        sgs::Thresholds th;
        if (opt.calibrate) {
            th = sgs::calibrate_thresholds(sgs::build_dataset(calib_files, grammar, calib_cfg),
                                           refs);
            std::cerr << "calibrated thresholds: alpha_gt=" << th.alpha_gt
                      << " beta_lt=" << th.beta_lt << "\n";
        }
        rows.emplace_back(opt.size,
                          sgs::run_experiment(sgs::build_dataset(eval_files, grammar, eval_cfg),
                                              refs, th));
    }

    std::string body;
    if (opt.json) {
        nlohmann::json j = nlohmann::json::array();
        for (const auto& [size, r] : rows) j.push_back(report_to_json(size, r, !opt.no_timing));
        body = j.dump(2) + "\n";
    } else {
        std::ostringstream ss;
        sgs::write_report_csv(ss, rows, !opt.no_timing);
        body = ss.str();
    }
    write_output(opt.report_path, body);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"compression-based text steganalysis toolbox"};
    app.require_subcommand(1);

    // normalize
    std::string in_path, out_path;
    std::size_t seg_size = sgs::kDefaultSegmentSize;
    auto* norm = app.add_subcommand("normalize", "clean raw text and cut one segment");
    norm->add_option("--size", seg_size, "segment size in bytes");
    norm->add_option("--in", in_path, "input file (default stdin)");
    norm->add_option("--out", out_path, "output file (default stdout)");

    // embed / extract
    std::string grammar_path;
    std::uint64_t seed = 1;
    std::size_t n_bits = 0;
    bool framed = false;
    auto* embed = app.add_subcommand("embed", "generate stegotext from seeded random bits");
    embed->add_option("--grammar", grammar_path, "grammar file")->required();
    embed->add_option("--seed", seed, "payload generator seed");
    embed->add_option("--bits", n_bits, "payload length in bits")->required();
    embed->add_flag("--framed", framed, "prefix a 32-bit length header");
    embed->add_option("--out", out_path, "output file (default stdout)");

    auto* extract = app.add_subcommand("extract", "recover payload bits from stegotext");
    extract->add_option("--grammar", grammar_path, "grammar file")->required();
    extract->add_flag("--framed", framed, "strip the 32-bit length header");
    extract->add_option("--in", in_path, "input file (default stdin)");
    extract->add_option("--out", out_path, "output file (default stdout)");

    // compress / decompress
    std::size_t block_size = sgs::kDefaultBlockSize;
    auto* comp = app.add_subcommand("compress", "compress bytes to a blob");
    comp->add_option("--block-size", block_size, "compression block size");
    comp->add_option("--in", in_path, "input file (default stdin)");
    comp->add_option("--out", out_path, "output file (default stdout)");

    auto* decomp = app.add_subcommand("decompress", "restore bytes from a blob");
    decomp->add_option("--in", in_path, "input file (default stdin)");
    decomp->add_option("--out", out_path, "output file (default stdout)");

    // detect
    std::string natural_ref_path, stego_ref_path;
    sgs::Thresholds th;
    bool as_json = false;
    std::vector<std::string> suspect_files;
    auto* detect = app.add_subcommand("detect", "classify suspect files as Plain or Stego");
    detect->add_option("--natural-ref", natural_ref_path, "natural reference text")->required();
    detect->add_option("--stego-ref", stego_ref_path, "stego reference text")->required();
    detect->add_option("--size", seg_size, "segment size in bytes");
    detect->add_option("--alpha-gt", th.alpha_gt, "plain when alpha exceeds this");
    detect->add_option("--beta-lt", th.beta_lt, "plain when beta is below this");
    detect->add_option("--block-size", block_size, "compression block size");
    detect->add_flag("--json", as_json, "machine-readable output");
    detect->add_option("files", suspect_files, "suspect files")->required();

    // bench
    BenchOptions bench_opt;
    auto* bench = app.add_subcommand("bench", "run the detection experiment");
    bench->add_option("--corpus", bench_opt.corpus_dir, "directory of plain-text files")
        ->required();
    bench->add_option("--grammar", bench_opt.grammar_path, "grammar file")->required();
    bench->add_option("--count", bench_opt.count, "samples per class");
    bench->add_option("--size", bench_opt.size, "segment size in bytes");
    bench->add_flag("--calibrate", bench_opt.calibrate,
                    "grid-search thresholds on a held-out file split");
    bench->add_option("--sweep", bench_opt.sweep, "comma-separated segment sizes")
        ->delimiter(',');
    bench->add_option("--report", bench_opt.report_path, "report file (default stdout)");
    bench->add_flag("--json", bench_opt.json, "emit JSON instead of CSV");
    bench->add_flag("--no-timing", bench_opt.no_timing,
                    "zero the timing column for byte-reproducible reports");
    bench->add_option("--seed", bench_opt.seed, "experiment seed");
    bench->add_option("--natural-ref-size", bench_opt.natural_ref_size,
                      "natural reference bytes");
    bench->add_option("--stego-ref-size", bench_opt.stego_ref_size, "stego reference bytes");
    bench->add_option("--stego-ref-seed", bench_opt.stego_ref_seed, "stego reference seed");
    bench->add_option("--block-size", bench_opt.block_size, "compression block size");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (norm->parsed()) {
            sgs::NormalizedSegment seg = sgs::normalize(read_input(in_path), seg_size);
            write_output(out_path, seg.text);
            return 0;
        }
        if (embed->parsed()) {
            sgs::Grammar g = sgs::load_grammar(read_input(grammar_path));
            sgs::BitStream payload = sgs::random_bits(seed, n_bits);
            std::string text = framed ? sgs::embed_framed(g, payload) : sgs::embed(g, payload);
            write_output(out_path, text + "\n");
            return 0;
        }
        if (extract->parsed()) {
            sgs::Grammar g = sgs::load_grammar(read_input(grammar_path));
            sgs::BitStream bits =
                framed ? sgs::extract_framed(g, read_input(in_path))
                       : sgs::extract(g, read_input(in_path));
            std::string line;
            line.reserve(bits.size() + 1);
            for (std::uint8_t b : bits) line.push_back(b ? '1' : '0');
            line.push_back('\n');
            write_output(out_path, line);
            return 0;
        }
        if (comp->parsed()) {
            std::string data = read_input(in_path);
            std::vector<std::uint8_t> blob = sgs::compress(to_bytes(data), block_size);
            write_output(out_path, to_string(blob));
            return 0;
        }
        if (decomp->parsed()) {
            std::string blob = read_input(in_path);
            std::vector<std::uint8_t> data = sgs::decompress(to_bytes(blob));
            write_output(out_path, to_string(data));
            return 0;
        }
        if (detect->parsed()) {
            sgs::ReferencePair refs(read_input(natural_ref_path), read_input(stego_ref_path),
                                    block_size);
            nlohmann::json results = nlohmann::json::array();
            for (const std::string& file : suspect_files) {
                sgs::Verdict v = sgs::detect(read_input(file), refs, seg_size, th);
                if (as_json) {
                    results.push_back(
                        {{"file", file},
                         {"verdict", sgs::to_string(v.label)},
                         {"alpha", v.stats.alpha},
                         {"beta", v.stats.beta},
                         {"sizes",
                          {{"n", v.stats.n},
                           {"n_x", v.stats.n_x},
                           {"t", v.stats.t},
                           {"t_x", v.stats.t_x},
                           {"n_compressed", v.stats.n_compressed},
                           {"n_x_compressed", v.stats.n_x_compressed},
                           {"t_compressed", v.stats.t_compressed},
                           {"t_x_compressed", v.stats.t_x_compressed}}}});
                } else {
                    std::cout << file << ": " << sgs::to_string(v.label)
                              << " (alpha=" << v.stats.alpha << ", beta=" << v.stats.beta
                              << ")\n";
                }
            }
            if (as_json) std::cout << results.dump(2) << "\n";
            return 0;
        }
        if (bench->parsed()) return run_bench(bench_opt);
    } catch (const sgs::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
