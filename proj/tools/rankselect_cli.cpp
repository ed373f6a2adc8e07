#include <cstdio>
#include <exception>
#include <filesystem>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "rankselect/bench.hpp"
#include "rankselect/corpus.hpp"

using namespace rankselect;

namespace {

constexpr int kVerifyFailed = 1;
constexpr int kError = 2;

struct BuildArgs {
    std::string variant;
    std::optional<std::string> kind;
    std::optional<uint32_t> k, h, ell, thr;
    std::string in, out;
};

AnyIndex build_structure(const BuildArgs& a, const BitVector& bv) {
    const bool select_params = a.ell || a.thr;
    const std::string kind = a.kind.value_or(select_params ? "select" : "rank");
    if (kind == "rank") {
        if (select_params) throw std::invalid_argument("--ell/--thr apply to select structures only");
        RankParams p = RankParams::defaults(parse_rank_variant(a.variant));
        if (a.k) p.k_bytes = *a.k;
        if (a.h) p.h = *a.h;
        return RankIndex::build(bv, p);
    }
    if (kind != "select") throw std::invalid_argument("--kind must be rank or select");
    if (a.k) throw std::invalid_argument("--k applies to rank structures only");
    SelectParams p = SelectParams::defaults(parse_select_variant(a.variant));
    if (a.ell) p.ell = *a.ell;
    if (a.thr) p.thr = *a.thr;
    if (a.h) p.h = *a.h;
    return SelectIndex::build(bv, p);
}

void print_report(const BenchReport& r) {
    std::printf("%s %s %s: %llu queries, %.2f ns/query, %llu bytes (%.4f bits per bit), checksum %llu\n",
                r.dataset.c_str(), r.variant.c_str(), r.params.c_str(), static_cast<unsigned long long>(r.queries),
                r.ns_per_query, static_cast<unsigned long long>(r.space_bytes), r.space_fraction,
                static_cast<unsigned long long>(r.checksum));
    if (r.mean_accesses) std::printf("mean accesses per query: %.4f\n", *r.mean_accesses);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Compressed rank/select structures: corpus generation, building, verification, benchmarking"};
    app.require_subcommand(1);
    int status = 0;

    std::string input, out, shape = "huffman";
    auto* gen_corpus = app.add_subcommand("gen-corpus", "Wavelet-tree bits of a byte text");
    gen_corpus->add_option("--input", input, "Text file")->required()->check(CLI::ExistingFile);
    gen_corpus->add_option("--shape", shape, "Tree shape")->check(CLI::IsMember({"balanced", "huffman"}));
    gen_corpus->add_option("--out", out, "Bitvector file")->required();
    gen_corpus->callback([&] {
        const auto text = read_file(input);
        const BitVector bv = wt_concat_bits(text, parse_wt_shape(shape));
        save_bitvector(bv, out);
        std::printf("%llu bits, %llu ones\n", static_cast<unsigned long long>(bv.size()),
                    static_cast<unsigned long long>(bv.ones()));
    });

    std::string text_kind;
    uint64_t length = 0, n = 0, seed = 0;
    double density = 0;
    auto* gen_text = app.add_subcommand("gen-text", "Synthetic text resembling a corpus family");
    gen_text->add_option("--kind", text_kind)->required()->check(CLI::IsMember({"dna", "english", "proteins", "xml"}));
    gen_text->add_option("--length", length, "Bytes")->required();
    gen_text->add_option("--seed", seed);
    gen_text->add_option("--out", out)->required();
    gen_text->callback([&] { write_file(out, synthetic_text(parse_text_kind(text_kind), length, seed)); });

    auto* gen_random = app.add_subcommand("gen-random", "Random bitvector");
    gen_random->add_option("--n", n, "Length in bits")->required();
    gen_random->add_option("--density", density)->required()->check(CLI::Range(0.0, 1.0));
    gen_random->add_option("--seed", seed)->required();
    gen_random->add_option("--out", out)->required();
    gen_random->callback([&] { save_bitvector(random_bitvector(n, density, seed), out); });

    BuildArgs b;
    auto* build = app.add_subcommand("build", "Build a rank or select structure");
    build->set_help_flag("--help", "Print this help message and exit");  // --h is the superblock size
    build->add_option("--variant", b.variant, "basic, bch, mpe1, mpe2, mpe3 or cf")->required();
    build->add_option("--kind", b.kind, "rank or select; select is implied by --ell/--thr");
    build->add_option("--k", b.k, "Block size in bytes (rank)");
    build->add_option("--h", b.h, "Blocks per superblock");
    build->add_option("--ell", b.ell, "Sampling interval (select)");
    build->add_option("--thr", b.thr, "Sparse threshold (select)");
    build->add_option("--in", b.in, "Bitvector file")->required()->check(CLI::ExistingFile);
    build->add_option("--out", b.out, "Structure file")->required();
    build->callback([&] {
        const AnyIndex idx = build_structure(b, load_bitvector(b.in));
        save_index(idx, b.out);
        std::printf("%s %s: %llu bytes\n", variant_label(idx).c_str(), params_label(idx).c_str(),
                    static_cast<unsigned long long>(space_bits(idx) / 8));
    });

    std::string structure, bits;
    VerifyOptions vopts;
    auto* verify_cmd = app.add_subcommand("verify", "Compare a structure against the naive oracle");
    verify_cmd->add_option("--structure", structure)->required()->check(CLI::ExistingFile);
    verify_cmd->add_option("--bits", bits)->required()->check(CLI::ExistingFile);
    verify_cmd->add_flag("--exhaustive", vopts.force_exhaustive, "Check every query regardless of size");
    verify_cmd->add_option("--samples", vopts.samples, "Sampled queries above 2^20 bits");
    verify_cmd->add_option("--seed", vopts.seed);
    verify_cmd->callback([&] {
        const VerifyResult r = verify(load_index(structure), load_bitvector(bits), vopts);
        std::printf("%s: %llu %s queries checked", r.passed ? "PASS" : "FAIL",
                    static_cast<unsigned long long>(r.checked), r.exhaustive ? "exhaustive" : "sampled");
        std::printf("%s%s\n", r.message.empty() ? "" : "; ", r.message.c_str());
        if (!r.passed) status = kVerifyFailed;
    });

    std::string kind = "rank", csv, dataset;
    uint64_t queries = 1000000, warmup = 10000;
    bool probe = false;
    auto* bench = app.add_subcommand("bench", "Time a random query workload");
    bench->add_option("--structure", structure)->required()->check(CLI::ExistingFile);
    bench->add_option("--bits", bits)->required()->check(CLI::ExistingFile);
    bench->add_option("--kind", kind)->check(CLI::IsMember({"rank", "select"}));
    bench->add_option("--queries", queries);
    bench->add_option("--seed", seed);
    bench->add_option("--csv", csv, "Write the report as CSV");
    bench->add_option("--dataset", dataset, "Dataset name for the report (default: bits file stem)");
    bench->add_option("--warmup", warmup);
    bench->add_flag("--probe-accesses", probe, "Also count memory accesses per rank query");
    bench->callback([&] {
        const AnyIndex idx = load_index(structure);
        const BitVector bv = load_bitvector(bits);
        if (std::visit([](const auto& s) { return s.size(); }, idx) != bv.size()) {
            throw std::invalid_argument("structure and bitvector lengths differ");
        }
        const Workload w = Workload::make(parse_query_kind(kind), queries, seed, bv.size(), bv.ones());
        BenchOptions opts;
        opts.dataset = dataset.empty() ? std::filesystem::path(bits).stem().string() : dataset;
        opts.warmup = warmup;
        opts.probe_accesses = probe;
        const BenchReport r = run_bench(idx, w, opts);
        print_report(r);
        if (!csv.empty()) {
            const std::string text = write_csv({&r, 1});
            write_file(csv, {reinterpret_cast<const uint8_t*>(text.data()), text.size()});
        }
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kError;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kError;
    }
    return status;
}
