#include "doctest.h"

#include <bit>
#include <cmath>
#include <cstdio>
#include <filesystem>

#include "oracles.hpp"
#include "rankselect/bench.hpp"
#include "rankselect/corpus.hpp"

using namespace rankselect;

namespace {

// First rank query where the structure disagrees with the bits, if any.
std::optional<uint64_t> first_rank_mismatch(const RankIndex& idx, const oracle::Bits& bits) {
    uint64_t expected = 0;
    for (uint64_t i = 0; i <= bits.size(); ++i) {
        if (idx.rank1(i) != expected) return i;
        if (i < bits.size()) expected += bits[i];
    }
    return std::nullopt;
}

}  // namespace

TEST_CASE("workloads are deterministic and in range") {
    const Workload a = Workload::make(QueryKind::rank, 10000, 5, 1000, 300);
    CHECK(a.queries == Workload::make(QueryKind::rank, 10000, 5, 1000, 300).queries);
    CHECK(a.queries != Workload::make(QueryKind::rank, 10000, 6, 1000, 300).queries);
    bool saw_n = false;
    for (uint64_t q : a.queries) {
        CHECK(q <= 1000);
        saw_n |= q == 1000;
    }
    CHECK(saw_n);
    const Workload s = Workload::make(QueryKind::select, 10000, 5, 1000, 300);
    for (uint64_t q : s.queries) {
        CHECK(q >= 1);
        CHECK(q <= 300);
    }
    CHECK_THROWS(Workload::make(QueryKind::select, 10, 5, 1000, 0));
    CHECK(Workload::make(QueryKind::select, 0, 5, 1000, 0).queries.empty());
}

TEST_CASE("verify accepts correct structures") {
    const BitVector bv = random_bitvector(300000, 0.3, 1);
    for (RankVariant v : kAllRankVariants) {
        const auto r = verify(RankIndex::build(bv, RankParams::defaults(v)), bv);
        CHECK(r.passed);
        CHECK(r.exhaustive);
        CHECK(r.checked == bv.size() + 1);
    }
    for (SelectVariant v : kAllSelectVariants) {
        const auto r = verify(SelectIndex::build(bv, SelectParams::defaults(v)), bv);
        CHECK(r.passed);
        CHECK(r.checked == bv.ones());
    }
    VerifyOptions sampled;
    sampled.exhaustive_limit = 1000;
    sampled.samples = 5000;
    const auto r = verify(AnyIndex{RankIndex::build(bv, RankParams::defaults(RankVariant::cf))}, bv, sampled);
    CHECK(r.passed);
    CHECK_FALSE(r.exhaustive);
    CHECK(r.checked == 5000);
    const auto s = verify(AnyIndex{SelectIndex::build(bv, SelectParams::defaults(SelectVariant::mpe1))}, bv, sampled);
    CHECK(s.passed);
    CHECK(s.checked == 5000);
}

TEST_CASE("verify on empty and mismatched inputs") {
    const BitVector empty;
    CHECK(verify(RankIndex::build(empty, RankParams::defaults(RankVariant::basic)), empty).passed);
    const auto s = verify(SelectIndex::build(empty, SelectParams::defaults(SelectVariant::basic)), empty);
    CHECK(s.passed);
    CHECK(s.checked == 0);

    const BitVector a = random_bitvector(5000, 0.5, 1);
    const BitVector b = random_bitvector(5000, 0.5, 2);
    CHECK_FALSE(verify(RankIndex::build(a, RankParams::defaults(RankVariant::basic)), b).passed);
}

TEST_CASE("a corrupted rank header byte is caught") {
    const oracle::Bits bits = oracle::spread_mono_vector(48, 64, 0.5, 3);
    const BitVector bv = oracle::pack(bits);
    constexpr size_t header_start = 40;
    for (RankVariant v : kAllRankVariants) {
        CAPTURE(to_string(v));
        const RankIndex good = RankIndex::build(bv, RankParams::defaults(v));
        int caught = 0;
        for (size_t at = 0; at < std::min<size_t>(good.header_area().size(), 96); ++at) {
            auto stream = good.serialize();
            stream[header_start + at] ^= 0x01;
            std::optional<RankIndex> bad;
            try {
                bad = RankIndex::deserialize(stream);
            } catch (const std::exception&) {
                continue;  // rejected on load
            }
            const auto expected = first_rank_mismatch(*bad, bits);
            const VerifyResult r = verify(*bad, bv);
            CHECK(r.passed == !expected.has_value());
            if (expected) {
                CHECK(r.failing_query == expected);
                CHECK(r.actual == bad->rank1(*expected));
                CHECK(r.expected == oracle::rank1(bits, *expected));
                ++caught;
            }
        }
        CHECK(caught > 0);
    }
}

TEST_CASE("a corrupted select sample is caught") {
    const SelectParams p = SelectParams::defaults(SelectVariant::basic);
    oracle::Bits bits(600 * 5000, 0);
    for (uint64_t t = 0; t < 600; ++t) bits[t * 5000] = 1;
    const BitVector bv = oracle::pack(bits);
    auto stream = SelectIndex::build(bv, p).serialize();
    constexpr size_t header_start = 44;
    stream[header_start + 4] ^= 0x01;  // low byte of V[1]
    const SelectIndex bad = SelectIndex::deserialize(stream);
    const VerifyResult r = verify(bad, bv);
    CHECK_FALSE(r.passed);
    CHECK(r.failing_query == p.ell);
    CHECK(r.expected == 127 * 5000);
    CHECK(r.actual == 127 * 5000 + 1);
}

TEST_CASE("run_bench") {
    const BitVector bv = random_bitvector(10000000, 0.2, 9);
    const AnyIndex rank = RankIndex::build(bv, RankParams::defaults(RankVariant::basic));
    const Workload w = Workload::make(QueryKind::rank, 1000000, 42, bv.size(), bv.ones());
    const BenchReport a = run_bench(rank, w, {"r0.2"});
    const BenchReport b = run_bench(rank, w, {"r0.2"});
    CHECK(a.checksum == b.checksum);
    CHECK(a.ns_per_query > 0);
    CHECK(a.queries == 1000000);
    CHECK(a.variant == "rank-basic");
    CHECK(a.params == "k=64;h=16");
    CHECK(a.space_fraction == double(a.space_bytes * 8) / double(bv.size()));
    CHECK(a.space_bytes * 8 == space_bits(rank));

    const auto words = bv.words();
    std::vector<uint64_t> before(words.size() + 1, 0);
    for (size_t i = 0; i < words.size(); ++i) before[i + 1] = before[i] + std::popcount(words[i]);
    uint64_t sum = 0;
    for (uint64_t q : w.queries) {
        const uint64_t partial = q % 64 == 0 ? 0 : std::popcount(words[q / 64] & ((uint64_t{1} << (q % 64)) - 1));
        sum += before[q / 64] + partial;
    }
    CHECK(a.checksum == sum);

    CHECK_THROWS_AS(run_bench(rank, Workload::make(QueryKind::select, 10, 1, bv.size(), bv.ones())),
                    std::invalid_argument);
    const AnyIndex sel = SelectIndex::build(bv, SelectParams::defaults(SelectVariant::bch));
    BenchOptions probe;
    probe.probe_accesses = true;
    CHECK_THROWS_AS(run_bench(sel, Workload::make(QueryKind::select, 10, 1, bv.size(), bv.ones()), probe),
                    std::invalid_argument);
    CHECK(run_bench(sel, Workload::make(QueryKind::select, 1000, 1, bv.size(), bv.ones())).variant == "select-bch");
}

TEST_CASE("instrumented accesses at half mono-blocks") {
    const BitVector bv = oracle::pack(oracle::spread_mono_vector(4000, 64, 0.5, 1));
    const Workload w = Workload::make(QueryKind::rank, 200000, 3, bv.size(), bv.ones());
    BenchOptions opts;
    opts.probe_accesses = true;
    const auto cf = run_bench(RankIndex::build(bv, RankParams::defaults(RankVariant::cf)), w, opts);
    const auto basic = run_bench(RankIndex::build(bv, RankParams::defaults(RankVariant::basic)), w, opts);
    REQUIRE(cf.mean_accesses);
    REQUIRE(basic.mean_accesses);
    CHECK(std::abs(*cf.mean_accesses - 1.25) <= 0.01);
    CHECK(std::abs(*basic.mean_accesses - 1.5) <= 0.01);
    CHECK(cf.checksum == basic.checksum);
}

TEST_CASE("csv") {
    CHECK(write_csv({}) == std::string(kCsvHeader) + "\n");
    BenchReport r;
    r.dataset = "random-0.2";
    r.variant = "rank-cf";
    r.params = "k=64;h=16";
    r.n_bits = 100000000;
    r.ones = 19999123;
    r.space_bytes = 12345679;
    r.space_fraction = 0.98765432123456789;
    r.queries = 1000000;
    r.seed = 0xFFFFFFFFFFFFFFFFull;
    r.ns_per_query = 1.0 / 3.0;
    r.checksum = 0x8000000000000001ull;
    const std::vector<BenchReport> one = {r};
    const std::string csv = write_csv(one);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);
    const auto back = parse_csv(csv);
    REQUIRE(back.size() == 1);
    CHECK(back[0] == r);
    CHECK_THROWS(parse_csv("nope\n"));
}

TEST_CASE("index files") {
    const BitVector bv = random_bitvector(50000, 0.4, 2);
    const auto dir = std::filesystem::temp_directory_path();
    const std::string path = (dir / "rankselect_index_test.bin").string();
    const AnyIndex sel = SelectIndex::build(bv, SelectParams::defaults(SelectVariant::mpe3));
    save_index(sel, path);
    const AnyIndex back = load_index(path);
    CHECK(kind_of(back) == QueryKind::select);
    CHECK(variant_label(back) == "select-mpe3");
    CHECK(params_label(back) == "ell=128;thr=4096;h=16");
    CHECK(verify(back, bv).passed);
    std::filesystem::remove(path);
    CHECK_THROWS(deserialize_index(std::vector<uint8_t>{'X', 'Y', 'Z', 'W', 0, 0}));
    CHECK(parse_query_kind("select") == QueryKind::select);
    CHECK_THROWS(parse_query_kind("access"));
}
