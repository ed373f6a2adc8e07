#include "rankselect/bench.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cstdio>
#include <cstring>
#include <sstream>

#include "rankselect/corpus.hpp"

namespace rankselect {

namespace {

template <class... Fs>
struct Overloaded : Fs... {
    using Fs::operator()...;
};
template <class... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

VerifyResult mismatch(VerifyResult r, uint64_t query, uint64_t expected, uint64_t actual, std::string what) {
    r.passed = false;
    r.failing_query = query;
    r.expected = expected;
    r.actual = actual;
    r.message = std::move(what) + " " + std::to_string(query) + ": expected " + std::to_string(expected) + ", got " +
                std::to_string(actual);
    return r;
}

VerifyResult shape_mismatch(uint64_t n, uint64_t ones, const BitVector& bv) {
    VerifyResult r;
    r.passed = false;
    r.message = "structure describes " + std::to_string(n) + " bits with " + std::to_string(ones) +
                " ones, bitvector has " + std::to_string(bv.size()) + " bits with " + std::to_string(bv.ones());
    return r;
}

std::string csv_field(std::string s) {
    std::replace(s.begin(), s.end(), ',', '_');
    std::replace(s.begin(), s.end(), '\n', '_');
    return s;
}

std::string exact_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

std::string_view to_string(QueryKind k) { return k == QueryKind::rank ? "rank" : "select"; }

QueryKind parse_query_kind(std::string_view name) {
    if (name == "rank") return QueryKind::rank;
    if (name == "select") return QueryKind::select;
    throw std::invalid_argument("unknown query kind '" + std::string(name) + "'");
}

QueryKind kind_of(const AnyIndex& index) {
    return std::holds_alternative<RankIndex>(index) ? QueryKind::rank : QueryKind::select;
}

std::vector<uint8_t> serialize_index(const AnyIndex& index) {
    return std::visit([](const auto& s) { return s.serialize(); }, index);
}

AnyIndex deserialize_index(std::span<const uint8_t> bytes) {
    if (bytes.size() >= 4 && std::memcmp(bytes.data(), "RSRK", 4) == 0) return RankIndex::deserialize(bytes);
    if (bytes.size() >= 4 && std::memcmp(bytes.data(), "RSSL", 4) == 0) return SelectIndex::deserialize(bytes);
    throw std::runtime_error("not a rank or select structure stream");
}

AnyIndex load_index(const std::string& path) { return deserialize_index(read_file(path)); }

void save_index(const AnyIndex& index, const std::string& path) { write_file(path, serialize_index(index)); }

uint64_t space_bits(const AnyIndex& index) {
    return std::visit([](const auto& s) { return s.space_bits(); }, index);
}

std::string variant_label(const AnyIndex& index) {
    return std::visit(
        [](const auto& s) {
            return std::string(std::is_same_v<std::decay_t<decltype(s)>, RankIndex> ? "rank-" : "select-") +
                   std::string(to_string(s.variant()));
        },
        index);
}

std::string params_label(const AnyIndex& index) {
    return std::visit([](const auto& s) { return s.params().describe(); }, index);
}

Workload Workload::make(QueryKind kind, uint64_t count, uint64_t seed, uint64_t n_bits, uint64_t ones) {
    Workload w;
    w.kind = kind;
    w.count = count;
    w.seed = seed;
    if (count == 0) return w;
    if (kind == QueryKind::select && ones == 0) {
        throw std::invalid_argument("select workload needs at least one set bit");
    }
    SplitMix64 rng(seed);
    w.queries.resize(count);
    for (auto& q : w.queries) q = kind == QueryKind::rank ? rng.below(n_bits + 1) : 1 + rng.below(ones);
    return w;
}

VerifyResult verify(const RankIndex& index, const BitVector& bv, const VerifyOptions& opts) {
    if (index.size() != bv.size() || index.ones() != bv.ones()) return shape_mismatch(index.size(), index.ones(), bv);
    VerifyResult r;
    r.exhaustive = opts.force_exhaustive || bv.size() <= opts.exhaustive_limit;
    try {
        if (r.exhaustive) {
            uint64_t expected = 0;
            for (uint64_t i = 0; i <= bv.size(); ++i) {
                const uint64_t got = index.rank1(i);
                ++r.checked;
                if (got != expected) return mismatch(r, i, expected, got, "rank1");
                if (i < bv.size()) expected += bv[i];
            }
            return r;
        }
        auto queries = Workload::make(QueryKind::rank, opts.samples, opts.seed, bv.size(), bv.ones()).queries;
        std::sort(queries.begin(), queries.end());
        uint64_t prev = 0;
        uint64_t expected = 0;
        for (uint64_t q : queries) {
            expected += bv.ones_in_range(prev, q);
            prev = q;
            const uint64_t got = index.rank1(q);
            ++r.checked;
            if (got != expected) return mismatch(r, q, expected, got, "rank1");
        }
    } catch (const std::exception& e) {
        r.passed = false;
        r.message = std::string("query raised: ") + e.what();
    }
    return r;
}

VerifyResult verify(const SelectIndex& index, const BitVector& bv, const VerifyOptions& opts) {
    if (index.size() != bv.size() || index.ones() != bv.ones()) return shape_mismatch(index.size(), index.ones(), bv);
    VerifyResult r;
    r.exhaustive = opts.force_exhaustive || bv.size() <= opts.exhaustive_limit;
    if (bv.ones() == 0) {
        r.message = "no set bits; select verification skipped";
        return r;
    }
    const auto words = bv.words();
    try {
        if (r.exhaustive) {
            uint64_t j = 0;
            for (size_t w = 0; w < words.size(); ++w) {
                for (uint64_t word = words[w]; word != 0; word &= word - 1) {
                    const uint64_t pos = w * 64 + std::countr_zero(word);
                    const uint64_t got = index.select1(++j);
                    ++r.checked;
                    if (got != pos) return mismatch(r, j, pos, got, "select1");
                }
            }
            return r;
        }
        auto queries = Workload::make(QueryKind::select, opts.samples, opts.seed, bv.size(), bv.ones()).queries;
        std::sort(queries.begin(), queries.end());
        size_t w = 0;
        uint64_t before = 0;  // ones in words[0, w)
        for (uint64_t j : queries) {
            while (before + std::popcount(words[w]) < j) before += std::popcount(words[w++]);
            const uint64_t pos = w * 64 + bits::select_in_word(words[w], static_cast<unsigned>(j - before));
            const uint64_t got = index.select1(j);
            ++r.checked;
            if (got != pos) return mismatch(r, j, pos, got, "select1");
        }
    } catch (const std::exception& e) {
        r.passed = false;
        r.message = std::string("query raised: ") + e.what();
    }
    return r;
}

VerifyResult verify(const AnyIndex& index, const BitVector& bv, const VerifyOptions& opts) {
    return std::visit([&](const auto& s) { return verify(s, bv, opts); }, index);
}

BenchReport run_bench(const AnyIndex& index, const Workload& workload, const BenchOptions& opts) {
    if (workload.kind != kind_of(index)) {
        throw std::invalid_argument("workload kind " + std::string(to_string(workload.kind)) +
                                    " does not match a " + std::string(to_string(kind_of(index))) + " structure");
    }
    if (opts.probe_accesses && workload.kind != QueryKind::rank) {
        throw std::invalid_argument("access probing is defined for rank structures only");
    }
    const std::span<const uint64_t> queries = workload.queries;
    const std::span<const uint64_t> warm = queries.first(std::min<size_t>(opts.warmup, queries.size()));

    // One dispatch per loop, not per query.
    const auto sum_answers = [&index](std::span<const uint64_t> qs) {
        return std::visit(Overloaded{[qs](const RankIndex& r) {
                                         return r.visit([qs](const auto& s) {
                                             uint64_t sum = 0;
                                             for (uint64_t q : qs) sum += s.template query<false>(q, nullptr);
                                             return sum;
                                         });
                                     },
                                     [qs](const SelectIndex& s) {
                                         uint64_t sum = 0;
                                         for (uint64_t q : qs) sum += s.select1_unchecked(q);
                                         return sum;
                                     }},
                          index);
    };

    volatile uint64_t sink = sum_answers(warm);
    (void)sink;
    const auto t0 = std::chrono::steady_clock::now();
    const uint64_t checksum = sum_answers(queries);
    const auto t1 = std::chrono::steady_clock::now();

    BenchReport rep;
    rep.dataset = opts.dataset;
    rep.variant = variant_label(index);
    rep.params = params_label(index);
    std::visit(
        [&rep](const auto& s) {
            rep.n_bits = s.size();
            rep.ones = s.ones();
        },
        index);
    rep.space_bytes = space_bits(index) / 8;
    rep.space_fraction = rep.n_bits == 0 ? 0.0 : static_cast<double>(rep.space_bytes * 8) / static_cast<double>(rep.n_bits);
    rep.queries = queries.size();
    rep.seed = workload.seed;
    rep.checksum = checksum;
    const double ns = std::chrono::duration<double, std::nano>(t1 - t0).count();
    rep.ns_per_query = queries.empty() ? 0.0 : ns / static_cast<double>(queries.size());

    if (opts.probe_accesses) {
        const auto& r = std::get<RankIndex>(index);
        uint64_t total = 0;
        for (uint64_t q : queries) total += r.rank1_probe(q).accesses;
        rep.mean_accesses = queries.empty() ? 0.0 : static_cast<double>(total) / static_cast<double>(queries.size());
    }
    return rep;
}

std::string write_csv(std::span<const BenchReport> reports) {
    std::string out(kCsvHeader);
    out.push_back('\n');
    for (const auto& r : reports) {
        out += csv_field(r.dataset) + ',' + csv_field(r.variant) + ',' + csv_field(r.params) + ',' +
               std::to_string(r.n_bits) + ',' + std::to_string(r.ones) + ',' + std::to_string(r.space_bytes) + ',' +
               exact_double(r.space_fraction) + ',' + std::to_string(r.queries) + ',' + std::to_string(r.seed) + ',' +
               exact_double(r.ns_per_query) + ',' + std::to_string(r.checksum) + '\n';
    }
    return out;
}

std::vector<BenchReport> parse_csv(std::string_view csv) {
    std::istringstream in{std::string(csv)};
    std::string line;
    if (!std::getline(in, line) || line != kCsvHeader) throw std::runtime_error("missing or unexpected CSV header");
    std::vector<BenchReport> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::istringstream row(line);
        for (std::string cell; std::getline(row, cell, ',');) f.push_back(cell);
        if (f.size() != 11) throw std::runtime_error("CSV row has " + std::to_string(f.size()) + " fields, expected 11");
        BenchReport r;
        r.dataset = f[0];
        r.variant = f[1];
        r.params = f[2];
        r.n_bits = std::stoull(f[3]);
        r.ones = std::stoull(f[4]);
        r.space_bytes = std::stoull(f[5]);
        r.space_fraction = std::strtod(f[6].c_str(), nullptr);
        r.queries = std::stoull(f[7]);
        r.seed = std::stoull(f[8]);
        r.ns_per_query = std::strtod(f[9].c_str(), nullptr);
        r.checksum = std::stoull(f[10]);
        out.push_back(std::move(r));
    }
    return out;
}

}  // namespace rankselect
