#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "rankselect/bitvec.hpp"
#include "rankselect/rank.hpp"
#include "rankselect/select.hpp"

namespace rankselect {

using AnyIndex = std::variant<RankIndex, SelectIndex>;

enum class QueryKind : uint8_t { rank, select };

std::string_view to_string(QueryKind k);
QueryKind parse_query_kind(std::string_view name);
QueryKind kind_of(const AnyIndex& index);

std::vector<uint8_t> serialize_index(const AnyIndex& index);
/// Dispatches on the stream's magic tag.
AnyIndex deserialize_index(std::span<const uint8_t> bytes);
AnyIndex load_index(const std::string& path);
void save_index(const AnyIndex& index, const std::string& path);

uint64_t space_bits(const AnyIndex& index);
/// e.g. "rank-basic", "select-mpe2"
std::string variant_label(const AnyIndex& index);
std::string params_label(const AnyIndex& index);

/// Random queries regenerated bit-identically from (kind, count, seed, n, ones):
/// rank positions uniform in [0, n], select ordinals uniform in [1, ones].
struct Workload {
    QueryKind kind = QueryKind::rank;
    uint64_t count = 0;
    uint64_t seed = 0;
    std::vector<uint64_t> queries;

    static Workload make(QueryKind kind, uint64_t count, uint64_t seed, uint64_t n_bits, uint64_t ones);
};

struct VerifyOptions {
    bool force_exhaustive = false;
    uint64_t exhaustive_limit = uint64_t{1} << 20;  ///< exhaustive whenever n <= this
    uint64_t samples = 100000;
    uint64_t seed = 0x5eed;
};

struct VerifyResult {
    bool passed = true;
    bool exhaustive = false;
    uint64_t checked = 0;
    std::optional<uint64_t> failing_query;
    uint64_t expected = 0;
    uint64_t actual = 0;
    std::string message;
};

/// Compares every (exhaustive) or sampled query against a sweep over B.
VerifyResult verify(const RankIndex& index, const BitVector& bv, const VerifyOptions& opts = {});
VerifyResult verify(const SelectIndex& index, const BitVector& bv, const VerifyOptions& opts = {});
VerifyResult verify(const AnyIndex& index, const BitVector& bv, const VerifyOptions& opts = {});

struct BenchReport {
    std::string dataset;
    std::string variant;
    std::string params;
    uint64_t n_bits = 0;
    uint64_t ones = 0;
    uint64_t space_bytes = 0;
    double space_fraction = 0;  ///< space_bytes * 8 / n_bits
    uint64_t queries = 0;
    uint64_t seed = 0;
    double ns_per_query = 0;
    uint64_t checksum = 0;  ///< wrapping sum of all answers
    std::optional<double> mean_accesses;  ///< rank only, with probing on; not part of the CSV

    friend bool operator==(const BenchReport&, const BenchReport&) = default;
};

struct BenchOptions {
    std::string dataset = "unnamed";
    uint64_t warmup = 10000;
    bool probe_accesses = false;
};

/// Times the workload on one core. Throws std::invalid_argument if the
/// workload kind does not match the structure.
BenchReport run_bench(const AnyIndex& index, const Workload& workload, const BenchOptions& opts = {});

inline constexpr std::string_view kCsvHeader =
    "dataset,variant,params,n_bits,ones,space_bytes,space_fraction,queries,seed,ns_per_query,checksum";

std::string write_csv(std::span<const BenchReport> reports);
std::vector<BenchReport> parse_csv(std::string_view csv);

}  // namespace rankselect
