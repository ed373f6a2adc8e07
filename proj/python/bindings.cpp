#include <pybind11/numpy.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "rankselect/bench.hpp"
#include "rankselect/corpus.hpp"

namespace py = pybind11;
using namespace rankselect;

namespace {

std::span<const uint8_t> as_span(const py::bytes& b) {
    const std::string_view v = b;
    return {reinterpret_cast<const uint8_t*>(v.data()), v.size()};
}

py::bytes to_bytes(const std::vector<uint8_t>& v) { return {reinterpret_cast<const char*>(v.data()), v.size()}; }

BitVector bitvector_from(py::array_t<uint8_t, py::array::c_style | py::array::forcecast> bits) {
    if (bits.ndim() != 1) throw std::invalid_argument("expected a one-dimensional array of bits");
    return BitVector::from_bits({bits.data(), static_cast<size_t>(bits.size())});
}

template <class F>
py::array_t<uint64_t> map_queries(py::array_t<uint64_t, py::array::c_style | py::array::forcecast> qs, F&& f) {
    py::array_t<uint64_t> out(qs.size());
    const uint64_t* in = qs.data();
    uint64_t* dst = out.mutable_data();
    for (py::ssize_t i = 0; i < qs.size(); ++i) dst[i] = f(in[i]);
    return out;
}

py::dict verify_dict(const VerifyResult& r) {
    py::dict d;
    d["passed"] = r.passed;
    d["exhaustive"] = r.exhaustive;
    d["checked"] = r.checked;
    d["failing_query"] = r.failing_query ? py::cast(*r.failing_query) : py::none();
    d["expected"] = r.expected;
    d["actual"] = r.actual;
    d["message"] = r.message;
    return d;
}

py::dict report_dict(const BenchReport& r) {
    py::dict d;
    d["dataset"] = r.dataset;
    d["variant"] = r.variant;
    d["params"] = r.params;
    d["n_bits"] = r.n_bits;
    d["ones"] = r.ones;
    d["space_bytes"] = r.space_bytes;
    d["space_fraction"] = r.space_fraction;
    d["queries"] = r.queries;
    d["seed"] = r.seed;
    d["ns_per_query"] = r.ns_per_query;
    d["checksum"] = r.checksum;
    d["mean_accesses"] = r.mean_accesses ? py::cast(*r.mean_accesses) : py::none();
    return d;
}

VerifyOptions verify_options(bool exhaustive, uint64_t samples, uint64_t seed) {
    VerifyOptions o;
    o.force_exhaustive = exhaustive;
    o.samples = samples;
    o.seed = seed;
    return o;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Compressed rank/select structures over bitvectors";

    py::class_<BitVector>(m, "BitVector")
        .def(py::init<>())
        .def(py::init(&bitvector_from), py::arg("bits"), "Build from a sequence of 0/1 values.")
        .def_static("from_words", &BitVector::from_words, py::arg("words"), py::arg("n_bits"))
        .def_property_readonly("size", &BitVector::size)
        .def_property_readonly("ones", &BitVector::ones)
        .def_property_readonly("zeros", &BitVector::zeros)
        .def("__len__", &BitVector::size)
        .def("__getitem__", &BitVector::get)
        .def("ones_in_range", &BitVector::ones_in_range, py::arg("start"), py::arg("end"))
        .def("naive_rank1", &BitVector::naive_rank1)
        .def("naive_select1", &BitVector::naive_select1)
        .def("words", [](const BitVector& b) { return std::vector<uint64_t>(b.words().begin(), b.words().end()); })
        .def("serialize", [](const BitVector& b) { return to_bytes(b.serialize()); })
        .def_static("deserialize", [](const py::bytes& b) { return BitVector::deserialize(as_span(b)); })
        .def("save", [](const BitVector& b, const std::string& path) { save_bitvector(b, path); })
        .def_static("load", &load_bitvector)
        .def(py::self == py::self)
        .def("__repr__", [](const BitVector& b) {
            return "BitVector(size=" + std::to_string(b.size()) + ", ones=" + std::to_string(b.ones()) + ")";
        });

    py::class_<RankIndex>(m, "RankIndex")
        .def_static(
            "build",
            [](const BitVector& bv, const std::string& variant, std::optional<uint32_t> k, std::optional<uint32_t> h) {
                RankParams p = RankParams::defaults(parse_rank_variant(variant));
                if (k) p.k_bytes = *k;
                if (h) p.h = *h;
                return RankIndex::build(bv, p);
            },
            py::arg("bits"), py::arg("variant") = "basic", py::arg("k") = py::none(), py::arg("h") = py::none())
        .def("rank1", &RankIndex::rank1)
        .def("rank0", &RankIndex::rank0)
        .def("rank1_probe",
             [](const RankIndex& r, uint64_t i) {
                 const RankProbe p = r.rank1_probe(i);
                 return py::make_tuple(p.rank, p.accesses);
             })
        .def("rank1_many",
             [](const RankIndex& r, py::array_t<uint64_t, py::array::c_style | py::array::forcecast> qs) {
                 return map_queries(qs, [&r](uint64_t i) { return r.rank1(i); });
             })
        .def_property_readonly("variant", [](const RankIndex& r) { return std::string(to_string(r.variant())); })
        .def_property_readonly("params", [](const RankIndex& r) { return r.params().describe(); })
        .def_property_readonly("size", &RankIndex::size)
        .def_property_readonly("ones", &RankIndex::ones)
        .def_property_readonly("blocks", &RankIndex::blocks)
        .def_property_readonly("mono_blocks", &RankIndex::mono_blocks)
        .def_property_readonly("block_body_bytes", &RankIndex::block_body_bytes)
        .def_property_readonly("space_bits", &RankIndex::space_bits)
        .def("serialize", [](const RankIndex& r) { return to_bytes(r.serialize()); })
        .def_static("deserialize", [](const py::bytes& b) { return RankIndex::deserialize(as_span(b)); })
        .def(
            "verify",
            [](const RankIndex& r, const BitVector& bv, bool exhaustive, uint64_t samples, uint64_t seed) {
                return verify_dict(verify(r, bv, verify_options(exhaustive, samples, seed)));
            },
            py::arg("bits"), py::arg("exhaustive") = false, py::arg("samples") = 100000, py::arg("seed") = 0x5eed);

    py::class_<SelectIndex>(m, "SelectIndex")
        .def_static(
            "build",
            [](const BitVector& bv, const std::string& variant, std::optional<uint32_t> ell,
               std::optional<uint32_t> thr, std::optional<uint32_t> h) {
                SelectParams p = SelectParams::defaults(parse_select_variant(variant));
                if (ell) p.ell = *ell;
                if (thr) p.thr = *thr;
                if (h) p.h = *h;
                return SelectIndex::build(bv, p);
            },
            py::arg("bits"), py::arg("variant") = "basic", py::arg("ell") = py::none(), py::arg("thr") = py::none(),
            py::arg("h") = py::none())
        .def("select1", &SelectIndex::select1)
        .def("select1_many",
             [](const SelectIndex& s, py::array_t<uint64_t, py::array::c_style | py::array::forcecast> qs) {
                 return map_queries(qs, [&s](uint64_t j) { return s.select1(j); });
             })
        .def_property_readonly("variant", [](const SelectIndex& s) { return std::string(to_string(s.variant())); })
        .def_property_readonly("params", [](const SelectIndex& s) { return s.params().describe(); })
        .def_property_readonly("size", &SelectIndex::size)
        .def_property_readonly("ones", &SelectIndex::ones)
        .def_property_readonly("blocks", &SelectIndex::blocks)
        .def_property_readonly("space_bits", &SelectIndex::space_bits)
        .def("stats",
             [](const SelectIndex& s) {
                 const SelectStats st = s.stats();
                 py::dict d;
                 d["blocks"] = st.blocks;
                 d["ones_run_blocks"] = st.ones_run_blocks;
                 d["sparse_blocks"] = st.sparse_blocks;
                 d["dense_blocks"] = st.dense_blocks;
                 d["sparse_bytes"] = st.sparse_bytes;
                 d["dense_bytes"] = st.dense_bytes;
                 return d;
             })
        .def("serialize", [](const SelectIndex& s) { return to_bytes(s.serialize()); })
        .def_static("deserialize", [](const py::bytes& b) { return SelectIndex::deserialize(as_span(b)); })
        .def(
            "verify",
            [](const SelectIndex& s, const BitVector& bv, bool exhaustive, uint64_t samples, uint64_t seed) {
                return verify_dict(verify(s, bv, verify_options(exhaustive, samples, seed)));
            },
            py::arg("bits"), py::arg("exhaustive") = false, py::arg("samples") = 100000, py::arg("seed") = 0x5eed);

    m.def(
        "random_bitvector", &random_bitvector, py::arg("n_bits"), py::arg("density"), py::arg("seed"),
        "Bit i is set iff the i-th splitmix64 draw is below density * 2^64.");
    m.def(
        "wt_concat_bits",
        [](const py::bytes& text, const std::string& shape) { return wt_concat_bits(as_span(text), parse_wt_shape(shape)); },
        py::arg("text"), py::arg("shape") = "huffman");
    m.def(
        "wt_decode_text",
        [](const BitVector& bits, const py::bytes& alphabet_source, const std::string& shape, uint64_t length) {
            const WtPlan plan = WtPlan::make(as_span(alphabet_source), parse_wt_shape(shape));
            return to_bytes(wt_decode_text(bits, plan, length));
        },
        py::arg("bits"), py::arg("text"), py::arg("shape"), py::arg("length"),
        "Decode wavelet-tree bits using the code plan derived from `text`.");
    m.def(
        "huffman_codes",
        [](const std::map<uint8_t, uint64_t>& freqs) {
            std::map<uint8_t, std::string> out;
            for (const auto& [s, c] : huffman_codes(freqs)) out[s] = c.to_string();
            return out;
        },
        py::arg("freqs"));
    m.def(
        "synthetic_text",
        [](const std::string& kind, uint64_t length, uint64_t seed) {
            return to_bytes(synthetic_text(parse_text_kind(kind), length, seed));
        },
        py::arg("kind"), py::arg("length"), py::arg("seed") = 0);
    m.def(
        "expected_accesses",
        [](const std::string& variant, double f) { return expected_accesses(parse_rank_variant(variant), f); },
        py::arg("variant"), py::arg("f"));
    m.def(
        "bench_rank",
        [](const RankIndex& r, uint64_t queries, uint64_t seed, bool probe, const std::string& dataset) {
            BenchOptions o;
            o.dataset = dataset;
            o.probe_accesses = probe;
            return report_dict(run_bench(r, Workload::make(QueryKind::rank, queries, seed, r.size(), r.ones()), o));
        },
        py::arg("index"), py::arg("queries") = 1000000, py::arg("seed") = 0, py::arg("probe_accesses") = false,
        py::arg("dataset") = "unnamed");
    m.def(
        "bench_select",
        [](const SelectIndex& s, uint64_t queries, uint64_t seed, const std::string& dataset) {
            BenchOptions o;
            o.dataset = dataset;
            return report_dict(run_bench(s, Workload::make(QueryKind::select, queries, seed, s.size(), s.ones()), o));
        },
        py::arg("index"), py::arg("queries") = 1000000, py::arg("seed") = 0, py::arg("dataset") = "unnamed");
    m.attr("CSV_HEADER") = std::string(kCsvHeader);
}
