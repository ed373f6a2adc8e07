#include "doctest.h"

#include <cmath>
#include <random>
#include <string>

#include "oracles.hpp"
#include "rankselect/corpus.hpp"

using namespace rankselect;

namespace {

std::vector<uint8_t> text_of(std::string_view s) { return {s.begin(), s.end()}; }

std::string bit_string(const BitVector& bv) {
    std::string s;
    for (uint64_t i = 0; i < bv.size(); ++i) s += bv[i] ? '1' : '0';
    return s;
}

std::vector<uint8_t> random_text(std::mt19937_64& gen) {
    const size_t sigma = 1 + gen() % 40;
    const size_t len = 1 + gen() % 3000;
    std::vector<uint8_t> text(len);
    const double skew = std::uniform_real_distribution<>(0.0, 3.0)(gen);
    for (auto& c : text) {
        const double u = std::uniform_real_distribution<>(0.0, 1.0)(gen);
        c = static_cast<uint8_t>(32 + static_cast<size_t>(sigma * std::pow(u, 1.0 + skew)));
    }
    return text;
}

}  // namespace

TEST_CASE("huffman examples") {
    auto codes = huffman_codes({{'a', 1}, {'b', 1}});
    CHECK(codes.at('a').to_string() == "0");
    CHECK(codes.at('b').to_string() == "1");

    codes = huffman_codes({{'a', 5}, {'b', 1}, {'c', 1}});
    CHECK(codes.at('a').length == 1);
    CHECK(codes.at('b').length == 2);
    CHECK(codes.at('c').length == 2);

    codes = huffman_codes({{'a', 1}});
    CHECK(codes.at('a').to_string() == "0");

    CHECK_THROWS_AS(huffman_codes({}), std::invalid_argument);
    CHECK_THROWS_AS(huffman_codes({{'a', 0}}), std::invalid_argument);
}

TEST_CASE("huffman codes are optimal and prefix-free") {
    std::mt19937_64 gen(8);
    for (int iter = 0; iter < 200; ++iter) {
        std::map<uint8_t, uint64_t> freqs;
        const size_t sigma = 1 + gen() % 60;
        for (size_t s = 0; s < sigma; ++s) freqs[static_cast<uint8_t>(s * 3)] = 1 + gen() % (gen() % 2 ? 10 : 100000);
        const auto codes = huffman_codes(freqs);
        uint64_t cost = 0;
        for (const auto& [s, f] : freqs) cost += f * codes.at(s).length;
        CHECK(cost == oracle::huffman_cost(freqs));
        for (const auto& [s1, c1] : codes) {
            for (const auto& [s2, c2] : codes) {
                if (s1 == s2 || c1.length > c2.length) continue;
                CHECK(c2.prefix(c1.length) != c1.bits);
            }
        }
    }
}

TEST_CASE("wavelet tree bits for short texts") {
    CHECK(bit_string(wt_concat_bits(text_of("ab"), WtShape::balanced)) == "01");
    CHECK(bit_string(wt_concat_bits(text_of("abca"), WtShape::balanced)) == "0010" "010" "0");

    const auto plan = WtPlan::make(text_of("abca"), WtShape::balanced);
    CHECK(plan.codes.at('a').to_string() == "00");
    CHECK(plan.codes.at('b').to_string() == "01");
    CHECK(plan.codes.at('c').to_string() == "10");
    CHECK(oracle::wt_bits_by_filter(text_of("abca"), plan.codes) == oracle::unpack(wt_concat_bits(text_of("abca"), plan)));

    CHECK(wt_concat_bits(text_of("aaaa"), WtShape::balanced).size() == 4);
    CHECK_THROWS_AS(wt_concat_bits({}, WtShape::huffman), std::invalid_argument);
}

TEST_CASE("wavelet tree bits agree with per-node filtering and invert") {
    std::mt19937_64 gen(99);
    for (int iter = 0; iter < 100; ++iter) {
        const auto text = random_text(gen);
        for (WtShape shape : {WtShape::balanced, WtShape::huffman}) {
            const auto plan = WtPlan::make(text, shape);
            const BitVector bits = wt_concat_bits(text, plan);
            CHECK(oracle::unpack(bits) == oracle::wt_bits_by_filter(text, plan.codes));
            uint64_t expected_len = 0;
            for (uint8_t c : text) expected_len += plan.codes.at(c).length;
            CHECK(bits.size() == expected_len);
            CHECK(wt_decode_text(bits, plan, text.size()) == text);
            if (shape == WtShape::balanced) {
                for (const auto& [s, c] : plan.codes) CHECK(c.length == plan.depth());
            }
        }
    }
}

TEST_CASE("random bitvector") {
    CHECK(random_bitvector(1000, 0.0, 1).ones() == 0);
    CHECK(random_bitvector(1000, 1.0, 1).ones() == 1000);
    CHECK(random_bitvector(5000, 0.3, 42) == random_bitvector(5000, 0.3, 42));
    CHECK_FALSE(random_bitvector(5000, 0.3, 42) == random_bitvector(5000, 0.3, 43));
    CHECK_THROWS(random_bitvector(10, 1.5, 0));
    CHECK_THROWS(random_bitvector(10, -0.5, 0));

    const BitVector bv = random_bitvector(10000000, 0.2, 7);
    const double density = double(bv.ones()) / double(bv.size());
    CHECK(std::abs(density - 0.2) <= 0.001);

    // bit i follows the i-th draw
    SplitMix64 rng(7);
    for (uint64_t i = 0; i < 1000; ++i) {
        const uint64_t draw = rng.next();
        CHECK(bv[i] == (draw < static_cast<uint64_t>(0.2 * 18446744073709551616.0)));
    }
}

TEST_CASE("synthetic texts") {
    for (TextKind k : {TextKind::dna, TextKind::english, TextKind::proteins, TextKind::xml}) {
        CAPTURE(to_string(k));
        const auto a = synthetic_text(k, 50000, 3);
        CHECK(a.size() == 50000);
        CHECK(a == synthetic_text(k, 50000, 3));
        CHECK(parse_text_kind(to_string(k)) == k);
    }
    CHECK(parse_wt_shape("huffman") == WtShape::huffman);
    CHECK_THROWS(parse_wt_shape("skewed"));
}
