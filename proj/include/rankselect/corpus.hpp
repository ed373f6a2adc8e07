#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rankselect/bitvec.hpp"

namespace rankselect {

/// splitmix64; the state advances by the golden-ratio increment per draw.
class SplitMix64 {
public:
    explicit SplitMix64(uint64_t seed) : state_(seed) {}
    uint64_t next() {
        uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }
    /// Uniform value in [0, bound) by 128-bit multiply-shift; bound > 0.
    uint64_t below(uint64_t bound) {
        return static_cast<uint64_t>((static_cast<unsigned __int128>(next()) * bound) >> 64);
    }

private:
    uint64_t state_;
};

/// Bit i is set iff the i-th splitmix64 draw (seeded with `seed`) is below density * 2^64.
BitVector random_bitvector(uint64_t n_bits, double density, uint64_t seed);

/// A prefix code word; bit 0 of the path is the most significant of `length` bits.
struct Code {
    uint64_t bits = 0;
    uint8_t length = 0;

    /// Routing bit at tree depth d (0 = root).
    bool at(unsigned d) const { return (bits >> (length - 1 - d)) & 1; }
    /// The first d bits as an integer.
    uint64_t prefix(unsigned d) const { return d == 0 ? 0 : bits >> (length - d); }
    std::string to_string() const;
    friend bool operator==(const Code&, const Code&) = default;
};

/// Canonical Huffman codes: lengths from Huffman's algorithm, then code words
/// assigned in (length, symbol) order. A lone symbol gets "0". Symbols with
/// zero count are ignored; throws std::invalid_argument if none remain.
std::map<uint8_t, Code> huffman_codes(const std::map<uint8_t, uint64_t>& freqs);

enum class WtShape : uint8_t { balanced, huffman };

std::string_view to_string(WtShape s);
WtShape parse_wt_shape(std::string_view name);

/// Alphabet and code words of a binary wavelet tree over a byte text.
struct WtPlan {
    WtShape shape = WtShape::balanced;
    std::vector<uint8_t> alphabet;  ///< sorted distinct symbols
    std::map<uint8_t, Code> codes;

    static WtPlan make(std::span<const uint8_t> text, WtShape shape);
    unsigned depth() const;
};

/// Concatenation of every wavelet-tree node's bitvector in breadth-first order
/// (left to right within a level); each node holds one routing bit per text
/// symbol reaching it, in text order. Throws std::invalid_argument on empty text.
BitVector wt_concat_bits(std::span<const uint8_t> text, WtShape shape);
BitVector wt_concat_bits(std::span<const uint8_t> text, const WtPlan& plan);

/// Inverse of wt_concat_bits given the plan and the text length.
std::vector<uint8_t> wt_decode_text(const BitVector& bits, const WtPlan& plan, uint64_t text_length);

/// Deterministic stand-ins for text collections, used when real corpora are absent.
enum class TextKind : uint8_t { dna, english, proteins, xml };

std::string_view to_string(TextKind k);
TextKind parse_text_kind(std::string_view name);
std::vector<uint8_t> synthetic_text(TextKind kind, uint64_t length, uint64_t seed);

}  // namespace rankselect
