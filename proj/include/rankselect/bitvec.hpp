#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace rankselect {

/// Largest bit length any rank/select structure accepts: all header fields
/// hold ranks, positions and offsets on 4 bytes.
inline constexpr uint64_t kMaxStructureBits = (uint64_t{1} << 32) - 1;

/// Throws std::length_error when `n_bits` does not fit the 4-byte header fields.
void require_structure_length(uint64_t n_bits);

/// Immutable word-packed bit sequence. Bit i lives in word i/64 at position
/// i%64 (least significant first); padding bits past the end are zero.
class BitVector {
public:
    BitVector() = default;

    /// One input element per bit; any nonzero byte is a 1.
    static BitVector from_bits(std::span<const uint8_t> bits);
    /// Takes ownership of `words`; resized to ceil(n_bits/64) and padding cleared.
    static BitVector from_words(std::vector<uint64_t> words, uint64_t n_bits);

    uint64_t size() const { return n_bits_; }
    bool empty() const { return n_bits_ == 0; }
    uint64_t ones() const { return ones_; }
    uint64_t zeros() const { return n_bits_ - ones_; }
    std::span<const uint64_t> words() const { return words_; }

    /// Unchecked access.
    bool operator[](uint64_t i) const { return (words_[i >> 6] >> (i & 63)) & 1; }
    /// Checked access; throws std::out_of_range.
    bool get(uint64_t i) const;

    /// Ones in the half-open range [start, end).
    uint64_t ones_in_range(uint64_t start, uint64_t end) const;

    // Reference semantics. rank counts the first i bits (half-open prefix);
    // select takes a 1-based ordinal.
    uint64_t naive_rank1(uint64_t i) const;
    uint64_t naive_rank0(uint64_t i) const;
    uint64_t naive_select1(uint64_t j) const;

    /// Copies bits [start, start+len) into `out`, LSB-first, ceil(len/8) bytes.
    void copy_bits(uint64_t start, uint64_t len, std::vector<uint8_t>& out) const;

    std::vector<uint8_t> serialize() const;
    static BitVector deserialize(std::span<const uint8_t> bytes);

    friend bool operator==(const BitVector&, const BitVector&) = default;

private:
    uint64_t n_bits_ = 0;
    uint64_t ones_ = 0;
    std::vector<uint64_t> words_;
};

/// Appends bits one at a time or in word-sized runs.
class BitVectorBuilder {
public:
    void reserve(uint64_t n_bits) { words_.reserve((n_bits + 63) / 64); }
    void push_back(bool bit);
    /// Appends the low `len` bits of `value`, lowest first.
    void append(uint64_t value, unsigned len);
    uint64_t size() const { return n_bits_; }
    BitVector finalize() &&;

private:
    uint64_t n_bits_ = 0;
    std::vector<uint64_t> words_;
};

BitVector build_bitvector(std::span<const uint8_t> bits);

void save_bitvector(const BitVector& bv, const std::string& path);
BitVector load_bitvector(const std::string& path);

// Whole-file helpers used by the structure and CLI code.
std::vector<uint8_t> read_file(const std::string& path);
void write_file(const std::string& path, std::span<const uint8_t> bytes);

}  // namespace rankselect
