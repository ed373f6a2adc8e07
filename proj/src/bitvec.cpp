#include "rankselect/bitvec.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <stdexcept>

#include "rankselect/bits.hpp"

namespace rankselect {

namespace {

constexpr char kMagic[4] = {'R', 'S', 'B', 'V'};
constexpr size_t kPreamble = sizeof kMagic + 8;

uint64_t count_ones(std::span<const uint64_t> words) {
    uint64_t c = 0;
    for (uint64_t w : words) c += std::popcount(w);
    return c;
}

}  // namespace

void require_structure_length(uint64_t n_bits) {
    if (n_bits > kMaxStructureBits) {
        throw std::length_error("bitvector of " + std::to_string(n_bits) +
                                " bits exceeds the 2^32-1 limit of 4-byte header fields");
    }
}

BitVector BitVector::from_bits(std::span<const uint8_t> bits) {
    BitVectorBuilder b;
    b.reserve(bits.size());
    for (uint8_t v : bits) b.push_back(v != 0);
    return std::move(b).finalize();
}

BitVector BitVector::from_words(std::vector<uint64_t> words, uint64_t n_bits) {
    BitVector bv;
    bv.n_bits_ = n_bits;
    words.resize((n_bits + 63) / 64, 0);
    if (n_bits % 64 != 0) words.back() &= bits::low_mask(n_bits % 64);
    bv.words_ = std::move(words);
    bv.ones_ = count_ones(bv.words_);
    return bv;
}

bool BitVector::get(uint64_t i) const {
    if (i >= n_bits_) {
        throw std::out_of_range("bit index " + std::to_string(i) + " out of range for " +
                                std::to_string(n_bits_) + " bits");
    }
    return (*this)[i];
}

uint64_t BitVector::ones_in_range(uint64_t start, uint64_t end) const {
    if (start > end || end > n_bits_) {
        throw std::out_of_range("range [" + std::to_string(start) + ", " + std::to_string(end) +
                                ") out of bounds for " + std::to_string(n_bits_) + " bits");
    }
    if (start == end) return 0;
    uint64_t first = start >> 6;
    const uint64_t last = (end - 1) >> 6;
    const uint64_t head_mask = ~uint64_t{0} << (start & 63);
    const uint64_t tail_mask = bits::low_mask(static_cast<unsigned>(((end - 1) & 63) + 1));
    if (first == last) return std::popcount(words_[first] & head_mask & tail_mask);
    uint64_t c = std::popcount(words_[first] & head_mask);
    for (++first; first < last; ++first) c += std::popcount(words_[first]);
    return c + std::popcount(words_[last] & tail_mask);
}

uint64_t BitVector::naive_rank1(uint64_t i) const {
    if (i > n_bits_) {
        throw std::out_of_range("rank position " + std::to_string(i) + " exceeds length " +
                                std::to_string(n_bits_));
    }
    return ones_in_range(0, i);
}

uint64_t BitVector::naive_rank0(uint64_t i) const { return i - naive_rank1(i); }

uint64_t BitVector::naive_select1(uint64_t j) const {
    if (j == 0 || j > ones_) {
        throw std::out_of_range("select ordinal " + std::to_string(j) + " outside [1, " +
                                std::to_string(ones_) + "]");
    }
    for (size_t w = 0; w < words_.size(); ++w) {
        const auto c = static_cast<uint64_t>(std::popcount(words_[w]));
        if (j <= c) return w * 64 + bits::select_in_word(words_[w], static_cast<unsigned>(j));
        j -= c;
    }
    throw std::logic_error("ones count inconsistent with words");
}

void BitVector::copy_bits(uint64_t start, uint64_t len, std::vector<uint8_t>& out) const {
    if (start > n_bits_ || len > n_bits_ - start) throw std::out_of_range("copy_bits range out of bounds");
    out.assign((len + 7) / 8, 0);
    const unsigned shift = start & 63;
    uint64_t w = start >> 6;
    for (uint64_t done = 0; done < len; done += 64, ++w) {
        uint64_t v = words_[w] >> shift;
        if (shift != 0 && w + 1 < words_.size()) v |= words_[w + 1] << (64 - shift);
        const uint64_t take = std::min<uint64_t>(64, len - done);
        v &= bits::low_mask(static_cast<unsigned>(take));
        std::memcpy(out.data() + done / 8, &v, (take + 7) / 8);
    }
}

std::vector<uint8_t> BitVector::serialize() const {
    std::vector<uint8_t> out;
    out.reserve(kPreamble + words_.size() * 8);
    out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
    bits::put_u64(out, n_bits_);
    for (uint64_t w : words_) bits::put_u64(out, w);
    return out;
}

BitVector BitVector::deserialize(std::span<const uint8_t> bytes) {
    if (bytes.size() < kPreamble) throw std::runtime_error("bitvector stream truncated");
    if (std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0) throw std::runtime_error("bad bitvector magic");
    const uint64_t n = bits::load_u64(bytes.data() + 4);
    const uint64_t n_words = (n + 63) / 64;
    if (n_words > (bytes.size() - kPreamble) / 8 || bytes.size() != kPreamble + n_words * 8) {
        throw std::runtime_error("bitvector stream length does not match its bit count");
    }
    std::vector<uint64_t> words(n_words);
    std::memcpy(words.data(), bytes.data() + kPreamble, n_words * 8);
    if (n % 64 != 0 && (words.back() & ~bits::low_mask(n % 64)) != 0) {
        throw std::runtime_error("bitvector padding bits are not zero");
    }
    return from_words(std::move(words), n);
}

void BitVectorBuilder::push_back(bool bit) {
    if ((n_bits_ & 63) == 0) words_.push_back(0);
    words_.back() |= uint64_t{bit} << (n_bits_ & 63);
    ++n_bits_;
}

void BitVectorBuilder::append(uint64_t value, unsigned len) {
    if (len == 0) return;
    value &= bits::low_mask(len);
    const unsigned used = n_bits_ & 63;
    if (used == 0) {
        words_.push_back(value);
    } else {
        words_.back() |= value << used;
        if (used + len > 64) words_.push_back(value >> (64 - used));
    }
    n_bits_ += len;
}

BitVector BitVectorBuilder::finalize() && {
    return BitVector::from_words(std::move(words_), n_bits_);
}

BitVector build_bitvector(std::span<const uint8_t> bits) { return BitVector::from_bits(bits); }

std::vector<uint8_t> read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::string& path, std::span<const uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot create " + path);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("write failed for " + path);
}

void save_bitvector(const BitVector& bv, const std::string& path) { write_file(path, bv.serialize()); }

BitVector load_bitvector(const std::string& path) { return BitVector::deserialize(read_file(path)); }

}  // namespace rankselect
