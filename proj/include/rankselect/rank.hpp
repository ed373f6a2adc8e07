#pragma once

// Compressed rank structures. B is cut into blocks of k bytes and every h
// consecutive blocks form a superblock. Blocks that are all zeros or all
// ones ("mono-blocks") have no body: two adjacent prefix ranks differing by
// 0 or by the block width identify them at query time. A partial last block
// is zero-padded, except that a tail of ones is treated as padded with ones so
// it remains a mono-block; the closing rank then exceeds the true count.
//
// Byte layouts (all fields little-endian, K = 8k bits per block, b blocks,
// S = ceil(b/h) superblocks):
//
//   basic   header: b+1 records {rank u32, offset u32}, last one a sentinel
//           body:   Plain blocks verbatim
//   bch     header: per superblock {first_rank u32, first_offset u32,
//                   rank_diff u16 x (h-1), mono flags roundup16(h-1) bits},
//                   then a u32 sentinel rank
//           body:   Plain blocks verbatim
//   mpe*    header: per superblock {first_rank u32, first_offset u32,
//                   rank_diff u16 x (h-1), offset_diff u16 x (h-1),
//                   block-0 mode u8}, then a u32 sentinel rank.
//                   offset_diff keeps the block's mode in its top bit (mpe1)
//                   or top two bits (mpe2, mpe3).
//           body:   mono-pair encoded Plain blocks
//   cf      header: {split j u32, right records {rank u32, offset u32} x (b-j),
//                   sentinel rank u32}
//           body:   left slots {rank u32, data k bytes} x j, sentinel rank u32.
//                   A left mono-block's data bytes hold the body of one
//                   right-part Plain block.

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "rankselect/bitvec.hpp"
#include "rankselect/bits.hpp"
#include "rankselect/mpe.hpp"

namespace rankselect {

enum class RankVariant : uint8_t { basic = 0, bch = 1, mpe1 = 2, mpe2 = 3, mpe3 = 4, cf = 5 };

inline constexpr RankVariant kAllRankVariants[] = {RankVariant::basic, RankVariant::bch,  RankVariant::mpe1,
                                                   RankVariant::mpe2,  RankVariant::mpe3, RankVariant::cf};

std::string_view to_string(RankVariant v);
RankVariant parse_rank_variant(std::string_view name);

struct RankParams {
    RankVariant variant = RankVariant::basic;
    uint32_t k_bytes = 64;  ///< block size in bytes, a positive multiple of 8
    uint32_t h = 16;        ///< blocks per superblock
    /// mpe3 keeps a compressed block only if it shrinks to this fraction of k.
    /// Build-time only; not serialized.
    double mpe3_max_ratio = 0.5;

    /// k = 64 for basic, bch and cf, 128 for the mpe variants; h = 32 for bch, 16 otherwise.
    static RankParams defaults(RankVariant v);
    /// Throws std::invalid_argument naming the violated constraint.
    void validate() const;
    uint32_t block_bits() const { return k_bytes * 8; }
    std::string describe() const;
};

enum class BlockClass : uint8_t { mono0, mono1, plain };

/// Class of block `block` (k bytes each). A partial tail block is mono when
/// its real bits are uniform; throws std::out_of_range.
BlockClass classify_block(const BitVector& bv, uint64_t block, uint32_t k_bytes);

/// Split point of the cf layout: the first j with m_j = (b - j) - (m_b - m_j),
/// where m_j counts mono-blocks among the first j blocks.
uint64_t cf_split_point(std::span<const BlockClass> classes);

/// Modelled memory accesses per query for a mono-block fraction f:
/// 2 - f for basic, 1 + f - f^2 for cf.
double expected_accesses(RankVariant variant, double f);

struct RankProbe {
    uint64_t rank;
    unsigned accesses;  ///< non-adjacent structure regions read
};

namespace detail {

struct RankData {
    RankParams params;
    uint64_t n_bits = 0;
    uint64_t ones = 0;
    std::vector<uint8_t> header;
    std::vector<uint8_t> body;

    uint64_t blocks() const { return (n_bits + params.block_bits() - 1) / params.block_bits(); }
    uint64_t superblocks() const { return (blocks() + params.h - 1) / params.h; }
};

struct Extent {
    uint64_t offset;
    uint64_t length;
};

inline void count_access(unsigned* acc, unsigned n) {
    if (acc) *acc = n;
}

template <bool Probe>
uint64_t at_end(uint64_t ones, unsigned* acc) {
    if constexpr (Probe) count_access(acc, 1);
    return ones;
}

}  // namespace detail

class RankBasic {
public:
    explicit RankBasic(detail::RankData d) : d_(std::move(d)), bits_(d_.params.block_bits()) {}

    template <bool Probe>
    uint64_t query(uint64_t i, unsigned* acc) const {
        if (i == d_.n_bits) return detail::at_end<Probe>(d_.ones, acc);
        const uint8_t* rec = d_.header.data() + 8 * (i / bits_);
        const uint32_t r = bits::load_u32(rec);
        const uint32_t delta = bits::load_u32(rec + 8) - r;
        const uint64_t in = i % bits_;
        if constexpr (Probe) detail::count_access(acc, 1);
        if (delta == 0) return r;
        if (delta == bits_) return r + in;
        if constexpr (Probe) detail::count_access(acc, 2);
        return r + bits::popcount_prefix(d_.body.data() + bits::load_u32(rec + 4), in);
    }

    std::pair<uint32_t, uint32_t> rank_pair(uint64_t blk) const {
        const uint8_t* rec = d_.header.data() + 8 * blk;
        return {bits::load_u32(rec), bits::load_u32(rec + 8)};
    }
    detail::Extent plain_extent(uint64_t blk) const {
        return {bits::load_u32(d_.header.data() + 8 * blk + 4), d_.params.k_bytes};
    }
    uint64_t expected_header_bytes() const { return 8 * (d_.blocks() + 1); }
    const detail::RankData& data() const { return d_; }
    detail::RankData& mutable_data() { return d_; }

private:
    detail::RankData d_;
    uint32_t bits_;
};

/// bch and the mpe variants share the superblock header prefix
/// {first_rank, first_offset, rank_diff x (h-1)}.
class SuperblockRanks {
public:
    SuperblockRanks(uint32_t h, uint32_t header_stride) : h_(h), stride_(header_stride) {}

    const uint8_t* superblock(const detail::RankData& d, uint64_t s) const { return d.header.data() + s * stride_; }

    // Rank at the start of block t of the superblock at `hdr`, and at the
    // start of block t+1 (which may be the next superblock's first rank or
    // the trailing sentinel).
    std::pair<uint32_t, uint32_t> ranks(const uint8_t* hdr, uint32_t t) const {
        const uint32_t first = bits::load_u32(hdr);
        const uint32_t r = t == 0 ? first : first + bits::load_u16(hdr + 8 + 2 * (t - 1));
        const uint32_t next =
            t + 1 < h_ ? first + bits::load_u16(hdr + 8 + 2 * t) : bits::load_u32(hdr + stride_);
        return {r, next};
    }

    uint32_t h() const { return h_; }
    uint32_t stride() const { return stride_; }

private:
    uint32_t h_;
    uint32_t stride_;
};

class RankBch {
public:
    static uint32_t header_stride(uint32_t h) { return 8 + 2 * (h - 1) + mpe_field_bytes(h - 1); }

    explicit RankBch(detail::RankData d)
        : d_(std::move(d)), sb_(d_.params.h, header_stride(d_.params.h)), bits_(d_.params.block_bits()) {}

    template <bool Probe>
    uint64_t query(uint64_t i, unsigned* acc) const {
        if (i == d_.n_bits) return detail::at_end<Probe>(d_.ones, acc);
        const uint64_t blk = i / bits_;
        const uint64_t in = i % bits_;
        const auto t = static_cast<uint32_t>(blk % sb_.h());
        const uint8_t* hdr = sb_.superblock(d_, blk / sb_.h());
        const auto [r, next] = sb_.ranks(hdr, t);
        const uint32_t delta = next - r;
        if constexpr (Probe) detail::count_access(acc, 1);
        if (delta == 0) return r;
        if (delta == bits_) return r + in;
        if constexpr (Probe) detail::count_access(acc, 2);
        return r + bits::popcount_prefix(d_.body.data() + plain_offset(hdr, t), in);
    }

    std::pair<uint32_t, uint32_t> rank_pair(uint64_t blk) const {
        return sb_.ranks(sb_.superblock(d_, blk / sb_.h()), static_cast<uint32_t>(blk % sb_.h()));
    }
    detail::Extent plain_extent(uint64_t blk) const {
        return {plain_offset(sb_.superblock(d_, blk / sb_.h()), static_cast<uint32_t>(blk % sb_.h())),
                d_.params.k_bytes};
    }
    uint64_t expected_header_bytes() const { return d_.superblocks() * sb_.stride() + 4; }
    const detail::RankData& data() const { return d_; }
    detail::RankData& mutable_data() { return d_; }

private:
    // first_offset + k * (Plain blocks among blocks 0..t-1 of the superblock)
    uint64_t plain_offset(const uint8_t* hdr, uint32_t t) const {
        const uint8_t* flags = hdr + 8 + 2 * (sb_.h() - 1);
        const uint64_t monos = bits::popcount_prefix(flags, t);
        return bits::load_u32(hdr + 4) + uint64_t{d_.params.k_bytes} * (t - monos);
    }

    detail::RankData d_;
    SuperblockRanks sb_;
    uint32_t bits_;
};

class RankMpe {
public:
    static uint32_t header_stride(uint32_t h) { return 8 + 4 * (h - 1) + 1; }
    /// Bits of each offset_diff left for the offset itself.
    static unsigned offset_bits(RankVariant v) { return v == RankVariant::mpe1 ? 15 : 14; }

    explicit RankMpe(detail::RankData d)
        : d_(std::move(d)),
          sb_(d_.params.h, header_stride(d_.params.h)),
          bits_(d_.params.block_bits()),
          off_bits_(offset_bits(d_.params.variant)) {}

    template <bool Probe>
    uint64_t query(uint64_t i, unsigned* acc) const {
        if (i == d_.n_bits) return detail::at_end<Probe>(d_.ones, acc);
        const uint64_t blk = i / bits_;
        const uint64_t in = i % bits_;
        const auto t = static_cast<uint32_t>(blk % sb_.h());
        const uint8_t* hdr = sb_.superblock(d_, blk / sb_.h());
        const auto [r, next] = sb_.ranks(hdr, t);
        const uint32_t delta = next - r;
        if constexpr (Probe) detail::count_access(acc, 1);
        if (delta == 0) return r;
        if (delta == bits_) return r + in;
        if constexpr (Probe) detail::count_access(acc, 2);
        return r + block_view(hdr, t).prefix_popcount(in);
    }

    MpeBlockView block_view(uint64_t blk) const {
        return block_view(sb_.superblock(d_, blk / sb_.h()), static_cast<uint32_t>(blk % sb_.h()));
    }
    std::pair<uint32_t, uint32_t> rank_pair(uint64_t blk) const {
        return sb_.ranks(sb_.superblock(d_, blk / sb_.h()), static_cast<uint32_t>(blk % sb_.h()));
    }
    /// Offset and mode only; the encoded length needs the (bounds-checked) presence field.
    std::pair<uint64_t, MpeMode> locate(uint64_t blk) const {
        return locate(sb_.superblock(d_, blk / sb_.h()), static_cast<uint32_t>(blk % sb_.h()));
    }
    uint64_t expected_header_bytes() const { return d_.superblocks() * sb_.stride() + 4; }
    const detail::RankData& data() const { return d_; }
    detail::RankData& mutable_data() { return d_; }

private:
    std::pair<uint64_t, MpeMode> locate(const uint8_t* hdr, uint32_t t) const {
        const uint32_t first_off = bits::load_u32(hdr + 4);
        if (t == 0) return {first_off, static_cast<MpeMode>(hdr[8 + 4 * (sb_.h() - 1)] & 3)};
        const uint16_t v = bits::load_u16(hdr + 8 + 2 * (sb_.h() - 1) + 2 * (t - 1));
        const uint16_t mode_bits = v >> off_bits_;
        const MpeMode mode = off_bits_ == 15 ? (mode_bits ? MpeMode::both : MpeMode::verbatim)
                                             : static_cast<MpeMode>(mode_bits);
        return {first_off + (v & bits::low_mask(off_bits_)), mode};
    }
    MpeBlockView block_view(const uint8_t* hdr, uint32_t t) const {
        const auto [off, mode] = locate(hdr, t);
        return {mode, d_.body.data() + off, d_.params.k_bytes / 2};
    }

    detail::RankData d_;
    SuperblockRanks sb_;
    uint32_t bits_;
    unsigned off_bits_;
};

class RankCf {
public:
    explicit RankCf(detail::RankData d)
        : d_(std::move(d)),
          bits_(d_.params.block_bits()),
          slot_(4 + d_.params.k_bytes),
          split_(d_.header.size() >= 4 ? bits::load_u32(d_.header.data()) : 0) {}

    template <bool Probe>
    uint64_t query(uint64_t i, unsigned* acc) const {
        if (i == d_.n_bits) return detail::at_end<Probe>(d_.ones, acc);
        const uint64_t blk = i / bits_;
        const uint64_t in = i % bits_;
        if constexpr (Probe) detail::count_access(acc, 1);
        if (blk < split_) {
            const uint8_t* slot = d_.body.data() + blk * slot_;
            const uint32_t r = bits::load_u32(slot);
            const uint32_t delta = bits::load_u32(slot + slot_) - r;
            if (delta == 0) return r;
            if (delta == bits_) return r + in;
            return r + bits::popcount_prefix(slot + 4, in);
        }
        const uint8_t* rec = d_.header.data() + 4 + 8 * (blk - split_);
        const uint32_t r = bits::load_u32(rec);
        const uint32_t delta = bits::load_u32(rec + 8) - r;
        if (delta == 0) return r;
        if (delta == bits_) return r + in;
        if constexpr (Probe) detail::count_access(acc, 2);
        return r + bits::popcount_prefix(d_.body.data() + bits::load_u32(rec + 4), in);
    }

    uint64_t split() const { return split_; }
    std::pair<uint32_t, uint32_t> rank_pair(uint64_t blk) const {
        const uint8_t* p = blk < split_ ? d_.body.data() + blk * slot_ : d_.header.data() + 4 + 8 * (blk - split_);
        const uint32_t stride = blk < split_ ? slot_ : 8;
        return {bits::load_u32(p), bits::load_u32(p + stride)};
    }
    detail::Extent plain_extent(uint64_t blk) const {
        if (blk < split_) return {blk * slot_ + 4, d_.params.k_bytes};
        return {bits::load_u32(d_.header.data() + 4 + 8 * (blk - split_) + 4), d_.params.k_bytes};
    }
    uint64_t expected_header_bytes() const { return 4 + 8 * (d_.blocks() - split_) + 4; }
    const detail::RankData& data() const { return d_; }
    detail::RankData& mutable_data() { return d_; }

private:
    detail::RankData d_;
    uint32_t bits_;
    uint32_t slot_;
    uint64_t split_;
};

/// A built rank structure of any variant.
class RankIndex {
public:
    using Impl = std::variant<RankBasic, RankBch, RankMpe, RankCf>;

    /// Fixed bytes of a serialized structure besides the header and body areas.
    static constexpr size_t kSerializedPreamble = 48;

    static RankIndex build(const BitVector& bv, const RankParams& params);

    /// Ones among the first i bits; throws std::out_of_range for i > size().
    uint64_t rank1(uint64_t i) const {
        check(i);
        return std::visit([i](const auto& s) { return s.template query<false>(i, nullptr); }, impl_);
    }
    uint64_t rank0(uint64_t i) const { return i - rank1(i); }
    /// rank1 plus the number of non-adjacent structure regions the query read.
    RankProbe rank1_probe(uint64_t i) const {
        check(i);
        unsigned acc = 0;
        const uint64_t r = std::visit([&](const auto& s) { return s.template query<true>(i, &acc); }, impl_);
        return {r, acc};
    }

    /// Exact size of the header and body areas in bits.
    uint64_t space_bits() const { return 8 * (data().header.size() + data().body.size()); }

    const RankParams& params() const { return data().params; }
    RankVariant variant() const { return params().variant; }
    uint64_t size() const { return data().n_bits; }
    uint64_t ones() const { return data().ones; }
    uint64_t blocks() const { return data().blocks(); }
    /// Blocks whose adjacent header ranks differ by 0 or by the block width.
    uint64_t mono_blocks() const;
    /// Body bytes that hold block bits, excluding cf's slot ranks.
    uint64_t block_body_bytes() const;
    std::span<const uint8_t> header_area() const { return data().header; }
    std::span<const uint8_t> body_area() const { return data().body; }

    std::vector<uint8_t> serialize() const;
    /// Validates the stream and every body reference a query can follow.
    static RankIndex deserialize(std::span<const uint8_t> bytes);

    /// Dispatches once to the concrete variant, for tight query loops.
    template <class F>
    decltype(auto) visit(F&& f) const {
        return std::visit(std::forward<F>(f), impl_);
    }

private:
    explicit RankIndex(Impl impl) : impl_(std::move(impl)) {}
    const detail::RankData& data() const {
        return std::visit([](const auto& s) -> const detail::RankData& { return s.data(); }, impl_);
    }
    void check(uint64_t i) const {
        if (i > size()) {
            throw std::out_of_range("rank position " + std::to_string(i) + " exceeds length " +
                                    std::to_string(size()));
        }
    }
    void check_bounds() const;

    Impl impl_;
};

}  // namespace rankselect
