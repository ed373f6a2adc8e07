#pragma once

// Compressed select_1 structures. Every ell-th one is sampled:
// V[i] = select1(i * ell), with V[0] = -1 (stored as 0xFFFFFFFF so that
// 32-bit wrapping arithmetic keeps V[1] - V[0] = V[1] + 1). Block i covers the
// ordinals between V[i] and V[i+1] and is classified by its gap
// V[i+1] - V[i]:
//
//   gap == ell   ones run  nothing stored, answer is V[i] + r
//   gap >  thr   sparse    the ell-1 interior positions, u32 each
//   otherwise    dense     the bits strictly between V[i] and V[i+1]
//
// Ordinals past the last multiple of ell form a trailing block that is always
// stored sparse.
//
// Header, per superblock of h blocks (little-endian):
//   basic  sample u32 x h, offset u32 x h
//   bch    sample u32 x h, first_offset u32, offset_diff u16 x (h-1)
//   mpe*   sample u32 x h, first_offset u32, offset_diff u16 x (h-1)
//          with the dense block's mode in the top 1 (mpe1) or 2 bits,
//          block-0 mode u8
// followed by one closing sample u32. Dense bodies are raw bytes for
// basic/bch and mono-pair encoded 16-bit chunks for the mpe variants.

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "rankselect/bitvec.hpp"
#include "rankselect/bits.hpp"
#include "rankselect/mpe.hpp"

namespace rankselect {

enum class SelectVariant : uint8_t { basic = 0, bch = 1, mpe1 = 2, mpe2 = 3, mpe3 = 4 };

inline constexpr SelectVariant kAllSelectVariants[] = {SelectVariant::basic, SelectVariant::bch, SelectVariant::mpe1,
                                                       SelectVariant::mpe2, SelectVariant::mpe3};

std::string_view to_string(SelectVariant v);
SelectVariant parse_select_variant(std::string_view name);

struct SelectParams {
    SelectVariant variant = SelectVariant::basic;
    uint32_t ell = 128;   ///< sampling interval over occurrence ordinals
    uint32_t thr = 4096;  ///< gaps above this are sparse
    uint32_t h = 16;      ///< blocks per superblock
    double mpe3_max_ratio = 0.5;  ///< build-time only

    static SelectParams defaults(SelectVariant v);
    /// Throws std::invalid_argument naming the violated constraint.
    void validate() const;
    bool is_mpe() const { return variant >= SelectVariant::mpe1; }
    std::string describe() const;
};

enum class SelectBlockClass : uint8_t { ones_run, sparse, dense };

/// Class of a full block from its gap; `thr >= ell` makes the cases disjoint.
constexpr SelectBlockClass classify_gap(uint32_t gap, uint32_t ell, uint32_t thr) {
    if (gap == ell) return SelectBlockClass::ones_run;
    return gap > thr ? SelectBlockClass::sparse : SelectBlockClass::dense;
}

struct SelectStats {
    uint64_t blocks = 0;
    uint64_t ones_run_blocks = 0;
    uint64_t sparse_blocks = 0;
    uint64_t dense_blocks = 0;
    uint64_t sparse_bytes = 0;
    uint64_t dense_bytes = 0;
};

class SelectIndex {
public:
    static constexpr size_t kSerializedPreamble = 52;

    static SelectIndex build(const BitVector& bv, const SelectParams& params);

    /// Position of the j-th one, 1 <= j <= ones(); throws std::out_of_range.
    uint64_t select1(uint64_t j) const {
        if (j == 0 || j > ones_) {
            throw std::out_of_range("select ordinal " + std::to_string(j) + " outside [1, " + std::to_string(ones_) +
                                    "]");
        }
        return select1_unchecked(j);
    }

    uint64_t select1_unchecked(uint64_t j) const {
        const uint64_t i = j / p_.ell;
        const auto r = static_cast<uint32_t>(j % p_.ell);
        const uint32_t lo = sample(i);
        if (r == 0) return lo;
        if (i == full_blocks_) return bits::load_u32(body_.data() + offset(i).first + 4 * (r - 1));
        const uint32_t gap = sample(i + 1) - lo;
        if (gap == p_.ell) return uint32_t(lo + r);
        const auto [off, mode] = offset(i);
        const uint8_t* data = body_.data() + off;
        if (gap > p_.thr) return bits::load_u32(data + 4 * (r - 1));
        const uint64_t pos = p_.is_mpe() ? MpeBlockView{mode, data, (gap - 1 + 15) / 16}.select(r)
                                         : bits::select_in_bytes(data, gap - 1, r);
        return uint32_t(lo + 1 + pos);
    }

    uint64_t space_bits() const { return 8 * (header_.size() + body_.size()); }

    const SelectParams& params() const { return p_; }
    SelectVariant variant() const { return p_.variant; }
    uint64_t size() const { return n_bits_; }
    uint64_t ones() const { return ones_; }
    /// Blocks including the trailing partial one.
    uint64_t blocks() const { return full_blocks_ + (ones_ % p_.ell != 0); }
    /// Stored sample V[i] for 0 <= i <= blocks() (V[0] reads as 0xFFFFFFFF).
    uint32_t sample(uint64_t i) const { return bits::load_u32(header_.data() + (i / p_.h) * stride_ + 4 * (i % p_.h)); }
    SelectBlockClass block_class(uint64_t i) const;
    SelectStats stats() const;
    std::span<const uint8_t> header_area() const { return header_; }
    std::span<const uint8_t> body_area() const { return body_; }

    std::vector<uint8_t> serialize() const;
    static SelectIndex deserialize(std::span<const uint8_t> bytes);

    static uint32_t header_stride(const SelectParams& p);

private:
    SelectIndex(SelectParams p, uint64_t n_bits, uint64_t ones, std::vector<uint8_t> header, std::vector<uint8_t> body);

    // Body offset of block i and, for the mpe variants, its encoding mode.
    std::pair<uint64_t, MpeMode> offset(uint64_t i) const {
        const uint8_t* hdr = header_.data() + (i / p_.h) * stride_;
        const auto t = static_cast<uint32_t>(i % p_.h);
        const uint8_t* offs = hdr + 4 * p_.h;
        if (p_.variant == SelectVariant::basic) return {bits::load_u32(offs + 4 * t), MpeMode::verbatim};
        const uint32_t first = bits::load_u32(offs);
        if (t == 0) {
            const MpeMode mode = p_.is_mpe() ? static_cast<MpeMode>(offs[4 + 2 * (p_.h - 1)] & 3) : MpeMode::verbatim;
            return {first, mode};
        }
        const uint16_t v = bits::load_u16(offs + 4 + 2 * (t - 1));
        if (!p_.is_mpe()) return {first + uint64_t{v}, MpeMode::verbatim};
        const MpeMode mode = off_bits_ == 15 ? ((v >> 15) ? MpeMode::both : MpeMode::verbatim)
                                             : static_cast<MpeMode>(v >> 14);
        return {first + (v & bits::low_mask(off_bits_)), mode};
    }
    uint64_t block_extent(uint64_t i) const;
    void check_bounds() const;

    SelectParams p_;
    uint64_t n_bits_ = 0;
    uint64_t ones_ = 0;
    uint64_t full_blocks_ = 0;
    uint32_t stride_ = 0;
    unsigned off_bits_ = 16;
    std::vector<uint8_t> header_;
    std::vector<uint8_t> body_;
};

}  // namespace rankselect
