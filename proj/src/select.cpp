#include "rankselect/select.hpp"

#include <algorithm>
#include <bit>
#include <cstring>

namespace rankselect {

namespace {

constexpr char kMagic[4] = {'R', 'S', 'S', 'L'};

unsigned offset_bits(SelectVariant v) {
    switch (v) {
        case SelectVariant::basic: return 32;
        case SelectVariant::bch: return 16;
        case SelectVariant::mpe1: return 15;
        default: return 14;
    }
}

MpePolicy policy_of(SelectVariant v) {
    switch (v) {
        case SelectVariant::mpe1: return MpePolicy::mpe1;
        case SelectVariant::mpe2: return MpePolicy::mpe2;
        default: return MpePolicy::mpe3;
    }
}

uint32_t dense_chunks(uint32_t gap) { return (gap - 1 + 15) / 16; }

// Largest body a single block can occupy under the given parameters.
uint64_t worst_block_bytes(const SelectParams& p) {
    const uint64_t sparse = 4 * (uint64_t{p.ell} - 1);
    uint64_t dense = (uint64_t{p.thr} + 7) / 8;
    if (p.is_mpe()) {
        const uint64_t chunks = (uint64_t{p.thr} + 15) / 16;
        dense = 2 * chunks + 2 * mpe_field_bytes(static_cast<uint32_t>(chunks));
    }
    return std::max(sparse, dense);
}

// Positions of the one-bits, found by a word scan starting at `start`.
void collect_ones(const BitVector& bv, uint64_t start, uint64_t count, std::vector<uint32_t>& out) {
    out.clear();
    const auto words = bv.words();
    uint64_t w = start >> 6;
    uint64_t word = w < words.size() ? words[w] & (~uint64_t{0} << (start & 63)) : 0;
    while (out.size() < count) {
        while (word == 0) {
            if (++w >= words.size()) throw std::logic_error("fewer ones than the samples imply");
            word = words[w];
        }
        out.push_back(static_cast<uint32_t>(w * 64 + std::countr_zero(word)));
        word &= word - 1;
    }
}

}  // namespace

std::string_view to_string(SelectVariant v) {
    switch (v) {
        case SelectVariant::basic: return "basic";
        case SelectVariant::bch: return "bch";
        case SelectVariant::mpe1: return "mpe1";
        case SelectVariant::mpe2: return "mpe2";
        case SelectVariant::mpe3: return "mpe3";
    }
    return "unknown";
}

SelectVariant parse_select_variant(std::string_view name) {
    for (SelectVariant v : kAllSelectVariants) {
        if (to_string(v) == name) return v;
    }
    throw std::invalid_argument("unknown select variant '" + std::string(name) + "'");
}

SelectParams SelectParams::defaults(SelectVariant v) {
    SelectParams p;
    p.variant = v;
    return p;
}

void SelectParams::validate() const {
    if (static_cast<uint8_t>(variant) > static_cast<uint8_t>(SelectVariant::mpe3)) {
        throw std::invalid_argument("unknown select variant");
    }
    if (ell < 2) throw std::invalid_argument("ell must be at least 2 (got " + std::to_string(ell) + ")");
    if (thr < ell) {
        throw std::invalid_argument("thr must be at least ell (got thr=" + std::to_string(thr) +
                                    ", ell=" + std::to_string(ell) + ")");
    }
    if (h == 0) throw std::invalid_argument("h must be positive");
    if (h > (1u << 16)) throw std::invalid_argument("h must not exceed 2^16");
    if (variant == SelectVariant::basic) return;
    const unsigned bits = offset_bits(variant);
    const uint64_t extent = uint64_t{h} * worst_block_bytes(*this);
    if (extent >= (uint64_t{1} << bits)) {
        throw std::invalid_argument("h * max(dense bytes, 4*(ell-1)) = " + std::to_string(extent) +
                                    " must be below 2^" + std::to_string(bits) + " for " +
                                    std::string(to_string(variant)) + " differential offsets");
    }
    if (mpe3_max_ratio <= 0.0 || mpe3_max_ratio > 1.0) throw std::invalid_argument("mpe3 ratio must lie in (0, 1]");
}

std::string SelectParams::describe() const {
    return "ell=" + std::to_string(ell) + ";thr=" + std::to_string(thr) + ";h=" + std::to_string(h);
}

uint32_t SelectIndex::header_stride(const SelectParams& p) {
    switch (p.variant) {
        case SelectVariant::basic: return 8 * p.h;
        case SelectVariant::bch: return 4 * p.h + 4 + 2 * (p.h - 1);
        default: return 4 * p.h + 4 + 2 * (p.h - 1) + 1;
    }
}

SelectIndex::SelectIndex(SelectParams p, uint64_t n_bits, uint64_t ones, std::vector<uint8_t> header,
                         std::vector<uint8_t> body)
    : p_(p),
      n_bits_(n_bits),
      ones_(ones),
      full_blocks_(ones / p.ell),
      stride_(header_stride(p)),
      off_bits_(offset_bits(p.variant)),
      header_(std::move(header)),
      body_(std::move(body)) {}

SelectIndex SelectIndex::build(const BitVector& bv, const SelectParams& params) {
    params.validate();
    require_structure_length(bv.size());
    const SelectParams& p = params;
    const uint64_t ones = bv.ones();
    const uint64_t full = ones / p.ell;
    const bool trailing = ones % p.ell != 0;
    const uint64_t nblocks = full + trailing;

    // samples[i] = V[i]; samples[nblocks] closes the last block
    std::vector<uint32_t> samples(nblocks + 1);
    samples[0] = 0xFFFFFFFFu;
    {
        uint64_t seen = 0;
        uint64_t target = p.ell;
        const auto words = bv.words();
        for (size_t w = 0; w < words.size() && target <= full * p.ell; ++w) {
            const auto c = static_cast<uint64_t>(std::popcount(words[w]));
            while (target <= full * p.ell && seen + c >= target) {
                samples[target / p.ell] =
                    static_cast<uint32_t>(w * 64 + bits::select_in_word(words[w], static_cast<unsigned>(target - seen)));
                target += p.ell;
            }
            seen += c;
        }
    }
    if (trailing) samples[nblocks] = static_cast<uint32_t>(bv.size());

    const uint64_t superblocks = (nblocks + p.h - 1) / p.h;
    const uint32_t stride = header_stride(p);
    const unsigned off_bits = offset_bits(p.variant);
    std::vector<uint8_t> header(superblocks * stride + 4, 0);
    std::vector<uint8_t> body;
    std::vector<uint32_t> positions;
    std::vector<uint8_t> payload;

    for (uint64_t s = 0; s < superblocks; ++s) {
        uint8_t* hdr = header.data() + s * stride;
        uint8_t* offs = hdr + 4 * p.h;
        const uint64_t first_off = body.size();
        if (p.variant != SelectVariant::basic) bits::store_u32(offs, static_cast<uint32_t>(first_off));
        for (uint32_t t = 0; t < p.h; ++t) {
            const uint64_t i = s * p.h + t;
            bits::store_u32(hdr + 4 * t, samples[std::min(i, nblocks)]);
            const uint64_t at = body.size();
            MpeMode mode = MpeMode::verbatim;
            if (i < nblocks) {
                const uint32_t lo = samples[i];
                const uint32_t gap = samples[i + 1] - lo;
                if (i == full) {
                    collect_ones(bv, uint32_t(lo + 1), ones - full * p.ell, positions);
                    for (uint32_t v : positions) bits::put_u32(body, v);
                } else if (classify_gap(gap, p.ell, p.thr) == SelectBlockClass::sparse) {
                    collect_ones(bv, uint32_t(lo + 1), p.ell - 1, positions);
                    for (uint32_t v : positions) bits::put_u32(body, v);
                } else if (classify_gap(gap, p.ell, p.thr) == SelectBlockClass::dense) {
                    bv.copy_bits(uint32_t(lo + 1), gap - 1, payload);
                    if (p.is_mpe()) {
                        payload.resize(2 * size_t{dense_chunks(gap)}, 0);
                        mode = mpe_choose_mode(mpe_chunk_stats(payload), policy_of(p.variant), p.mpe3_max_ratio);
                        mpe_encode_into(payload, mode, body);
                    } else {
                        body.insert(body.end(), payload.begin(), payload.end());
                    }
                }
            }
            if (p.variant == SelectVariant::basic) {
                bits::store_u32(offs + 4 * t, static_cast<uint32_t>(at));
                continue;
            }
            const uint64_t rel = at - first_off;
            if (t == 0) {
                if (p.is_mpe()) offs[4 + 2 * (p.h - 1)] = static_cast<uint8_t>(mode);
                continue;
            }
            if (rel >> off_bits) {
                throw std::invalid_argument("superblock " + std::to_string(s) + ": offset " + std::to_string(rel) +
                                            " overflows the " + std::to_string(off_bits) +
                                            "-bit differential field");
            }
            uint32_t v = static_cast<uint32_t>(rel);
            if (p.is_mpe()) {
                const uint32_t mode_bits = off_bits == 15 ? (mode == MpeMode::both) : static_cast<uint32_t>(mode);
                v |= mode_bits << off_bits;
            }
            bits::store_u16(offs + 4 + 2 * (t - 1), static_cast<uint16_t>(v));
        }
    }
    bits::store_u32(header.data() + superblocks * stride, samples[nblocks]);
    return SelectIndex(p, bv.size(), ones, std::move(header), std::move(body));
}

SelectBlockClass SelectIndex::block_class(uint64_t i) const {
    if (i >= blocks()) throw std::out_of_range("select block " + std::to_string(i) + " out of range");
    if (i == full_blocks_) return SelectBlockClass::sparse;
    return classify_gap(sample(i + 1) - sample(i), p_.ell, p_.thr);
}

// Body bytes block i occupies, following the same path a query takes.
uint64_t SelectIndex::block_extent(uint64_t i) const {
    if (i == full_blocks_) return 4 * (ones_ - full_blocks_ * p_.ell);
    const uint32_t gap = sample(i + 1) - sample(i);
    switch (classify_gap(gap, p_.ell, p_.thr)) {
        case SelectBlockClass::ones_run: return 0;
        case SelectBlockClass::sparse: return 4 * (uint64_t{p_.ell} - 1);
        case SelectBlockClass::dense: break;
    }
    if (!p_.is_mpe()) return (uint64_t{gap} - 1 + 7) / 8;
    const auto [off, mode] = offset(i);
    return MpeBlockView{mode, body_.data() + off, dense_chunks(gap)}.encoded_size();
}

SelectStats SelectIndex::stats() const {
    SelectStats st;
    st.blocks = blocks();
    for (uint64_t i = 0; i < st.blocks; ++i) {
        const uint64_t bytes = block_extent(i);
        switch (block_class(i)) {
            case SelectBlockClass::ones_run: ++st.ones_run_blocks; break;
            case SelectBlockClass::sparse:
                ++st.sparse_blocks;
                st.sparse_bytes += bytes;
                break;
            case SelectBlockClass::dense:
                ++st.dense_blocks;
                st.dense_bytes += bytes;
                break;
        }
    }
    return st;
}

void SelectIndex::check_bounds() const {
    const uint64_t superblocks = (blocks() + p_.h - 1) / p_.h;
    if (header_.size() != superblocks * stride_ + 4) {
        throw std::runtime_error("select header area has " + std::to_string(header_.size()) + " bytes, expected " +
                                 std::to_string(superblocks * stride_ + 4));
    }
    for (uint64_t i = 0; i < blocks(); ++i) {
        const auto fail = [i](const char* what) {
            throw std::runtime_error("select structure block " + std::to_string(i) + ": " + what);
        };
        if (i != full_blocks_ && uint32_t(sample(i + 1) - sample(i)) < p_.ell) fail("sample gap below ell");
        const auto [off, mode] = offset(i);
        if (off > body_.size()) fail("offset past the body");
        if (p_.is_mpe() && i != full_blocks_ && block_class(i) == SelectBlockClass::dense) {
            const uint32_t chunks = dense_chunks(sample(i + 1) - sample(i));
            const uint64_t fields = mode == MpeMode::verbatim ? 0
                                    : mode == MpeMode::both  ? 2 * mpe_field_bytes(chunks)
                                                             : mpe_field_bytes(chunks);
            if (off + fields > body_.size()) fail("encoded fields past the body");
        }
        if (off + block_extent(i) > body_.size()) fail("block payload past the body");
    }
}

std::vector<uint8_t> SelectIndex::serialize() const {
    std::vector<uint8_t> out;
    out.reserve(kSerializedPreamble + header_.size() + body_.size());
    out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
    bits::put_u32(out, static_cast<uint32_t>(p_.variant));
    bits::put_u32(out, p_.ell);
    bits::put_u32(out, p_.thr);
    bits::put_u32(out, p_.h);
    bits::put_u64(out, n_bits_);
    bits::put_u64(out, ones_);
    bits::put_u64(out, header_.size());
    out.insert(out.end(), header_.begin(), header_.end());
    bits::put_u64(out, body_.size());
    out.insert(out.end(), body_.begin(), body_.end());
    return out;
}

SelectIndex SelectIndex::deserialize(std::span<const uint8_t> bytes) {
    if (bytes.size() < kSerializedPreamble) throw std::runtime_error("select structure stream truncated");
    if (std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0) throw std::runtime_error("bad select structure magic");
    const uint32_t variant = bits::load_u32(bytes.data() + 4);
    if (variant > static_cast<uint32_t>(SelectVariant::mpe3)) throw std::runtime_error("bad select variant tag");
    SelectParams p;
    p.variant = static_cast<SelectVariant>(variant);
    p.ell = bits::load_u32(bytes.data() + 8);
    p.thr = bits::load_u32(bytes.data() + 12);
    p.h = bits::load_u32(bytes.data() + 16);
    p.validate();
    const uint64_t n_bits = bits::load_u64(bytes.data() + 20);
    const uint64_t ones = bits::load_u64(bytes.data() + 28);
    require_structure_length(n_bits);
    if (ones > n_bits) throw std::runtime_error("ones count exceeds bit count");
    size_t pos = 36;
    std::vector<uint8_t> areas[2];
    for (auto& area : areas) {
        if (bytes.size() - pos < 8) throw std::runtime_error("select structure stream truncated");
        const uint64_t len = bits::load_u64(bytes.data() + pos);
        pos += 8;
        if (len > bytes.size() - pos) throw std::runtime_error("select structure stream truncated");
        area.assign(bytes.begin() + static_cast<ptrdiff_t>(pos), bytes.begin() + static_cast<ptrdiff_t>(pos + len));
        pos += len;
    }
    if (pos != bytes.size()) throw std::runtime_error("trailing bytes after select structure");
    SelectIndex idx(p, n_bits, ones, std::move(areas[0]), std::move(areas[1]));
    idx.check_bounds();
    return idx;
}

}  // namespace rankselect
