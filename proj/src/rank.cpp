#include "rankselect/rank.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <deque>

namespace rankselect {

namespace {

constexpr char kMagic[4] = {'R', 'S', 'R', 'K'};

// Prefix ranks at every block boundary plus the per-block classes.
struct BlockScan {
    uint32_t block_bits = 0;
    std::vector<uint32_t> ranks;  // blocks + 1 entries
    std::vector<BlockClass> classes;

    uint64_t blocks() const { return classes.size(); }
    uint32_t rank_at(uint64_t blk) const { return ranks[std::min<uint64_t>(blk, blocks())]; }
};

BlockScan scan_blocks(const BitVector& bv, uint32_t k_bytes) {
    BlockScan s;
    s.block_bits = k_bytes * 8;
    const uint64_t words_per_block = k_bytes / 8;
    const auto words = bv.words();
    const uint64_t b = (bv.size() + s.block_bits - 1) / s.block_bits;
    s.ranks.reserve(b + 1);
    s.classes.reserve(b);
    uint64_t rank = 0;
    for (uint64_t blk = 0; blk < b; ++blk) {
        s.ranks.push_back(static_cast<uint32_t>(rank));
        const uint64_t end = std::min<uint64_t>((blk + 1) * words_per_block, words.size());
        uint64_t ones = 0;
        for (uint64_t w = blk * words_per_block; w < end; ++w) ones += std::popcount(words[w]);
        const uint64_t real = std::min<uint64_t>(s.block_bits, bv.size() - blk * s.block_bits);
        if (ones == real && ones != 0) {
            // A tail of ones counts as padded with ones, so it stays mono.
            rank += s.block_bits;
            s.classes.push_back(BlockClass::mono1);
        } else {
            rank += ones;
            s.classes.push_back(ones == 0 ? BlockClass::mono0 : BlockClass::plain);
        }
    }
    s.ranks.push_back(static_cast<uint32_t>(rank));
    return s;
}

// Appends block `blk` as k bytes, zero-padding past the end of B.
void append_block(const BitVector& bv, uint64_t blk, uint32_t k_bytes, std::vector<uint8_t>& out) {
    const uint64_t words_per_block = k_bytes / 8;
    const auto words = bv.words();
    const size_t at = out.size();
    out.resize(at + k_bytes, 0);
    const uint64_t first = blk * words_per_block;
    const uint64_t end = std::min<uint64_t>(first + words_per_block, words.size());
    if (end > first) std::memcpy(out.data() + at, words.data() + first, (end - first) * 8);
}

detail::RankData make_data(const BitVector& bv, const RankParams& p) {
    detail::RankData d;
    d.params = p;
    d.n_bits = bv.size();
    d.ones = bv.ones();
    return d;
}

RankBasic build_basic(const BitVector& bv, const RankParams& p) {
    auto d = make_data(bv, p);
    const auto scan = scan_blocks(bv, p.k_bytes);
    d.header.reserve(8 * (scan.blocks() + 1));
    for (uint64_t blk = 0; blk <= scan.blocks(); ++blk) {
        bits::put_u32(d.header, scan.ranks[blk]);
        bits::put_u32(d.header, static_cast<uint32_t>(d.body.size()));
        if (blk < scan.blocks() && scan.classes[blk] == BlockClass::plain) append_block(bv, blk, p.k_bytes, d.body);
    }
    return RankBasic(std::move(d));
}

void put_rank_diffs(std::vector<uint8_t>& out, const BlockScan& scan, uint64_t base, uint32_t h) {
    const uint32_t first = scan.rank_at(base);
    for (uint32_t t = 1; t < h; ++t) {
        const uint32_t diff = scan.rank_at(base + t) - first;
        if (diff > 0xFFFF) throw std::logic_error("rank difference overflows 16 bits");
        bits::put_u16(out, static_cast<uint16_t>(diff));
    }
}

RankBch build_bch(const BitVector& bv, const RankParams& p) {
    auto d = make_data(bv, p);
    const auto scan = scan_blocks(bv, p.k_bytes);
    const uint32_t h = p.h;
    const uint64_t superblocks = d.superblocks();
    d.header.reserve(superblocks * RankBch::header_stride(h) + 4);
    for (uint64_t s = 0; s < superblocks; ++s) {
        const uint64_t base = s * h;
        bits::put_u32(d.header, scan.rank_at(base));
        bits::put_u32(d.header, static_cast<uint32_t>(d.body.size()));
        put_rank_diffs(d.header, scan, base, h);
        const size_t flags_at = d.header.size();
        d.header.resize(flags_at + mpe_field_bytes(h - 1), 0);
        for (uint32_t t = 0; t < h && base + t < scan.blocks(); ++t) {
            const uint64_t blk = base + t;
            if (scan.classes[blk] == BlockClass::plain) {
                append_block(bv, blk, p.k_bytes, d.body);
            } else if (t + 1 < h) {
                d.header[flags_at + t / 8] |= uint8_t(1u << (t % 8));
            }
        }
    }
    bits::put_u32(d.header, scan.ranks.back());
    return RankBch(std::move(d));
}

MpePolicy policy_of(RankVariant v) {
    switch (v) {
        case RankVariant::mpe1: return MpePolicy::mpe1;
        case RankVariant::mpe2: return MpePolicy::mpe2;
        default: return MpePolicy::mpe3;
    }
}

RankMpe build_mpe(const BitVector& bv, const RankParams& p) {
    auto d = make_data(bv, p);
    const auto scan = scan_blocks(bv, p.k_bytes);
    const uint32_t h = p.h;
    const unsigned off_bits = RankMpe::offset_bits(p.variant);
    const MpePolicy policy = policy_of(p.variant);
    const uint64_t superblocks = d.superblocks();
    d.header.reserve(superblocks * RankMpe::header_stride(h) + 4);
    std::vector<uint8_t> raw;
    std::vector<uint16_t> offset_diffs(h - 1);
    for (uint64_t s = 0; s < superblocks; ++s) {
        const uint64_t base = s * h;
        const auto first_off = static_cast<uint32_t>(d.body.size());
        uint8_t block0_mode = 0;
        for (uint32_t t = 0; t < h; ++t) {
            const uint64_t blk = base + t;
            const uint64_t rel = d.body.size() - first_off;
            MpeMode mode = MpeMode::verbatim;
            if (blk < scan.blocks() && scan.classes[blk] == BlockClass::plain) {
                raw.clear();
                append_block(bv, blk, p.k_bytes, raw);
                mode = mpe_choose_mode(mpe_chunk_stats(raw), policy, p.mpe3_max_ratio);
                mpe_encode_into(raw, mode, d.body);
            }
            if (t == 0) {
                block0_mode = static_cast<uint8_t>(mode);
                continue;
            }
            if (rel >> off_bits) {
                throw std::invalid_argument("superblock " + std::to_string(s) + ": offset " + std::to_string(rel) +
                                            " overflows the " + std::to_string(off_bits) + "-bit differential field");
            }
            const uint16_t mode_bits = off_bits == 15 ? (mode == MpeMode::both ? 1 : 0) : static_cast<uint16_t>(mode);
            offset_diffs[t - 1] = static_cast<uint16_t>(rel | (uint32_t{mode_bits} << off_bits));
        }
        bits::put_u32(d.header, scan.rank_at(base));
        bits::put_u32(d.header, first_off);
        put_rank_diffs(d.header, scan, base, h);
        for (uint16_t v : offset_diffs) bits::put_u16(d.header, v);
        bits::put_u8(d.header, block0_mode);
    }
    bits::put_u32(d.header, scan.ranks.back());
    return RankMpe(std::move(d));
}

RankCf build_cf(const BitVector& bv, const RankParams& p) {
    auto d = make_data(bv, p);
    const auto scan = scan_blocks(bv, p.k_bytes);
    const uint64_t b = scan.blocks();
    const uint64_t split = cf_split_point(scan.classes);
    const uint64_t slot = 4 + uint64_t{p.k_bytes};

    d.body.reserve(split * slot + 4);
    std::deque<uint64_t> free_slots;  // data offsets of left mono-blocks
    for (uint64_t blk = 0; blk < split; ++blk) {
        bits::put_u32(d.body, scan.ranks[blk]);
        if (scan.classes[blk] == BlockClass::plain) {
            append_block(bv, blk, p.k_bytes, d.body);
        } else {
            free_slots.push_back(d.body.size());
            d.body.resize(d.body.size() + p.k_bytes, 0);
        }
    }
    bits::put_u32(d.body, scan.rank_at(split));

    d.header.reserve(4 + 8 * (b - split) + 4);
    bits::put_u32(d.header, static_cast<uint32_t>(split));
    std::vector<uint8_t> raw;
    for (uint64_t blk = split; blk < b; ++blk) {
        bits::put_u32(d.header, scan.ranks[blk]);
        uint64_t offset = 0;
        if (scan.classes[blk] == BlockClass::plain) {
            if (free_slots.empty()) throw std::logic_error("cf split left no free slot for a right Plain block");
            offset = free_slots.front();
            free_slots.pop_front();
            raw.clear();
            append_block(bv, blk, p.k_bytes, raw);
            std::memcpy(d.body.data() + offset, raw.data(), raw.size());
        }
        bits::put_u32(d.header, static_cast<uint32_t>(offset));
    }
    bits::put_u32(d.header, scan.ranks.back());
    return RankCf(std::move(d));
}

void fail_bounds(uint64_t blk, const char* what) {
    throw std::runtime_error("rank structure block " + std::to_string(blk) + ": " + what);
}

}  // namespace

std::string_view to_string(RankVariant v) {
    switch (v) {
        case RankVariant::basic: return "basic";
        case RankVariant::bch: return "bch";
        case RankVariant::mpe1: return "mpe1";
        case RankVariant::mpe2: return "mpe2";
        case RankVariant::mpe3: return "mpe3";
        case RankVariant::cf: return "cf";
    }
    return "unknown";
}

RankVariant parse_rank_variant(std::string_view name) {
    for (RankVariant v : kAllRankVariants) {
        if (to_string(v) == name) return v;
    }
    throw std::invalid_argument("unknown rank variant '" + std::string(name) + "'");
}

RankParams RankParams::defaults(RankVariant v) {
    RankParams p;
    p.variant = v;
    const bool mpe = v == RankVariant::mpe1 || v == RankVariant::mpe2 || v == RankVariant::mpe3;
    p.k_bytes = mpe ? 128 : 64;
    p.h = v == RankVariant::bch ? 32 : 16;
    return p;
}

void RankParams::validate() const {
    if (k_bytes == 0 || k_bytes % 8 != 0) {
        throw std::invalid_argument("k must be a positive multiple of 8 bytes (got " + std::to_string(k_bytes) + ")");
    }
    if (k_bytes > (1u << 20)) throw std::invalid_argument("k must not exceed 2^20 bytes");
    if (h == 0) throw std::invalid_argument("h must be positive");
    if (static_cast<uint8_t>(variant) > static_cast<uint8_t>(RankVariant::cf)) {
        throw std::invalid_argument("unknown rank variant");
    }
    if (variant == RankVariant::basic || variant == RankVariant::cf) return;
    if (uint64_t{h} * k_bytes * 8 >= (1u << 16)) {
        throw std::invalid_argument("h*k*8 must be below 2^16 for 2-byte differential ranks (got " +
                                    std::to_string(uint64_t{h} * k_bytes * 8) + ")");
    }
    if (variant == RankVariant::bch) return;
    const uint64_t limit = uint64_t{1} << RankMpe::offset_bits(variant);
    if (uint64_t{h} * k_bytes >= limit) {
        throw std::invalid_argument("superblock byte extent h*k must be below 2^" +
                                    std::to_string(RankMpe::offset_bits(variant)) + " for " +
                                    std::string(to_string(variant)) + " differential offsets (got " +
                                    std::to_string(uint64_t{h} * k_bytes) + ")");
    }
    if (mpe3_max_ratio <= 0.0 || mpe3_max_ratio > 1.0) throw std::invalid_argument("mpe3 ratio must lie in (0, 1]");
}

std::string RankParams::describe() const {
    return "k=" + std::to_string(k_bytes) + ";h=" + std::to_string(h);
}

BlockClass classify_block(const BitVector& bv, uint64_t block, uint32_t k_bytes) {
    if (k_bytes == 0 || k_bytes % 8 != 0) throw std::invalid_argument("k must be a positive multiple of 8 bytes");
    const uint64_t block_bits = uint64_t{k_bytes} * 8;
    const uint64_t b = (bv.size() + block_bits - 1) / block_bits;
    if (block >= b) {
        throw std::out_of_range("block " + std::to_string(block) + " out of range for " + std::to_string(b) +
                                " blocks");
    }
    const uint64_t start = block * block_bits;
    const uint64_t end = std::min(start + block_bits, bv.size());
    const uint64_t ones = bv.ones_in_range(start, end);
    if (ones == 0) return BlockClass::mono0;
    return ones == end - start ? BlockClass::mono1 : BlockClass::plain;
}

uint64_t cf_split_point(std::span<const BlockClass> classes) {
    const uint64_t b = classes.size();
    const auto m_b = static_cast<uint64_t>(
        std::count_if(classes.begin(), classes.end(), [](BlockClass c) { return c != BlockClass::plain; }));
    uint64_t m_j = 0;
    for (uint64_t j = 0; j <= b; ++j) {
        // m_j == (b - j) - (m_b - m_j), rearranged to stay unsigned
        if (m_j + (m_b - m_j) + j == b) return j;
        if (j < b && classes[j] != BlockClass::plain) ++m_j;
    }
    throw std::logic_error("cf split point not found");
}

double expected_accesses(RankVariant variant, double f) {
    if (!(f >= 0.0 && f <= 1.0)) throw std::domain_error("mono-block fraction must lie in [0, 1]");
    switch (variant) {
        case RankVariant::basic: return 2.0 - f;
        case RankVariant::cf: return 1.0 + f - f * f;
        default: throw std::invalid_argument("access model defined for basic and cf only");
    }
}

RankIndex RankIndex::build(const BitVector& bv, const RankParams& params) {
    params.validate();
    require_structure_length(bv.size());
    switch (params.variant) {
        case RankVariant::basic: return RankIndex(build_basic(bv, params));
        case RankVariant::bch: return RankIndex(build_bch(bv, params));
        case RankVariant::mpe1:
        case RankVariant::mpe2:
        case RankVariant::mpe3: return RankIndex(build_mpe(bv, params));
        case RankVariant::cf: return RankIndex(build_cf(bv, params));
    }
    throw std::invalid_argument("unknown rank variant");
}

uint64_t RankIndex::mono_blocks() const {
    return visit([](const auto& s) {
        const uint32_t block_bits = s.data().params.block_bits();
        uint64_t m = 0;
        for (uint64_t blk = 0; blk < s.data().blocks(); ++blk) {
            const auto [r, next] = s.rank_pair(blk);
            m += (next - r == 0 || next - r == block_bits);
        }
        return m;
    });
}

uint64_t RankIndex::block_body_bytes() const {
    if (const auto* cf = std::get_if<RankCf>(&impl_)) return cf->split() * params().k_bytes;
    return data().body.size();
}

void RankIndex::check_bounds() const {
    visit([](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        const auto& d = s.data();
        if (d.header.size() != s.expected_header_bytes()) {
            throw std::runtime_error("rank header area has " + std::to_string(d.header.size()) + " bytes, expected " +
                                     std::to_string(s.expected_header_bytes()));
        }
        if constexpr (std::is_same_v<T, RankCf>) {
            if (s.split() > d.blocks()) throw std::runtime_error("cf split point beyond block count");
            if (d.body.size() != s.split() * (4 + uint64_t{d.params.k_bytes}) + 4) {
                throw std::runtime_error("cf left area size does not match its split point");
            }
        }
        const uint32_t block_bits = d.params.block_bits();
        for (uint64_t blk = 0; blk < d.blocks(); ++blk) {
            const auto [r, next] = s.rank_pair(blk);
            if (next - r == 0 || next - r == block_bits) continue;
            if constexpr (std::is_same_v<T, RankMpe>) {
                const auto [off, mode] = s.locate(blk);
                const uint32_t chunks = d.params.k_bytes / 2;
                const uint64_t fields = mode == MpeMode::verbatim ? 0
                                        : mode == MpeMode::both  ? 2 * mpe_field_bytes(chunks)
                                                                 : mpe_field_bytes(chunks);
                if (off + fields > d.body.size()) fail_bounds(blk, "encoded fields past the body");
                if (off + s.block_view(blk).encoded_size() > d.body.size()) fail_bounds(blk, "encoded block past the body");
            } else {
                const auto e = s.plain_extent(blk);
                if (e.offset + e.length > d.body.size()) fail_bounds(blk, "block body past the body area");
            }
        }
    });
}

std::vector<uint8_t> RankIndex::serialize() const {
    const auto& d = data();
    std::vector<uint8_t> out;
    out.reserve(kSerializedPreamble + d.header.size() + d.body.size());
    out.insert(out.end(), std::begin(kMagic), std::end(kMagic));
    bits::put_u32(out, static_cast<uint32_t>(d.params.variant));
    bits::put_u32(out, d.params.k_bytes);
    bits::put_u32(out, d.params.h);
    bits::put_u64(out, d.n_bits);
    bits::put_u64(out, d.ones);
    bits::put_u64(out, d.header.size());
    out.insert(out.end(), d.header.begin(), d.header.end());
    bits::put_u64(out, d.body.size());
    out.insert(out.end(), d.body.begin(), d.body.end());
    return out;
}

RankIndex RankIndex::deserialize(std::span<const uint8_t> bytes) {
    size_t pos = 0;
    auto need = [&](uint64_t n) {
        if (n > bytes.size() - pos) throw std::runtime_error("rank structure stream truncated");
    };
    need(kSerializedPreamble - 8);
    if (std::memcmp(bytes.data(), kMagic, sizeof kMagic) != 0) throw std::runtime_error("bad rank structure magic");
    detail::RankData d;
    const uint32_t variant = bits::load_u32(bytes.data() + 4);
    if (variant > static_cast<uint32_t>(RankVariant::cf)) throw std::runtime_error("bad rank variant tag");
    d.params.variant = static_cast<RankVariant>(variant);
    d.params.k_bytes = bits::load_u32(bytes.data() + 8);
    d.params.h = bits::load_u32(bytes.data() + 12);
    d.n_bits = bits::load_u64(bytes.data() + 16);
    d.ones = bits::load_u64(bytes.data() + 24);
    pos = 32;
    d.params.validate();
    require_structure_length(d.n_bits);
    if (d.ones > d.n_bits) throw std::runtime_error("ones count exceeds bit count");
    for (auto* area : {&d.header, &d.body}) {
        need(8);
        const uint64_t len = bits::load_u64(bytes.data() + pos);
        pos += 8;
        need(len);
        area->assign(bytes.begin() + static_cast<ptrdiff_t>(pos), bytes.begin() + static_cast<ptrdiff_t>(pos + len));
        pos += len;
    }
    if (pos != bytes.size()) throw std::runtime_error("trailing bytes after rank structure");

    auto make = [&]() -> RankIndex {
        switch (d.params.variant) {
            case RankVariant::basic: return RankIndex(RankBasic(std::move(d)));
            case RankVariant::bch: return RankIndex(RankBch(std::move(d)));
            case RankVariant::cf: return RankIndex(RankCf(std::move(d)));
            default: return RankIndex(RankMpe(std::move(d)));
        }
    };
    RankIndex idx = make();
    idx.check_bounds();
    return idx;
}

}  // namespace rankselect
