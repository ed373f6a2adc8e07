#include "rankselect/mpe.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <stdexcept>

#include "rankselect/bits.hpp"

namespace rankselect {

namespace {

constexpr uint16_t kZeroPair = 0x0000;
constexpr uint16_t kOnePair = 0xFFFF;

bool field_bit(const uint8_t* field, uint32_t c) { return (field[c >> 3] >> (c & 7)) & 1; }

// 64 field bits starting at chunk 64*g, masked to the valid chunks.
uint64_t field_word(const uint8_t* field, uint32_t field_bytes, uint32_t g, uint32_t valid) {
    const uint32_t at = g * 8;
    return bits::load_u64_partial(field + at, field_bytes - at) & bits::low_mask(valid);
}

const uint8_t* stored_area(const MpeBlockView& v) {
    const uint32_t f = mpe_field_bytes(v.chunks);
    return v.data + (v.mode == MpeMode::both ? 2 * f : f);
}

// Bit mask of dropped chunks that were all ones, within one 64-chunk group.
uint64_t dropped_ones(MpeMode mode, uint64_t presence, uint64_t kind, uint64_t valid_mask) {
    switch (mode) {
        case MpeMode::zeros_only: return 0;
        case MpeMode::ones_only: return ~presence & valid_mask;
        default: return ~presence & kind & valid_mask;
    }
}

}  // namespace

MpeChunkStats mpe_chunk_stats(std::span<const uint8_t> raw) {
    if (raw.size() % 2 != 0) throw std::invalid_argument("mpe block length must be even");
    MpeChunkStats s;
    s.chunks = static_cast<uint32_t>(raw.size() / 2);
    for (uint32_t c = 0; c < s.chunks; ++c) {
        const uint16_t v = bits::load_u16(raw.data() + 2 * c);
        s.zero_pairs += v == kZeroPair;
        s.one_pairs += v == kOnePair;
    }
    return s;
}

uint32_t mpe_encoded_size(MpeMode mode, const MpeChunkStats& s) {
    const uint32_t f = mpe_field_bytes(s.chunks);
    switch (mode) {
        case MpeMode::verbatim: return 2 * s.chunks;
        case MpeMode::zeros_only: return f + 2 * (s.chunks - s.zero_pairs);
        case MpeMode::ones_only: return f + 2 * (s.chunks - s.one_pairs);
        case MpeMode::both: return 2 * f + 2 * (s.chunks - s.mono_pairs());
    }
    throw std::invalid_argument("unknown mpe mode");
}

MpeMode mpe_choose_mode(const MpeChunkStats& s, MpePolicy policy, double mpe3_max_ratio) {
    if (s.chunks == 0) return MpeMode::verbatim;
    const uint32_t raw_bytes = 2 * s.chunks;
    if (policy == MpePolicy::mpe1) {
        return 16 * s.mono_pairs() >= raw_bytes ? MpeMode::both : MpeMode::verbatim;
    }
    MpeMode best = MpeMode::zeros_only;
    for (MpeMode m : {MpeMode::ones_only, MpeMode::both}) {
        if (mpe_encoded_size(m, s) < mpe_encoded_size(best, s)) best = m;
    }
    if (policy == MpePolicy::mpe2) return 16 * s.mono_pairs() >= raw_bytes ? best : MpeMode::verbatim;
    return mpe_encoded_size(best, s) <= mpe3_max_ratio * raw_bytes ? best : MpeMode::verbatim;
}

void mpe_encode_into(std::span<const uint8_t> raw, MpeMode mode, std::vector<uint8_t>& out) {
    if (raw.size() % 2 != 0) throw std::invalid_argument("mpe block length must be even");
    if (mode == MpeMode::verbatim) {
        out.insert(out.end(), raw.begin(), raw.end());
        return;
    }
    const auto chunks = static_cast<uint32_t>(raw.size() / 2);
    const uint32_t f = mpe_field_bytes(chunks);
    const size_t presence_at = out.size();
    const size_t kind_at = presence_at + f;
    out.resize(presence_at + (mode == MpeMode::both ? 2 * f : f), 0);
    for (uint32_t c = 0; c < chunks; ++c) {
        const uint16_t v = bits::load_u16(raw.data() + 2 * c);
        const bool drop = (v == kZeroPair && mode != MpeMode::ones_only) ||
                          (v == kOnePair && mode != MpeMode::zeros_only);
        if (drop) {
            if (mode == MpeMode::both && v == kOnePair) out[kind_at + c / 8] |= uint8_t(1u << (c % 8));
        } else {
            out[presence_at + c / 8] |= uint8_t(1u << (c % 8));
            bits::put_u16(out, v);
        }
    }
}

MpeEncodedBlock mpe_encode_as(std::span<const uint8_t> raw, MpeMode mode) {
    MpeEncodedBlock e;
    e.mode = mode;
    e.chunks = static_cast<uint32_t>(raw.size() / 2);
    mpe_encode_into(raw, mode, e.bytes);
    return e;
}

MpeEncodedBlock mpe_encode(std::span<const uint8_t> raw, MpePolicy policy, double mpe3_max_ratio) {
    return mpe_encode_as(raw, mpe_choose_mode(mpe_chunk_stats(raw), policy, mpe3_max_ratio));
}

uint32_t MpeBlockView::encoded_size() const {
    if (mode == MpeMode::verbatim) return 2 * chunks;
    const uint32_t f = mpe_field_bytes(chunks);
    const auto stored = static_cast<uint32_t>(bits::popcount_prefix(data, chunks));
    return (mode == MpeMode::both ? 2 * f : f) + 2 * stored;
}

uint64_t MpeBlockView::prefix_popcount(uint64_t prefix_bits) const {
    if (prefix_bits > uint64_t{16} * chunks) {
        throw std::out_of_range("prefix of " + std::to_string(prefix_bits) + " bits overruns a " +
                                std::to_string(16 * chunks) + "-bit block");
    }
    if (mode == MpeMode::verbatim) return bits::popcount_prefix(data, prefix_bits);

    const uint32_t f = mpe_field_bytes(chunks);
    const uint8_t* presence = data;
    const uint8_t* kind = data + f;
    const uint8_t* stored = stored_area(*this);
    const auto full = static_cast<uint32_t>(prefix_bits / 16);
    const auto rem = static_cast<unsigned>(prefix_bits % 16);

    uint64_t stored_before = 0;
    uint64_t ones_dropped = 0;
    for (uint32_t g = 0; g * 64 < full; ++g) {
        const uint32_t valid = std::min<uint32_t>(64, full - g * 64);
        const uint64_t p = field_word(presence, f, g, valid);
        const uint64_t k = mode == MpeMode::both ? field_word(kind, f, g, valid) : 0;
        stored_before += std::popcount(p);
        ones_dropped += std::popcount(dropped_ones(mode, p, k, bits::low_mask(valid)));
    }
    uint64_t count = 16 * ones_dropped + bits::popcount_prefix(stored, 16 * stored_before);
    if (rem != 0) {
        if (field_bit(presence, full)) {
            count += std::popcount(static_cast<uint64_t>(bits::load_u16(stored + 2 * stored_before)) &
                                   bits::low_mask(rem));
        } else if (mode == MpeMode::ones_only || (mode == MpeMode::both && field_bit(kind, full))) {
            count += rem;
        }
    }
    return count;
}

uint64_t MpeBlockView::select(uint64_t r) const {
    const uint64_t total_bits = uint64_t{16} * chunks;
    if (mode == MpeMode::verbatim) return bits::select_in_bytes(data, total_bits, r);

    const uint32_t f = mpe_field_bytes(chunks);
    const uint8_t* presence = data;
    const uint8_t* kind = data + f;
    const uint8_t* stored = stored_area(*this);
    uint64_t cursor = 0;  // stored chunks consumed
    for (uint32_t g = 0; g * 64 < chunks; ++g) {
        const uint32_t valid = std::min<uint32_t>(64, chunks - g * 64);
        const uint64_t mask = bits::low_mask(valid);
        const uint64_t p = field_word(presence, f, g, valid);
        const uint64_t k = mode == MpeMode::both ? field_word(kind, f, g, valid) : 0;
        const uint64_t ones_mask = dropped_ones(mode, p, k, mask);
        const auto n_stored = static_cast<uint64_t>(std::popcount(p));
        const uint64_t ones = 16 * static_cast<uint64_t>(std::popcount(ones_mask)) +
                              bits::popcount_prefix(stored + 2 * cursor, 16 * n_stored);
        if (r > ones) {
            r -= ones;
            cursor += n_stored;
            continue;
        }
        for (uint32_t c = 0; c < valid; ++c) {
            const uint64_t base = 16 * (uint64_t{g} * 64 + c);
            if ((p >> c) & 1) {
                const uint16_t v = bits::load_u16(stored + 2 * cursor++);
                const auto pc = static_cast<uint64_t>(std::popcount(v));
                if (r <= pc) return base + bits::select_in_word(v, static_cast<unsigned>(r));
                r -= pc;
            } else if ((ones_mask >> c) & 1) {
                if (r <= 16) return base + r - 1;
                r -= 16;
            }
        }
    }
    return total_bits;
}

std::vector<uint8_t> MpeBlockView::decode() const {
    std::vector<uint8_t> raw(2 * size_t{chunks}, 0);
    if (mode == MpeMode::verbatim) {
        std::copy(data, data + raw.size(), raw.begin());
        return raw;
    }
    const uint32_t f = mpe_field_bytes(chunks);
    const uint8_t* stored = stored_area(*this);
    for (uint32_t c = 0; c < chunks; ++c) {
        uint16_t v;
        if (field_bit(data, c)) {
            v = bits::load_u16(stored);
            stored += 2;
        } else if (mode == MpeMode::ones_only || (mode == MpeMode::both && field_bit(data + f, c))) {
            v = kOnePair;
        } else {
            v = kZeroPair;
        }
        bits::store_u16(raw.data() + 2 * c, v);
    }
    return raw;
}

}  // namespace rankselect
