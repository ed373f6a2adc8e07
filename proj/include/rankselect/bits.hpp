#pragma once

// Low-level helpers shared by the rank and select layouts: little-endian
// field access over byte areas, masked popcounts and in-word select.

#include <bit>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <vector>

namespace rankselect::bits {

static_assert(std::endian::native == std::endian::little,
              "structure layouts are read in place and assume a little-endian host");

inline uint16_t load_u16(const uint8_t* p) {
    uint16_t v;
    std::memcpy(&v, p, sizeof v);
    return v;
}

inline uint32_t load_u32(const uint8_t* p) {
    uint32_t v;
    std::memcpy(&v, p, sizeof v);
    return v;
}

inline uint64_t load_u64(const uint8_t* p) {
    uint64_t v;
    std::memcpy(&v, p, sizeof v);
    return v;
}

// Loads up to 8 bytes; missing high bytes read as zero.
inline uint64_t load_u64_partial(const uint8_t* p, size_t avail) {
    if (avail >= 8) return load_u64(p);
    uint64_t v = 0;
    std::memcpy(&v, p, avail);
    return v;
}

inline void store_u16(uint8_t* p, uint16_t v) { std::memcpy(p, &v, sizeof v); }
inline void store_u32(uint8_t* p, uint32_t v) { std::memcpy(p, &v, sizeof v); }

inline void put_u8(std::vector<uint8_t>& out, uint8_t v) { out.push_back(v); }

inline void put_u16(std::vector<uint8_t>& out, uint16_t v) {
    const size_t at = out.size();
    out.resize(at + 2);
    store_u16(out.data() + at, v);
}

inline void put_u32(std::vector<uint8_t>& out, uint32_t v) {
    const size_t at = out.size();
    out.resize(at + 4);
    store_u32(out.data() + at, v);
}

inline void put_u64(std::vector<uint8_t>& out, uint64_t v) {
    const size_t at = out.size();
    out.resize(at + 8);
    std::memcpy(out.data() + at, &v, sizeof v);
}

// Mask of the low `n` bits, n in [0, 64].
constexpr uint64_t low_mask(unsigned n) { return n >= 64 ? ~uint64_t{0} : (uint64_t{1} << n) - 1; }

constexpr uint64_t round_up(uint64_t x, uint64_t m) { return (x + m - 1) / m * m; }

// Number of ones among the first `nbits` bits of a byte area (LSB-first).
inline uint64_t popcount_prefix(const uint8_t* p, uint64_t nbits) {
    uint64_t count = 0;
    while (nbits >= 64) {
        count += std::popcount(load_u64(p));
        p += 8;
        nbits -= 64;
    }
    if (nbits != 0) {
        const size_t bytes = (nbits + 7) / 8;
        count += std::popcount(load_u64_partial(p, bytes) & low_mask(static_cast<unsigned>(nbits)));
    }
    return count;
}

// Position of the r-th one (r >= 1) inside a word; r must not exceed popcount(w).
inline unsigned select_in_word(uint64_t w, unsigned r) {
    for (unsigned k = 1; k < r; ++k) w &= w - 1;
    return static_cast<unsigned>(std::countr_zero(w));
}

// Position of the r-th one (r >= 1) within a byte area holding `nbits` bits,
// or `nbits` when the area has fewer than r ones.
inline uint64_t select_in_bytes(const uint8_t* p, uint64_t nbits, uint64_t r) {
    uint64_t base = 0;
    while (base < nbits) {
        const uint64_t left = nbits - base;
        const size_t bytes = left >= 64 ? 8 : static_cast<size_t>((left + 7) / 8);
        uint64_t w = load_u64_partial(p + base / 8, bytes);
        if (left < 64) w &= low_mask(static_cast<unsigned>(left));
        const unsigned c = static_cast<unsigned>(std::popcount(w));
        if (r <= c) return base + select_in_word(w, static_cast<unsigned>(r));
        r -= c;
        base += 64;
    }
    return nbits;
}

}  // namespace rankselect::bits
