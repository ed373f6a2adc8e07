#pragma once

// Reference implementations used only by the tests. They work on one byte per
// bit and re-derive layouts from the format description, sharing no code paths
// with the library beyond BitVector construction.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <queue>
#include <random>
#include <vector>

#include "rankselect/bitvec.hpp"
#include "rankselect/corpus.hpp"
#include "rankselect/rank.hpp"
#include "rankselect/select.hpp"

namespace oracle {

using Bits = std::vector<uint8_t>;

inline Bits unpack(const rankselect::BitVector& bv) {
    Bits out(bv.size());
    for (uint64_t i = 0; i < bv.size(); ++i) out[i] = bv.get(i);
    return out;
}

inline uint64_t rank1(const Bits& b, uint64_t i) {
    uint64_t c = 0;
    for (uint64_t p = 0; p < i; ++p) c += b[p];
    return c;
}

inline uint64_t select1(const Bits& b, uint64_t j) {
    for (uint64_t p = 0; p < b.size(); ++p) {
        if (b[p] && --j == 0) return p;
    }
    return b.size();
}

inline std::vector<uint64_t> one_positions(const Bits& b) {
    std::vector<uint64_t> out;
    for (uint64_t p = 0; p < b.size(); ++p) {
        if (b[p]) out.push_back(p);
    }
    return out;
}

inline Bits random_bits(uint64_t n, double density, uint32_t seed) {
    std::mt19937 gen(seed);
    std::bernoulli_distribution coin(density);
    Bits out(n);
    for (auto& x : out) x = coin(gen);
    return out;
}

inline rankselect::BitVector pack(const Bits& b) { return rankselect::BitVector::from_bits(b); }

// Block contents as bytes, bit i of the block at byte i/8, bit i%8; zero padded.
inline std::vector<uint8_t> block_bytes(const Bits& b, uint64_t block, uint32_t k) {
    std::vector<uint8_t> out(k, 0);
    for (uint64_t i = 0; i < uint64_t{k} * 8; ++i) {
        const uint64_t p = block * k * 8 + i;
        if (p < b.size() && b[p]) out[i / 8] |= uint8_t(1u << (i % 8));
    }
    return out;
}

// 0 = all zeros, 1 = all ones, 2 = mixed, over the block's bits inside B.
inline int block_kind(const Bits& b, uint64_t block, uint32_t k) {
    const uint64_t start = block * k * 8;
    const uint64_t end = std::min<uint64_t>(start + uint64_t{k} * 8, b.size());
    uint64_t ones = 0;
    for (uint64_t p = start; p < end; ++p) ones += b[p];
    return ones == 0 ? 0 : ones == end - start ? 1 : 2;
}

inline uint64_t round16(uint64_t x) { return (x + 15) / 16 * 16; }

struct ChunkCount {
    uint64_t chunks = 0, zeros = 0, ones = 0;
};

inline ChunkCount count_chunks(const std::vector<uint8_t>& bytes) {
    ChunkCount c;
    c.chunks = bytes.size() / 2;
    for (size_t i = 0; i + 1 < bytes.size(); i += 2) {
        const unsigned v = bytes[i] | (bytes[i + 1] << 8);
        c.zeros += v == 0;
        c.ones += v == 0xFFFF;
    }
    return c;
}

// Encoded size the selection rules give for one block of raw bytes:
// policy 1 uses both-kinds elimination, policy 2 the smallest of the three
// eliminations, both iff mono chunks >= raw/16; policy 3 the smallest iff it
// is at most half the raw size.
inline uint64_t mpe_size(const std::vector<uint8_t>& raw, int policy) {
    const ChunkCount c = count_chunks(raw);
    const uint64_t field = round16(c.chunks) / 8;
    const uint64_t zeros_only = field + 2 * (c.chunks - c.zeros);
    const uint64_t ones_only = field + 2 * (c.chunks - c.ones);
    const uint64_t both = 2 * field + 2 * (c.chunks - c.zeros - c.ones);
    const uint64_t best = std::min({zeros_only, ones_only, both});
    if (policy == 1) return 16 * (c.zeros + c.ones) >= raw.size() ? both : raw.size();
    if (policy == 2) return 16 * (c.zeros + c.ones) >= raw.size() ? best : raw.size();
    return 2 * best <= raw.size() ? best : raw.size();
}

// Header + body bytes of a rank structure, from the format description.
inline uint64_t rank_structure_bytes(const Bits& b, const rankselect::RankParams& p) {
    using rankselect::RankVariant;
    const uint32_t k = p.k_bytes;
    const uint64_t nb = (b.size() + uint64_t{k} * 8 - 1) / (uint64_t{k} * 8);
    uint64_t mono = 0;
    std::vector<uint64_t> plain;
    for (uint64_t blk = 0; blk < nb; ++blk) {
        if (block_kind(b, blk, k) == 2) {
            plain.push_back(blk);
        } else {
            ++mono;
        }
    }
    const uint64_t sb = (nb + p.h - 1) / p.h;
    switch (p.variant) {
        case RankVariant::basic: return 8 * (nb + 1) + k * plain.size();
        case RankVariant::bch: return sb * (8 + 2 * (p.h - 1) + round16(p.h - 1) / 8) + 4 + k * plain.size();
        case RankVariant::cf: {
            const uint64_t left = nb - mono;
            return 4 + 8 * (nb - left) + 4 + (4 + k) * left + 4;
        }
        default: {
            const int policy = p.variant == RankVariant::mpe1 ? 1 : p.variant == RankVariant::mpe2 ? 2 : 3;
            uint64_t body = 0;
            for (uint64_t blk : plain) body += mpe_size(block_bytes(b, blk, k), policy);
            return sb * (8 + 4 * (p.h - 1) + 1) + 4 + body;
        }
    }
}

// Header + body bytes of a select structure, from the format description.
inline uint64_t select_structure_bytes(const Bits& b, const rankselect::SelectParams& p) {
    using rankselect::SelectVariant;
    const auto ones = one_positions(b);
    const uint64_t full = ones.size() / p.ell;
    const bool trailing = ones.size() % p.ell != 0;
    const uint64_t nblocks = full + trailing;
    const uint64_t sb = (nblocks + p.h - 1) / p.h;
    uint64_t stride = 8 * uint64_t{p.h};
    if (p.variant != SelectVariant::basic) stride = 4 * p.h + 4 + 2 * (p.h - 1) + (p.is_mpe() ? 1 : 0);
    uint64_t body = 0;
    for (uint64_t i = 0; i < full; ++i) {
        const int64_t lo = i == 0 ? -1 : int64_t(ones[i * p.ell - 1]);
        const int64_t hi = int64_t(ones[(i + 1) * p.ell - 1]);
        const uint64_t gap = uint64_t(hi - lo);
        if (gap == p.ell) continue;
        if (gap > p.thr) {
            body += 4 * (p.ell - 1);
            continue;
        }
        const uint64_t len = gap - 1;
        if (!p.is_mpe()) {
            body += (len + 7) / 8;
            continue;
        }
        std::vector<uint8_t> raw(2 * ((len + 15) / 16), 0);
        for (uint64_t t = 0; t < len; ++t) {
            if (b[uint64_t(lo + 1) + t]) raw[t / 8] |= uint8_t(1u << (t % 8));
        }
        const int policy = p.variant == SelectVariant::mpe1 ? 1 : p.variant == SelectVariant::mpe2 ? 2 : 3;
        body += mpe_size(raw, policy);
    }
    if (trailing) body += 4 * (ones.size() - full * p.ell);
    return sb * stride + 4 + body;
}

// Wavelet-tree bits by explicit per-node filtering: at depth d, the nodes are
// the distinct d-bit code prefixes in increasing order, and each node keeps the
// symbols whose code extends its prefix, emitting their next code bit.
inline Bits wt_bits_by_filter(const std::vector<uint8_t>& text, const std::map<uint8_t, rankselect::Code>& codes) {
    unsigned depth = 0;
    for (const auto& [sym, c] : codes) depth = std::max<unsigned>(depth, c.length);
    Bits out;
    for (unsigned d = 0; d < depth; ++d) {
        std::vector<uint64_t> prefixes;
        for (const auto& [sym, c] : codes) {
            if (c.length > d) prefixes.push_back(c.prefix(d));
        }
        std::sort(prefixes.begin(), prefixes.end());
        prefixes.erase(std::unique(prefixes.begin(), prefixes.end()), prefixes.end());
        for (uint64_t node : prefixes) {
            for (uint8_t ch : text) {
                const auto& c = codes.at(ch);
                if (c.length > d && c.prefix(d) == node) out.push_back(c.at(d));
            }
        }
    }
    return out;
}

// Minimum total weighted code length for the given frequencies.
inline uint64_t huffman_cost(const std::map<uint8_t, uint64_t>& freqs) {
    std::priority_queue<uint64_t, std::vector<uint64_t>, std::greater<>> q;
    for (const auto& [s, f] : freqs) q.push(f);
    if (q.size() == 1) return q.top();
    uint64_t cost = 0;
    while (q.size() > 1) {
        const uint64_t a = q.top();
        q.pop();
        const uint64_t c = a + q.top();
        q.pop();
        cost += c;
        q.push(c);
    }
    return cost;
}

// Bits of `blocks` blocks of k bytes where block t is a mono-block iff
// floor((t+1)f) > floor(tf), spreading the mono-blocks evenly. Mono-blocks
// alternate between zeros and ones; the others are random but never uniform.
inline Bits spread_mono_vector(uint64_t blocks, uint32_t k, double f, uint32_t seed) {
    std::mt19937_64 gen(seed);
    Bits out(blocks * k * 8);
    uint64_t monos = 0;
    for (uint64_t t = 0; t < blocks; ++t) {
        const bool mono = static_cast<uint64_t>((t + 1) * f) > static_cast<uint64_t>(t * f);
        uint8_t* blk = out.data() + t * k * 8;
        if (mono) {
            std::fill(blk, blk + k * 8, uint8_t(monos++ % 2));
            continue;
        }
        for (uint64_t i = 0; i < uint64_t{k} * 8; ++i) blk[i] = gen() & 1;
        blk[0] = 1;
        blk[1] = 0;
    }
    return out;
}

}  // namespace oracle
