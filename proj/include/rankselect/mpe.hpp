#pragma once

// Mono-pair elimination: a byte block is viewed as 2-byte chunks, and chunks
// that are all zeros (0x0000) or all ones (0xFFFF) may be dropped. The
// encoding prepends a presence field (1 = chunk stored) and, when both kinds
// are dropped, a kind field (1 = dropped chunk was all ones). Each field has
// one bit per chunk, rounded up to a multiple of 16 bits.
//
// Encoded layout per mode:
//   verbatim    raw chunks
//   zeros_only  presence | stored chunks
//   ones_only   presence | stored chunks
//   both        presence | kind | stored chunks

#include <cstdint>
#include <span>
#include <vector>

namespace rankselect {

enum class MpeMode : uint8_t { verbatim = 0, zeros_only = 1, ones_only = 2, both = 3 };

/// Which modes an encoder may pick and when it compresses at all.
enum class MpePolicy : uint8_t {
    mpe1,  ///< {verbatim, both}; compress iff mono-pairs >= raw_bytes/16
    mpe2,  ///< all four modes; compress iff mono-pairs >= raw_bytes/16
    mpe3,  ///< all four modes; compress iff best size <= max_ratio * raw_bytes
};

struct MpeChunkStats {
    uint32_t chunks = 0;
    uint32_t zero_pairs = 0;
    uint32_t one_pairs = 0;
    uint32_t mono_pairs() const { return zero_pairs + one_pairs; }
};

/// Bytes of one presence/kind field for `chunks` chunks.
constexpr uint32_t mpe_field_bytes(uint32_t chunks) { return (chunks + 15) / 16 * 2; }

MpeChunkStats mpe_chunk_stats(std::span<const uint8_t> raw);

/// Encoded size in bytes of a block with the given statistics.
uint32_t mpe_encoded_size(MpeMode mode, const MpeChunkStats& stats);

/// Mode selection: the policy decides whether to compress, and among the
/// compressed modes it allows the smallest wins; ties resolve in the order
/// verbatim < zeros_only < ones_only < both.
MpeMode mpe_choose_mode(const MpeChunkStats& stats, MpePolicy policy, double mpe3_max_ratio = 0.5);

/// Appends the encoding of `raw` (even length) in `mode` to `out`.
void mpe_encode_into(std::span<const uint8_t> raw, MpeMode mode, std::vector<uint8_t>& out);

/// Read-only view of an encoded block inside a structure body.
struct MpeBlockView {
    MpeMode mode;
    const uint8_t* data;
    uint32_t chunks;

    /// Encoded length; reads the presence field for compressed modes.
    uint32_t encoded_size() const;
    /// Ones among the first `prefix_bits` bits of the decoded block, without decoding it.
    uint64_t prefix_popcount(uint64_t prefix_bits) const;
    /// Position of the r-th one (r >= 1) in the decoded block, or chunks*16 if absent.
    uint64_t select(uint64_t r) const;
    std::vector<uint8_t> decode() const;
};

struct MpeEncodedBlock {
    MpeMode mode = MpeMode::verbatim;
    uint32_t chunks = 0;
    std::vector<uint8_t> bytes;

    MpeBlockView view() const { return {mode, bytes.data(), chunks}; }
};

/// Encodes `raw` (even length) with the mode `policy` selects.
MpeEncodedBlock mpe_encode(std::span<const uint8_t> raw, MpePolicy policy, double mpe3_max_ratio = 0.5);

/// Encodes `raw` in an explicit mode.
MpeEncodedBlock mpe_encode_as(std::span<const uint8_t> raw, MpeMode mode);

}  // namespace rankselect
