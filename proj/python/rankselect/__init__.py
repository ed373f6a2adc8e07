"""Compressed rank/select structures over bitvectors."""

from ._core import (
    CSV_HEADER,
    BitVector,
    RankIndex,
    SelectIndex,
    bench_rank,
    bench_select,
    expected_accesses,
    huffman_codes,
    random_bitvector,
    synthetic_text,
    wt_concat_bits,
    wt_decode_text,
)

RANK_VARIANTS = ("basic", "bch", "mpe1", "mpe2", "mpe3", "cf")
SELECT_VARIANTS = ("basic", "bch", "mpe1", "mpe2", "mpe3")

__all__ = [
    "CSV_HEADER",
    "BitVector",
    "RankIndex",
    "SelectIndex",
    "RANK_VARIANTS",
    "SELECT_VARIANTS",
    "bench_rank",
    "bench_select",
    "expected_accesses",
    "huffman_codes",
    "random_bitvector",
    "synthetic_text",
    "wt_concat_bits",
    "wt_decode_text",
]
