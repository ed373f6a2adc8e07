import os
import subprocess

import numpy as np
import pytest

import rankselect as rs


def test_bitvector_basics():
    bv = rs.BitVector([1, 0, 1, 1, 0])
    assert len(bv) == 5
    assert bv.ones == 3
    assert bv.words() == [0b01101]
    assert bv.naive_rank1(3) == 2
    assert rs.BitVector.deserialize(bv.serialize()) == bv
    with pytest.raises(IndexError):
        bv[5]


@pytest.mark.parametrize("variant", rs.RANK_VARIANTS)
def test_rank_matches_numpy(variant):
    bits = (np.random.default_rng(1).random(200_003) < 0.2).astype(np.uint8)
    bv = rs.BitVector(bits)
    idx = rs.RankIndex.build(bv, variant)
    prefix = np.concatenate([[0], np.cumsum(bits, dtype=np.uint64)])
    qs = np.random.default_rng(2).integers(0, len(bits) + 1, 20_000, dtype=np.uint64)
    assert np.array_equal(idx.rank1_many(qs), prefix[qs])
    assert idx.rank1(len(bits)) == bits.sum()
    back = rs.RankIndex.deserialize(idx.serialize())
    assert back.rank1(12345) == prefix[12345]
    assert idx.verify(bv)["passed"]


@pytest.mark.parametrize("variant", rs.SELECT_VARIANTS)
def test_select_matches_numpy(variant):
    bits = (np.random.default_rng(3).random(200_003) < 0.3).astype(np.uint8)
    ones = np.flatnonzero(bits).astype(np.uint64)
    idx = rs.SelectIndex.build(rs.BitVector(bits), variant)
    js = np.arange(1, len(ones) + 1, dtype=np.uint64)
    assert np.array_equal(idx.select1_many(js), ones)
    with pytest.raises(IndexError):
        idx.select1(len(ones) + 1)


def test_rank_select_examples():
    ones = rs.BitVector(np.ones(8192, dtype=np.uint8))
    assert rs.RankIndex.build(ones, "cf").rank1(5000) == 5000
    zeros = rs.RankIndex.build(rs.BitVector(np.zeros(8192, dtype=np.uint8)), "basic")
    assert zeros.space_bits == 136 * 8
    bits = np.zeros(40, dtype=np.uint8)
    bits[[3, 5, 8, 13, 21, 34]] = 1
    sel = rs.SelectIndex.build(rs.BitVector(bits), "basic", ell=2, thr=8)
    assert [sel.select1(j) for j in (2, 3, 5)] == [5, 8, 21]
    assert sel.stats()["sparse_blocks"] == 1


def test_corpus_helpers():
    assert rs.huffman_codes({ord("a"): 1, ord("b"): 1}) == {ord("a"): "0", ord("b"): "1"}
    bits = rs.wt_concat_bits(b"abca", "balanced")
    assert [bits[i] for i in range(len(bits))] == [0, 0, 1, 0, 0, 1, 0, 0]
    text = rs.synthetic_text("english", 20_000, 5)
    for shape in ("balanced", "huffman"):
        wt = rs.wt_concat_bits(text, shape)
        assert rs.wt_decode_text(wt, text, shape, len(text)) == text
    bv = rs.random_bitvector(1_000_000, 0.2, 7)
    assert abs(bv.ones / bv.size - 0.2) < 0.002


def test_bench_and_model():
    bv = rs.random_bitvector(1_000_000, 0.2, 9)
    reports = [rs.bench_rank(rs.RankIndex.build(bv, v), 50_000, seed=4) for v in rs.RANK_VARIANTS]
    assert len({r["checksum"] for r in reports}) == 1
    assert all(r["ns_per_query"] > 0 for r in reports)
    probed = rs.bench_rank(rs.RankIndex.build(bv, "cf"), 1000, probe_accesses=True)
    assert probed["mean_accesses"] is not None
    sel = [rs.bench_select(rs.SelectIndex.build(bv, v), 50_000, seed=4) for v in rs.SELECT_VARIANTS]
    assert len({r["checksum"] for r in sel}) == 1
    assert rs.expected_accesses("cf", 0.5) == pytest.approx(1.25)


CLI = os.environ.get("RANKSELECT_CLI")


@pytest.mark.skipif(not CLI, reason="RANKSELECT_CLI not set")
def test_cli_round_trip(tmp_path):
    def run(*args):
        return subprocess.run([CLI, *map(str, args)], capture_output=True, text=True)

    text = tmp_path / "text.txt"
    text.write_bytes(rs.synthetic_text("dna", 100_000, 1))
    wt = tmp_path / "wt.bv"
    assert run("gen-corpus", "--input", text, "--shape", "huffman", "--out", wt).returncode == 0
    rnd = tmp_path / "rnd.bv"
    assert run("gen-random", "--n", 300_000, "--density", 0.2, "--seed", 3, "--out", rnd).returncode == 0

    rank = tmp_path / "rank.rs"
    sel = tmp_path / "sel.rs"
    assert run("build", "--variant", "cf", "--k", 64, "--h", 16, "--in", wt, "--out", rank).returncode == 0
    assert run("build", "--variant", "mpe2", "--h", 16, "--ell", 128, "--thr", 4096, "--in", rnd, "--out", sel).returncode == 0
    assert run("verify", "--structure", rank, "--bits", wt).returncode == 0
    assert run("verify", "--structure", sel, "--bits", rnd, "--exhaustive").returncode == 0
    assert run("verify", "--structure", rank, "--bits", rnd).returncode == 1

    csv = tmp_path / "out.csv"
    r = run("bench", "--structure", sel, "--bits", rnd, "--kind", "select", "--queries", 20_000, "--seed", 1, "--csv", csv)
    assert r.returncode == 0, r.stderr
    lines = csv.read_text().splitlines()
    assert lines[0] == rs.CSV_HEADER
    assert len(lines) == 2 and lines[1].split(",")[1] == "select-mpe2"
    r = run("bench", "--structure", rank, "--bits", wt, "--kind", "rank", "--queries", 20_000, "--seed", 1, "--probe-accesses")
    assert r.returncode == 0 and "mean accesses" in r.stdout
    assert run("bench", "--structure", rank, "--bits", wt, "--kind", "select", "--queries", 10, "--seed", 1).returncode != 0

    # flip one byte of the first right-part rank record
    data = bytearray(rank.read_bytes())
    data[40 + 4] ^= 0x01
    bad = tmp_path / "bad.rs"
    bad.write_bytes(bytes(data))
    r = run("verify", "--structure", bad, "--bits", wt)
    assert r.returncode != 0
    assert run("build", "--variant", "rrr", "--in", rnd, "--out", tmp_path / "x").returncode != 0
