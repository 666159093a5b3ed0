import itertools

import numpy as np
import pytest

from vmqkd.errors import LengthMismatch, VerifierUnavailable
from vmqkd.repcode import (
    Decision,
    GridLayout,
    HarvestState,
    classify,
    decode,
    encode,
    extend,
    harvest_digest,
    harvest_s3,
    harvested_subsequence,
    key_index,
    threshold_decision,
)
from vmqkd.rng import make_rng
from vmqkd.worked_example import scripted_table

# printed initial harvest, with the row-6 entry read as (6,1,1)
PRINTED_S0 = (
    (1, 1, 1), (1, 2, 1), (2, 1, 1), (2, 2, 1), (2, 3, 1), (3, 1, 1),
    (3, 3, 1), (4, 1, 1), (4, 2, 1), (4, 3, 1), (5, 1, 1), (5, 2, 1),
    (6, 1, 1), (6, 2, 1), (6, 3, 1), (7, 1, 1), (7, 3, 1), (8, 1, 1),
    (8, 2, 1), (9, 1, 1), (9, 2, 1), (9, 3, 1), (10, 1, 1), (10, 3, 1),
    (11, 1, 1), (11, 2, 1), (11, 3, 1),
)


def table(*triples):
    return np.array(triples, dtype=np.int64).reshape(len(triples), 1, 3)


def oracle_verifier(truth, m, key):
    """Dealer stand-in: recomputes the digest from the true key."""

    def verify(receiver, S, digest):
        values = [truth[key_index(k, i, m) - 1] for k, i, _ in S]
        return harvest_digest(key, receiver, S, values) == digest

    return verify


def test_encode_decode_round_trip():
    K = list(range(33))
    g = encode([k % 11 for k in K], 3, 11)
    assert g.shape == (11, 3, 3)
    assert decode(g) == [k % 11 for k in K]
    with pytest.raises(LengthMismatch):
        encode([1, 2, 3], 2, 2)


def test_decode_majority():
    assert decode(table((5, 5, 2), (2, 5, 5), (5, 2, 5), (1, 2, 3))) == [5, 5, 5, None]


def test_key_index():
    assert key_index(1, 1, 3) == 1
    assert key_index(3, 2, 3) == 8
    assert key_index(11, 3, 3) == 33


def test_classify_examples():
    c = classify(table((5, 5, 5), (5, 5, 2), (1, 2, 3)))
    assert c.counts == (1, 1, 1)
    assert c.S3[0] == ((1, 1), (5, 5, 5))
    assert c.S2[0][0] == (2, 1)
    assert c.S1[0][0] == (3, 1)


def _counts_table(n1, n2, n3):
    return table(*([(0, 1, 2)] * n1 + [(0, 0, 1)] * n2 + [(4, 4, 4)] * n3))


def test_threshold_worked_example():
    c = classify(_counts_table(3, 3, 27))
    assert c.counts == (3, 3, 27)
    assert threshold_decision(c, 0.5, 1 / 11) is Decision.KEEP


def test_threshold_edges():
    assert threshold_decision(classify(_counts_table(5, 0, 0)), 0.5, 1 / 11) is Decision.ABORT
    assert threshold_decision(classify(_counts_table(0, 0, 5)), 1.0, 0.0) is Decision.KEEP
    # one S1 too many
    assert threshold_decision(classify(_counts_table(4, 2, 27)), 0.5, 1 / 11) is Decision.ABORT
    # S3 fraction just under one half
    assert threshold_decision(classify(_counts_table(0, 6, 5)), 0.5, 1 / 11) is Decision.ABORT
    assert threshold_decision(classify(_counts_table(0, 5, 5)), 0.5, 1 / 11) is Decision.KEEP


def test_threshold_matches_exact_rationals():
    from fractions import Fraction

    for n1, n2, n3 in itertools.product(range(6), repeat=3):
        if n1 + n2 + n3 == 0:
            continue
        tot = n1 + n2 + n3
        for e1, e2 in [(Fraction(1, 2), Fraction(1, 11)), (Fraction(1, 3), Fraction(1, 5))]:
            want = Fraction(n3, tot) >= e1 and Fraction(n1, tot) <= e2
            got = threshold_decision(classify(_counts_table(n1, n2, n3)), float(e1), float(e2))
            assert (got is Decision.KEEP) == want


def test_harvest_examples():
    h = harvest_s3(classify(table((4, 4, 4))))
    assert (h.S, h.I) == (((1, 1, 1),), (4,))
    g = np.zeros((3, 2, 3), dtype=np.int64)
    g[2, 1] = (7, 2, 7)
    h = harvest_s3(classify(g))
    assert h.T == ((3, 2, 1),) and h.J == (7,)
    g[2, 1] = (2, 7, 7)
    assert harvest_s3(classify(g)).T == ((3, 2, 2),)


def test_harvest_worked_example_sets():
    K = make_rng(0).integers(0, 11, size=33).tolist()
    h = harvest_s3(classify(scripted_table(K)))
    assert h.S == PRINTED_S0
    assert h.T == ((1, 3, 1), (3, 2, 2), (10, 2, 2))


def test_harvest_skips_padding():
    g = np.zeros((2, 1, 3), dtype=np.int64)
    h = harvest_s3(classify(g), skip=frozenset({(2, 1)}))
    assert h.S == ((1, 1, 1),)


def test_extend_accept_and_reject():
    K = make_rng(0).integers(0, 11, size=33).tolist()
    h0 = harvest_s3(classify(scripted_table(K)))
    checks = []
    h1 = extend(h0, oracle_verifier(K, 3, 7), 1, 7, on_check=lambda t, ok: checks.append((t, ok)))
    assert checks == [((1, 3, 1), True), ((3, 2, 2), False), ((10, 2, 2), False)]
    assert len(h1.S) == 28
    assert (1, 3, 1) in h1.S
    assert h1.as_dict()[(1, 3, 1)] == K[2]


def test_extend_rejection_restores_state():
    h = HarvestState(((1, 1, 1),), (3,), ((1, 2, 1),), (9,))
    out = extend(h, lambda *a: False, 1, 5)
    assert (out.S, out.I) == (h.S, h.I)
    out = extend(h, lambda *a: None, 1, 5)
    assert (out.S, out.I) == (h.S, h.I)
    with pytest.raises(VerifierUnavailable):
        extend(h, None, 1, 5)


def test_extend_exhaustive_injection_p5():
    """Every possible 2-of-3 reading of every key value at p=5, m=1."""
    p, m = 5, 1
    for k in range(p):
        K = [k] * p
        for tri in itertools.product(range(p), repeat=3):
            if len(set(tri)) != 2:
                continue
            g = encode(K, m, p).copy()
            g[0, 0] = tri
            h0 = harvest_s3(classify(g))
            h1 = extend(h0, oracle_verifier(K, m, 3), 1, 3)
            majority = max(set(tri), key=tri.count)
            assert ((1, 1, h0.T[0][2]) in h1.S) == (majority == k)
            assert all(v == K[0] for v in h1.I)


def test_residual_examples():
    layout = GridLayout.sequential(3, 11)
    full = HarvestState(tuple((t, i, 1) for t in range(1, 12) for i in range(1, 4)), (0,) * 33)
    assert harvested_subsequence(full, layout)[1] == []
    minus = HarvestState(tuple(s for s in full.S if s[:2] != (3, 2)), (0,) * 32)
    assert harvested_subsequence(minus, layout)[1] == [8]


def test_grid_layout_pack():
    lay = GridLayout.pack([29, 8, 15, 20, 24], 11)
    assert (lay.rows, lay.cols) == (11, 1)
    assert lay.cells[:5] == (8, 15, 20, 24, 29)
    assert lay.padding == tuple((r, 1) for r in range(6, 12))
    lay = GridLayout.pack(range(1, 14), 5)
    assert (lay.rows, lay.cols) == (5, 3)
    assert lay.index_of(2, 1) == 4
    assert lay.padding == ((5, 2), (5, 3))
