"""Replay of an F_11 walk-through with three holders.

The walk-through's numbers are injected (polynomial, identities, basis vector,
the 3/3/27 split of triples and the harvest script). Every derived value
is recomputed by direct evaluation. Printed values that disagree with
that evaluation are reported as discrepancies, not reproduced.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .engine import Engine, ProtocolConfig
from .field import BiPoly, PrimeModulus, eval_bi, restrict_x, restrict_y
from .repcode import (
    GridLayout,
    classify,
    encode,
    extend,
    harvest_s3,
    harvested_subsequence,
    threshold_decision,
)
from . import channel as ch
from .sharing import deal_polynomial
from .rng import make_rng

P = 11
T = 3
DEALER_ID = 9
HOLDER_IDS = tuple(range(1, 9))
# a[i][j] multiplies x^i y^j
COEFFS = (
    (7, 1, 2, 1, 1, 1, 1, 1),
    (2, 1, 1, 1, 1, 1, 1, 1),
    (3, 1, 1, 1, 1, 1, 1, 1),
)
R_VEC = (1, 3, 6, 10, 2, 1, 3, 9, 6, 4, 7)
EPS1, EPS2 = 0.5, 1 / 11

# values as printed, checked against direct evaluation
PRINTED = {
    "secret (stated)": 5,
    "F(0,0)": 7,
    "F(9,1)": 4,
    "F(1,9)": 1,
    "F(x,1)": (4, 9, 10),
    "F(x,9)": (6, 8, 9),
    "F(9,y)": (4, 3, 4, 3, 3, 3, 3, 3),
}

# cells (row, column) of the round, 1-based
S2_CELLS = {(1, 3): "correct", (3, 2): "wrong", (10, 2): "wrong"}
S1_CELLS = ((5, 3), (7, 2), (8, 3))
EXPECTED_RESIDUAL = (8, 15, 20, 24, 29)


@dataclass
class ReplayReport:
    values: dict
    discrepancies: list  # (name, printed, computed)
    counts: tuple
    decision: str
    initial_S: tuple
    T: tuple
    final_S: tuple
    residual: list
    frame_bases_ok: bool
    offset: int
    checks: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(self.checks.values())


def polynomial() -> BiPoly:
    return BiPoly(COEFFS, PrimeModulus(P))


def scripted_table(K) -> np.ndarray:
    """Measurement table producing the scripted 3/3/27 split of triples."""
    grid = encode(K, P // 3, P).copy()
    for (t, i), kind in S2_CELLS.items():
        k = int(grid[t - 1, i - 1, 0])
        if kind == "correct":
            grid[t - 1, i - 1] = (k, k, (k + 1) % P)  # majority at positions 1, 2
        else:
            grid[t - 1, i - 1] = ((k + 1) % P, (k + 2) % P, (k + 2) % P)  # wrong pair at 2, 3
    for t, i in S1_CELLS:
        k = int(grid[t - 1, i - 1, 0])
        grid[t - 1, i - 1] = (k, (k + 1) % P, (k + 2) % P)
    return grid


def replay(seed: int = 0) -> ReplayReport:
    F = polynomial()
    ids = (DEALER_ID,) + HOLDER_IDS
    setup, shares = deal_polynomial(F, T, ids)

    computed = {
        "secret (stated)": eval_bi(F, 0, 0).value,
        "F(0,0)": eval_bi(F, 0, 0).value,
        "F(9,1)": eval_bi(F, 9, 1).value,
        "F(1,9)": eval_bi(F, 1, 9).value,
        "F(x,1)": restrict_y(F, 1).coeffs,
        "F(x,9)": restrict_y(F, 9).coeffs,
        "F(9,y)": restrict_x(F, 9).coeffs,
    }
    discrepancies = [(k, PRINTED[k], computed[k]) for k in PRINTED if PRINTED[k] != computed[k]]

    cfg = ProtocolConfig(p=P, t=T, n=len(HOLDER_IDS), h=F.y_terms, eps1=EPS1, eps2=EPS2, seed=seed)
    eng = Engine(cfg, make_rng(seed)).setup(setup, shares)
    alice, bob1 = eng.dealer, eng.parties[1]
    K = alice.K

    offset = alice.keys_with(1).k_ji.value  # F(x_1, x_0)
    frame = ch.prepare_frame(encode(K, cfg.m, P), R_VEC, offset, 1, P)
    bases_ok = all(int(frame.bases[r, c]) == R_VEC[r] for r in range(P) for c in range(3 * cfg.m))

    layout = GridLayout.sequential(cfg.m, P)
    c = classify(scripted_table(K))
    decision = threshold_decision(c, EPS1, EPS2)
    h0 = harvest_s3(c)
    verify = eng.harvest_verifier(layout, dict(enumerate(K, start=1)))
    h1 = extend(h0, verify, bob1.identity, bob1.secret)
    _, residual = harvested_subsequence(h1, layout)

    report = ReplayReport(
        values=computed,
        discrepancies=discrepancies,
        counts=c.counts,
        decision=decision.value,
        initial_S=h0.S,
        T=h0.T,
        final_S=h1.S,
        residual=residual,
        frame_bases_ok=bases_ok,
        offset=offset,
    )
    report.checks = {
        "secret F(0,0)=7": computed["F(0,0)"] == 7,
        "session key F(9,1)=4": computed["F(9,1)"] == 4,
        "F(9,y) coefficients": computed["F(9,y)"] == PRINTED["F(9,y)"],
        "F(x,1) coefficients": computed["F(x,1)"] == PRINTED["F(x,1)"],
        "F(x,9) flagged": any(d[0] == "F(x,9)" for d in discrepancies),
        "F(1,9) flagged": any(d[0] == "F(1,9)" for d in discrepancies),
        "counts (3,3,27)": c.counts == (3, 3, 27),
        "decision keep": decision.value == "keep",
        "T = {(1,3,1),(3,2,2),(10,2,2)}": h0.T == ((1, 3, 1), (3, 2, 2), (10, 2, 2)),
        "harvest 27 -> 28": (len(h0.S), len(h1.S)) == (27, 28),
        "residual {8,15,20,24,29}": tuple(residual) == EXPECTED_RESIDUAL,
        "frame row bases": bases_ok,
    }
    return report
