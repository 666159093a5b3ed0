"""Ternary repetition coding of key sequences and the harvesting rules.

Grids are numpy arrays of shape ``(rows, m, 3)``: row ``t``, column ``i``,
repetition ``j``. Public coordinates (cells, the S/T sets, key indices) are
1-based; arrays are 0-based.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import LengthMismatch, VerifierUnavailable
from .sharing import keyed_digest, serialize_tuple


@dataclass(frozen=True)
class GridLayout:
    """Maps grid cells to global (1-based) key indices.

    ``cells`` is row-major; ``None`` marks a padding cell.
    """

    rows: int
    cols: int
    cells: tuple

    @classmethod
    def sequential(cls, m: int, rows: int) -> "GridLayout":
        return cls(rows, m, tuple(range(1, m * rows + 1)))

    @classmethod
    def pack(cls, indices: Sequence[int], rows: int) -> "GridLayout":
        """Row-major packing of a residual index set into ``rows`` rows."""
        indices = sorted(indices)
        cols = max(1, math.ceil(len(indices) / rows))
        cells = tuple(indices) + (None,) * (rows * cols - len(indices))
        return cls(rows, cols, cells)

    def index_of(self, t: int, i: int) -> Optional[int]:
        return self.cells[(t - 1) * self.cols + (i - 1)]

    @property
    def padding(self) -> tuple:
        """1-based (t, i) cells holding filler."""
        return tuple(
            (pos // self.cols + 1, pos % self.cols + 1)
            for pos, idx in enumerate(self.cells)
            if idx is None
        )


def key_index(t: int, i: int, m: int) -> int:
    """Position of k^(t)_{i,j} in the key sequence: (t - 1) m + i."""
    return (t - 1) * m + i


def encode(K: Sequence[int], m: int, rows: int) -> np.ndarray:
    K = np.asarray(K, dtype=np.int64)
    if K.shape != (m * rows,):
        raise LengthMismatch(f"key of length {K.size} does not fill {rows} x {m}")
    return np.repeat(K.reshape(rows, m, 1), 3, axis=2)


def decode(table: np.ndarray) -> list:
    """Majority decode; ``None`` where all three repetitions disagree."""
    out = []
    for a, b, c in np.asarray(table).reshape(-1, 3).tolist():
        if a == b or a == c:
            out.append(a)
        elif b == c:
            out.append(b)
        else:
            out.append(None)
    return out


@dataclass(frozen=True)
class TripleClassification:
    """S1: all distinct, S2: exactly two equal, S3: unanimous.

    Each entry is ``((t, i), triple)`` with 1-based cell coordinates.
    """

    S1: tuple
    S2: tuple
    S3: tuple

    @property
    def counts(self) -> tuple:
        return len(self.S1), len(self.S2), len(self.S3)

    @property
    def total(self) -> int:
        return len(self.S1) + len(self.S2) + len(self.S3)


def classify(table: np.ndarray) -> TripleClassification:
    table = np.asarray(table)
    s1, s2, s3 = [], [], []
    rows, m, _ = table.shape
    for t in range(rows):
        for i in range(m):
            a, b, c = (int(v) for v in table[t, i])
            entry = ((t + 1, i + 1), (a, b, c))
            distinct = len({a, b, c})
            if distinct == 1:
                s3.append(entry)
            elif distinct == 2:
                s2.append(entry)
            else:
                s1.append(entry)
    return TripleClassification(tuple(s1), tuple(s2), tuple(s3))


class Decision(enum.Enum):
    KEEP = "keep"
    ABORT = "abort"


def threshold_decision(c: TripleClassification, eps1: float, eps2: float) -> Decision:
    """Keep iff |S3|/total >= eps1 and |S1|/total <= eps2."""
    total = c.total
    if total == 0:
        raise ValueError("no triples to judge")
    n1, _, n3 = c.counts
    # both sides are correctly rounded doubles, so equal rationals compare equal
    if n3 / total >= float(eps1) and n1 / total <= float(eps2):
        return Decision.KEEP
    return Decision.ABORT


@dataclass(frozen=True)
class HarvestState:
    """Verified harvest (S, I) plus pending two-of-three candidates (T, J).

    ``S`` is kept sorted; ``I[k]`` is the value for ``S[k]``.
    """

    S: tuple = ()
    I: tuple = ()
    T: tuple = ()
    J: tuple = ()

    def as_dict(self) -> dict:
        return dict(zip(self.S, self.I))

    def cells(self) -> set:
        return {(k, i) for k, i, _ in self.S}


def _majority(triple) -> tuple:
    """(least position of the majority pair, its value) for a 2-of-3 triple."""
    a, b, c = triple
    if a == b or a == c:
        return 1, a
    return 2, b


def harvest_s3(c: TripleClassification, skip=frozenset()) -> HarvestState:
    """Unanimous cells go straight into (S, I); 2-of-3 cells become candidates.

    ``skip`` lists (t, i) cells to ignore, e.g. padding.
    """
    s3 = sorted((cell, tri) for cell, tri in c.S3 if cell not in skip)
    S = tuple((t, i, 1) for (t, i), _ in s3)
    I = tuple(tri[0] for _, tri in s3)
    pending = []
    for cell, tri in c.S2:
        if cell in skip:
            continue
        j, v = _majority(tri)
        pending.append(((cell[0], cell[1], j), v))
    pending.sort()
    return HarvestState(S, I, tuple(x for x, _ in pending), tuple(v for _, v in pending))


def harvest_payload(receiver: int, S: Sequence, I: Sequence) -> bytes:
    """x_receiver, then S as sorted triples, then I in S-order."""
    pairs = sorted(zip(S, I))
    flat = [receiver]
    for triple, _ in pairs:
        flat.extend(triple)
    flat.extend(v for _, v in pairs)
    return serialize_tuple(flat)


def harvest_digest(key, receiver: int, S: Sequence, I: Sequence) -> bytes:
    return keyed_digest([key], harvest_payload(receiver, S, I))


def _insert(h_S, h_I, triple, value):
    pairs = sorted(list(zip(h_S, h_I)) + [(triple, value)])
    return tuple(p[0] for p in pairs), tuple(p[1] for p in pairs)


def extend(
    h: HarvestState,
    verifier: Callable[[int, tuple, bytes], Optional[bool]],
    receiver: int,
    key,
    on_check: Callable = None,
) -> HarvestState:
    """Try each pending candidate in dictionary order, keeping the ones the
    dealer confirms.

    ``verifier(receiver, S, digest)`` is the dealer; a ``None`` answer
    (verification withheld) counts as rejection. ``on_check`` is called
    as ``on_check(triple, accepted)`` after every attempt.
    """
    if verifier is None:
        raise VerifierUnavailable("extension needs the dealer's verifier")
    S, I = h.S, h.I
    for triple, value in sorted(zip(h.T, h.J)):
        cand_S, cand_I = _insert(S, I, triple, value)
        accepted = bool(verifier(receiver, cand_S, harvest_digest(key, receiver, cand_S, cand_I)))
        if accepted:
            S, I = cand_S, cand_I
        if on_check is not None:
            on_check(triple, accepted)
    return HarvestState(S, I, (), ())


def harvested_subsequence(h: HarvestState, layout: GridLayout):
    """Translate harvested cells to key indices.

    Returns ``(values, residual)``: a dict of key index -> value and the
    sorted key indices of ``layout`` still missing.
    """
    values = {}
    for (t, i, _), v in zip(h.S, h.I):
        idx = layout.index_of(t, i)
        if idx is not None:
            values[idx] = v
    residual = sorted(idx for idx in layout.cells if idx is not None and idx not in values)
    return values, residual
