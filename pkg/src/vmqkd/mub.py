"""Mutually unbiased bases in prime dimension and the X^x Y^y shift algebra.

Basis vectors of the quadratic family are

    |v_l^(j)> = p^{-1/2} sum_k w^{k(l + j k)} |k>,    w = exp(2 pi i / p)

and the diagonal operators X = diag(w^m), Y = diag(w^{m^2}) act on the
family by index shifts: X^x Y^y |v_l^(j)> = |v_{l+x}^(j+y)>.

The protocol simulator works purely on (basis, level) indices. The numeric
vectors below are only used to validate the index rules.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ComputationalBasisUnsupported, DimensionMismatch
from .field import PrimeModulus


@dataclass(frozen=True)
class QuditState:
    """Index-level qudit state.

    ``basis`` picks the member of the quadratic family, ``level`` the vector
    within it. When ``computational`` is set the state is ``|level>`` of the
    computational basis and ``basis`` is ignored.
    """

    basis: int
    level: int
    p: int
    computational: bool = False

    def __post_init__(self):
        object.__setattr__(self, "basis", int(self.basis) % self.p)
        object.__setattr__(self, "level", int(self.level) % self.p)


@dataclass(frozen=True)
class ShiftOperator:
    """U^y_x = X^x Y^y: shifts the level by ``x`` and the basis by ``y``."""

    x: int
    y: int
    p: int

    def __post_init__(self):
        object.__setattr__(self, "x", int(self.x) % self.p)
        object.__setattr__(self, "y", int(self.y) % self.p)

    def compose(self, other: "ShiftOperator") -> "ShiftOperator":
        if other.p != self.p:
            raise DimensionMismatch(f"{self.p} vs {other.p}")
        return ShiftOperator(self.x + other.x, self.y + other.y, self.p)

    def inverse(self) -> "ShiftOperator":
        return ShiftOperator(-self.x, -self.y, self.p)


@lru_cache(maxsize=None)
def omega_table(p: int) -> np.ndarray:
    """w^0 .. w^{p-1}. Read-only once built."""
    PrimeModulus(p)
    table = np.exp(2j * np.pi * np.arange(p) / p)
    table.setflags(write=False)
    return table


def _phases(exponents: np.ndarray, p: int, table=None) -> np.ndarray:
    if table is None:
        table = omega_table(p)
    return table[np.mod(exponents, p)]


def mub_vector(j: int, l: int, p: int, table=None) -> np.ndarray:
    k = np.arange(p, dtype=np.int64)
    return _phases(k * (int(l) + int(j) * k), p, table) / np.sqrt(p)


def computational_vector(l: int, p: int) -> np.ndarray:
    v = np.zeros(p, dtype=complex)
    v[int(l) % p] = 1.0
    return v


def state_vector(state: QuditState, table=None) -> np.ndarray:
    if state.computational:
        return computational_vector(state.level, state.p)
    return mub_vector(state.basis, state.level, state.p, table)


def basis_matrix(j: int, p: int, table=None) -> np.ndarray:
    """Columns are |v_0^(j)> .. |v_{p-1}^(j)>."""
    k = np.arange(p, dtype=np.int64)[:, None]
    l = np.arange(p, dtype=np.int64)[None, :]
    return _phases(k * (l + int(j) * k), p, table) / np.sqrt(p)


def overlap_magnitude(a: np.ndarray, b: np.ndarray) -> float:
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise DimensionMismatch(f"{a.shape} vs {b.shape}")
    return float(abs(np.vdot(a, b)))


def apply_shift(state: QuditState, op: ShiftOperator) -> QuditState:
    if state.computational:
        raise ComputationalBasisUnsupported("shift law only holds for the quadratic family")
    if op.p != state.p:
        raise DimensionMismatch(f"{op.p} vs {state.p}")
    return QuditState(state.basis + op.y, state.level + op.x, state.p)


def apply_shift_numeric(v: np.ndarray, op: ShiftOperator, table=None) -> np.ndarray:
    """Multiply amplitude k by w^{x k + y k^2}."""
    v = np.asarray(v)
    if v.shape != (op.p,):
        raise DimensionMismatch(f"vector of shape {v.shape} in dimension {op.p}")
    k = np.arange(op.p, dtype=np.int64)
    return v * _phases(op.x * k + op.y * k * k, op.p, table)


def measurement_distribution(state: QuditState, basis: int, computational: bool = False) -> np.ndarray:
    """Outcome probabilities for measuring ``state`` in a basis.

    Matching bases give a point mass on the level; any two different bases
    of the complete set are unbiased, so the outcome is uniform.
    """
    p = state.p
    same = state.computational == computational and (
        computational or state.basis == int(basis) % p
    )
    if same:
        dist = np.zeros(p)
        dist[state.level] = 1.0
        return dist
    return np.full(p, 1.0 / p)
