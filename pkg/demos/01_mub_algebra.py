"""Mutually unbiased bases in prime dimension, and how shifts move between them.

Run: python demos/01_mub_algebra.py
"""

import numpy as np

from vmqkd.mub import (
    QuditState,
    ShiftOperator,
    apply_shift,
    apply_shift_numeric,
    basis_matrix,
    measurement_distribution,
    mub_vector,
)

p = 5

# %% Each basis j is a p x p unitary whose columns are |v_l^(j)>.
B0, B2 = basis_matrix(0, p), basis_matrix(2, p)
print("B0 unitary:", np.allclose(B0.conj().T @ B0, np.eye(p)))

# Any vector of basis 0 has squared overlap 1/p with any vector of basis 2.
print("cross overlaps |<v|w>|^2:\n", np.round(np.abs(B0.conj().T @ B2) ** 2, 6))

# %% X^x Y^y moves basis j to j + y and level l to l + x.
state = QuditState(basis=1, level=3, p=p)
op = ShiftOperator(x=2, y=4, p=p)
moved = apply_shift(state, op)
print(f"{state} -> {moved}")
numeric = apply_shift_numeric(mub_vector(1, 3, p), op)
print("matches the vector picture:", np.allclose(numeric, mub_vector(moved.basis, moved.level, p)))

# %% Measuring: same basis is deterministic, any other basis is a fair die.
print("same basis:", measurement_distribution(moved, moved.basis))
print("other basis:", np.round(measurement_distribution(moved, (moved.basis + 2) % p), 3))
