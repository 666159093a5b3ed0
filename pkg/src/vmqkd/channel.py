"""Index-level qudit channel: frame preparation, transmission, measurement.

A frame is a ``rows x 3m`` grid of states; row ``t`` is prepared in basis
``r_vec[t]`` and every level is shifted by the session offset
F(x_receiver, x_sender) (the operator U^0_offset). States are tracked as
(basis, level, computational) index arrays. Sampling follows
:func:`vmqkd.mub.measurement_distribution`: same basis gives the level,
any other basis gives a uniform outcome.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .errors import NoAdversary, ShapeMismatch, TimingViolation
from .mub import QuditState, measurement_distribution

FAMILY = "family"
FAMILY_PLUS_COMPUTATIONAL = "family+computational"

HONEST_DELAY = 1


@dataclass(frozen=True)
class QuantumFrame:
    bases: np.ndarray  # (rows, 3m) int
    levels: np.ndarray  # (rows, 3m) int
    computational: np.ndarray  # (rows, 3m) bool
    p: int
    send_time: int
    arrival_time: Optional[int] = None

    @property
    def shape(self):
        return self.levels.shape

    @property
    def size(self) -> int:
        return int(self.levels.size)

    def state(self, t: int, c: int) -> QuditState:
        """State at 0-based row ``t``, column ``c``."""
        return QuditState(
            int(self.bases[t, c]), int(self.levels[t, c]), self.p, bool(self.computational[t, c])
        )


@dataclass(frozen=True)
class InterceptResend:
    fraction: float = 1.0
    basis_pool: str = FAMILY
    knows_bases: bool = False  # oracle-cheat mode: Eve measures in the true basis

    def __post_init__(self):
        if not 0.0 <= self.fraction <= 1.0:
            raise ValueError("interception fraction must be in [0, 1]")
        if self.basis_pool not in (FAMILY, FAMILY_PLUS_COMPUTATIONAL):
            raise ValueError(f"unknown basis pool {self.basis_pool!r}")


@dataclass(frozen=True)
class ChannelConfig:
    noise: float = 0.0
    delay: int = HONEST_DELAY
    adversary: Optional[InterceptResend] = None

    def __post_init__(self):
        if not 0.0 <= self.noise <= 1.0:
            raise ValueError("noise rate must be in [0, 1]")
        if self.delay < 0:
            raise ValueError("delay must be non-negative")


@dataclass(frozen=True)
class EveRecord:
    """What Eve did on one frame. Arrays are aligned, one entry per intercepted qudit."""

    rows: np.ndarray
    cols: np.ndarray
    basis: np.ndarray
    computational: np.ndarray
    level: np.ndarray
    true_basis: np.ndarray
    offset_guess: int
    p: int
    frame_shape: tuple

    @property
    def count(self) -> int:
        return int(self.rows.size)

    @property
    def matched(self) -> np.ndarray:
        return ~self.computational & (self.basis == self.true_basis)


def prepare_frame(grid: np.ndarray, r_vec, offset: int, t_send: int, p: int) -> QuantumFrame:
    grid = np.asarray(grid, dtype=np.int64)
    if grid.ndim != 3 or grid.shape[2] != 3:
        raise ShapeMismatch(f"grid must be (rows, m, 3), got {grid.shape}")
    rows = grid.shape[0]
    r_vec = np.asarray(r_vec, dtype=np.int64)
    if r_vec.shape != (rows,):
        raise ShapeMismatch(f"{r_vec.size} bases for {rows} rows")
    levels = (grid.reshape(rows, -1) + int(offset)) % p
    bases = np.repeat(r_vec[:, None] % p, levels.shape[1], axis=1)
    return QuantumFrame(bases, levels, np.zeros(levels.shape, dtype=bool), p, int(t_send))


def transmit(frame: QuantumFrame, cfg: ChannelConfig, rng: np.random.Generator):
    """Send ``frame`` through the channel.

    Returns ``(delivered, eve_record, arrival)``; ``eve_record`` is ``None``
    without an adversary. Noise is not applied here but at measurement.
    """
    arrival = frame.send_time + cfg.delay
    adv = cfg.adversary
    if adv is None:
        return replace(frame, arrival_time=arrival), None, arrival

    p = frame.p
    shape = frame.shape
    pool = p + 1 if adv.basis_pool == FAMILY_PLUS_COMPUTATIONAL else p
    hit = rng.random(shape) < adv.fraction
    guess = rng.integers(0, pool, size=shape)
    coin = rng.integers(0, p, size=shape)
    offset_guess = int(rng.integers(0, p))

    if adv.knows_bases:
        eve_comp = frame.computational.copy()
        eve_basis = frame.bases.copy()
    else:
        eve_comp = guess == p
        eve_basis = np.where(eve_comp, 0, guess)
    same = (eve_comp == frame.computational) & (eve_comp | (eve_basis == frame.bases))
    outcome = np.where(same, frame.levels, coin)

    delivered = replace(
        frame,
        bases=np.where(hit, eve_basis, frame.bases),
        levels=np.where(hit, outcome, frame.levels),
        computational=np.where(hit, eve_comp, frame.computational),
        arrival_time=arrival,
    )
    r, c = np.nonzero(hit)
    record = EveRecord(
        rows=r,
        cols=c,
        basis=eve_basis[r, c],
        computational=eve_comp[r, c],
        level=outcome[r, c],
        true_basis=frame.bases[r, c],
        offset_guess=offset_guess,
        p=p,
        frame_shape=shape,
    )
    return delivered, record, arrival


def receive_measure(
    frame: QuantumFrame,
    r_vec,
    offset: int,
    expected_time: int,
    window: int,
    rng: np.random.Generator,
    noise: float = 0.0,
) -> np.ndarray:
    """Undo the level shift and measure row ``t`` in basis ``r_vec[t]``.

    Returns the measurement table, shape ``(rows, m, 3)``.
    """
    arrival = frame.arrival_time if frame.arrival_time is not None else frame.send_time
    if abs(arrival - expected_time) > window:
        raise TimingViolation(arrival, expected_time, window)
    p = frame.p
    rows, cols = frame.shape
    r_vec = np.asarray(r_vec, dtype=np.int64)
    if r_vec.shape != (rows,):
        raise ShapeMismatch(f"{r_vec.size} bases for {rows} rows")
    coin = rng.integers(0, p, size=frame.shape)
    # X^x is diagonal in the computational basis, so only family states shift
    levels = np.where(frame.computational, frame.levels, (frame.levels - int(offset)) % p)
    same = ~frame.computational & (frame.bases == r_vec[:, None] % p)
    out = np.where(same, levels, coin)
    if noise > 0:
        flip = rng.random(frame.shape) < noise
        out = np.where(flip, rng.integers(0, p, size=frame.shape), out)
    return out.reshape(rows, cols // 3, 3)


def eve_key_recovery_rate(record: Optional[EveRecord], truth: np.ndarray, offset: int = None, grant_offset: bool = False) -> float:
    """Fraction of key elements Eve got right on at least one repetition.

    A repetition counts when Eve's basis matched and her outcome minus her
    offset guess equals the key value. With ``grant_offset`` she is handed
    the true ``offset`` instead of guessing.
    """
    if record is None:
        raise NoAdversary("no eavesdropper was active")
    truth = np.asarray(truth)
    rows, m, _ = truth.shape
    if record.count == 0:
        return 0.0
    guess = int(offset) if grant_offset else record.offset_guess
    got = np.zeros((rows, m), dtype=bool)
    inferred = (record.level - guess) % record.p
    ok = record.matched & (inferred == truth[record.rows, record.cols // 3, record.cols % 3])
    got[record.rows[ok], record.cols[ok] // 3] = True
    return float(got.mean())


def intercept_resend_outcome_distribution(p: int, basis_pool: str = FAMILY, true_basis: int = 0, level: int = 0) -> np.ndarray:
    """Bob's outcome distribution for one fully intercepted qudit.

    Composes :func:`measurement_distribution` over Eve's uniform basis
    guess, her outcome, and Bob's measurement (offset already removed).
    """
    sent = QuditState(true_basis, level, p)
    guesses = [(b, False) for b in range(p)]
    if basis_pool == FAMILY_PLUS_COMPUTATIONAL:
        guesses.append((0, True))
    total = np.zeros(p)
    for b, comp in guesses:
        eve = measurement_distribution(sent, b, computational=comp)
        for v, pv in enumerate(eve):
            if pv == 0:
                continue
            resent = QuditState(b, v, p, computational=comp)
            total += pv * measurement_distribution(resent, true_basis)
    return total / len(guesses)


def all_equal_probability(dist: np.ndarray) -> float:
    """Probability three independent draws from ``dist`` coincide."""
    dist = np.asarray(dist)
    return float(np.sum(dist**3))
