"""Batch scenarios, metric reports and the numeric MUB checks.

Scenario files are flat ``key = value`` text; ``#`` starts a comment.
Keys are the long CLI flag names without dashes, with ``-`` or ``_``::

    p = 11
    t = 3
    eve_fraction = 1
    trials = 1000
    target = abort_rate, eve_recovery

Report files hold one metric per line, tab separated::

    name  value  ci_low  ci_high  threshold  PASS|FAIL
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field, fields
from fractions import Fraction
from pathlib import Path
from typing import Optional

import numpy as np

from . import channel as ch
from . import mub
from .engine import Engine, ProtocolConfig, efficiency
from .errors import ConfigError, HopFailed, IncompleteRun
from .rng import make_rng

TARGETS = ("efficiency", "abort_rate", "eve_recovery", "example_replay")


@dataclass
class ScenarioSpec:
    p: int = 11
    t: int = 3
    n: Optional[int] = None
    h_degree: Optional[int] = None
    m: Optional[int] = None
    eps1: float = 0.5
    eps2: float = 1 / 11
    noise: float = 0.0
    eve_fraction: float = 0.0
    eve_basis_pool: str = ch.FAMILY
    seed: int = 0
    trials: int = 1
    max_rounds: int = 16
    window: int = 0
    target: tuple = ("efficiency",)
    out: Optional[str] = None
    transcript_dir: Optional[str] = None
    example_replay: bool = False

    def validate(self):
        if self.trials < 1:
            raise ConfigError("trials: must be at least 1")
        targets = tuple(self.target)
        if self.example_replay and "example_replay" not in targets:
            targets = targets + ("example_replay",)
        if not targets:
            raise ConfigError("target: at least one report target is required")
        for tg in targets:
            if tg not in TARGETS:
                raise ConfigError(f"target: unknown target {tg!r} (choose from {', '.join(TARGETS)})")
        self.target = targets
        try:
            self.protocol_config()
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        return self

    def channel(self) -> ch.ChannelConfig:
        adversary = None
        if self.eve_fraction > 0:
            adversary = ch.InterceptResend(self.eve_fraction, self.eve_basis_pool)
        return ch.ChannelConfig(noise=self.noise, adversary=adversary)

    def protocol_config(self) -> ProtocolConfig:
        return ProtocolConfig(
            p=self.p, t=self.t, n=self.n, h=self.h_degree, m=self.m,
            eps1=self.eps1, eps2=self.eps2, channel=self.channel(),
            max_rounds=self.max_rounds, window=self.window, seed=self.seed,
        )

    @property
    def honest(self) -> bool:
        return self.noise == 0 and self.eve_fraction == 0


_CONVERTERS = {
    "p": int, "t": int, "n": int, "h_degree": int, "m": int, "seed": int,
    "trials": int, "max_rounds": int, "window": int,
    "eps1": lambda s: float(Fraction(s)), "eps2": lambda s: float(Fraction(s)),
    "noise": float, "eve_fraction": float, "eve_basis_pool": str,
    "target": lambda s: tuple(x.strip() for x in s.split(",") if x.strip()),
    "out": str, "transcript_dir": str,
    "example_replay": lambda s: s.strip().lower() in ("1", "true", "yes", "on"),
}


def convert(key: str, raw: str):
    try:
        return _CONVERTERS[key](raw)
    except (ValueError, ZeroDivisionError) as exc:
        raise ConfigError(f"{key}: cannot parse {raw!r}") from exc


def parse_config(text: str, source: str = "<config>") -> dict:
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected key = value")
        key, raw = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _CONVERTERS:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        try:
            values[key] = convert(key, raw)
        except ConfigError as exc:
            raise ConfigError(f"{source}:{lineno}: {exc}") from exc
    return values


def load_spec(path=None, **overrides) -> ScenarioSpec:
    values = {}
    if path is not None:
        values.update(parse_config(Path(path).read_text(), str(path)))
    values.update({k: v for k, v in overrides.items() if v is not None})
    known = {f.name for f in fields(ScenarioSpec)}
    return ScenarioSpec(**{k: v for k, v in values.items() if k in known}).validate()


@dataclass
class Metric:
    name: str
    value: float
    ci: tuple
    threshold: str
    passed: bool

    def line(self) -> str:
        return "\t".join(
            [self.name, f"{self.value:.6f}", f"{self.ci[0]:.6f}", f"{self.ci[1]:.6f}", self.threshold, "PASS" if self.passed else "FAIL"]
        )


@dataclass
class ScenarioReport:
    spec: ScenarioSpec
    metrics: list = field(default_factory=list)
    transcripts: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(m.passed for m in self.metrics)

    def text(self) -> str:
        head = "# name\tvalue\tci_low\tci_high\tthreshold\tresult\n"
        return head + "".join(m.line() + "\n" for m in self.metrics)


def _mean_ci(xs) -> tuple:
    xs = np.asarray(xs, dtype=float)
    mean = float(xs.mean())
    if xs.size < 2:
        return mean, (mean, mean)
    half = 1.96 * float(xs.std(ddof=1)) / math.sqrt(xs.size)
    return mean, (mean - half, mean + half)


def _rate_ci(k: int, n: int) -> tuple:
    if n == 0:
        return 0.0, (0.0, 0.0)
    r = k / n
    half = 1.96 * math.sqrt(r * (1 - r) / n)
    return r, (max(0.0, r - half), min(1.0, r + half))


def run_trial(spec: ScenarioSpec, trial: int) -> Engine:
    cfg = spec.protocol_config()
    eng = Engine(cfg, make_rng(spec.seed, trial)).setup()
    try:
        eng.chain()
    except HopFailed as exc:
        eng.transcript.record(eng.tick, "chain_failed", None, None, {"hop": exc.hop, "cause": type(exc.cause).__name__})
    return eng


def run_scenario(spec: ScenarioSpec) -> ScenarioReport:
    spec.validate()
    report = ScenarioReport(spec)
    if spec.transcript_dir:
        os.makedirs(spec.transcript_dir, exist_ok=True)

    needs_runs = any(t != "example_replay" for t in spec.target)
    engines = []
    if needs_runs:
        for trial in range(spec.trials):
            eng = run_trial(spec, trial)
            if spec.transcript_dir:
                path = os.path.join(spec.transcript_dir, f"trial_{trial:04d}.jsonl")
                eng.transcript.write(path)
                report.transcripts.append(path)
            engines.append(eng)

    for target in spec.target:
        report.metrics.append(_METRICS[target](spec, engines))

    if spec.out:
        Path(spec.out).write_text(report.text())
    return report


def _efficiency_metric(spec, engines) -> Metric:
    ideal = Fraction(1, 3 * spec.t)
    etas = []
    for eng in engines:
        try:
            etas.append(efficiency(eng.transcript))
        except IncompleteRun:
            etas.append(Fraction(0))
    mean, ci = _mean_ci([float(e) for e in etas])
    if spec.honest:
        return Metric("efficiency", mean, ci, f"=={ideal}", all(e == ideal for e in etas))
    return Metric("efficiency", mean, ci, f"<={ideal}", all(e <= ideal for e in etas))


def _abort_metric(spec, engines) -> Metric:
    aborted = sum(len(e.transcript.of_type("round_aborted")) for e in engines)
    total = sum(len(e.transcript.of_type("round_start")) for e in engines)
    rate, ci = _rate_ci(aborted, total)
    if spec.eve_fraction >= 1:
        return Metric("abort_rate", rate, ci, ">=0.99", rate >= 0.99)
    return Metric("abort_rate", rate, ci, "n/a", True)


def eve_recovery(engines) -> tuple:
    """(recovered elements, elements on intercepted frames) over all runs."""
    hit, total = 0, 0
    for eng in engines:
        for record, grid, offset in eng.eve_log:
            n = grid.shape[0] * grid.shape[1]
            hit += round(ch.eve_key_recovery_rate(record, grid, offset) * n)
            total += n
    return hit, total


def _eve_metric(spec, engines) -> Metric:
    hit, total = eve_recovery(engines)
    bound = 3 / spec.p**2
    rate, ci = _rate_ci(hit, total)
    if total == 0:
        return Metric("eve_recovery", 0.0, (0.0, 0.0), "n/a", True)
    sigma = math.sqrt(bound * (1 - bound) / total)
    limit = bound + 3 * sigma
    return Metric("eve_recovery", rate, ci, f"<={limit:.6f}", rate <= limit)


def _replay_metric(spec, engines) -> Metric:
    from .worked_example import replay

    r = replay(spec.seed)
    passed = sum(r.checks.values())
    return Metric("example_replay", passed / len(r.checks), (0.0, 1.0), f"=={len(r.checks)}/{len(r.checks)} checks", r.ok)


_METRICS = {
    "efficiency": _efficiency_metric,
    "abort_rate": _abort_metric,
    "eve_recovery": _eve_metric,
    "example_replay": _replay_metric,
}


# ------------------------------------------------------------ numeric checks
@dataclass
class MathReport:
    deviations: dict  # p -> {"unbiased": ..., "orthonormal": ..., "shift": ...}
    tolerance: float = 1e-9

    @property
    def max_deviation(self) -> float:
        return max(max(d.values()) for d in self.deviations.values())

    @property
    def passed(self) -> bool:
        return self.max_deviation < self.tolerance

    def text(self) -> str:
        lines = []
        for p, d in self.deviations.items():
            parts = "  ".join(f"{k}={v:.3e}" for k, v in d.items())
            lines.append(f"p={p:<3d} {parts}")
        lines.append(f"max deviation {self.max_deviation:.3e} ({'PASS' if self.passed else 'FAIL'} at {self.tolerance:g})")
        return "\n".join(lines) + "\n"


def corrupted_table(p: int) -> np.ndarray:
    """A root-of-unity table with one entry nudged, for negative controls."""
    t = mub.omega_table(p).copy()
    t[1] *= np.exp(0.1j)
    return t


def validate_math(primes=(3, 5, 7, 11, 13), shift_samples: int = 500, seed: int = 0, corrupt: bool = False) -> MathReport:
    rng = make_rng(seed)
    out = {}
    for p in primes:
        table = corrupted_table(p) if corrupt else mub.omega_table(p)
        bases = [mub.basis_matrix(j, p, table) for j in range(p)] + [np.eye(p, dtype=complex)]
        unbiased = 0.0
        ortho = 0.0
        for a in range(len(bases)):
            g = bases[a].conj().T @ bases[a]
            ortho = max(ortho, float(np.abs(g - np.eye(p)).max()))
            for b in range(a + 1, len(bases)):
                sq = np.abs(bases[a].conj().T @ bases[b]) ** 2
                unbiased = max(unbiased, float(np.abs(sq - 1 / p).max()))
        shift = 0.0
        for _ in range(shift_samples // len(primes) + 1):
            j, l, x, y = (int(v) for v in rng.integers(0, p, size=4))
            lhs = mub.apply_shift_numeric(mub.mub_vector(j, l, p, table), mub.ShiftOperator(x, y, p), table)
            rhs = mub.mub_vector((j + y) % p, (l + x) % p, p, table)
            shift = max(shift, float(np.abs(lhs - rhs).max()))
        out[p] = {"unbiased": unbiased, "orthonormal": ortho, "shift": shift}
    return MathReport(out)
