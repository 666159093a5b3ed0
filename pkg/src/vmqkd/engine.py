"""Protocol orchestration: setup, identification, rounds, chain relay, metrics.

One :class:`Engine` drives every party on a single logical clock. All
randomness comes from the engine's generator, so ``(config, seed)``
determines the transcript byte for byte.

A hop from sender ``S`` to receiver ``R`` repeats rounds of

1. identification: ``S`` pads ``(x_S, t0, F(x_R, x_S))`` with F(x_S, x_R);
2. basis broadcast: a fresh ``r`` vector, padded the same way;
3. the frame: encode, shift levels by F(x_R, x_S), transmit, measure;
4. classification and the keep/abort thresholds;
5. harvest, dealer-verified extension and a final harvest digest;

until every key element has arrived or ``max_rounds`` is spent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from . import channel as ch
from .errors import (
    AuthReject,
    DecryptMismatch,
    HopFailed,
    IncompleteRun,
    MaxRoundsExceeded,
    TimingViolation,
)
from .field import PrimeModulus
from .repcode import (
    Decision,
    GridLayout,
    HarvestState,
    classify,
    encode,
    extend,
    harvest_digest,
    harvest_s3,
    harvested_subsequence,
    threshold_decision,
)
from .rng import make_rng
from .sharing import (
    DealerSetup,
    DealerVerifier,
    SessionKeyPair,
    SharePair,
    decrypt_component,
    deal,
    default_identities,
    derive_session_keys,
    encrypt_component,
    keyed_digest,
    lagrange_component,
    otp_stream_decrypt,
    otp_stream_encrypt,
    reconstruct,
    serialize_tuple,
)
from .transcript import Transcript

DEALER = "dealer"
HOLDER = "holder"

# nonce tags keep the pad streams of different messages apart
_NONCE_IDENT = 1
_NONCE_BASES = 2
_NONCE_PADDING = 3


@dataclass
class ProtocolConfig:
    p: int = 11
    t: int = 3
    n: Optional[int] = None  # defaults to t
    h: Optional[int] = None  # defaults to t(t-1)+1
    m: Optional[int] = None  # defaults to floor(p/3)
    eps1: float = 0.5
    eps2: float = 1 / 11
    channel: ch.ChannelConfig = field(default_factory=ch.ChannelConfig)
    hop_channels: dict = field(default_factory=dict)  # hop number -> ChannelConfig
    max_rounds: int = 16
    window: int = 0
    seed: int = 0

    def __post_init__(self):
        PrimeModulus(self.p)
        if self.n is None:
            self.n = self.t
        if self.h is None:
            self.h = self.t * (self.t - 1) + 1
        if self.m is None:
            self.m = self.p // 3
        if self.m < 1:
            raise ValueError("m must be at least 1")
        if not (0 <= self.eps1 <= 1 and 0 <= self.eps2 <= 1):
            raise ValueError("thresholds must lie in [0, 1]")
        if self.max_rounds < 1:
            raise ValueError("max_rounds must be at least 1")
        if self.t < 1 or self.t > self.n:
            raise ValueError(f"need 1 <= t <= n, got t={self.t}, n={self.n}")
        if self.n + 1 >= self.p:
            raise ValueError(f"{self.n + 1} identities do not fit in F_{self.p}")

    @property
    def key_length(self) -> int:
        return self.m * self.p

    def channel_for(self, hop: int) -> ch.ChannelConfig:
        return self.hop_channels.get(hop, self.channel)


@dataclass
class Party:
    identity: int
    share: SharePair
    role: str = HOLDER
    session_keys: dict = field(default_factory=dict)
    harvest: Optional[HarvestState] = None
    key_map: dict = field(default_factory=dict)
    secret: Optional[int] = None
    expected_t0: Optional[int] = None
    setup: Optional[DealerSetup] = None
    K: Optional[list] = None

    def keys_with(self, peer: int) -> SessionKeyPair:
        if peer not in self.session_keys:
            self.session_keys[peer] = derive_session_keys(self.share, peer)
        return self.session_keys[peer]

    def key_sequence(self) -> list:
        if self.role == DEALER:
            return list(self.K)
        return [self.key_map[i] for i in sorted(self.key_map)]


@dataclass
class RoundOutcome:
    kept: bool
    reason: Optional[str] = None
    counts: Optional[tuple] = None
    harvested: dict = field(default_factory=dict)
    residual: list = field(default_factory=list)


def _tick_width(p: int) -> int:
    # base-p digits needed for any 32-bit tick
    return math.ceil(32 / math.log2(p)) + 1


def _tick_digits(tick: int, p: int) -> list:
    out = []
    for _ in range(_tick_width(p)):
        out.append(tick % p)
        tick //= p
    return out


def _tick_from_digits(digits, p: int) -> int:
    return sum(int(d) * p**k for k, d in enumerate(digits))


class Engine:
    def __init__(self, config: ProtocolConfig, rng: np.random.Generator = None, transcript: Transcript = None):
        self.config = config
        self.rng = rng if rng is not None else make_rng(config.seed)
        self.transcript = transcript if transcript is not None else Transcript()
        self.tick = 0
        self.round_no = 0
        self.dealer: Optional[Party] = None
        self.parties: dict = {}
        self.holders: list = []
        self.eve_log: list = []  # (EveRecord, true grid, offset) per intercepted frame

    # ------------------------------------------------------------ setup
    def setup(self, setup: DealerSetup = None, shares: dict = None, K=None):
        """Deal shares, reconstruct the secret among Bob_1..Bob_t, draw K.

        ``setup``/``shares``/``K`` may be injected (worked example, tests).
        """
        cfg = self.config
        p = cfg.p
        if setup is None:
            s = int(self.rng.integers(1, p))
            setup, shares = deal(s, cfg.t, cfg.h, cfg.n, default_identities(cfg.n), self.rng, p=p)
        x0 = setup.dealer
        self.dealer = Party(x0, shares[x0], role=DEALER, setup=setup, secret=setup.secret.value)
        self.parties = {x0: self.dealer}
        for x in setup.identities[1:]:
            self.parties[x] = Party(x, shares[x])
        self.holders = [self.parties[x] for x in setup.identities[1 : cfg.t + 1]]
        self.transcript.record(self.tick, "setup", x0, None, {"p": p, "t": cfg.t, "n": setup.n, "h": setup.h, "identities": list(setup.identities)})
        self._reconstruct_secret()
        if K is None:
            K = self.rng.integers(0, p, size=cfg.key_length).tolist()
        self.dealer.K = [int(k) % p for k in K]
        self.transcript.record(self.tick, "key_generated", x0, None, {"length": len(self.dealer.K)})
        self.tick += 1
        return self

    def _reconstruct_secret(self):
        active = [h.identity for h in self.holders]
        verifier = DealerVerifier(self.dealer.setup, active)
        comps = {h.identity: lagrange_component(h.share, active) for h in self.holders}
        for h in self.holders:
            received = [comps[h.identity]]
            for other in self.holders:
                if other is h:
                    continue
                c = encrypt_component(other.share, comps[other.identity], h.identity)
                self.transcript.record(self.tick, "component", other.identity, h.identity, {"cipher": c.value}, monitoring=1)
                received.append(decrypt_component(h.share, other.identity, c))
            h.secret = reconstruct(received, verifier, h.share).value
            self.transcript.record(self.tick, "secret_verified", self.dealer.identity, h.identity, {"components": len(received) - 1}, monitoring=len(received) - 1)

    # ---------------------------------------------------- classical steps
    def identify(self, sender: Party, receiver: Party, t0: int):
        p = self.config.p
        keys = sender.keys_with(receiver.identity)
        plain = [sender.identity, *_tick_digits(t0, p), keys.k_ji.value]
        nonce = (_NONCE_IDENT, self.round_no)
        cipher = otp_stream_encrypt(plain, keys.k_ij, nonce)
        self.transcript.record(self.tick, "identification", sender.identity, receiver.identity, {"cipher": cipher}, monitoring=len(cipher))

        rkeys = receiver.keys_with(sender.identity)
        got = otp_stream_decrypt(cipher, rkeys.k_ji, nonce)
        ok = got[0] == sender.identity and got[-1] == rkeys.k_ij.value
        self.transcript.record(self.tick, "identification_reply", receiver.identity, sender.identity, {"accepted": ok}, monitoring=1)
        if not ok:
            raise AuthReject(f"{receiver.identity} rejected identification from {sender.identity}")
        receiver.expected_t0 = _tick_from_digits(got[1:-1], p)

    def broadcast_r_sequence(self, sender: Party, receiver: Party, rows: int, r_vec=None) -> list:
        p = self.config.p
        if r_vec is None:
            r_vec = self.rng.integers(0, p, size=rows).tolist()
        r_vec = [int(r) % p for r in r_vec]
        key = sender.keys_with(receiver.identity).k_ij
        nonce = (_NONCE_BASES, self.round_no)
        cipher = otp_stream_encrypt(r_vec, key, nonce)
        tag = keyed_digest([key], serialize_tuple([_NONCE_BASES, self.round_no, *r_vec]))
        self.transcript.record(self.tick, "basis_broadcast", sender.identity, receiver.identity, {"cipher": cipher, "tag": tag.hex()}, monitoring=len(cipher) + 1)

        rkey = receiver.keys_with(sender.identity).k_ji
        got = otp_stream_decrypt(cipher, rkey, nonce)
        if keyed_digest([rkey], serialize_tuple([_NONCE_BASES, self.round_no, *got])) != tag:
            raise DecryptMismatch(f"{receiver.identity} could not decrypt the basis sequence")
        return got

    def harvest_verifier(self, layout: GridLayout, truth: dict):
        """Alice's check of a receiver's (S, I) digest against the true key."""
        s = self.dealer.setup.secret.value

        def verify(receiver, S, digest):
            values = []
            for k, i, _ in S:
                idx = layout.index_of(k, i)
                if idx is None:
                    return False
                values.append(truth[idx])
            ok = harvest_digest(s, receiver, S, values) == digest
            self.transcript.record(self.tick, "dealer_verdict", self.dealer.identity, receiver, {"entries": len(S), "accepted": ok}, monitoring=2)
            return ok

        return verify

    # ------------------------------------------------------------ rounds
    def distribution_round(self, sender: Party, receiver: Party, residual, hop: int = 1, r_vec=None) -> RoundOutcome:
        cfg = self.config
        p = cfg.p
        self.round_no += 1
        residual = sorted(residual)
        source = dict(enumerate(sender.key_sequence(), start=1))
        truth = dict(enumerate(self.dealer.K, start=1))
        self.transcript.record(self.tick, "round_start", sender.identity, receiver.identity, {"round": self.round_no, "hop": hop, "residual": len(residual)})

        t0 = self.tick + 1
        self.identify(sender, receiver, t0)
        layout = GridLayout.pack(residual, p)
        r_vec = self.broadcast_r_sequence(sender, receiver, layout.rows, r_vec)

        padding = layout.padding
        values = [source[idx] if idx is not None else int(self.rng.integers(0, p)) for idx in layout.cells]
        if padding:
            flat = [c for cell in padding for c in cell]
            key = sender.keys_with(receiver.identity).k_ij
            cipher = otp_stream_encrypt(flat, key, (_NONCE_PADDING, self.round_no))
            self.transcript.record(self.tick, "padding_positions", sender.identity, receiver.identity, {"cipher": cipher}, payload_symbols=len(cipher))

        grid = encode(values, layout.cols, layout.rows)
        offset = sender.keys_with(receiver.identity).k_ji.value  # F(x_R, x_S)
        frame = ch.prepare_frame(grid, r_vec, offset, t0, p)
        self.tick = t0
        link = cfg.channel_for(hop)
        delivered, eve, arrival = ch.transmit(frame, link, self.rng)
        self.transcript.record(self.tick, "frame_sent", sender.identity, receiver.identity, {"cells": frame.size, "rows": layout.rows, "cols": layout.cols}, qudits=frame.size)
        if eve is not None:
            self.eve_log.append((eve, grid, offset))
            self.transcript.record(self.tick, "intercepted", "eve", receiver.identity, {"count": eve.count})

        self.tick = max(self.tick, arrival)
        try:
            table = ch.receive_measure(
                delivered, r_vec, receiver.keys_with(sender.identity).k_ij.value,
                receiver.expected_t0 + ch.HONEST_DELAY, cfg.window, self.rng, noise=link.noise,
            )
        except TimingViolation as exc:
            return self._abort(sender, receiver, "timing", residual, {"arrival": exc.arrival, "expected": exc.expected})

        c = classify(table)
        decision = threshold_decision(c, cfg.eps1, cfg.eps2)
        self.transcript.record(self.tick, "measured", receiver.identity, sender.identity, {"S1": len(c.S1), "S2": len(c.S2), "S3": len(c.S3), "decision": decision.value})
        if decision is Decision.ABORT:
            return self._abort(sender, receiver, "threshold", residual, {"counts": list(c.counts)}, counts=c.counts)

        verify = self.harvest_verifier(layout, truth)
        h = harvest_s3(c, skip=frozenset(padding))
        h = extend(h, verify, receiver.identity, receiver.secret)
        final = harvest_digest(receiver.secret, receiver.identity, h.S, h.I)
        if not verify(receiver.identity, h.S, final):
            return self._abort(sender, receiver, "harvest_digest", residual, {"entries": len(h.S)}, counts=c.counts)

        receiver.harvest = h
        got, left = harvested_subsequence(h, layout)
        receiver.key_map.update(got)
        self.transcript.record(self.tick, "round_kept", receiver.identity, sender.identity, {"harvested": len(got), "residual": left})
        self.tick += 1
        return RoundOutcome(True, None, c.counts, got, left)

    def _abort(self, sender, receiver, reason, residual, detail, counts=None):
        self.transcript.record(self.tick, "round_aborted", receiver.identity, sender.identity, {"reason": reason, **detail})
        self.tick += 1
        return RoundOutcome(False, reason, counts, {}, list(residual))

    def full_distribution(self, sender: Party, receiver: Party, hop: int = 1) -> dict:
        cfg = self.config
        residual = list(range(1, len(sender.key_sequence()) + 1))
        rounds = 0
        while residual:
            if rounds == cfg.max_rounds:
                self.transcript.record(self.tick, "hop_failed", sender.identity, receiver.identity, {"hop": hop, "rounds": rounds, "residual": residual})
                raise MaxRoundsExceeded(rounds, residual)
            rounds += 1
            outcome = self.distribution_round(sender, receiver, residual, hop)
            residual = outcome.residual
        self.transcript.record(self.tick, "hop_complete", sender.identity, receiver.identity, {"hop": hop, "rounds": rounds})
        return receiver.key_map

    def chain(self, parties=None) -> list:
        """Relay K from Alice along Bob_1 .. Bob_t.

        Raises :class:`HopFailed` naming the first hop that did not finish.
        """
        if parties is None:
            parties = [self.dealer, *self.holders]
        for hop in range(1, len(parties)):
            sender, receiver = parties[hop - 1], parties[hop]
            try:
                self.full_distribution(sender, receiver, hop)
            except (AuthReject, DecryptMismatch, MaxRoundsExceeded) as exc:
                raise HopFailed(hop, exc) from exc
        self.transcript.record(self.tick, "chain_complete", parties[0].identity, None, {"hops": len(parties) - 1}, key=len(self.dealer.K))
        return [dict(p.key_map) for p in parties[1:]]


def run_chain(config: ProtocolConfig, rng=None, transcript=None) -> Engine:
    """Set up and run a full chain; returns the engine for inspection."""
    eng = Engine(config, rng, transcript).setup()
    eng.chain()
    return eng


def efficiency(transcript: Transcript) -> Fraction:
    """Shared key symbols per qudit plus non-monitoring classical symbol."""
    done = transcript.of_type("chain_complete")
    if not done:
        raise IncompleteRun("transcript has no completed chain")
    c = transcript.events[-1]["counters"]
    return Fraction(c["key"], c["qudits"] + c["payload"])
