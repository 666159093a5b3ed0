"""Protected (t, n) threshold sharing with bivariate polynomials.

Alice (the dealer, identity ``x_0``) picks F(x, y) with deg_x < t,
deg_y < h and secret ``s = F(0, 0)``. Participant ``i`` receives the pair
``row = F(x, x_i)`` and ``col = F(x_i, y)``. Any two participants can then
evaluate the same two session keys F(x_i, x_j), F(x_j, x_i); a set of ``t``
participants reconstructs ``s`` from Lagrange components, each checked by
the dealer through a keyed digest so a forged component names its owner.

Direction convention: a message from ``i`` to ``j`` is always padded with
F(x_i, x_j).
"""

from __future__ import annotations

import hashlib
import hmac
import itertools
import warnings
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import (
    BadActiveSize,
    BadComponentCount,
    BadIdentity,
    BadThreshold,
    NotInActiveSet,
    SelfPeer,
    VerificationFailed,
)
from .field import (
    BiPoly,
    FieldElement,
    PrimeModulus,
    UniPoly,
    eval_bi,
    lagrange_weight,
    restrict_x,
    restrict_y,
    serialize_element,
)


def serialize_tuple(values: Sequence) -> bytes:
    """4-byte big-endian count followed by 8-byte big-endian elements."""
    values = [int(v) for v in values]
    return len(values).to_bytes(4, "big") + b"".join(serialize_element(v) for v in values)


def keyed_digest(key_elems: Sequence, message: bytes) -> bytes:
    key = b"".join(serialize_element(int(k)) for k in key_elems)
    return hmac.new(key, message, hashlib.sha256).digest()


def otp_encrypt(m: FieldElement, key: FieldElement) -> FieldElement:
    return m + key


def otp_decrypt(c: FieldElement, key: FieldElement) -> FieldElement:
    return c - key


def pad_stream(key: FieldElement, count: int, nonce: Sequence = ()) -> list:
    """Keystream for padding a tuple under a single field-element key.

    Element ``i`` is ``key + int(first 8 bytes of H_key(nonce..., i)) mod p``.
    Callers that pad several messages under one key pass distinct nonces.
    """
    p = key.p
    out = []
    for i in range(count):
        d = keyed_digest([key], serialize_tuple([*nonce, i]))
        out.append((key.value + int.from_bytes(d[:8], "big")) % p)
    return out


def otp_stream_encrypt(values: Sequence, key: FieldElement, nonce: Sequence = ()) -> list:
    p = key.p
    pads = pad_stream(key, len(values), nonce)
    return [(int(v) + k) % p for v, k in zip(values, pads)]


def otp_stream_decrypt(cipher: Sequence, key: FieldElement, nonce: Sequence = ()) -> list:
    p = key.p
    pads = pad_stream(key, len(cipher), nonce)
    return [(int(c) - k) % p for c, k in zip(cipher, pads)]


@dataclass(frozen=True)
class DealerSetup:
    F: BiPoly
    modulus: PrimeModulus
    t: int
    h: int
    identities: tuple  # x_0 (dealer) first, then x_1..x_n

    @property
    def n(self) -> int:
        return len(self.identities) - 1

    @property
    def dealer(self) -> int:
        return self.identities[0]

    @property
    def secret(self) -> FieldElement:
        return eval_bi(self.F, 0, 0)


@dataclass(frozen=True)
class SharePair:
    row: UniPoly  # F(x, x_i), t coefficients
    col: UniPoly  # F(x_i, y), h coefficients
    owner: int

    @property
    def modulus(self) -> PrimeModulus:
        return self.row.modulus

    @property
    def t(self) -> int:
        return len(self.row.coeffs)


@dataclass(frozen=True)
class SessionKeyPair:
    owner: int
    peer: int
    k_ij: FieldElement  # F(x_owner, x_peer)
    k_ji: FieldElement  # F(x_peer, x_owner)


@dataclass(frozen=True)
class LagrangeComponent:
    owner: int
    delta: FieldElement


def _check_identities(identities, p):
    ids = [int(x) for x in identities]
    reduced = [x % p for x in ids]
    if any(x == 0 for x in reduced):
        raise BadIdentity("identities must be nonzero mod p")
    if len(set(reduced)) != len(reduced):
        raise BadIdentity(f"identities are not distinct mod {p}: {ids}")
    return tuple(reduced)


def default_identities(n: int) -> tuple:
    """Bobs get 1..n, Alice gets n + 1 (the layout of the worked example)."""
    return (n + 1,) + tuple(range(1, n + 1))


def deal_polynomial(F: BiPoly, t: int, identities: Sequence[int]):
    """Hand out share pairs for an explicit polynomial.

    Returns ``(setup, shares)`` where ``shares`` is keyed by identity and
    includes the dealer's own pair.
    """
    modulus = F.modulus
    if F.x_terms != t:
        raise BadThreshold(f"polynomial has x-degree bound {F.x_terms}, threshold is {t}")
    ids = _check_identities(identities, modulus.p)
    if t < 1 or t > len(ids) - 1:
        raise BadThreshold(f"threshold {t} with {len(ids) - 1} participants")
    setup = DealerSetup(F, modulus, t, F.y_terms, ids)
    shares = {x: SharePair(restrict_y(F, x), restrict_x(F, x), x) for x in ids}
    return setup, shares


def deal(s, t: int, h: int = None, n: int = None, identities=None, rng=None, p: int = None):
    """Draw a random F with F(0, 0) = s and deal it.

    ``s`` may be a FieldElement or, together with ``p``, an int.
    ``h`` defaults to t(t - 1) + 1, the smallest value with confidentiality
    against t - 1 colluders.
    """
    if isinstance(s, FieldElement):
        modulus = s.modulus
    else:
        modulus = PrimeModulus(p)
        s = modulus(s)
    if identities is None:
        if n is None:
            raise ValueError("need n or identities")
        identities = default_identities(n)
    if n is None:
        n = len(identities) - 1
    if len(identities) != n + 1:
        raise BadIdentity(f"expected {n + 1} identities (dealer plus {n}), got {len(identities)}")
    if t < 1 or t > n:
        raise BadThreshold(f"threshold {t} with {n} participants")
    if h is None:
        h = t * (t - 1) + 1
    if h <= t * (t - 1):
        warnings.warn(f"h={h} <= t(t-1)={t * (t - 1)}: coalitions may learn the secret")
    if rng is None:
        rng = np.random.default_rng()
    a = rng.integers(0, modulus.p, size=(t, h)).tolist()
    a[0][0] = s.value
    return deal_polynomial(BiPoly(a, modulus), t, identities)


def derive_session_keys(my_share: SharePair, peer: int) -> SessionKeyPair:
    if int(peer) % my_share.modulus.p == my_share.owner:
        raise SelfPeer(f"participant {peer} cannot pair with itself")
    return SessionKeyPair(my_share.owner, int(peer), my_share.col(peer), my_share.row(peer))


def lagrange_component(my_share: SharePair, active: Sequence[int]) -> LagrangeComponent:
    active = [int(x) for x in active]
    if my_share.owner not in active:
        raise NotInActiveSet(f"{my_share.owner} not in {active}")
    if len(active) != my_share.t:
        raise BadActiveSize(f"need {my_share.t} active participants, got {len(active)}")
    w = lagrange_weight(active.index(my_share.owner), active, my_share.modulus)
    return LagrangeComponent(my_share.owner, my_share.col(0) * w)


def encrypt_component(my_share: SharePair, component: LagrangeComponent, peer: int) -> FieldElement:
    """c_{i,j}: the component padded with F(x_i, x_j)."""
    return otp_encrypt(component.delta, derive_session_keys(my_share, peer).k_ij)


def decrypt_component(my_share: SharePair, sender: int, cipher: FieldElement) -> LagrangeComponent:
    key = derive_session_keys(my_share, sender).k_ji  # F(x_sender, x_me)
    return LagrangeComponent(int(sender), otp_decrypt(cipher, key))


def component_digest(receiver: SharePair, component: LagrangeComponent) -> bytes:
    """H_{F(x_j, x_i)}(x_i, delta_j) sent by receiver i about owner j's component."""
    key = receiver.row(component.owner)  # F(x_owner, x_receiver)
    return keyed_digest([key], serialize_tuple([receiver.owner, component.delta]))


class DealerVerifier:
    """Alice's side of component verification, holding the dealer setup."""

    def __init__(self, setup: DealerSetup, active: Sequence[int]):
        self.setup = setup
        self.active = [int(x) for x in active]
        self.t = setup.t
        F = setup.F
        self._true = {}
        for idx, x in enumerate(self.active):
            w = lagrange_weight(idx, self.active, setup.modulus)
            self._true[x] = eval_bi(F, x, 0) * w

    def check(self, receiver: int, owner: int, digest: bytes) -> bool:
        if owner not in self._true:
            return False
        key = eval_bi(self.setup.F, owner, receiver)
        expected = keyed_digest([key], serialize_tuple([receiver, self._true[owner]]))
        return hmac.compare_digest(expected, digest)

    __call__ = check


def reconstruct(
    components: Sequence[LagrangeComponent],
    verifier: Callable[[int, int, bytes], bool],
    holder: SharePair,
    t: int = None,
) -> FieldElement:
    """Sum the components after the dealer has confirmed every foreign one.

    Raises :class:`VerificationFailed` naming the first owner whose
    component the dealer rejects.
    """
    if t is None:
        t = getattr(verifier, "t", holder.t)
    if len(components) != t:
        raise BadComponentCount(f"expected {t} components, got {len(components)}")
    total = FieldElement(0, holder.modulus)
    for comp in components:
        if comp.owner != holder.owner:
            if not verifier(holder.owner, comp.owner, component_digest(holder, comp)):
                raise VerificationFailed(comp.owner)
        total = total + comp.delta
    return total


def secret_candidates(view_share: SharePair, view_component: LagrangeComponent, active, h: int):
    """Every secret consistent with one participant's view.

    Enumerates all p^(t*h) coefficient matrices; only practical for tiny
    parameters (p=5, t=2, h=3 is 15625 polynomials).
    """
    p = view_share.modulus.p
    t = view_share.t
    x = view_share.owner
    active = [int(a) for a in active]
    w = lagrange_weight(active.index(x), active, view_share.modulus).value
    grid = np.array(list(itertools.product(range(p), repeat=t * h)), dtype=np.int64).reshape(-1, t, h)
    xp = np.array([pow(x, i, p) for i in range(t)])
    yp = np.array([pow(x, j, p) for j in range(h)])
    row = np.einsum("nij,j->ni", grid, yp) % p  # F(., x) coefficients in x
    col = np.einsum("nij,i->nj", grid, xp) % p  # F(x, .) coefficients in y
    ok = np.all(row == np.array(view_share.row.coeffs), axis=1)
    ok &= np.all(col == np.array(view_share.col.coeffs), axis=1)
    ok &= (col[:, 0] * w) % p == view_component.delta.value
    return sorted(set(grid[ok, 0, 0].tolist()))
