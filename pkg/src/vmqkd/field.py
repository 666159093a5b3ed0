"""Prime-field arithmetic and the polynomials the sharing scheme is built on.

Elements are kept in canonical form ``0 <= value < p``. Polynomials store
plain integer coefficients (already reduced) next to their modulus, which
keeps evaluation cheap; results come back as :class:`FieldElement`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence, Union

from .errors import DuplicateNode, ModulusMismatch, NotPrime, ZeroInverse


def is_prime(n: int) -> bool:
    """Deterministic trial division; fine for the small moduli used here."""
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    i = 3
    while i * i <= n:
        if n % i == 0:
            return False
        i += 2
    return True


@dataclass(frozen=True)
class PrimeModulus:
    """An odd prime ``p``. Calling the instance builds an element of F_p."""

    p: int

    def __post_init__(self):
        p = int(self.p)
        if p < 3 or p % 2 == 0 or not is_prime(p):
            raise NotPrime(f"{self.p} is not an odd prime")
        object.__setattr__(self, "p", p)

    def __call__(self, value) -> "FieldElement":
        return FieldElement(int(value), self)

    def __int__(self):
        return self.p

    def elements(self):
        return [FieldElement(v, self) for v in range(self.p)]


@dataclass(frozen=True)
class FieldElement:
    value: int
    modulus: PrimeModulus

    def __post_init__(self):
        object.__setattr__(self, "value", int(self.value) % self.modulus.p)

    @property
    def p(self) -> int:
        return self.modulus.p

    def _other(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.modulus.p != self.modulus.p:
                raise ModulusMismatch(f"F_{self.p} vs F_{other.p}")
            return other.value
        return int(other)

    def __add__(self, other):
        return FieldElement(self.value + self._other(other), self.modulus)

    __radd__ = __add__

    def __sub__(self, other):
        return FieldElement(self.value - self._other(other), self.modulus)

    def __rsub__(self, other):
        return FieldElement(self._other(other) - self.value, self.modulus)

    def __mul__(self, other):
        return FieldElement(self.value * self._other(other), self.modulus)

    __rmul__ = __mul__

    def __neg__(self):
        return FieldElement(-self.value, self.modulus)

    def __truediv__(self, other):
        return self * inverse(self.modulus(self._other(other)))

    def __pow__(self, e: int):
        if e < 0:
            return inverse(self) ** (-e)
        return FieldElement(pow(self.value, e, self.p), self.modulus)

    def __int__(self):
        return self.value

    def __index__(self):
        return self.value

    def __repr__(self):
        return f"{self.value} (mod {self.p})"

    def to_bytes(self) -> bytes:
        return serialize_element(self.value)


Scalar = Union[int, FieldElement]


def serialize_element(value: Scalar) -> bytes:
    """8-byte big-endian encoding used as hash input everywhere."""
    return int(value).to_bytes(8, "big")


def _check_same(a: FieldElement, b: FieldElement):
    if a.modulus.p != b.modulus.p:
        raise ModulusMismatch(f"F_{a.p} vs F_{b.p}")


def _as_int(x: Scalar, modulus: PrimeModulus) -> int:
    if isinstance(x, FieldElement):
        if x.modulus.p != modulus.p:
            raise ModulusMismatch(f"F_{x.p} vs F_{modulus.p}")
        return x.value
    return int(x) % modulus.p


def add(a: FieldElement, b: FieldElement) -> FieldElement:
    _check_same(a, b)
    return FieldElement(a.value + b.value, a.modulus)


def inverse(a: FieldElement) -> FieldElement:
    """Multiplicative inverse by the extended Euclidean algorithm."""
    p = a.p
    if a.value == 0:
        raise ZeroInverse(f"0 has no inverse mod {p}")
    old_r, r = a.value, p
    old_s, s = 1, 0
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_s, s = s, old_s - q * s
    return FieldElement(old_s, a.modulus)


def inv_int(a: int, p: int) -> int:
    return inverse(FieldElement(a, PrimeModulus(p))).value


@dataclass(frozen=True)
class UniPoly:
    """Univariate polynomial, coefficients low degree first."""

    coeffs: tuple
    modulus: PrimeModulus

    def __post_init__(self):
        p = self.modulus.p
        object.__setattr__(self, "coeffs", tuple(_as_int(c, self.modulus) % p for c in self.coeffs))

    @property
    def coefficients(self) -> list:
        return [FieldElement(c, self.modulus) for c in self.coeffs]

    @property
    def degree(self) -> int:
        for d in range(len(self.coeffs) - 1, -1, -1):
            if self.coeffs[d]:
                return d
        return -1

    def __call__(self, x: Scalar) -> FieldElement:
        return eval_uni(self, x)


@dataclass(frozen=True)
class BiPoly:
    """F(x, y) = sum a[i][j] x^i y^j with i < t (x-degree) and j < h (y-degree)."""

    a: tuple
    modulus: PrimeModulus

    def __post_init__(self):
        rows = tuple(tuple(_as_int(c, self.modulus) for c in row) for row in self.a)
        if not rows or any(len(r) != len(rows[0]) for r in rows):
            raise ValueError("coefficient matrix must be rectangular and non-empty")
        object.__setattr__(self, "a", rows)

    @property
    def x_terms(self) -> int:
        return len(self.a)

    @property
    def y_terms(self) -> int:
        return len(self.a[0])

    def __call__(self, x: Scalar, y: Scalar) -> FieldElement:
        return eval_bi(self, x, y)


def _horner(coeffs: Sequence[int], x: int, p: int) -> int:
    acc = 0
    for c in reversed(coeffs):
        acc = (acc * x + c) % p
    return acc


def eval_uni(f: UniPoly, x: Scalar) -> FieldElement:
    xv = _as_int(x, f.modulus)
    return FieldElement(_horner(f.coeffs, xv, f.modulus.p), f.modulus)


def eval_bi(F: BiPoly, x: Scalar, y: Scalar) -> FieldElement:
    p = F.modulus.p
    xv, yv = _as_int(x, F.modulus), _as_int(y, F.modulus)
    row_vals = [_horner(row, yv, p) for row in F.a]
    return FieldElement(_horner(row_vals, xv, p), F.modulus)


def restrict_x(F: BiPoly, x0: Scalar) -> UniPoly:
    """F(x0, y) as a polynomial in y."""
    p = F.modulus.p
    xv = _as_int(x0, F.modulus)
    powers = [pow(xv, i, p) for i in range(F.x_terms)]
    coeffs = [sum(F.a[i][j] * powers[i] for i in range(F.x_terms)) % p for j in range(F.y_terms)]
    return UniPoly(tuple(coeffs), F.modulus)


def restrict_y(F: BiPoly, y0: Scalar) -> UniPoly:
    """F(x, y0) as a polynomial in x."""
    p = F.modulus.p
    yv = _as_int(y0, F.modulus)
    return UniPoly(tuple(_horner(row, yv, p) for row in F.a), F.modulus)


def lagrange_weight(i: int, xs: Sequence[Scalar], modulus: PrimeModulus = None) -> FieldElement:
    """Weight of node ``xs[i]`` when interpolating at zero.

    prod_{j != i} (-x_j) / (x_i - x_j) mod p
    """
    if modulus is None:
        modulus = next((x.modulus for x in xs if isinstance(x, FieldElement)), None)
        if modulus is None:
            raise ValueError("modulus required when nodes are plain integers")
    p = modulus.p
    nodes = [_as_int(x, modulus) for x in xs]
    if len(set(nodes)) != len(nodes):
        raise DuplicateNode(f"interpolation nodes are not distinct: {nodes}")
    num, den = 1, 1
    xi = nodes[i]
    for j, xj in enumerate(nodes):
        if j == i:
            continue
        num = num * (-xj) % p
        den = den * (xi - xj) % p
    return FieldElement(num, modulus) * inverse(FieldElement(den, modulus))


def interpolate_at_zero(points: Iterable[tuple], modulus: PrimeModulus = None) -> FieldElement:
    points = list(points)
    if not points:
        raise ValueError("need at least one point")
    if modulus is None:
        modulus = next(
            (v.modulus for pt in points for v in pt if isinstance(v, FieldElement)), None
        )
        if modulus is None:
            raise ValueError("modulus required when points are plain integers")
    xs = [x for x, _ in points]
    total = FieldElement(0, modulus)
    for i, (_, y) in enumerate(points):
        total = total + lagrange_weight(i, xs, modulus) * _as_int(y, modulus)
    return total
