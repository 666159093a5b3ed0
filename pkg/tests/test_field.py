import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vmqkd.errors import DuplicateNode, ModulusMismatch, NotPrime, ZeroInverse
from vmqkd.field import (
    BiPoly,
    PrimeModulus,
    UniPoly,
    add,
    eval_bi,
    eval_uni,
    interpolate_at_zero,
    inverse,
    is_prime,
    lagrange_weight,
    restrict_x,
    restrict_y,
    serialize_element,
)

F11 = PrimeModulus(11)
EXAMPLE = BiPoly(
    [[7, 1, 2, 1, 1, 1, 1, 1], [2, 1, 1, 1, 1, 1, 1, 1], [3, 1, 1, 1, 1, 1, 1, 1]], F11
)


def brute_eval(a, x, y, p):
    """Term-by-term sum, no Horner."""
    return sum(a[i][j] * x**i * y**j for i in range(len(a)) for j in range(len(a[0]))) % p


def brute_inverse(a, p):
    return next(b for b in range(1, p) if a * b % p == 1)


def test_prime_modulus_rejects_bad_values():
    for bad in (1, 2, 4, 9, 15, 21):
        with pytest.raises(NotPrime):
            PrimeModulus(bad)
    assert PrimeModulus(13).p == 13
    assert [n for n in range(30) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]


@pytest.mark.parametrize("p,a,b,expected", [(11, 7, 8, 4), (11, 0, 9, 9), (3, 2, 2, 1)])
def test_add(p, a, b, expected):
    F = PrimeModulus(p)
    assert add(F(a), F(b)).value == expected


def test_add_modulus_mismatch():
    with pytest.raises(ModulusMismatch):
        add(PrimeModulus(11)(1), PrimeModulus(7)(1))
    with pytest.raises(ModulusMismatch):
        PrimeModulus(11)(1) * PrimeModulus(13)(2)


def test_canonical_representative():
    assert F11(-1).value == 10
    assert F11(25).value == 3


@pytest.mark.parametrize("p,a,expected", [(11, 2, 6), (11, 1, 1), (7, 3, 5)])
def test_inverse_examples(p, a, expected):
    assert inverse(PrimeModulus(p)(a)).value == expected


def test_zero_has_no_inverse():
    with pytest.raises(ZeroInverse):
        inverse(F11(0))


@pytest.mark.parametrize("p", [3, 5, 7, 11, 13, 101, 1009])
def test_inverse_matches_brute_force(p):
    F = PrimeModulus(p)
    for a in range(1, p):
        inv = inverse(F(a))
        assert (F(a) * inv).value == 1
        assert inv.value == brute_inverse(a, p)


def test_serialization_is_8_byte_big_endian():
    assert serialize_element(F11(7)) == b"\x00" * 7 + b"\x07"
    assert F11(10).to_bytes() == (10).to_bytes(8, "big")


def test_eval_uni_examples():
    assert eval_uni(UniPoly((4, 9, 10), F11), 9).value == 4
    assert eval_uni(UniPoly((6,), F11), 3).value == 6
    f = UniPoly((1, 3, 4, 3, 3, 3, 3, 3), F11)
    expected = sum(c * 9**k for k, c in enumerate(f.coeffs)) % 11
    assert expected == 0
    assert eval_uni(f, 9).value == expected


def test_eval_bi_worked_example():
    assert eval_bi(EXAMPLE, 0, 0).value == 7
    assert eval_bi(EXAMPLE, 9, 1).value == 4 == brute_eval(EXAMPLE.a, 9, 1, 11)


def test_restrictions_worked_example():
    assert restrict_x(EXAMPLE, 9).coeffs == (4, 3, 4, 3, 3, 3, 3, 3)
    assert restrict_y(EXAMPLE, 1).coeffs == (4, 9, 10)
    # collect sum_j a[i][j] 9^j per power of x
    oracle = tuple(sum(EXAMPLE.a[i][j] * 9**j for j in range(8)) % 11 for i in range(3))
    assert restrict_y(EXAMPLE, 9).coeffs == oracle == (2, 4, 5)


def _random_bipoly(r, p, t, h):
    return BiPoly([[r.randrange(p) for _ in range(h)] for _ in range(t)], PrimeModulus(p))


def test_restriction_consistency_random():
    r = random.Random(7)
    for _ in range(200):
        p = r.choice([3, 5, 7, 11, 13, 31])
        F = _random_bipoly(r, p, r.randint(1, 4), r.randint(1, 6))
        x, y = r.randrange(p), r.randrange(p)
        v = eval_bi(F, x, y).value
        assert v == brute_eval(F.a, x, y, p)
        assert eval_uni(restrict_x(F, x), y).value == v
        assert eval_uni(restrict_y(F, y), x).value == v


def test_lagrange_weight_examples():
    # (-2/(1-2)) * (-3/(1-3)) mod 11 with brute-force inverses
    oracle = (-2 * brute_inverse((1 - 2) % 11, 11)) * (-3 * brute_inverse((1 - 3) % 11, 11)) % 11
    assert oracle == 3
    assert lagrange_weight(0, [1, 2, 3], F11).value == 3
    assert lagrange_weight(0, [F11(5)]).value == 1


def test_lagrange_weights_recover_constant_term():
    xs = [1, 2, 3, 4]
    assert sum(lagrange_weight(i, xs, F11).value for i in range(4)) % 11 == 1


def test_duplicate_nodes_rejected():
    with pytest.raises(DuplicateNode):
        lagrange_weight(0, [1, 12], F11)
    with pytest.raises(DuplicateNode):
        interpolate_at_zero([(1, 2), (1, 3)], F11)


def test_interpolate_constant():
    assert interpolate_at_zero([(F11(1), F11(5)), (F11(2), F11(5)), (F11(7), F11(5))]).value == 5


def test_interpolate_random_polynomials():
    r = random.Random(3)
    for _ in range(100):
        p = r.choice([5, 7, 11, 13])
        t = r.randint(1, 4)
        coeffs = [r.randrange(p) for _ in range(t)]
        f = UniPoly(coeffs, PrimeModulus(p))
        xs = r.sample(range(1, p), t)
        assert interpolate_at_zero([(x, f(x)) for x in xs], PrimeModulus(p)).value == coeffs[0]


def test_interpolate_worked_example_secret():
    pts = [(x, eval_bi(EXAMPLE, x, 0)) for x in (1, 2, 3)]
    assert interpolate_at_zero(pts, F11).value == 7


@pytest.mark.parametrize("p", [5, 7, 11, 13])
def test_interpolation_exhaustive_node_subsets(p):
    F = PrimeModulus(p)
    r = random.Random(p)
    for t in range(1, 5):
        coeffs = [r.randrange(p) for _ in range(t)]
        f = UniPoly(coeffs, F)
        for nodes in itertools.combinations(range(1, p), t):
            assert interpolate_at_zero([(x, f(x)) for x in nodes], F).value == coeffs[0]


@settings(max_examples=200, deadline=None)
@given(st.sampled_from([3, 5, 7, 11, 13, 997]), st.integers(), st.integers())
def test_field_axioms(p, a, b):
    F = PrimeModulus(p)
    x, y = F(a), F(b)
    assert (x + y) - y == x
    assert x * y == y * x
    assert x + (-x) == F(0)
    if x.value:
        assert x * inverse(x) == F(1)
        assert (y / x) * x == y
