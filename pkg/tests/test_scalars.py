from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from qpbkit.scalars import (CycScalar, ScalarError, as_scalar, cyc, is_strictly_positive, one,
                            sqrt_rational, zero)

N = 12
rat = st.fractions(min_value=-5, max_value=5, max_denominator=7)
elem = st.lists(rat, min_size=4, max_size=4).map(lambda c: CycScalar(c, N))


@given(elem, elem, elem)
def test_field_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a
    assert a + zero(N) == a and a * one(N) == a
    if not a.is_zero():
        assert a * a.inverse() == one(N)


@given(elem, elem)
def test_conj_is_multiplicative_involution(a, b):
    assert (a * b).conj() == a.conj() * b.conj()
    assert (a + b).conj() == a.conj() + b.conj()
    assert a.conj().conj() == a


@given(elem)
def test_norm_is_nonnegative(a):
    n = a * a.conj()
    assert n.conj() == n
    assert n.is_zero() or n.real_sign() > 0


def test_roots_of_unity():
    z = cyc(1, 1, 1, 8)
    acc = one(8)
    for _ in range(8):
        acc = acc * z
    assert acc == one(8)
    assert z.conj() == cyc(1, 1, 7, 8)
    assert z * z == cyc(1, 1, 1, 4).promote(8)


def test_promotion_preserves_value():
    i4 = cyc(1, 1, 1, 4)
    assert abs(i4.promote(12).to_complex() - 1j) < 1e-12
    assert as_scalar(i4, 3) == i4.promote(12)


@pytest.mark.parametrize("x", [2, 3, 5, 6, 7, 11, 12, Fraction(1, 2), Fraction(9, 4), Fraction(3, 7)])
def test_sqrt_rational_exact(x):
    r = sqrt_rational(x)
    assert r is not None
    assert r * r == as_scalar(Fraction(x), r.conductor)
    assert r.real_sign() > 0


def test_sqrt_rational_rejects():
    assert sqrt_rational(0) is None
    assert sqrt_rational(-3) is None
    assert sqrt_rational(cyc(1, 1, 1, 4)) is None


def _sylvester(rows):
    # oracle: leading minors by Fraction cofactor expansion
    def det(m):
        if not m:
            return Fraction(1)
        return sum((-1) ** j * m[0][j] * det([r[:j] + r[j + 1:] for r in m[1:]]) for j in range(len(m)))
    return all(det([r[:k] for r in rows[:k]]) > 0 for k in range(1, len(rows) + 1))


sym = st.integers(1, 4).flatmap(
    lambda n: st.lists(st.lists(st.fractions(-3, 3, max_denominator=4), min_size=n, max_size=n),
                       min_size=n, max_size=n))


@given(sym)
def test_positive_definite_matches_minor_oracle(m):
    n = len(m)
    h = [[m[i][j] if i <= j else m[j][i] for j in range(n)] for i in range(n)]
    assert is_strictly_positive([[as_scalar(x) for x in r] for r in h]) == _sylvester(h)


@given(st.integers(1, 3), st.integers(0, 10))
def test_gram_of_cyclotomic_vectors_is_positive(n, seed):
    # G = V V* + I with entries in Q(zeta_5)
    V = [[cyc((i * 7 + j * 3 + seed) % 5 - 2, 1, i + j + seed, 5) for j in range(n)] for i in range(n)]
    G = [[sum((V[i][k] * V[j][k].conj() for k in range(n)), zero(5)) + (one(5) if i == j else zero(5))
          for j in range(n)] for i in range(n)]
    assert is_strictly_positive(G)
    G[0][0] = G[0][0] - G[0][0] - one(5)
    assert not is_strictly_positive(G)


def test_non_hermitian_rejected():
    with pytest.raises(ScalarError):
        is_strictly_positive([[one(4), cyc(1, 1, 1, 4)], [cyc(1, 1, 1, 4), one(4)]])
