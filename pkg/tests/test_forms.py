import pytest
from hypothesis import given, strategies as st

from qpbkit.forms import PathCalculus
from qpbkit.scalars import as_scalar


@pytest.mark.parametrize("n,cap", [(1, 2), (2, 3), (3, 2)])
def test_dimensions_and_checks(n, cap):
    P = PathCalculus(n, cap)
    assert [P.dim(k) for k in range(cap + 1)] == [n * (n - 1) ** k for k in range(cap + 1)]
    assert all(c.passed for c in P.checks())


def test_cap_bounds():
    with pytest.raises(ValueError):
        PathCalculus(2, 4)


def forms(P, k):
    return st.lists(st.integers(-3, 3), min_size=P.dim(k), max_size=P.dim(k)).map(
        lambda v: [as_scalar(x) for x in v])


P3 = PathCalculus(3, 2)


@given(forms(P3, 0), forms(P3, 1))
def test_leibniz_and_d_squared(a, w):
    lhs = P3.d(1, P3.mul(0, a, 1, w))
    rhs = [x + y for x, y in zip(P3.mul(1, P3.d(0, a), 1, w), P3.mul(0, a, 2, P3.d(1, w)))]
    assert lhs == rhs
    assert not any(P3.d(1, P3.d(0, a)))


@given(forms(P3, 1), forms(P3, 1))
def test_star_is_graded_antimultiplicative(u, v):
    # (u v)* = (-1)^{kl} v* u*
    lhs = P3.star(2, P3.mul(1, u, 1, v))
    rhs = [-x for x in P3.mul(1, P3.star(1, v), 1, P3.star(1, u))]
    assert lhs == rhs


def test_dp_sums_to_zero():
    total = [as_scalar(0)] * P3.dim(1)
    for a in range(3):
        total = [x + y for x, y in zip(total, P3.dp(a))]
    assert not any(total)
    assert P3.label(1, 0) == "w01"
