import time
from functools import lru_cache

import pytest
from hypothesis import given, strategies as st

from conftest import S3_POINT, scenario
from qpbkit.bundle import CovariantDerivative
from qpbkit.corep import irreducible_set
from qpbkit.fileformat import parse_scenario
from qpbkit.linalg import vec_add
from qpbkit.reconstruct import Reconstruction, canonical_c, contragredient
from qpbkit.scalars import as_scalar


@lru_cache(maxsize=None)
def rebuilt(name):
    sc = scenario(name)
    hm = sc.horizontal_model()
    return Reconstruction(hm, CovariantDerivative(hm), irreducible_set(sc.hopf).members)


def failing(checks):
    return {c.name: c.witness for c in checks if not c.passed}


@pytest.mark.parametrize("name", ["m2_z2", "m2_z2_twisted", "point_z2", "trivial_z2"])
def test_round_trip_and_hypotheses(name):
    R = rebuilt(name)
    assert not failing(R.hypotheses())
    checks = R.checks()
    assert not failing(checks)
    assert R.dim == R.hm.GM.n


def test_m2_certificate():
    assert rebuilt("m2_z2").certificate() == {
        "T1^triv(x)e1": "E11", "T2^triv(x)e1": "E22", "T1^sign(x)e1": "E12", "T2^sign(x)e1": "E21"}


def test_point_certificate():
    assert rebuilt("point_z2").certificate() == {"T1^triv(x)e1": "d_e + d_g",
                                                 "T1^sign(x)e1": "1/2*d_e - 1/2*d_g"}


def test_nonabelian_point_bundle():
    sc = parse_scenario(S3_POINT)
    hm = sc.horizontal_model()
    t0 = time.perf_counter()
    R = Reconstruction(hm, CovariantDerivative(hm), irreducible_set(sc.hopf).members)
    assert not failing(R.checks())
    assert time.perf_counter() - t0 < 60


def _vec(n):
    return st.lists(st.integers(-2, 2), min_size=n, max_size=n).map(lambda v: [as_scalar(x) for x in v])


@given(st.sampled_from(["m2_z2", "trivial_z2"]), st.data())
def test_psi_is_multiplicative(name, data):
    R = rebuilt(name)
    v, w = data.draw(_vec(R.dim)), data.draw(_vec(R.dim))
    assert R.psi(R.mul(v, w)) == R.hm.mul(0, R.psi(v), 0, R.psi(w))


@given(st.data())
def test_psi_intertwines_star(data):
    R = rebuilt("m2_z2")
    v = data.draw(_vec(R.dim))
    st_v = [as_scalar(0)] * R.dim
    for x, c in enumerate(v):
        if c:
            st_v = vec_add(st_v, [c.conj() * y for y in R.star_basis(x)])
    assert R.psi(st_v) == R.hm.star(0, R.psi(v))


class _DoubledProduct(Reconstruction):
    def product_basis(self, x, y):
        return [2 * c for c in super().product_basis(x, y)]


def test_mutated_product_is_caught(m2):
    hm = m2.horizontal_model()
    R = _DoubledProduct(hm, CovariantDerivative(hm), irreducible_set(m2.hopf).members)
    bad = failing(R.checks())
    assert {"reconstruct.product", "reconstruct.unit"} <= set(bad)


def test_contragredient_and_canonical_c():
    irr = irreducible_set(scenario("point_z2").hopf).members
    for a in irr:
        cc = contragredient(contragredient(a))
        C = canonical_c(a)
        assert C is not None
        assert sum((C.rows[i][i] for i in range(a.dim)), as_scalar(0)) == as_scalar(a.dim)
        assert cc.dim == a.dim
