from hypothesis import given, strategies as st

from conftest import scenario
from qpbkit.bundle import (CovariantDerivative, check_derivative, derivative_space, point_bundle,
                           trivial_bundle)
from qpbkit.groups import cyclic_group
from qpbkit.hopf import function_algebra
from qpbkit.scalars import as_scalar
from qpbkit.suites import run_suite


def failing(checks):
    return {c.name: c.witness for c in checks if not c.passed}


def test_m2_bundle_axioms(m2):
    B = m2.bundle
    assert not failing(B.checks())
    assert B.beta_rank == 8
    assert len(B.invariants) == 2 and len(B.points) == 2


def test_m2_horizontal_model(m2):
    hm = m2.horizontal_model()
    assert hm.m == 2 and [hm.dim(k) for k in range(3)] == [4, 4, 4]
    assert not failing(hm.checks())


def test_broken_coaction_witnesses():
    bad = failing(scenario("broken_coaction").bundle.checks())
    assert bad == {"bundle.base_invariants": "invariant dim 2 vs base 1 point",
                   "bundle.beta_surjective": "rank beta = 2 < 4"}


def test_builtin_bundles_pass():
    H = function_algebra(cyclic_group(3))
    for B in (point_bundle(H), trivial_bundle(2, H)):
        assert not failing(B.checks())
        assert len(B.points) == B.declared_points
        assert B.beta_rank == B.GM.n * H.n


def test_m2_derivative_is_unique(m2):
    hm = m2.horizontal_model()
    D = CovariantDerivative(hm)
    assert not failing(check_derivative(D))
    sp = derivative_space(hm, D)
    assert sp.displacements == [] and sp.particular.conn == D.conn


class _Zero(CovariantDerivative):
    def apply(self, k, u):
        return self.hm.zero(k + 1)


def test_zero_derivative_does_not_restrict_to_d(m2):
    bad = failing(check_derivative(_Zero(m2.horizontal_model())))
    assert "derivative.restricts_to_d" in bad
    assert bad["derivative.restricts_to_d"].startswith("D != d on base form")


@given(st.lists(st.tuples(st.integers(0, 1), st.integers(0, 1), st.integers(0, 1), st.integers(-1, 1)),
                max_size=3))
def test_passing_derivatives_lie_in_the_space(perturb):
    sc = scenario("m2_z2_twisted")
    hm = sc.horizontal_model()
    ref = CovariantDerivative(hm)
    conn = {k: list(v) for k, v in ref.conn.items()}
    for b, d, z, c in perturb:
        w = list(conn.get((b, d), hm.Om.zero(1)))
        w[z] = w[z] + as_scalar(c)
        conn[(b, d)] = w
    D = CovariantDerivative(hm, conn)
    sp = derivative_space(hm, ref)
    ok = not failing(check_derivative(D))
    assert ok == (D.conn == sp.particular.conn)


def test_star_violation_fails_only_star_checks():
    bad = failing(run_suite(scenario("star_violation"), "bundle"))
    assert bad == {"hor.star": "(w*)* != w on w01.s1",
                   "derivative.declared.star": "D(x*) != D(x)* on p0.s1",
                   "derivative.space": "member 0: D(x*) != D(x)* on p0.s1"}


def test_trivial_block_is_the_base():
    for name in ("m2_z2", "trivial_z2", "point_z2"):
        sc = scenario(name)
        hm = sc.horizontal_model()
        by = {c.name: c for c in hm.checks()}
        assert by["hor.invariants_are_base"].passed
        assert len(sc.bundle.invariants) == hm.Om.n
