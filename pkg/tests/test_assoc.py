from functools import lru_cache

import pytest
from hypothesis import given, strategies as st

from conftest import S3_POINT, scenario
from qpbkit.assoc import InducedConnection, SectionFrame
from qpbkit.bundle import CovariantDerivative
from qpbkit.corep import irreducible_set
from qpbkit.fileformat import parse_scenario
from qpbkit.linalg import Matrix, vec_add
from qpbkit.scalars import as_scalar



@lru_cache(maxsize=None)
def frames(name):
    sc = scenario(name)
    hm = sc.horizontal_model()
    D = CovariantDerivative(hm)
    out = {}
    for a in irreducible_set(sc.hopf).members:
        sf = SectionFrame(hm, a)
        out[a.name] = (sf, InducedConnection(sf, D))
    return out


def failing(checks):
    return {c.name: c.witness for c in checks if not c.passed}


def test_m2_frames_golden():
    sign = frames("m2_z2")["sign"][0].frame.describe()
    assert sign == {"d": 2, "X": [["E12"], ["E21"]], "Z": [["1", "0"], ["0", "1"]],
                    "e": [["E11", "0"], ["0", "E22"]]}
    triv = frames("m2_z2")["triv"][0].frame.describe()
    assert triv["d"] == 1 and triv["e"] == [["E11 + E22"]]


@pytest.mark.parametrize("name", ["m2_z2", "trivial_z2", "point_z2"])
def test_frame_section_and_connection_checks(name):
    for a, (sf, ic) in frames(name).items():
        assert not failing(sf.frame.checks(prefix=f"frame.{a}"))
        assert not failing(sf.checks())
        assert not failing(ic.checks())


def test_nonabelian_frame_needs_gram_fallback():
    sc = parse_scenario(S3_POINT)
    hm = sc.horizontal_model()
    rho = [a for a in irreducible_set(sc.hopf).members if a.name == "rho1"][0]
    sf = SectionFrame(hm, rho)
    assert not failing(sf.frame.checks())
    assert sf.frame.d >= rho.dim


def test_sigma_is_identity_on_trivial_block():
    for name in ("m2_z2", "trivial_z2"):
        sf = frames(name)["triv"][0]
        by = {c.name: c for c in sf.checks()}
        assert by["sigma.triv.trivial_identity"].passed


def _coords(n):
    return st.lists(st.integers(-2, 2), min_size=n, max_size=n).map(lambda v: [as_scalar(x) for x in v])


@given(st.sampled_from(["triv", "sign"]), st.integers(0, 2), st.data())
def test_upsilon_round_trip(a, k, data):
    sf = frames("m2_z2")[a][0]
    c = data.draw(_coords(sf.S[k].dim))
    q = sf.upsilon_explicit(k, sf.S[k].vector(c))
    assert sf.UinvL[k] @ q == c
    assert sf.UL[k] @ c == q
    qh = sf.upsilon_hat_explicit(k, sf.S[k].vector(c))
    assert sf.UinvR[k] @ qh == c
    assert sf.sigma[k] @ q == qh


@given(st.sampled_from(["m2_z2", "m2_z2_twisted", "trivial_z2"]), st.sampled_from(["triv", "sign"]), st.data())
def test_left_leibniz_on_random_sections(name, a, data):
    sf, ic = frames(name)[a]
    Om = sf.hm.Om
    f = data.draw(_coords(Om.n))
    c = data.draw(_coords(sf.G.dim))
    fT = [as_scalar(0)] * sf.G.dim
    rhs = [as_scalar(0)] * sf.QL[1].dim
    nab = ic.nabla @ c
    for p in range(Om.n):
        fT = vec_add(fT, [f[p] * x for x in sf.L[p] @ c])
        rhs = vec_add(rhs, [f[p] * x for x in sf.left_action(1, p, nab)])
        rhs = vec_add(rhs, [f[p] * x for x in sf.QL[1].pair(Om.dp(p), c)])
    assert ic.nabla @ fT == rhs


def test_dual_path_and_flatness():
    for name in ("m2_z2", "m2_z2_twisted"):
        for a, (sf, ic) in frames(name).items():
            assert ic.curvature().is_zero()
            assert ic.curvature() == sf.UL[2] @ ic.DS[1] @ ic.DS[0]


def test_nonflat_curvature_on_star_violation_fixture():
    fr = frames("star_violation")
    sf, ic = fr["sign"]
    R = ic.curvature()
    assert R == Matrix.diag([2, 2])
    assert R == sf.UL[2] @ ic.DS[1] @ ic.DS[0]
    assert fr["triv"][1].curvature().is_zero()


def test_connection_coefficients_golden():
    assert frames("m2_z2")["sign"][1].coefficients() == [["w10", "-w01"], ["-w10", "w01"]]
    assert frames("m2_z2_twisted")["sign"][1].coefficients() == [["w10", "w01"], ["w10", "w01"]]
