import cmath
from itertools import product

import pytest
from hypothesis import given, strategies as st

from qpbkit.checks import StructuralError
from qpbkit.corep import (Corep, GradedMorphism, MorphismPair, certify_irreducibles, check_corep, conjugate,
                          conjugate_morphism, decompose, direct_sum, identity_morphism, intertwiner_witness,
                          irreducible_set, mor_space, regular_corep, tensor, tensor_morphisms)
from qpbkit.groups import cyclic_group, symmetric_group
from qpbkit.hopf import function_algebra, group_algebra
from qpbkit.linalg import LinearMap, Matrix
from qpbkit.scalars import one

ALGEBRAS = {
    "C(Z2)": lambda: function_algebra(cyclic_group(2)),
    "C(Z3)": lambda: function_algebra(cyclic_group(3)),
    "C(Z4)": lambda: function_algebra(cyclic_group(4)),
    "C(S3)": lambda: function_algebra(symmetric_group(3)),
    "C[Z3]": lambda: group_algebra(cyclic_group(3)),
    "C[S3]": lambda: group_algebra(symmetric_group(3)),
}
_irr = {}


def irreps(name):
    if name not in _irr:
        _irr[name] = irreducible_set(ALGEBRAS[name]())
    return _irr[name]


def test_irreducible_counts():
    assert irreps("C(Z2)").names == ["triv", "sign"]
    assert sorted(c.dim for c in irreps("C(S3)").members) == [1, 1, 2]
    assert len(irreps("C[S3]").members) == 6
    for name in ALGEBRAS:
        irr = irreps(name)
        assert sum(c.dim ** 2 for c in irr.members) == irr.members[0].hopf.n
        assert all(c.passed for c in certify_irreducibles(irr.members[0].hopf, irr.members))


# --- fusion against a hand-written character table ----------------------------

W = cmath.exp(2j * cmath.pi / 3)


def _s3_class(p):
    fixed = sum(p[i] == i for i in range(3))
    return {3: 0, 1: 1, 0: 2}[fixed]  # identity, transposition, 3-cycle


def _table(name):
    if name == "C(Z2)":
        return [[1, 1], [1, -1]]
    if name == "C(Z3)":
        return [[1, 1, 1], [1, W, W ** 2], [1, W ** 2, W]]
    from itertools import permutations
    perms = sorted(permutations(range(3)))
    cls = [_s3_class(p) for p in perms]
    rows = [(1, 1, 1), (1, -1, 1), (2, 0, -1)]
    return [[r[c] for c in cls] for r in rows]


def _char(c):
    return [x.to_complex() for x in c.character()]


def _match(c, table):
    ch = _char(c)
    hits = [k for k, row in enumerate(table) if all(abs(a - b) < 1e-9 for a, b in zip(ch, row))]
    assert len(hits) == 1
    return hits[0]


@pytest.mark.parametrize("name", ["C(Z2)", "C(Z3)", "C(S3)"])
def test_fusion_matches_character_oracle(name):
    irr = irreps(name).members
    table = _table(name)
    n = len(table[0])
    row = {c.name: table[_match(c, table)] for c in irr}
    for a, b in product(irr, repeat=2):
        dec = decompose(tensor(a, b), irr)
        assert dec.complete
        for c in irr:
            m = sum(x * y * z.conjugate() for x, y, z in zip(row[a.name], row[b.name], row[c.name])) / n
            assert abs(m - dec.multiplicities[c.name]) < 1e-9, (a.name, b.name, c.name)


def test_group_algebra_fusion_is_group_law():
    irr = irreps("C[Z3]").members
    H = irr[0].hopf
    for a, b in product(irr, repeat=2):
        dec = decompose(tensor(a, b), irr)
        [hit] = [k for k, v in dec.multiplicities.items() if v]
        target = [c for c in irr if c.name == hit][0]
        assert target.u[0][0] == H.mul(a.u[0][0], b.u[0][0])


# --- graded Schur lemma and functor coherence --------------------------------------

pick = st.sampled_from(["C(Z3)", "C(Z4)", "C(S3)"]).flatmap(
    lambda n: st.tuples(st.just(n), st.sampled_from(range(len(irreps(n).members))),
                        st.sampled_from(range(len(irreps(n).members)))))


@given(pick)
def test_schur_degree0(p):
    name, i, j = p
    irr = irreps(name).members
    assert len(mor_space(irr[i], irr[j], 0)) == (1 if i == j else 0)


@given(pick)
def test_schur_degree1(p):
    name, i, j = p
    a, b = irreps(name).members[i], irreps(name).members[j]
    n1 = len(mor_space(a, b, 1))
    assert n1 in (0, 1)
    assert n1 == len(mor_space(conjugate(a), b, 0))
    for f in mor_space(a, b, 1):
        assert f.degree == 1 and intertwiner_witness(f) is None


def _reducible(name):
    irr = irreps(name).members
    return [irr[0], direct_sum(irr[0], irr[-1]), irr[-1], conjugate(irr[-1])]


@given(st.sampled_from(["C(Z3)", "C(S3)"]), st.data())
def test_parity_of_composites(name, data):
    cs = _reducible(name)
    a, b, c = (data.draw(st.sampled_from(cs)) for _ in range(3))
    d1, d2 = data.draw(st.sampled_from([0, 1])), data.draw(st.sampled_from([0, 1]))
    fs, gs = mor_space(a, b, d1), mor_space(b, c, d2)
    for f, g in product(fs, gs):
        h = g.after(f)
        assert h.degree == (d1 + d2) % 2
        assert intertwiner_witness(h) is None


@given(st.sampled_from(["C(Z3)", "C(S3)"]), st.data())
def test_conjugation_is_a_functor(name, data):
    cs = _reducible(name)
    a, b, c = (data.draw(st.sampled_from(cs)) for _ in range(3))
    ca, cb, cc = conjugate(a), conjugate(b), conjugate(c)
    for f, g in product(mor_space(a, b, 0), mor_space(b, c, 0)):
        lhs = conjugate_morphism(g.after(f), ca, cc)
        rhs = conjugate_morphism(g, cb, cc).after(conjugate_morphism(f, ca, cb))
        assert lhs.map == rhs.map
        assert intertwiner_witness(lhs) is None
    ident = conjugate_morphism(identity_morphism(a), ca, ca)
    assert ident.map == identity_morphism(ca).map


@given(st.sampled_from(["C(Z3)", "C(S3)"]), st.data())
def test_tensor_is_a_bifunctor(name, data):
    cs = _reducible(name)[:3]
    a1, b1, c1, a2, b2, c2 = (data.draw(st.sampled_from(cs)) for _ in range(6))
    deg = data.draw(st.sampled_from([0, 1]))
    if deg == 0:
        f1s, f2s = mor_space(a1, b1, 0), mor_space(a2, b2, 0)
    else:
        f1s, f2s = mor_space(a1, b2, 1), mor_space(a2, b1, 1)
    for f1, f2 in product(f1s[:2], f2s[:2]):
        t = tensor_morphisms(MorphismPair(f1, f2), (a1, a2), (b1, b2))
        assert t.degree == deg and intertwiner_witness(t) is None
    for f1, f2, g1, g2 in product(mor_space(a1, b1)[:1], mor_space(a2, b2)[:1],
                                  mor_space(b1, c1)[:1], mor_space(b2, c2)[:1]):
        p = MorphismPair(g1, g2).after(MorphismPair(f1, f2))
        lhs = tensor_morphisms(p, (a1, a2), (c1, c2))
        rhs = tensor_morphisms(MorphismPair(g1, g2), (b1, b2), (c1, c2)).after(
            tensor_morphisms(MorphismPair(f1, f2), (a1, a2), (b1, b2)))
        assert lhs.map == rhs.map


@given(st.sampled_from(["C(Z4)", "C(S3)"]), st.data())
def test_tensor_distributes_over_direct_sum(name, data):
    irr = irreps(name).members
    a, b, c = (data.draw(st.sampled_from(irr)) for _ in range(3))
    lhs = tensor(a, direct_sum(b, c))
    rhs = direct_sum(tensor(a, b), tensor(a, c))
    # v (x) (w1, w2) -> (v (x) w1, v (x) w2)
    m = b.dim + c.dim
    P = Matrix.zeros(rhs.dim, lhs.dim)
    for i in range(a.dim):
        for k in range(m):
            row = i * b.dim + k if k < b.dim else a.dim * b.dim + i * c.dim + (k - b.dim)
            P.rows[row][i * m + k] = one()
    f = GradedMorphism(lhs, rhs, LinearMap(P))
    assert intertwiner_witness(f) is None and P.rank() == lhs.dim


def test_regular_corep_contains_each_irrep_dim_times():
    irr = irreps("C(S3)").members
    dec = decompose(regular_corep(irr[0].hopf), irr)
    assert dec.complete
    assert {c.name: dec.multiplicities[c.name] for c in irr} == {c.name: c.dim for c in irr}


def test_check_corep_flags_non_comodule():
    H = ALGEBRAS["C(Z2)"]()
    bad = Corep(H, [[[2, 0]]], "bad")
    assert not all(c.passed for c in check_corep(bad))


def test_custom_needs_listed_irreps():
    H = ALGEBRAS["C(Z2)"]()
    H.kind = "custom"
    with pytest.raises(StructuralError):
        irreducible_set(H)
