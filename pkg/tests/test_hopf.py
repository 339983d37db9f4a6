from fractions import Fraction
from itertools import permutations, product

import pytest
from hypothesis import given, strategies as st

from qpbkit.groups import FiniteGroup, GroupTableError, cyclic_group, symmetric_group
from qpbkit.hopf import check_hopf, function_algebra, group_algebra, haar_checks
from qpbkit.linalg import Matrix
from qpbkit.scalars import as_scalar


def _perm_group(gens, k):
    elems = {tuple(range(k))}
    frontier = list(elems)
    while frontier:
        p = frontier.pop()
        for g in gens:
            q = tuple(p[g[x]] for x in range(k))
            if q not in elems:
                elems.add(q)
                frontier.append(q)
    elems = sorted(elems)
    idx = {p: i for i, p in enumerate(elems)}
    return FiniteGroup([[idx[tuple(p[q[x]] for x in range(k))] for q in elems] for p in elems])


def _direct(g, h):
    pairs = list(product(range(g.n), range(h.n)))
    idx = {p: i for i, p in enumerate(pairs)}
    return FiniteGroup([[idx[(g.mul(a, c), h.mul(b, d))] for c, d in pairs] for a, b in pairs])


def _quaternion():
    # elements (sign, unit) with units 1, i, j, k
    table = {("1", u): u for u in "1ijk"} | {(u, "1"): u for u in "1ijk"}
    table |= {("i", "i"): "-1", ("j", "j"): "-1", ("k", "k"): "-1", ("i", "j"): "k", ("j", "k"): "i",
              ("k", "i"): "j", ("j", "i"): "-k", ("k", "j"): "-i", ("i", "k"): "-j"}
    elems = [(s, u) for s in (1, -1) for u in "1ijk"]

    def mul(a, b):
        r = table[(a[1], b[1])]
        s = a[0] * b[0] * (-1 if r.startswith("-") else 1)
        return (s, r.lstrip("-"))
    idx = {e: i for i, e in enumerate(elems)}
    return FiniteGroup([[idx[mul(a, b)] for b in elems] for a in elems])


Z = cyclic_group
GROUPS = {f"Z{n}": (lambda n=n: Z(n)) for n in range(1, 9)}
GROUPS |= {
    "Z2xZ2": lambda: _direct(Z(2), Z(2)),
    "Z2xZ4": lambda: _direct(Z(2), Z(4)),
    "Z2^3": lambda: _direct(_direct(Z(2), Z(2)), Z(2)),
    "S3": lambda: symmetric_group(3),
    "D4": lambda: _perm_group([(1, 2, 3, 0), (0, 3, 2, 1)], 4),
    "Q8": _quaternion,
}


@pytest.mark.parametrize("name", sorted(GROUPS))
@pytest.mark.parametrize("build", [function_algebra, group_algebra])
def test_group_hopf_algebras_pass_axioms(name, build):
    G = GROUPS[name]()
    assert G.n <= 8
    H = build(G)
    bad = [c for c in check_hopf(H) + haar_checks(H) if not c.passed]
    assert not bad, bad[0].witness


@pytest.mark.parametrize("name", ["Z3", "S3", "D4", "Q8"])
def test_haar_is_uniform_or_delta(name):
    G = GROUPS[name]()
    assert function_algebra(G).haar.values == [as_scalar(Fraction(1, G.n))] * G.n
    delta = group_algebra(G).haar.values
    assert delta == [as_scalar(1 if g == G.e else 0) for g in range(G.n)]


@given(st.sampled_from(["Z4", "S3", "Q8"]), st.data())
def test_haar_kappa_invariant(name, data):
    G = GROUPS[name]()
    H = data.draw(st.sampled_from([function_algebra, group_algebra]))(G)
    v = [as_scalar(x) for x in data.draw(st.lists(st.integers(-3, 3), min_size=G.n, max_size=G.n))]
    assert H.haar(H.kappa(v)) == H.haar(v)


def test_broken_antipode_is_caught():
    H = function_algebra(Z(3))
    H.antipode = Matrix.identity(3)
    bad = [c for c in check_hopf(H) if not c.passed]
    assert bad and bad[0].name.startswith("hopf.")
    assert bad[0].witness


def test_nonabelian_table_orientation():
    G = symmetric_group(3)
    assert not G.is_abelian()
    assert sorted(len(s) for s in G.subgroups) == [1, 2, 2, 2, 3, 6]


@pytest.mark.parametrize("table,msg", [
    ([[0, 1], [1, 1]], "no inverse"),
    ([[0, 1, 2], [1, 0, 0], [2, 0, 1]], "not associative"),
    ([[0, 1], [1]], "row 2"),
])
def test_bad_tables(table, msg):
    with pytest.raises(GroupTableError, match=msg):
        FiniteGroup(table)
