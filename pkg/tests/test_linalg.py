from hypothesis import given, strategies as st

from qpbkit.linalg import (INFEASIBLE, LinearMap, Matrix, Quotient, Subspace, kernel, kron, rank,
                           solve_affine)
from qpbkit.scalars import cyc

small = st.integers(-2, 2)


def mats(r, c):
    return st.lists(st.lists(small, min_size=c, max_size=c), min_size=r, max_size=r).map(Matrix)


shape = st.tuples(st.integers(1, 4), st.integers(1, 5))


@given(shape.flatmap(lambda s: mats(*s)))
def test_rank_nullity(m):
    ker = kernel(m)
    assert rank(m) + len(ker) == m.ncols
    for v in ker:
        assert all(not x for x in m @ v)


@given(mats(2, 2), mats(2, 2), mats(2, 2), mats(2, 2))
def test_kron_mixed_product(a, b, c, d):
    assert kron(a, b) @ kron(c, d) == kron(a @ c, b @ d)


@given(shape.flatmap(lambda s: st.tuples(mats(*s), st.lists(small, min_size=s[1], max_size=s[1]))))
def test_solve_affine_recovers_consistent_systems(args):
    m, x = args
    b = m @ [cyc(v, 1, 0, 1) for v in x]
    sol = solve_affine(m, b)
    assert sol is not INFEASIBLE
    assert sol.satisfies(m, b)
    assert len(sol.kernel) == m.ncols - rank(m)


def test_solve_affine_infeasible():
    m = Matrix([[1, 1], [2, 2]])
    assert solve_affine(m, [1, 3]) is INFEASIBLE


def test_cyclotomic_inverse_and_det():
    i = cyc(1, 1, 1, 4)
    m = Matrix([[1, i], [i, 1]])
    assert m.det() == Matrix([[2]]).rows[0][0]
    assert m @ m.inverse() == Matrix.identity(2)


def test_antilinear_map_composition():
    i = cyc(1, 1, 1, 4)
    a = LinearMap(Matrix([[i, 0], [0, 1]]), 1)
    v = [i, cyc(1, 1, 0, 1)]
    # A(v) = M conj(v); composing two antilinear maps is linear
    assert a(v) == [i * i.conj(), cyc(1, 1, 0, 1)]
    assert a.after(a).parity == 0
    assert a.after(a)(v) == a(a(v))


def test_subspace_and_quotient():
    s = Subspace([[1, 1, 0], [0, 1, 1]], 3)
    assert s.coords([1, 2, 1]) == [1, 1]
    assert not s.contains([1, 0, 0])
    q = Quotient(3, [[1, -1, 0]])
    assert q.dim == 2 and q.is_relation([2, -2, 0])
    assert q.project([1, 0, 0]) == q.project([0, 1, 0])
