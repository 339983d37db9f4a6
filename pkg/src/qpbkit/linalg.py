"""Exact dense/sparse linear algebra over CycScalar.

Tensor bases are lexicographic everywhere: e_i (x) f_j sits at index i*dim2 + j
(0-based), which is (i-1)*dim2 + j in 1-based terms.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .scalars import CycScalar, as_scalar, one, zero

__all__ = [
    "Matrix", "LinearMap", "Infeasible", "INFEASIBLE", "AffineSolution",
    "rref", "kernel", "solve_affine", "rank", "kron", "Quotient", "Subspace",
    "vec_add", "vec_sub", "vec_scale", "vec_conj", "vec_is_zero", "zeros",
    "LinalgError",
]

ZERO = zero(1)
ONE = one(1)


class LinalgError(ArithmeticError):
    pass


def S(x) -> CycScalar:
    return x if isinstance(x, CycScalar) else as_scalar(x)


# --- vectors (plain lists) ---------------------------------------------------

def zeros(n):
    return [ZERO] * n


def vec_add(a, b):
    return [x + y for x, y in zip(a, b)]


def vec_sub(a, b):
    return [x - y for x, y in zip(a, b)]


def vec_scale(c, a):
    c = S(c)
    if not c:
        return [ZERO] * len(a)
    return [c * x if x else ZERO for x in a]


def vec_conj(a):
    return [x.conj() for x in a]


def vec_is_zero(a):
    return not any(a)


def first_nonzero(a):
    for i, x in enumerate(a):
        if x:
            return i
    return None


# --- sparse Gauss-Jordan ----------------------------------------------------

class _Echelon:
    """Incrementally maintained reduced row echelon form over sparse rows."""

    def __init__(self):
        self.rows: dict[int, dict[int, CycScalar]] = {}

    def reduce(self, row: dict) -> dict:
        row = {k: v for k, v in row.items() if v}
        hits = [p for p in row if p in self.rows]
        for p in hits:
            c = row.get(p)
            if not c:
                continue
            for k, v in self.rows[p].items():
                nv = row.get(k, ZERO) - c * v
                if nv:
                    row[k] = nv
                else:
                    row.pop(k, None)
        return row

    def add(self, row: dict) -> bool:
        row = self.reduce(row)
        if not row:
            return False
        p = min(row)
        inv = row[p].inverse()
        row = {k: v * inv for k, v in row.items()}
        row[p] = ONE if row[p] == 1 else row[p]
        for q, other in self.rows.items():
            c = other.get(p)
            if c:
                for k, v in row.items():
                    nv = other.get(k, ZERO) - c * v
                    if nv:
                        other[k] = nv
                    else:
                        other.pop(k, None)
        self.rows[p] = row
        return True

    @property
    def pivots(self):
        return sorted(self.rows)


def _as_sparse(row) -> dict:
    if isinstance(row, dict):
        return {k: S(v) for k, v in row.items() if v}
    return {k: S(v) for k, v in enumerate(row) if v}


def rref(rows: Iterable, ncols: int | None = None) -> _Echelon:
    ech = _Echelon()
    for r in rows:
        ech.add(_as_sparse(r))
    return ech


def _kernel_from(ech: _Echelon, ncols: int):
    piv = ech.rows
    out = []
    for f in range(ncols):
        if f in piv:
            continue
        v = [ZERO] * ncols
        v[f] = ONE
        for p, r in piv.items():
            c = r.get(f)
            if c:
                v[p] = -c
        out.append(v)
    return out


def kernel(m, ncols: int | None = None) -> list[list[CycScalar]]:
    """Basis of {v : m v = 0}. Accepts a Matrix or a list of (sparse) rows."""
    if isinstance(m, Matrix):
        rows, ncols = m.rows, m.ncols
    else:
        rows = m
        if ncols is None:
            raise LinalgError("ncols required for raw rows")
    return _kernel_from(rref(rows), ncols)


def rank(m) -> int:
    rows = m.rows if isinstance(m, Matrix) else m
    return len(rref(rows).rows)


class Infeasible:
    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "INFEASIBLE"

    def __bool__(self):
        return False


INFEASIBLE = Infeasible()


@dataclass(frozen=True)
class AffineSolution:
    particular: list
    kernel: list

    def satisfies(self, a, b) -> bool:
        rows = a.rows if isinstance(a, Matrix) else a
        return _residual_zero(rows, self.particular, b)


def _residual_zero(rows, x, b):
    for r, bi in zip(rows, b):
        sr = _as_sparse(r)
        acc = ZERO
        for k, v in sr.items():
            if x[k]:
                acc = acc + v * x[k]
        if acc != S(bi):
            return False
    return True


def solve_affine(a, b, ncols: int | None = None):
    """Full affine solution set of a x = b, or INFEASIBLE."""
    if isinstance(a, Matrix):
        rows, ncols = a.rows, a.ncols
    else:
        rows = a
        if ncols is None:
            raise LinalgError("ncols required for raw rows")
    ech = _Echelon()
    for r, bi in zip(rows, b):
        sr = _as_sparse(r)
        bi = S(bi)
        if bi:
            sr[ncols] = bi
        ech.add(sr)
    if ncols in ech.rows:
        return INFEASIBLE
    part = [ZERO] * ncols
    for p, r in ech.rows.items():
        c = r.get(ncols)
        if c:
            part[p] = c
    # drop the augmented column when building the kernel
    core = _Echelon()
    core.rows = {p: {k: v for k, v in r.items() if k != ncols} for p, r in ech.rows.items()}
    return AffineSolution(part, _kernel_from(core, ncols))


# --- dense matrices ---------------------------------------------------------

class Matrix:
    __slots__ = ("rows", "nrows", "ncols")

    def __init__(self, rows: Sequence[Sequence], ncols: int | None = None):
        self.rows = [[S(x) for x in r] for r in rows]
        self.nrows = len(self.rows)
        if ncols is None:
            ncols = len(self.rows[0]) if self.rows else 0
        self.ncols = ncols
        if any(len(r) != ncols for r in self.rows):
            raise LinalgError("ragged matrix")

    @classmethod
    def _fast(cls, rows, ncols):
        m = object.__new__(cls)
        m.rows = rows
        m.nrows = len(rows)
        m.ncols = ncols
        return m

    @classmethod
    def zeros(cls, r, c):
        return cls._fast([[ZERO] * c for _ in range(r)], c)

    @classmethod
    def identity(cls, n):
        return cls._fast([[ONE if i == j else ZERO for j in range(n)] for i in range(n)], n)

    @classmethod
    def from_columns(cls, cols, nrows: int | None = None):
        cols = list(cols)
        if nrows is None:
            nrows = len(cols[0]) if cols else 0
        return cls._fast([[S(cols[j][i]) for j in range(len(cols))] for i in range(nrows)], len(cols))

    @classmethod
    def diag(cls, entries):
        entries = [S(e) for e in entries]
        n = len(entries)
        return cls._fast([[entries[i] if i == j else ZERO for j in range(n)] for i in range(n)], n)

    @property
    def shape(self):
        return (self.nrows, self.ncols)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def column(self, j):
        return [r[j] for r in self.rows]

    def columns(self):
        return [self.column(j) for j in range(self.ncols)]

    def copy(self):
        return Matrix._fast([list(r) for r in self.rows], self.ncols)

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.shape == other.shape and all(
            a == b for ra, rb in zip(self.rows, other.rows) for a, b in zip(ra, rb))

    __hash__ = None

    def is_zero(self):
        return not any(x for r in self.rows for x in r)

    def __add__(self, other):
        self._same(other)
        return Matrix._fast([vec_add(a, b) for a, b in zip(self.rows, other.rows)], self.ncols)

    def __sub__(self, other):
        self._same(other)
        return Matrix._fast([vec_sub(a, b) for a, b in zip(self.rows, other.rows)], self.ncols)

    def __neg__(self):
        return Matrix._fast([[-x for x in r] for r in self.rows], self.ncols)

    def scale(self, c):
        return Matrix._fast([vec_scale(c, r) for r in self.rows], self.ncols)

    def _same(self, other):
        if self.shape != other.shape:
            raise LinalgError(f"shape mismatch {self.shape} vs {other.shape}")

    def __matmul__(self, other):
        if isinstance(other, Matrix):
            if self.ncols != other.nrows:
                raise LinalgError(f"cannot multiply {self.shape} by {other.shape}")
            out = []
            orows = other.rows
            for r in self.rows:
                acc = [ZERO] * other.ncols
                for k, a in enumerate(r):
                    if a:
                        for j, b in enumerate(orows[k]):
                            if b:
                                acc[j] = acc[j] + a * b
                out.append(acc)
            return Matrix._fast(out, other.ncols)
        v = list(other)
        if len(v) != self.ncols:
            raise LinalgError("vector length mismatch")
        out = []
        for r in self.rows:
            acc = ZERO
            for a, b in zip(r, v):
                if a and b:
                    acc = acc + a * b
            out.append(acc)
        return out

    def conj(self):
        return Matrix._fast([vec_conj(r) for r in self.rows], self.ncols)

    @property
    def T(self):
        return Matrix._fast([list(c) for c in zip(*self.rows)] if self.rows else [], self.nrows) \
            if self.ncols else Matrix._fast([], self.nrows)

    @property
    def H(self):
        return self.T.conj()

    def kernel(self):
        return kernel(self)

    def rank(self):
        return rank(self)

    def is_hermitian(self):
        return self.nrows == self.ncols and all(
            self.rows[i][j] == self.rows[j][i].conj() for i in range(self.nrows) for j in range(i, self.nrows))

    def inverse(self):
        n = self.nrows
        if n != self.ncols:
            raise LinalgError("inverse of non-square matrix")
        ech = _Echelon()
        for i, r in enumerate(self.rows):
            sr = {k: v for k, v in enumerate(r) if v}
            sr[n + i] = ONE
            ech.add(sr)
        if any(p not in ech.rows for p in range(n)):
            raise LinalgError("matrix is singular")
        out = [[ech.rows[i].get(n + j, ZERO) for j in range(n)] for i in range(n)]
        return Matrix._fast(out, n)

    def det(self):
        """Bareiss fraction-free determinant."""
        n = self.nrows
        if n != self.ncols:
            raise LinalgError("det of non-square matrix")
        if n == 0:
            return ONE
        a = [list(r) for r in self.rows]
        sign = 1
        prev = ONE
        for k in range(n - 1):
            if not a[k][k]:
                sw = next((i for i in range(k + 1, n) if a[i][k]), None)
                if sw is None:
                    return ZERO
                a[k], a[sw] = a[sw], a[k]
                sign = -sign
            for i in range(k + 1, n):
                for j in range(k + 1, n):
                    a[i][j] = (a[k][k] * a[i][j] - a[i][k] * a[k][j]) / prev
            prev = a[k][k]
        d = a[n - 1][n - 1]
        return d if sign > 0 else -d

    def to_strings(self):
        return [[str(x) for x in r] for r in self.rows]

    def __repr__(self):
        return f"Matrix({self.to_strings()})"


def kron(a: Matrix, b: Matrix) -> Matrix:
    rows = []
    for ra in a.rows:
        for rb in b.rows:
            row = []
            for x in ra:
                if x:
                    row.extend(x * y if y else ZERO for y in rb)
                else:
                    row.extend([ZERO] * b.ncols)
            rows.append(row)
    return Matrix._fast(rows, a.ncols * b.ncols)


def block_diag(*ms: Matrix) -> Matrix:
    nr = sum(m.nrows for m in ms)
    nc = sum(m.ncols for m in ms)
    out = Matrix.zeros(nr, nc)
    r0 = c0 = 0
    for m in ms:
        for i, row in enumerate(m.rows):
            out.rows[r0 + i][c0:c0 + m.ncols] = row
        r0 += m.nrows
        c0 += m.ncols
    return out


def hstack(*ms: Matrix) -> Matrix:
    if not ms:
        raise LinalgError("empty hstack")
    return Matrix._fast([sum((m.rows[i] for m in ms), []) for i in range(ms[0].nrows)],
                        sum(m.ncols for m in ms))


# --- linear / antilinear maps -------------------------------------------------

class LinearMap:
    """v -> M v (parity 0) or v -> M conj(v) (parity 1) in fixed bases."""

    __slots__ = ("matrix", "parity")

    def __init__(self, matrix: Matrix, parity: int = 0):
        if parity not in (0, 1):
            raise LinalgError("parity must be 0 or 1")
        self.matrix = matrix
        self.parity = parity

    @property
    def domain_dim(self):
        return self.matrix.ncols

    @property
    def codomain_dim(self):
        return self.matrix.nrows

    def __call__(self, v):
        v = list(v)
        return self.matrix @ (vec_conj(v) if self.parity else v)

    def after(self, first: "LinearMap") -> "LinearMap":
        """self o first."""
        inner = first.matrix.conj() if self.parity else first.matrix
        return LinearMap(self.matrix @ inner, (self.parity + first.parity) % 2)

    def inverse(self) -> "LinearMap":
        inv = self.matrix.inverse()
        return LinearMap(inv.conj() if self.parity else inv, self.parity)

    def is_invertible(self) -> bool:
        return self.matrix.nrows == self.matrix.ncols and self.matrix.rank() == self.matrix.nrows

    @classmethod
    def identity(cls, n):
        return cls(Matrix.identity(n), 0)

    def __eq__(self, other):
        if not isinstance(other, LinearMap):
            return NotImplemented
        return self.parity == other.parity and self.matrix == other.matrix

    __hash__ = None

    def __repr__(self):
        kind = "antilinear" if self.parity else "linear"
        return f"LinearMap({kind}, {self.matrix.to_strings()})"


# --- subspaces and quotients ------------------------------------------------

class Subspace:
    """Span of independent vectors in an ambient space, with coordinates."""

    def __init__(self, basis: Sequence[Sequence], ambient_dim: int):
        self.basis = [[S(x) for x in v] for v in basis]
        self.ambient_dim = ambient_dim
        self.dim = len(self.basis)
        # pick rows where the basis matrix is invertible
        ech = _Echelon()
        picked = []
        cols = Matrix.from_columns(self.basis, ambient_dim) if self.basis else Matrix.zeros(ambient_dim, 0)
        for i, r in enumerate(cols.rows):
            if ech.add({k: v for k, v in enumerate(r) if v}):
                picked.append(i)
        if len(picked) != self.dim:
            raise LinalgError("basis vectors are linearly dependent")
        self._rows = picked
        sub = Matrix._fast([cols.rows[i] for i in picked], self.dim)
        self._inv = sub.inverse() if self.dim else Matrix.zeros(0, 0)

    def coords(self, v, check=True):
        v = list(v)
        c = self._inv @ [v[i] for i in self._rows] if self.dim else []
        if check and self.vector(c) != v:
            raise LinalgError("vector is not in the subspace")
        return c

    def contains(self, v) -> bool:
        try:
            self.coords(v)
            return True
        except LinalgError:
            return False

    def vector(self, c):
        out = [ZERO] * self.ambient_dim
        for ci, b in zip(c, self.basis):
            if ci:
                for k, x in enumerate(b):
                    if x:
                        out[k] = out[k] + ci * x
        return out


class Quotient:
    """V / span(relations) with a fixed complement spanned by free coordinates."""

    def __init__(self, ambient_dim: int, relations: Iterable = ()):
        self.ambient_dim = ambient_dim
        ech = _Echelon()
        for r in relations:
            ech.add(_as_sparse(r))
        self._ech = ech
        self.free = [i for i in range(ambient_dim) if i not in ech.rows]
        self._free_pos = {f: k for k, f in enumerate(self.free)}
        self.dim = len(self.free)

    @property
    def relation_rank(self):
        return len(self._ech.rows)

    def project(self, v) -> list:
        v = _as_sparse(v)
        v = self._ech.reduce(v)
        out = [ZERO] * self.dim
        for k, x in v.items():
            out[self._free_pos[k]] = x
        return out

    def project_sparse(self, v: dict) -> list:
        return self.project(v)

    def lift(self, c) -> list:
        out = [ZERO] * self.ambient_dim
        for f, x in zip(self.free, c):
            out[f] = S(x)
        return out

    def is_relation(self, v) -> bool:
        return not self._ech.reduce(_as_sparse(v))
