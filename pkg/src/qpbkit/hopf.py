"""Finite-dimensional *-algebras and Hopf *-algebras by structure constants.

Elements are dense coordinate lists.  Tensor products use the lexicographic
basis x_a (x) y_b -> a*dim(y) + b.
"""
from __future__ import annotations

from functools import cached_property

from .checks import Check, StructuralError, check, first
from .groups import FiniteGroup, GroupTableError
from .linalg import INFEASIBLE, Matrix, S, ZERO, ONE, solve_affine, vec_add
from .scalars import is_strictly_positive

__all__ = [
    "Algebra", "HopfAlgebra", "function_algebra", "group_algebra", "check_hopf",
    "check_algebra", "haar", "tensor_mul", "GroupTableError", "ShapeError",
]


class ShapeError(ValueError):
    pass


def _axpy(out, c, vec):
    """out += c * vec (in place, skipping zeros)."""
    if not c:
        return out
    for k, x in enumerate(vec):
        if x:
            out[k] = out[k] + c * x
    return out


class Algebra:
    """Unital *-algebra: x_i x_j = sum_k mult[i][j][k] x_k, x_i* = column i of star."""

    def __init__(self, labels, mult, unit, star: Matrix, name: str = ""):
        self.labels = list(labels)
        self.n = n = len(self.labels)
        if len(mult) != n or any(len(r) != n for r in mult):
            raise ShapeError(f"multiplication table must be {n}x{n}")
        self.mult = [[{k: S(c) for k, c in cell.items() if c} for cell in row] for row in mult]
        if len(unit) != n:
            raise ShapeError("unit vector has wrong length")
        self.unit = [S(c) for c in unit]
        if star.shape != (n, n):
            raise ShapeError("star matrix has wrong shape")
        self.star_matrix = star
        self.name = name

    # --- elements ---
    @property
    def dim(self):
        return self.n

    def zero(self):
        return [ZERO] * self.n

    def basis(self, i):
        v = [ZERO] * self.n
        v[i] = ONE
        return v

    def mul(self, a, b):
        out = [ZERO] * self.n
        for i, x in enumerate(a):
            if not x:
                continue
            row = self.mult[i]
            for j, y in enumerate(b):
                if not y:
                    continue
                c = x * y
                for k, m in row[j].items():
                    out[k] = out[k] + c * m
        return out

    def star(self, a):
        out = [ZERO] * self.n
        for i, x in enumerate(a):
            if x:
                _axpy(out, x.conj(), self.star_matrix.column(i))
        return out

    @cached_property
    def _star_cols(self):
        return [self.star_matrix.column(i) for i in range(self.n)]

    def left_matrix(self, a) -> Matrix:
        return Matrix.from_columns([self.mul(a, self.basis(j)) for j in range(self.n)], self.n)

    def right_matrix(self, a) -> Matrix:
        return Matrix.from_columns([self.mul(self.basis(j), a) for j in range(self.n)], self.n)

    def fmt(self, v) -> str:
        from .expr import format_combo
        return format_combo(v, self.labels)


def check_algebra(A: Algebra, prefix: str, anchor: str) -> list[Check]:
    n = A.n
    e = [A.basis(i) for i in range(n)]
    prods = [[A.mul(e[i], e[j]) for j in range(n)] for i in range(n)]

    def assoc():
        for i in range(n):
            for j in range(n):
                for k in range(n):
                    if A.mul(prods[i][j], e[k]) != A.mul(e[i], prods[j][k]):
                        return f"(x{i + 1} x{j + 1}) x{k + 1} != x{i + 1} (x{j + 1} x{k + 1})"
        return None

    def unit():
        for i in range(n):
            if A.mul(A.unit, e[i]) != e[i] or A.mul(e[i], A.unit) != e[i]:
                return f"unit fails on {A.labels[i]}"
        return None

    def star_inv():
        for i in range(n):
            if A.star(A.star(e[i])) != e[i]:
                return f"(x*)* != x at {A.labels[i]}"
        return None

    def star_anti():
        st = [A.star(x) for x in e]
        for i in range(n):
            for j in range(n):
                if A.star(prods[i][j]) != A.mul(st[j], st[i]):
                    return f"(x{i + 1} x{j + 1})* != x{j + 1}* x{i + 1}*"
        return None

    return [
        check(f"{prefix}.associativity", anchor, assoc()),
        check(f"{prefix}.unit", anchor, unit()),
        check(f"{prefix}.star_involutive", anchor, star_inv()),
        check(f"{prefix}.star_antimultiplicative", anchor, star_anti()),
    ]


def tensor_mul(A: Algebra, B: Algebra, u, v):
    """Product in A (x) B of dense lex tensors u, v."""
    nb = B.n
    out = [ZERO] * (A.n * nb)
    nz_u = [(k // nb, k % nb, c) for k, c in enumerate(u) if c]
    nz_v = [(k // nb, k % nb, c) for k, c in enumerate(v) if c]
    for a, b, c1 in nz_u:
        for c, d, c2 in nz_v:
            coef = c1 * c2
            for p, m1 in A.mult[a][c].items():
                for q, m2 in B.mult[b][d].items():
                    idx = p * nb + q
                    out[idx] = out[idx] + coef * m1 * m2
    return out


def tensor_star(A: Algebra, B: Algebra, u):
    nb = B.n
    out = [ZERO] * (A.n * nb)
    for k, c in enumerate(u):
        if not c:
            continue
        a, b = divmod(k, nb)
        sa = A._star_cols[a]
        sb = B._star_cols[b]
        cc = c.conj()
        for p, x in enumerate(sa):
            if x:
                for q, y in enumerate(sb):
                    if y:
                        out[p * nb + q] = out[p * nb + q] + cc * x * y
    return out


class HopfAlgebra(Algebra):
    def __init__(self, labels, mult, unit, star, comult, counit, antipode: Matrix,
                 name: str = "", kind: str = "custom", group: FiniteGroup | None = None):
        super().__init__(labels, mult, unit, star, name)
        n = self.n
        if len(comult) != n:
            raise ShapeError("comultiplication must list one entry per basis element")
        self.comult = []
        for i, cell in enumerate(comult):
            d = {}
            for (j, k), c in cell.items():
                if not (0 <= j < n and 0 <= k < n):
                    raise ShapeError(f"comultiplication index out of range at {self.labels[i]}")
                if c:
                    d[(j, k)] = S(c)
            self.comult.append(d)
        if len(counit) != n:
            raise ShapeError("counit has wrong length")
        self.counit = [S(c) for c in counit]
        if antipode.shape != (n, n):
            raise ShapeError("antipode matrix has wrong shape")
        self.antipode = antipode
        self.kind = kind
        self.group = group

    def comul(self, v):
        n = self.n
        out = [ZERO] * (n * n)
        for i, x in enumerate(v):
            if x:
                for (j, k), c in self.comult[i].items():
                    out[j * n + k] = out[j * n + k] + x * c
        return out

    def comul2(self, v):
        """(phi (x) id) phi, lex over (a, b, c)."""
        n = self.n
        out = [ZERO] * (n ** 3)
        for i, x in enumerate(v):
            if not x:
                continue
            for (j, k), c in self.comult[i].items():
                xc = x * c
                for (a, b), c2 in self.comult[j].items():
                    idx = (a * n + b) * n + k
                    out[idx] = out[idx] + xc * c2
        return out

    def comul_sparse(self, v):
        """phi(v) as {(j, k): c}."""
        out = {}
        for i, x in enumerate(v):
            if x:
                for jk, c in self.comult[i].items():
                    nv = out.get(jk, ZERO) + x * c
                    if nv:
                        out[jk] = nv
                    else:
                        out.pop(jk, None)
        return out

    def comul2_sparse(self, v):
        out = {}
        for (j, k), c in self.comul_sparse(v).items():
            for (a, b), c2 in self.comult[j].items():
                key = (a, b, k)
                nv = out.get(key, ZERO) + c * c2
                if nv:
                    out[key] = nv
                else:
                    out.pop(key, None)
        return out

    def eps(self, v):
        acc = ZERO
        for x, e in zip(v, self.counit):
            if x and e:
                acc = acc + x * e
        return acc

    def kappa(self, v):
        return self.antipode @ v

    @cached_property
    def haar(self):
        return haar(self)

    @cached_property
    def identity_index(self):
        """Index of the group identity in a group-built algebra."""
        return self.group.e if self.group is not None else None


def check_hopf(H: HopfAlgebra) -> list[Check]:
    anchor = "hopf-star-algebra"
    n = H.n
    e = [H.basis(i) for i in range(n)]
    out = check_algebra(H, "hopf", anchor)
    phis = [H.comul(x) for x in e]
    unit2 = H.comul(H.unit)

    def coassoc():
        for i in range(n):
            lhs = H.comul2(e[i])
            # (id (x) phi) phi
            rhs = [ZERO] * (n ** 3)
            for (j, k), c in H.comult[i].items():
                for (a, b), c2 in H.comult[k].items():
                    idx = (j * n + a) * n + b
                    rhs[idx] = rhs[idx] + c * c2
            if lhs != rhs:
                return f"coassociativity fails on {H.labels[i]}"
        return None

    def counit():
        for i in range(n):
            left = [ZERO] * n
            right = [ZERO] * n
            for (j, k), c in H.comult[i].items():
                if H.counit[j]:
                    left[k] = left[k] + c * H.counit[j]
                if H.counit[k]:
                    right[j] = right[j] + c * H.counit[k]
            if left != e[i]:
                return f"(eps (x) id) phi != id on {H.labels[i]}"
            if right != e[i]:
                return f"(id (x) eps) phi != id on {H.labels[i]}"
        return None

    def antipode():
        for i in range(n):
            target = [H.counit[i] * u for u in H.unit]
            lhs = H.zero()
            rhs = H.zero()
            for (j, k), c in H.comult[i].items():
                lhs = vec_add(lhs, [c * x for x in H.mul(H.kappa(e[j]), e[k])])
                rhs = vec_add(rhs, [c * x for x in H.mul(e[j], H.kappa(e[k]))])
            if lhs != target:
                return f"m (kappa (x) id) phi != eta eps on {H.labels[i]}"
            if rhs != target:
                return f"m (id (x) kappa) phi != eta eps on {H.labels[i]}"
        return None

    def comult_mult():
        for i in range(n):
            for j in range(n):
                if H.comul(H.mul(e[i], e[j])) != tensor_mul(H, H, phis[i], phis[j]):
                    return f"phi(x{i + 1} x{j + 1}) != phi(x{i + 1}) phi(x{j + 1})"
        one2 = [ZERO] * (n * n)
        for a, x in enumerate(H.unit):
            for b, y in enumerate(H.unit):
                if x and y:
                    one2[a * n + b] = x * y
        if unit2 != one2:
            return "phi(1) != 1 (x) 1"
        return None

    def counit_mult():
        for i in range(n):
            for j in range(n):
                if H.eps(H.mul(e[i], e[j])) != H.counit[i] * H.counit[j]:
                    return f"eps(x{i + 1} x{j + 1}) != eps(x{i + 1}) eps(x{j + 1})"
        if H.eps(H.unit) != 1:
            return "eps(1) != 1"
        return None

    def comult_star():
        for i in range(n):
            if H.comul(H.star(e[i])) != tensor_star(H, H, phis[i]):
                return f"phi(x*) != phi(x)^(* (x) *) on {H.labels[i]}"
            if H.eps(H.star(e[i])) != H.counit[i].conj():
                return f"eps(x*) != conj(eps(x)) on {H.labels[i]}"
        return None

    def kappa_star():
        for i in range(n):
            if H.kappa(H.star(H.kappa(H.star(e[i])))) != e[i]:
                return f"kappa(kappa(x*)*) != x on {H.labels[i]}"
        return None

    out += [
        check("hopf.coassociativity", anchor, coassoc()),
        check("hopf.counit", anchor, counit()),
        check("hopf.antipode", anchor, antipode()),
        check("hopf.comult_algebra_map", anchor, comult_mult()),
        check("hopf.counit_algebra_map", anchor, counit_mult()),
        check("hopf.star_compatible", anchor, comult_star()),
        check("hopf.kappa_star", anchor, kappa_star()),
    ]
    return out


class HaarFunctional:
    def __init__(self, values):
        self.values = list(values)

    def __call__(self, v):
        acc = ZERO
        for x, h in zip(v, self.values):
            if x and h:
                acc = acc + x * h
        return acc

    def __repr__(self):
        return f"HaarFunctional({[str(v) for v in self.values]})"


def haar(H: HopfAlgebra) -> HaarFunctional:
    """Unique normalized two-sided invariant functional; StructuralError otherwise."""
    n = H.n
    rows, rhs = [], []
    for i in range(n):
        for j in range(n):
            right = {}  # (id (x) h) phi(x_i) - h(x_i) 1, coefficient of x_j
            left = {}   # (h (x) id) phi(x_i) - h(x_i) 1
            for (a, b), c in H.comult[i].items():
                if a == j:
                    right[b] = right.get(b, ZERO) + c
                if b == j:
                    left[a] = left.get(a, ZERO) + c
            if H.unit[j]:
                right[i] = right.get(i, ZERO) - H.unit[j]
                left[i] = left.get(i, ZERO) - H.unit[j]
            rows += [right, left]
            rhs += [ZERO, ZERO]
    rows.append({i: u for i, u in enumerate(H.unit) if u})
    rhs.append(ONE)
    sol = solve_affine(rows, rhs, n)
    if sol is INFEASIBLE:
        raise StructuralError("no normalized invariant integral exists")
    if sol.kernel:
        raise StructuralError(f"invariant integral is not unique ({len(sol.kernel)}-dim freedom)")
    return HaarFunctional(sol.particular)


def haar_checks(H: HopfAlgebra) -> list[Check]:
    anchor = "haar-integral"
    try:
        h = H.haar
    except StructuralError as exc:
        return [check("haar.unique", anchor, str(exc))]
    out = [check("haar.unique", anchor, None, values=[str(v) for v in h.values])]
    n = H.n
    e = [H.basis(i) for i in range(n)]
    out.append(check("haar.kappa_invariant", anchor,
                     first(f"h(kappa({H.labels[i]})) != h({H.labels[i]})"
                           if h(H.kappa(e[i])) != h.values[i] else None for i in range(n))))
    gram = Matrix([[h(H.mul(H.star(e[i]), e[j])) for j in range(n)] for i in range(n)])
    try:
        pos = is_strictly_positive(gram)
        wit = None if pos else "Gram matrix h(x_i* x_j) is not positive definite"
    except ValueError as exc:
        wit = str(exc)
    c = check("haar.positive", anchor, wit)
    if H.kind == "custom":
        c.level = "warning"
    out.append(c)
    return out


# --- builders -------------------------------------------------------------

def function_algebra(group: FiniteGroup, name: str = "") -> HopfAlgebra:
    n = group.n
    labels = [f"d_{x}" for x in group.names]
    mult = [[({i: ONE} if i == j else {}) for j in range(n)] for i in range(n)]
    unit = [ONE] * n
    comult = [{} for _ in range(n)]
    for a in range(n):
        for b in range(n):
            comult[group.table[a][b]][(a, b)] = ONE
    counit = [ONE if g == group.e else ZERO for g in range(n)]
    kappa = Matrix.from_columns([[ONE if k == group.inv[g] else ZERO for k in range(n)] for g in range(n)], n)
    return HopfAlgebra(labels, mult, unit, Matrix.identity(n), comult, counit, kappa,
                       name=name or f"C(G{n})", kind="function_algebra", group=group)


def group_algebra(group: FiniteGroup, name: str = "") -> HopfAlgebra:
    n = group.n
    labels = [f"u_{x}" for x in group.names]
    mult = [[{group.table[i][j]: ONE} for j in range(n)] for i in range(n)]
    unit = [ONE if g == group.e else ZERO for g in range(n)]
    comult = [{(g, g): ONE} for g in range(n)]
    counit = [ONE] * n
    inv = Matrix.from_columns([[ONE if k == group.inv[g] else ZERO for k in range(n)] for g in range(n)], n)
    return HopfAlgebra(labels, mult, unit, inv, comult, counit, inv,
                       name=name or f"CG{n}", kind="group_algebra", group=group)
