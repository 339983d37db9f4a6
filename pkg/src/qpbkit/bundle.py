"""Quantum principal bundles over finite point sets, the horizontal-form
model and covariant derivatives.

Horizontal forms are realized as Hor^k = Omega^k (x) A where A = span{s_b} is a
coaction-stable unital *-subalgebra of GM (s_0 = 1) with {p_a s_b} a basis of
GM and s_b p = tau_b(p) s_b for point permutations tau_b.  Right multiplication
by base forms is s_b nu = sum_d rho(nu)_bd s_d, where rho is the algebra map
fixed by rho(p) = diag(tau_b(p)) and rho(dp) = diag(d tau_b(p)) + [tau(p), w]
for a reference connection matrix w of 1-forms.  Index of mu s_b in Hor^k is
(index of mu) * dim A + b.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import product

from .checks import Check, StructuralError, check, first
from .corep import Corep, check_corep, decompose
from .forms import PathCalculus
from .hopf import Algebra, HopfAlgebra, tensor_mul, tensor_star
from .linalg import (INFEASIBLE, Matrix, ONE, ZERO, Subspace, kernel, solve_affine, vec_add,
                     vec_sub, LinalgError)

__all__ = ["QPBundle", "matrix_algebra", "trivial_bundle", "point_bundle", "HorizontalModel",
           "CovariantDerivative", "derivative_space", "check_derivative", "DerivativeSpace"]


# --- total algebras -----------------------------------------------------------

def matrix_algebra(k: int) -> Algebra:
    labels = [f"E{i + 1}{j + 1}" for i in range(k) for j in range(k)]
    n = k * k
    mult = [[{} for _ in range(n)] for _ in range(n)]
    for i, j, l, m in product(range(k), repeat=4):
        if j == l:
            mult[i * k + j][l * k + m] = {i * k + m: ONE}
    unit = [ONE if i == j else ZERO for i in range(k) for j in range(k)]
    star = Matrix.zeros(n, n)
    for i in range(k):
        for j in range(k):
            star.rows[j * k + i][i * k + j] = ONE
    return Algebra(labels, mult, unit, star, name=f"M{k}")


class QPBundle:
    def __init__(self, total: Algebra, hopf: HopfAlgebra, coaction: Corep,
                 declared_points: int | None = None, name: str = "", kind: str = "custom"):
        if coaction.dim != total.n:
            raise ValueError("coaction size must match the total algebra")
        self.GM = total
        self.H = hopf
        self.Phi = coaction
        self.declared_points = declared_points
        self.name = name
        self.kind = kind

    @property
    def N(self):
        return self.GM.n

    def coact(self, v):
        return self.Phi.coact(v)

    @cached_property
    def invariants(self) -> list:
        """Basis of M = {x : Phi(x) = x (x) 1}."""
        GM, H = self.GM, self.H
        N, n = GM.n, H.n
        rows = []
        for i in range(N):
            for h in range(n):
                row = {}
                for j in range(N):
                    c = self.Phi.u[i][j][h] - (H.unit[h] if i == j else ZERO)
                    if c:
                        row[j] = c
                if row:
                    rows.append(row)
        return kernel(rows, N)

    @cached_property
    def beta_rank(self) -> int:
        GM, H = self.GM, self.H
        N, n = GM.n, H.n
        rows = []
        for a in range(N):
            xa = GM.basis(a)
            for b in range(N):
                vec = [ZERO] * (N * n)
                for i in range(N):
                    y = GM.mul(xa, GM.basis(i))
                    if not any(y):
                        continue
                    for p, c in enumerate(y):
                        if c:
                            for h, e in enumerate(self.Phi.u[i][b]):
                                if e:
                                    vec[p * n + h] = vec[p * n + h] + c * e
                rows.append(vec)
        return Matrix(rows, N * n).rank() if rows else 0

    def checks(self) -> list[Check]:
        GM, H = self.GM, self.H
        N, n = GM.n, H.n
        out = []
        for c in check_corep(self.Phi, prefix="bundle.coaction"):
            c.anchor = "bundle-coaction"
            out.append(c)

        def star_morphism():
            unit = self.coact(GM.unit)
            one2 = [ZERO] * (N * n)
            for a, x in enumerate(GM.unit):
                for h, y in enumerate(H.unit):
                    if x and y:
                        one2[a * n + h] = x * y
            if unit != one2:
                return "Phi(1) != 1 (x) 1"
            imgs = [self.coact(GM.basis(i)) for i in range(N)]
            for i in range(N):
                for j in range(N):
                    if self.coact(GM.mul(GM.basis(i), GM.basis(j))) != tensor_mul(GM, H, imgs[i], imgs[j]):
                        return f"Phi({GM.labels[i]} {GM.labels[j]}) != Phi({GM.labels[i]}) Phi({GM.labels[j]})"
                if self.coact(GM.star(GM.basis(i))) != tensor_star(GM, H, imgs[i]):
                    return f"Phi({GM.labels[i]}*) != Phi({GM.labels[i]})*"
            return None

        out.append(check("bundle.star_algebra_morphism", "bundle-coaction", star_morphism()))

        M = self.invariants

        def base_ok():
            sub = Subspace(M, N)
            if not sub.contains(GM.unit):
                return "1 is not invariant"
            for a in M:
                if not sub.contains(GM.star(a)):
                    return "invariants not closed under star"
                for b in M:
                    if not sub.contains(GM.mul(a, b)):
                        return "invariants not closed under product"
            if self.declared_points is not None and len(M) != self.declared_points:
                return f"invariant dim {len(M)} vs base {self.declared_points} point" + \
                    ("s" if self.declared_points != 1 else "")
            return None

        out.append(check("bundle.base_invariants", "bundle-base", base_ok(), dim_M=len(M)))
        r = self.beta_rank
        out.append(check("bundle.beta_surjective", "bundle-freeness",
                         None if r == N * n else f"rank beta = {r} < {N * n}", rank=r))
        return out

    @cached_property
    def points(self) -> list:
        """Primitive idempotents of the (commutative) invariant subalgebra."""
        return base_points(self.GM, self.invariants)


def _min_poly(A: Algebra, m, sub: Subspace):
    """Monic minimal polynomial of m (coefficients low -> high) via Krylov on 1."""
    powers = [A.unit]
    while True:
        nxt = A.mul(powers[-1], m)
        k = len(powers)
        try:
            sol = Subspace(powers, A.n)
            c = sol.coords(nxt)
            return [-x for x in c] + [ONE]
        except LinalgError:
            powers.append(nxt)
            if len(powers) > A.n + 1:
                raise StructuralError("minimal polynomial search failed")


def _rational_roots(poly):
    """Distinct rational roots of a polynomial with rational coefficients."""
    if any(not c.is_rational() for c in poly):
        raise StructuralError("base splitting needs rational eigenvalues")
    coeffs = [c.to_fraction() for c in poly]
    from math import lcm
    den = 1
    for c in coeffs:
        den = lcm(den, c.denominator)
    ints = [int(c * den) for c in coeffs]
    while ints and ints[0] == 0:
        ints = ints[1:]
        roots0 = True
    else:
        roots0 = False
    roots = set()
    if len(ints) < len(coeffs):
        roots.add(Fraction(0))
    a0, an = abs(ints[0]), abs(ints[-1])

    def divisors(x):
        return [d for d in range(1, x + 1) if x % d == 0] if x else [1]

    for p in divisors(a0):
        for q in divisors(an):
            for s in (1, -1):
                r = Fraction(s * p, q)
                if sum(c * r ** i for i, c in enumerate(ints)) == 0:
                    roots.add(r)
    return sorted(roots)


def base_points(A: Algebra, M: list) -> list:
    sub = Subspace(M, A.n)
    for a in M:
        for b in M:
            if A.mul(a, b) != A.mul(b, a):
                raise StructuralError("base algebra is not commutative")
    parts = [A.unit]
    for m in M:
        poly = _min_poly(A, m, sub)
        roots = _rational_roots(poly)
        if len(roots) != len(poly) - 1:
            raise StructuralError("base element does not split over the rationals")
        new = []
        for e in parts:
            for lam in roots:
                E = e
                for mu in roots:
                    if mu == lam:
                        continue
                    f = [x * Fraction(1) for x in vec_sub(m, [mu * u for u in A.unit])]
                    E = [x / (lam - mu) for x in A.mul(E, f)]
                if any(E):
                    new.append(E)
        parts = new
    if len(parts) != len(M):
        raise StructuralError("could not split the base into points")
    return sorted(parts, key=lambda v: tuple(-c.to_complex().real for c in v))


# --- built-in bundles -------------------------------------------------------------

def point_bundle(H: HopfAlgebra) -> QPBundle:
    from .corep import regular_corep
    A = Algebra(H.labels, H.mult, H.unit, H.star_matrix, name=H.name)
    return QPBundle(A, H, regular_corep(H), declared_points=1, name=f"point bundle {H.name}",
                    kind="hopf")


def trivial_bundle(n_points: int, H: HopfAlgebra) -> QPBundle:
    """GM = C^n (x) H with Phi = id (x) phi; labels p<a>_<h>."""
    nh = H.n
    labels = [f"p{a}_{h}" for a in range(n_points) for h in H.labels]
    N = n_points * nh
    mult = [[{} for _ in range(N)] for _ in range(N)]
    for a in range(n_points):
        for i in range(nh):
            for j in range(nh):
                mult[a * nh + i][a * nh + j] = {a * nh + k: c for k, c in H.mult[i][j].items()}
    unit = [u for _ in range(n_points) for u in H.unit]
    star = Matrix.zeros(N, N)
    for a in range(n_points):
        for i in range(nh):
            for k in range(nh):
                star.rows[a * nh + k][a * nh + i] = H.star_matrix.rows[k][i]
    A = Algebra(labels, mult, unit, star, name=f"C{n_points}(x){H.name}")
    u = [[H.zero() for _ in range(N)] for _ in range(N)]
    for a in range(n_points):
        for j in range(nh):
            for (i, k), c in H.comult[j].items():
                u[a * nh + i][a * nh + j][k] = u[a * nh + i][a * nh + j][k] + c
    return QPBundle(A, H, Corep(H, u, "Phi"), declared_points=n_points,
                    name=f"trivial bundle over {n_points} points", kind="trivial")


# --- horizontal model ------------------------------------------------------------

class HorizontalModel:
    def __init__(self, bundle: QPBundle, base: PathCalculus, a_basis: list | None = None,
                 omega: dict | None = None):
        self.B = bundle
        self.GM = GM = bundle.GM
        self.H = bundle.H
        self.Om = base
        self.cap = base.cap
        pts = bundle.points
        if len(pts) != base.n:
            raise StructuralError(f"base calculus has {base.n} points, bundle base has {len(pts)}")
        self.pts = pts
        if a_basis is None:
            a_basis = default_horizontal_basis(bundle)
        if not a_basis or a_basis[0] != GM.unit:
            a_basis = [GM.unit] + [s for s in (a_basis or []) if s != GM.unit]
        self.s = a_basis
        self.m = m = len(a_basis)
        n = base.n
        if n * m != GM.n:
            raise StructuralError(f"{n} points x {m} generators != dim GM = {GM.n}")
        cols = [GM.mul(pts[a], a_basis[b]) for a in range(n) for b in range(m)]
        try:
            self._sub = Subspace(cols, GM.n)
        except LinalgError:
            raise StructuralError("{p_a s_b} is not a basis of GM")
        self._cols = cols
        # tau_b(a): s_b p_a = p_{tau_b(a)} s_b
        self.tau = []
        for b in range(m):
            row = []
            for a in range(n):
                c = self._sub.coords(GM.mul(a_basis[b], pts[a]))
                hits = [i for i, x in enumerate(c) if x]
                if len(hits) != 1 or c[hits[0]] != 1 or hits[0] % m != b:
                    raise StructuralError(f"s_{b} p_{a} is not a translated point times s_{b}")
                row.append(hits[0] // m)
            self.tau.append(row)
        self.struct = [[self._a_coords(GM.mul(a_basis[b], a_basis[d])) for d in range(m)] for b in range(m)]
        self.S = [self._a_coords(GM.star(a_basis[b])) for b in range(m)]  # S[b][c]: s_b* = sum_c S[b][c] s_c
        # Phi(s_b) = sum_c s_c (x) PA[c][b]
        H = self.H
        self.PA = [[H.zero() for _ in range(m)] for _ in range(m)]
        for b in range(m):
            img = bundle.coact(a_basis[b])
            for h in range(H.n):
                leg = [img[i * H.n + h] for i in range(GM.n)]
                if any(leg):
                    cs = self._a_coords(leg)
                    for c in range(m):
                        if cs[c]:
                            self.PA[c][b][h] = self.PA[c][b][h] + cs[c]
        self.omega = {}
        for (b, d), form in (omega or {}).items():
            if any(form):
                self.omega[(b, d)] = list(form)
        self._rho_cache = {}

    def _a_coords(self, v):
        """Coordinates of an element of A in the s-basis (error if not in A)."""
        c = self._sub.coords(v)
        n, m = self.Om.n, self.m
        out = []
        for b in range(m):
            vals = [c[a * m + b] for a in range(n)]
            if any(x != vals[0] for x in vals):
                raise StructuralError("generator products leave span{s_b}")
            out.append(vals[0])
        return out

    # --- sizes and basics ---
    def dim(self, k):
        return self.Om.dim(k) * self.m

    def zero(self, k):
        return [ZERO] * self.dim(k)

    def basis(self, k, i):
        v = self.zero(k)
        v[i] = ONE
        return v

    def label(self, k, i):
        x, b = divmod(i, self.m)
        return f"{self.Om.label(k, x)}.s{b}"

    def w(self, b, d):
        return self.omega.get((b, d)) or self.Om.zero(1)

    def embed(self, k, mu, b=0):
        out = self.zero(k)
        for x, c in enumerate(mu):
            if c:
                out[x * self.m + b] = c
        return out

    def from_gm(self, v):
        return self._sub.coords(v)

    def to_gm(self, u):
        return self._sub.vector(u)

    # --- rho: right multiplication by base forms ---
    def _rho_point(self, a):
        Om, m = self.Om, self.m
        return [[Om.point(self.tau[b][a]) if b == d else Om.zero(0) for d in range(m)] for b in range(m)]

    def _rho_dpoint(self, a):
        Om, m = self.Om, self.m
        out = [[Om.zero(1) for _ in range(m)] for _ in range(m)]
        for b in range(m):
            out[b][b] = Om.dp(self.tau[b][a])
            for d in range(m):
                w = self.w(b, d)
                if any(w):
                    t1 = Om.mul(0, Om.point(self.tau[b][a]), 1, w)
                    t2 = Om.mul(1, w, 0, Om.point(self.tau[d][a]))
                    out[b][d] = vec_add(out[b][d], vec_sub(t1, t2))
        return out

    def _mat_mul(self, k, X, l, Y):
        Om, m = self.Om, self.m
        out = [[Om.zero(k + l) for _ in range(m)] for _ in range(m)]
        for b in range(m):
            for e in range(m):
                if not any(X[b][e]):
                    continue
                for d in range(m):
                    if any(Y[e][d]):
                        out[b][d] = vec_add(out[b][d], Om.mul(k, X[b][e], l, Y[e][d]))
        return out

    def rho_basis(self, k, x):
        key = (k, x)
        if key not in self._rho_cache:
            path = self.Om.paths[k][x]
            R = self._rho_point(path[0])
            deg = 0
            for y in path[1:]:
                R = self._mat_mul(deg, R, 1, self._rho_dpoint(y))
                deg += 1
            self._rho_cache[key] = R
        return self._rho_cache[key]

    def rho(self, k, mu):
        Om, m = self.Om, self.m
        out = [[Om.zero(k) for _ in range(m)] for _ in range(m)]
        for x, c in enumerate(mu):
            if not c:
                continue
            R = self.rho_basis(k, x)
            for b in range(m):
                for d in range(m):
                    if any(R[b][d]):
                        out[b][d] = [o + c * r for o, r in zip(out[b][d], R[b][d])]
        return out

    # --- algebra ---
    def split(self, k, u):
        m = self.m
        return [(x, b, c) for i, c in enumerate(u) if c for x, b in [divmod(i, m)]]

    def mul(self, k, u, l, v):
        Om, m = self.Om, self.m
        out = self.zero(k + l)
        for y, c, cv in self.split(l, v):
            nu = Om.basis(l, y)
            R = self.rho_basis(l, y)
            for x, b, cu in self.split(k, u):
                mu = Om.basis(k, x)
                for d in range(m):
                    if not any(R[b][d]):
                        continue
                    form = Om.mul(k, mu, l, R[b][d])
                    for e, se in enumerate(self.struct[d][c]):
                        if se:
                            coef = cu * cv * se
                            for z, f in enumerate(form):
                                if f:
                                    out[z * m + e] = out[z * m + e] + coef * f
        return out

    def star(self, k, u):
        Om, m = self.Om, self.m
        out = self.zero(k)
        for x, b, cu in self.split(k, u):
            mu_star = Om.star(k, Om.basis(k, x))
            R = self.rho(k, mu_star)
            for c in range(m):
                scb = self.S[b][c]
                if not scb:
                    continue
                for d in range(m):
                    for z, f in enumerate(R[c][d]):
                        if f:
                            out[z * m + d] = out[z * m + d] + cu.conj() * scb * f
        return out

    def left_base(self, j, mu, k, u):
        """mu . u for mu in Omega^j."""
        Om, m = self.Om, self.m
        out = self.zero(j + k)
        for x, b, c in self.split(k, u):
            form = Om.mul(j, mu, k, Om.basis(k, x))
            for z, f in enumerate(form):
                if f:
                    out[z * m + b] = out[z * m + b] + c * f
        return out

    def right_base(self, k, u, j, mu):
        return self.mul(k, u, j, self.embed(j, mu))

    # --- coaction ---
    def coact(self, k, u):
        H, m = self.H, self.m
        n = H.n
        out = [ZERO] * (self.dim(k) * n)
        for x, b, c in self.split(k, u):
            for cc in range(m):
                for h, e in enumerate(self.PA[cc][b]):
                    if e:
                        idx = (x * m + cc) * n + h
                        out[idx] = out[idx] + c * e
        return out

    @cached_property
    def _coreps(self):
        return {}

    def corep(self, k) -> Corep:
        if k not in self._coreps:
            H, m = self.H, self.m
            dim = self.dim(k)
            u = [[H.zero() for _ in range(dim)] for _ in range(dim)]
            for x in range(self.Om.dim(k)):
                for c in range(m):
                    for b in range(m):
                        u[x * m + c][x * m + b] = self.PA[c][b]
            self._coreps[k] = Corep(H, u, f"Hor{k}")
        return self._coreps[k]

    # --- model checks ---
    def checks(self, irreps=None) -> list[Check]:
        anchor = "horizontal-forms"
        cap = self.cap
        GM = self.GM
        out = []

        def assoc():
            for k, l, r in product(range(cap + 1), repeat=3):
                if k + l + r > cap:
                    continue
                for i in range(self.dim(k)):
                    a = self.basis(k, i)
                    for j in range(self.dim(l)):
                        b = self.basis(l, j)
                        ab = self.mul(k, a, l, b)
                        for s in range(self.dim(r)):
                            c = self.basis(r, s)
                            if self.mul(k + l, ab, r, c) != self.mul(k, a, l + r, self.mul(l, b, r, c)):
                                return f"({self.label(k, i)} {self.label(l, j)}) {self.label(r, s)} not associative"
            return None

        def star():
            for k in range(cap + 1):
                for i in range(self.dim(k)):
                    a = self.basis(k, i)
                    if self.star(k, self.star(k, a)) != a:
                        return f"(w*)* != w on {self.label(k, i)}"
            for k, l in product(range(cap + 1), repeat=2):
                if k + l > cap:
                    continue
                sign = -1 if (k * l) % 2 else 1
                for i in range(self.dim(k)):
                    a = self.basis(k, i)
                    sa = self.star(k, a)
                    for j in range(self.dim(l)):
                        b = self.basis(l, j)
                        lhs = self.star(k + l, self.mul(k, a, l, b))
                        rhs = self.mul(l, self.star(l, b), k, sa)
                        if lhs != [sign * x for x in rhs]:
                            return f"(ab)* != (-1)^kl b* a* on ({self.label(k, i)}, {self.label(l, j)})"
            return None

        def coaction():
            H = self.H
            for k in range(cap + 1):
                for c in check_corep(self.corep(k)):
                    if not c.passed:
                        return f"degree {k}: {c.witness}"
            for k, l in product(range(cap + 1), repeat=2):
                if k + l > cap:
                    continue
                for i in range(self.dim(k)):
                    a = self.basis(k, i)
                    ca = self.coact(k, a)
                    for j in range(self.dim(l)):
                        b = self.basis(l, j)
                        if self.coact(k + l, self.mul(k, a, l, b)) != self._tmul(k, ca, l, self.coact(l, b)):
                            return f"coaction not multiplicative on ({self.label(k, i)}, {self.label(l, j)})"
            for k in range(cap + 1):
                for i in range(self.dim(k)):
                    a = self.basis(k, i)
                    if self.coact(k, self.star(k, a)) != self._tstar(k, self.coact(k, a)):
                        return f"coaction not *-compatible on {self.label(k, i)}"
            return None

        def invariants():
            for k in range(cap + 1):
                ker = kernel(self._inv_rows(k), self.dim(k))
                if len(ker) != self.Om.dim(k):
                    return f"degree {k}: {len(ker)} invariants vs {self.Om.dim(k)} base forms"
                sub = Subspace(ker, self.dim(k))
                for x in range(self.Om.dim(k)):
                    if not sub.contains(self.embed(k, self.Om.basis(k, x))):
                        return f"base form {self.Om.label(k, x)} is not invariant"
            return None

        def degree0():
            for i in range(self.dim(0)):
                for j in range(self.dim(0)):
                    lhs = self.to_gm(self.mul(0, self.basis(0, i), 0, self.basis(0, j)))
                    if lhs != GM.mul(self._cols[i], self._cols[j]):
                        return f"Hor^0 product differs from GM on ({self.label(0, i)}, {self.label(0, j)})"
                if self.to_gm(self.star(0, self.basis(0, i))) != GM.star(self._cols[i]):
                    return f"Hor^0 star differs from GM on {self.label(0, i)}"
            return None

        def base_embedding():
            Om = self.Om
            for k, l in product(range(cap + 1), repeat=2):
                if k + l > cap:
                    continue
                for x in range(Om.dim(k)):
                    mu = Om.basis(k, x)
                    for y in range(Om.dim(l)):
                        nu = Om.basis(l, y)
                        if self.mul(k, self.embed(k, mu), l, self.embed(l, nu)) != self.embed(k + l, Om.mul(k, mu, l, nu)):
                            return f"base forms not a subalgebra at ({Om.label(k, x)}, {Om.label(l, y)})"
            for k in range(cap + 1):
                for x in range(Om.dim(k)):
                    mu = Om.basis(k, x)
                    if self.star(k, self.embed(k, mu)) != self.embed(k, Om.star(k, mu)):
                        return f"base star not preserved at {Om.label(k, x)}"
            return None

        out += [
            check("hor.associativity", anchor, assoc()),
            check("hor.star", anchor, star()),
            check("hor.coaction_morphism", anchor, coaction()),
            check("hor.invariants_are_base", anchor, invariants()),
            check("hor.degree0_is_total", anchor, degree0()),
            check("hor.base_embedding", anchor, base_embedding()),
        ]
        if irreps is not None:
            wit = None
            blocks = {}
            for k in range(cap + 1):
                dec = decompose(self.corep(k), list(irreps))
                blocks[k] = {a: v for a, v in dec.multiplicities.items()}
                if not dec.complete:
                    wit = f"degree {k}: isotypic blocks do not exhaust Hor^{k}"
                    break
            out.append(check("hor.peter_weyl_blocks", anchor, wit,
                             blocks={str(k): v for k, v in blocks.items()}))
        return out

    def _inv_rows(self, k):
        H = self.H
        n = H.n
        rows = []
        cor = self.corep(k)
        dim = self.dim(k)
        for i in range(dim):
            for h in range(n):
                row = {}
                for j in range(dim):
                    c = cor.u[i][j][h] - (H.unit[h] if i == j else ZERO)
                    if c:
                        row[j] = c
                if row:
                    rows.append(row)
        return rows

    def _tmul(self, k, u, l, v):
        """Product in Hor (x) H of dense tensors."""
        H = self.H
        n = H.n
        out = [ZERO] * (self.dim(k + l) * n)
        nz_u = [(i // n, i % n, c) for i, c in enumerate(u) if c]
        nz_v = [(i // n, i % n, c) for i, c in enumerate(v) if c]
        for a, h1, c1 in nz_u:
            ea = self.basis(k, a)
            for b, h2, c2 in nz_v:
                prod = self.mul(k, ea, l, self.basis(l, b))
                hh = H.mult[h1][h2]
                for z, f in enumerate(prod):
                    if f:
                        for q, mq in hh.items():
                            out[z * n + q] = out[z * n + q] + c1 * c2 * f * mq
        return out

    def _tstar(self, k, u):
        H = self.H
        n = H.n
        out = [ZERO] * (self.dim(k) * n)
        for i, c in enumerate(u):
            if not c:
                continue
            a, h = divmod(i, n)
            sa = self.star(k, self.basis(k, a))
            sh = H._star_cols[h]
            for z, f in enumerate(sa):
                if f:
                    for q, g in enumerate(sh):
                        if g:
                            out[z * n + q] = out[z * n + q] + c.conj() * f * g
        return out


def default_horizontal_basis(bundle: QPBundle):
    GM = bundle.GM
    if bundle.kind == "hopf" or len(bundle.invariants) == 1:
        cand = [GM.unit] + [GM.basis(i) for i in range(GM.n)]
    elif bundle.kind == "trivial":
        H = bundle.H
        npts = GM.n // H.n
        lift = lambda h: [x for _ in range(npts) for x in h]
        cand = [GM.unit] + [lift(H.basis(i)) for i in range(H.n)]
    else:
        raise StructuralError("this bundle needs an explicit horizontal_basis")
    out = []
    for v in cand:
        try:
            Subspace(out + [v], GM.n)
            out.append(v)
        except LinalgError:
            continue
    return out


# --- covariant derivatives -------------------------------------------------------

class CovariantDerivative:
    """D(mu s_b) = d mu s_b + (-1)^k mu sum_d c_bd s_d, with c a matrix of 1-forms."""

    def __init__(self, model: HorizontalModel, conn: dict | None = None):
        self.hm = model
        self.conn = {k: list(v) for k, v in (conn if conn is not None else model.omega).items() if any(v)}

    def c(self, b, d):
        return self.conn.get((b, d)) or self.hm.Om.zero(1)

    def apply(self, k, u):
        hm = self.hm
        Om, m = hm.Om, hm.m
        out = hm.zero(k + 1)
        sign = -1 if k % 2 else 1
        for x, b, cu in hm.split(k, u):
            mu = Om.basis(k, x)
            dmu = Om.d(k, mu)
            for z, f in enumerate(dmu):
                if f:
                    out[z * m + b] = out[z * m + b] + cu * f
            for d in range(m):
                w = self.c(b, d)
                if any(w):
                    form = Om.mul(k, mu, 1, w)
                    for z, f in enumerate(form):
                        if f:
                            out[z * m + d] = out[z * m + d] + sign * cu * f
        return out

    def matrix(self, k) -> Matrix:
        hm = self.hm
        return Matrix.from_columns([self.apply(k, hm.basis(k, i)) for i in range(hm.dim(k))], hm.dim(k + 1)) \
            if hm.dim(k) else Matrix.zeros(hm.dim(k + 1), 0)

    def conn_strings(self):
        hm = self.hm
        from .expr import format_combo
        labels = hm.Om.labels(1)
        return {f"s{b},s{d}": format_combo(w, labels) for (b, d), w in sorted(self.conn.items())}


def _residuals(D: CovariantDerivative):
    """Concatenated covariance / Leibniz / base residuals (linear-affine in the connection)."""
    hm = D.hm
    cap = hm.cap
    res = []
    for k in range(cap):
        for i in range(hm.dim(k)):
            a = hm.basis(k, i)
            lhs = hm.coact(k + 1, D.apply(k, a))
            # (D (x) id) Phi_H(a)
            ca = hm.coact(k, a)
            n = hm.H.n
            rhs = [ZERO] * (hm.dim(k + 1) * n)
            for j, c in enumerate(ca):
                if c:
                    z, h = divmod(j, n)
                    img = D.apply(k, hm.basis(k, z))
                    for y, f in enumerate(img):
                        if f:
                            rhs[y * n + h] = rhs[y * n + h] + c * f
            res.append(("covariance", (k, i), vec_sub(lhs, rhs)))
    for k, l in product(range(cap), repeat=2):
        if k + l + 1 > cap:
            continue
        sign = -1 if k % 2 else 1
        for i in range(hm.dim(k)):
            a = hm.basis(k, i)
            Da = D.apply(k, a)
            for j in range(hm.dim(l)):
                b = hm.basis(l, j)
                lhs = D.apply(k + l, hm.mul(k, a, l, b))
                rhs = vec_add(hm.mul(k + 1, Da, l, b), [sign * x for x in hm.mul(k, a, l + 1, D.apply(l, b))])
                res.append(("leibniz", (k, i, l, j), vec_sub(lhs, rhs)))
    Om = hm.Om
    for k in range(cap):
        for x in range(Om.dim(k)):
            mu = Om.basis(k, x)
            res.append(("base", (k, x), vec_sub(D.apply(k, hm.embed(k, mu)), hm.embed(k + 1, Om.d(k, mu)))))
    return res


def _star_residual(D: CovariantDerivative):
    hm = D.hm
    for k in range(hm.cap):
        for i in range(hm.dim(k)):
            a = hm.basis(k, i)
            if D.apply(k, hm.star(k, a)) != hm.star(k + 1, D.apply(k, a)):
                return f"D(x*) != D(x)* on {hm.label(k, i)}"
    return None


def check_derivative(D: CovariantDerivative) -> list[Check]:
    anchor = "covariant-derivative"
    hm = D.hm
    wit = {"covariance": None, "leibniz": None, "base": None}
    for kind, where, r in _residuals(D):
        if wit[kind] is None and any(r):
            if kind == "leibniz":
                k, i, l, j = where
                wit[kind] = f"D(ab) != D(a)b + (-1)^k a D(b) on ({hm.label(k, i)}, {hm.label(l, j)})"
            elif kind == "covariance":
                wit[kind] = f"D does not intertwine the coaction on {hm.label(*where)}"
            else:
                wit[kind] = f"D != d on base form {hm.Om.label(*where)}"
    return [
        check("derivative.intertwiner", anchor, wit["covariance"]),
        check("derivative.leibniz", anchor, wit["leibniz"]),
        check("derivative.star", anchor, _star_residual(D)),
        check("derivative.restricts_to_d", anchor, wit["base"]),
    ]


@dataclass
class DerivativeSpace:
    particular: CovariantDerivative | None
    displacements: list  # list of connection dicts
    star_stable: bool


def derivative_space(hm: HorizontalModel, reference: CovariantDerivative | None = None) -> DerivativeSpace:
    """All D = D_ref + Lambda solving the linear conditions; star imposed afterwards."""
    ref = reference or CovariantDerivative(hm)
    m, q = hm.m, hm.Om.dim(1)
    unknowns = [(b, d, z) for b in range(m) for d in range(m) for z in range(q)]
    base = [x for _, _, r in _residuals(ref) for x in r]
    cols = []
    for (b, d, z) in unknowns:
        conn = {key: list(v) for key, v in ref.conn.items()}
        w = list(conn.get((b, d), hm.Om.zero(1)))
        w[z] = w[z] + ONE
        conn[(b, d)] = w
        r = [x for _, _, r in _residuals(CovariantDerivative(hm, conn)) for x in r]
        cols.append(vec_sub(r, base))
    if not unknowns:
        ok = not any(base)
        return DerivativeSpace(ref if ok else None, [], True)
    A = Matrix.from_columns(cols, len(base))
    sol = solve_affine(A, [-x for x in base])
    if sol is INFEASIBLE:
        return DerivativeSpace(None, [], False)

    def to_conn(vec, start):
        conn = {key: list(v) for key, v in start.items()}
        for (b, d, z), c in zip(unknowns, vec):
            if c:
                w = list(conn.get((b, d), hm.Om.zero(1)))
                w[z] = w[z] + c
                conn[(b, d)] = w
        return conn

    part = CovariantDerivative(hm, to_conn(sol.particular, ref.conn))
    disp = [to_conn(v, {}) for v in sol.kernel]
    # star-stability of the displacement space: Lambda -> * Lambda * stays inside
    stable = True
    if disp:
        ker = Subspace(sol.kernel, len(unknowns))
        for v in sol.kernel:
            # realize Lambda* through its action on the generators s_b
            Dl = CovariantDerivative(hm, to_conn(v, {}))
            Dz = CovariantDerivative(hm, {})
            lam_star = []
            for b in range(m):
                sb = hm.basis(0, b)
                x = vec_sub(hm.star(1, Dl.apply(0, hm.star(0, sb))), hm.star(1, Dz.apply(0, hm.star(0, sb))))
                for d in range(m):
                    lam_star.extend(x[z * m + d] for z in range(q))
            order = [(b, d, z) for b in range(m) for d in range(m) for z in range(q)]
            if not ker.contains([lam_star[order.index(u)] for u in unknowns]):
                stable = False
    return DerivativeSpace(part, disp, stable)
