"""Bicovariant first-order calculi on a finite Hopf *-algebra, the graded
envelope of invGamma up to degree 3, vertical forms and the point-bundle
curvature.

invGamma = H / (C1 + R) with the germs map pi as quotient projection.  The
degree-k part of the envelope is invGamma^(x)k modulo the ideal generated by
rho_r = pi(r1) (x) pi(r2), r in R.
"""
from __future__ import annotations

from functools import cached_property

from .checks import Check, check, first
from .corep import Corep, check_corep
from .hopf import Algebra, HopfAlgebra
from .linalg import (Matrix, ONE, ZERO, Quotient, _Echelon, _as_sparse, kron, vec_add,
                     vec_conj, vec_sub)

__all__ = ["FODC", "build_fodc", "Exterior", "VerticalForms", "fodc_checks",
           "point_curvature", "MAX_CAP"]

MAX_CAP = 3


def _kron_vec(a, b):
    out = []
    for x in a:
        if x:
            out.extend(x * y if y else ZERO for y in b)
        else:
            out.extend([ZERO] * len(b))
    return out


class FODC:
    def __init__(self, hopf: HopfAlgebra, generators=()):
        H = self.hopf = hopf
        n = H.n
        self.generators = [list(g) for g in generators]
        self.bad_generators = [i for i, g in enumerate(self.generators) if H.eps(g)]
        # close under right multiplication
        ech = _Echelon()
        basis = []
        queue = []
        for g in self.generators:
            if ech.add(_as_sparse(g)):
                basis.append(g)
                queue.append(g)
        while queue:
            r = queue.pop(0)
            for j in range(n):
                y = H.mul(r, H.basis(j))
                if ech.add(_as_sparse(y)):
                    basis.append(y)
                    queue.append(y)
        self.R = basis
        self.Q = Quotient(n, [H.unit] + basis)
        self.dim = self.Q.dim
        self.labels = [f"pi({H.labels[f]})" for f in self.Q.free]

    # --- germs ---
    def pi(self, v):
        return self.Q.project(v)

    def lift(self, c):
        return self.Q.lift(c)

    def basis(self, i):
        v = [ZERO] * self.dim
        v[i] = ONE
        return v

    @cached_property
    def _pi_basis(self):
        return [self.pi(self.hopf.basis(i)) for i in range(self.hopf.n)]

    @cached_property
    def action_matrices(self):
        """A[j]: theta -> theta o x_j."""
        H = self.hopf
        out = []
        for j in range(H.n):
            xj = H.basis(j)
            cols = []
            for t in range(self.dim):
                g = self.lift(self.basis(t))
                w = vec_sub(H.mul(g, xj), [H.eps(g) * c for c in xj])
                cols.append(self.pi(w))
            out.append(Matrix.from_columns(cols, self.dim) if self.dim else Matrix.zeros(0, 0))
        return out

    def act(self, theta, h):
        """theta o h for h in H (dense)."""
        out = [ZERO] * self.dim
        for j, c in enumerate(h):
            if c:
                out = vec_add(out, [c * x for x in self.action_matrices[j] @ theta])
        return out

    def star(self, theta):
        """pi(g)* = -pi(kappa(g)*), antilinear."""
        H = self.hopf
        g = self.lift(theta)
        return [-x for x in self.pi(H.star(H.kappa(g)))]

    def d1(self, theta):
        """d pi(g) = -sum pi(g1) (x) pi(g2) as a tensor in invGamma^(x)2."""
        return self.pi2(self.lift(theta), sign=-1)

    def pi2(self, g, sign=1):
        d = self.dim
        out = [ZERO] * (d * d)
        pb = self._pi_basis
        for (a, b), c in self.hopf.comul_sparse(g).items():
            pa, pbv = pb[a], pb[b]
            for i, x in enumerate(pa):
                if x:
                    for j, y in enumerate(pbv):
                        if y:
                            out[i * d + j] = out[i * d + j] + sign * c * x * y
        return out

    @cached_property
    def ad(self) -> Corep:
        """ad(pi(g)) = sum pi(g2) (x) kappa(g1) g3."""
        H = self.hopf
        d = self.dim
        u = [[H.zero() for _ in range(d)] for _ in range(d)]
        pb = self._pi_basis
        kap = [H.kappa(H.basis(a)) for a in range(H.n)]
        for j in range(d):
            g = self.lift(self.basis(j))
            for (a, b, c), coef in H.comul2_sparse(g).items():
                pv = pb[b]
                if not any(pv):
                    continue
                el = H.mul(kap[a], H.basis(c))
                for i, x in enumerate(pv):
                    if x:
                        u[i][j] = vec_add(u[i][j], [coef * x * y for y in el])
        return Corep(H, u, "ad")

    def ad_invariance_witness(self):
        H = self.hopf
        n = H.n
        span = _Echelon()
        for r in self.R:
            span.add(_as_sparse(r))
        kap = [H.kappa(H.basis(a)) for a in range(n)]
        for idx, r in enumerate(self.R):
            # ad(r) = sum x_b (x) kappa(x_a) x_c; collect the left legs per right basis y
            legs = [[ZERO] * n for _ in range(n)]
            for (a, b, c), coef in H.comul2_sparse(r).items():
                el = H.mul(kap[a], H.basis(c))
                for y, z in enumerate(el):
                    if z:
                        legs[y][b] = legs[y][b] + coef * z
            for y in range(n):
                if span.reduce(_as_sparse(legs[y])):
                    return f"ad(r{idx + 1}) has a left leg outside R"
        return None

    def star_witness(self):
        """kappa(R)* must stay in C1 + R for the star to descend."""
        H = self.hopf
        for idx, r in enumerate(self.R):
            if not self.Q.is_relation(H.star(H.kappa(r))):
                return f"kappa(r{idx + 1})* not in C1 + R"
        return None

    def germs_witness(self):
        H = self.hopf
        n = H.n
        for i in range(n):
            xi = H.basis(i)
            for j in range(n):
                xj = H.basis(j)
                lhs = self.act(self._pi_basis[i], xj)
                rhs = self.pi(vec_sub(H.mul(xi, xj), [H.counit[i] * c for c in xj]))
                if lhs != rhs:
                    return f"pi({H.labels[i]}) o {H.labels[j]} != pi(gg' - eps(g)g')"
        return None


def build_fodc(H: HopfAlgebra, generators=()) -> FODC:
    return FODC(H, generators)


class Exterior:
    """invGamma^wedge in degrees 0..cap, coordinates relative to fixed quotients."""

    def __init__(self, F: FODC, cap: int = 2):
        if cap > MAX_CAP or cap < 1:
            raise ValueError(f"degree cap must be between 1 and {MAX_CAP}")
        self.F = F
        self.cap = cap
        d = F.dim
        self.d = d
        H = F.hopf
        self.rho = [F.pi2(r) for r in F.R]
        rel = {0: [], 1: [], 2: list(self.rho)}
        if cap >= 3:
            eye = [[ONE if i == j else ZERO for j in range(d)] for i in range(d)]
            rel[3] = [_kron_vec(r, e) for r in self.rho for e in eye] + \
                     [_kron_vec(e, r) for r in self.rho for e in eye]
        self.Q = {k: Quotient(d ** k, rel.get(k, [])) for k in range(cap + 1)}

    def dim(self, k):
        return self.Q[k].dim

    def basis(self, k, i):
        v = [ZERO] * self.dim(k)
        v[i] = ONE
        return v

    def lift(self, k, c):
        return self.Q[k].lift(c)

    def proj(self, k, t):
        return self.Q[k].project(t)

    def zero(self, k):
        return [ZERO] * self.dim(k)

    def mul(self, k, a, l, b):
        if k + l > self.cap:
            raise ValueError("product beyond the degree cap")
        return self.proj(k + l, _kron_vec(self.lift(k, a), self.lift(l, b)))

    def _tensor_map(self, k, t, f1, img_deg):
        """Apply sum_i sign_i (..(x)f1(theta_i)(x)..) to a tensor t of degree k."""
        d = self.d
        size = d ** (k - 1 + img_deg)
        out = [ZERO] * size
        for idx, c in enumerate(t):
            if not c:
                continue
            digits = []
            rem = idx
            for _ in range(k):
                digits.append(rem % d)
                rem //= d
            digits.reverse()
            for pos in range(k):
                img = f1(digits[pos])
                if not any(img):
                    continue
                sign = -1 if pos % 2 else 1
                pre = digits[:pos]
                post = digits[pos + 1:]
                pre_idx = 0
                for x in pre:
                    pre_idx = pre_idx * d + x
                post_idx = 0
                for x in post:
                    post_idx = post_idx * d + x
                stride_post = d ** len(post)
                stride_img = d ** img_deg
                for m, y in enumerate(img):
                    if y:
                        target = (pre_idx * stride_img + m) * stride_post + post_idx
                        out[target] = out[target] + sign * c * y
        return out

    @cached_property
    def _d1(self):
        return [self.F.d1(self.F.basis(i)) for i in range(self.d)]

    def dform(self, k, a):
        """d: degree k -> k+1 (graded Leibniz on tensor representatives)."""
        if k + 1 > self.cap:
            raise ValueError("d beyond the degree cap")
        if k == 0:
            return self.zero(1)
        t = self.lift(k, a)
        return self.proj(k + 1, self._tensor_map(k, t, lambda i: self._d1[i], 2))

    @cached_property
    def _star1(self):
        return [self.F.star(self.F.basis(i)) for i in range(self.d)]

    def star(self, k, a):
        if k == 0:
            return vec_conj(a)
        d = self.d
        t = self.lift(k, a)
        sign = -1 if (k * (k - 1) // 2) % 2 else 1
        out = [ZERO] * (d ** k)
        for idx, c in enumerate(t):
            if not c:
                continue
            digits = []
            rem = idx
            for _ in range(k):
                digits.append(rem % d)
                rem //= d
            # digits are already reversed (least significant first) = reversed order
            vec = [ONE]
            for x in digits:
                vec = _kron_vec(vec, self._star1[x])
            cc = c.conj() * sign
            out = [o + cc * v if v else o for o, v in zip(out, vec)]
        return self.proj(k, out)

    def act(self, k, a, h):
        """(theta_1 (x) .. (x) theta_k) o h = sum (theta_1 o h(1)) (x) .. (x) (theta_k o h(k))."""
        if k == 0:
            return [self.F.hopf.eps(h) * x for x in a]
        H = self.F.hopf
        t = self.lift(k, a)
        legs = {(): ONE}
        # iterated coproduct of h into k legs
        cur = {(i,): c for i, c in enumerate(h) if c}
        for _ in range(k - 1):
            nxt = {}
            for key, c in cur.items():
                for (p, q), c2 in H.comult[key[-1]].items():
                    nk = key[:-1] + (p, q)
                    nxt[nk] = nxt.get(nk, ZERO) + c * c2
            cur = {k2: v for k2, v in nxt.items() if v}
        d = self.d
        A = self.F.action_matrices
        out = [ZERO] * (d ** k)
        for idx, c in enumerate(t):
            if not c:
                continue
            digits = []
            rem = idx
            for _ in range(k):
                digits.append(rem % d)
                rem //= d
            digits.reverse()
            for key, c2 in cur.items():
                vec = [ONE]
                for x, hidx in zip(digits, key):
                    vec = _kron_vec(vec, A[hidx].column(x))
                    if not any(vec):
                        break
                if any(vec):
                    cc = c * c2
                    out = [o + cc * v if v else o for o, v in zip(out, vec)]
        return self.proj(k, out)

    def pi_form(self, g):
        return self.F.pi(g)

    # --- consistency checks ---
    def checks(self) -> list[Check]:
        anchor = "invariant-forms-envelope"
        F = self.F
        H = F.hopf
        out = []

        def d_welldefined():
            # d(J_2) in J_3 and J o h in J
            for ridx, r in enumerate(self.rho):
                if self.cap >= 3:
                    img = self._tensor_map(2, r, lambda i: self._d1[i], 2)
                    if any(self.proj(3, img)):
                        return f"d(rho_{ridx + 1}) not in the relations"
            return None

        def action_welldefined():
            for ridx, r in enumerate(self.rho):
                for j in range(H.n):
                    # act on the raw tensor; must land in J_2
                    cur = H.comul_sparse(H.basis(j))
                    d = self.d
                    A = F.action_matrices
                    acc = [ZERO] * (d * d)
                    for idx, c in enumerate(r):
                        if not c:
                            continue
                        a, b = divmod(idx, d)
                        for (p, q), c2 in cur.items():
                            v = _kron_vec(A[p].column(a), A[q].column(b))
                            acc = [o + c * c2 * x if x else o for o, x in zip(acc, v)]
                    if any(self.proj(2, acc)):
                        return f"rho_{ridx + 1} o {H.labels[j]} not in the relations"
            return None

        def d_squared():
            for k in range(0, self.cap - 1):
                for i in range(self.dim(k)):
                    if any(self.dform(k + 1, self.dform(k, self.basis(k, i)))):
                        return f"d^2 != 0 on degree {k} basis {i + 1}"
            return None

        def star_involutive():
            for k in range(1, self.cap + 1):
                for i in range(self.dim(k)):
                    e = self.basis(k, i)
                    if self.star(k, self.star(k, e)) != e:
                        return f"(w*)* != w in degree {k}"
            return None

        def d_star():
            for k in range(1, self.cap):
                for i in range(self.dim(k)):
                    e = self.basis(k, i)
                    if self.dform(k, self.star(k, e)) != self.star(k + 1, self.dform(k, e)):
                        return f"d(w*) != (dw)* in degree {k}"
            return None

        out.append(check("calculus.d_descends", anchor, d_welldefined()))
        out.append(check("calculus.action_descends", anchor, action_welldefined()))
        out.append(check("calculus.d_squared", anchor, d_squared()))
        out.append(check("calculus.star_involutive", anchor, star_involutive()))
        out.append(check("calculus.d_star", anchor, d_star()))
        return out


def fodc_checks(F: FODC) -> list[Check]:
    anchor = "bicovariant-fodc"
    H = F.hopf
    out = [
        check("calculus.ideal_in_ker_eps", anchor,
              None if not F.bad_generators else f"generator {F.bad_generators[0] + 1} has eps != 0"),
        check("calculus.ad_invariant", anchor, F.ad_invariance_witness()),
        check("calculus.germs_identity", anchor, F.germs_witness()),
        check("calculus.star_descends", anchor, F.star_witness(),
              ),
    ]
    out[0].data["dim_R"] = len(F.R)
    out[0].data["dim_invGamma"] = F.dim
    for c in check_corep(F.ad, prefix="calculus.ad"):
        out.append(c)
    return out


class VerticalForms:
    """Ver^k = GM (x) invGamma^k (lex) over an algebra with a right H-coaction."""

    def __init__(self, algebra: Algebra, coaction: Corep, ext: Exterior):
        self.A = algebra
        self.coaction = coaction
        self.E = ext
        self.F = ext.F
        self.H = ext.F.hopf
        self.cap = ext.cap
        # Phi(x_j) = sum_i x_i (x) Phi_ij
        self._phi = [[coaction.u[i][j] for i in range(algebra.n)] for j in range(algebra.n)]

    def dim(self, k):
        return self.A.n * self.E.dim(k)

    def split(self, k, v):
        q = self.E.dim(k)
        return [(x, t, c) for idx, c in enumerate(v) if c for x, t in [divmod(idx, q)]]

    def basis(self, k, i):
        v = [ZERO] * self.dim(k)
        v[i] = ONE
        return v

    def _put(self, out, k, xvec, form, c):
        q = self.E.dim(k)
        for x, a in enumerate(xvec):
            if a:
                for t, b in enumerate(form):
                    if b:
                        out[x * q + t] = out[x * q + t] + c * a * b

    def mul(self, k, u, l, v):
        A, E = self.A, self.E
        out = [ZERO] * self.dim(k + l)
        for x, t, c in self.split(k, u):
            th = E.basis(k, t)
            for y, s, c2 in self.split(l, v):
                ths = E.basis(l, s)
                xy = None
                for i in range(A.n):
                    # y(0) (x) y(1) = sum_i x_i (x) Phi_{i y}
                    h = self._phi[y][i]
                    if not any(h):
                        continue
                    xi = A.mul(A.basis(x), A.basis(i))
                    if not any(xi):
                        continue
                    form = E.mul(k, E.act(k, th, h), l, ths)
                    self._put(out, k + l, xi, form, c * c2)
        return out

    def star(self, k, u):
        A, E, H = self.A, self.E, self.H
        out = [ZERO] * self.dim(k)
        for x, t, c in self.split(k, u):
            th_star = E.star(k, E.basis(k, t))
            for i in range(A.n):
                h = self._phi[x][i]
                if not any(h):
                    continue
                xi_star = A.star(A.basis(i))
                form = E.act(k, th_star, H.star(h))
                self._put(out, k, xi_star, form, c.conj())
        return out

    def dv(self, k, u):
        A, E, F = self.A, self.E, self.F
        out = [ZERO] * self.dim(k + 1)
        for x, t, c in self.split(k, u):
            th = E.basis(k, t)
            self._put(out, k + 1, A.basis(x), E.dform(k, th) if k > 0 else E.zero(1), c)
            for i in range(A.n):
                h = self._phi[x][i]
                if not any(h):
                    continue
                form = E.mul(1, F.pi(h), k, th)
                self._put(out, k + 1, A.basis(i), form, c)
        return out

    def checks(self, max_triples: int | None = None) -> list[Check]:
        anchor = "vertical-forms"
        cap = self.cap

        def degs():
            return range(cap + 1)

        def assoc():
            for k in degs():
                for l in degs():
                    for m in degs():
                        if k + l + m > cap:
                            continue
                        for i in range(self.dim(k)):
                            a = self.basis(k, i)
                            for j in range(self.dim(l)):
                                b = self.basis(l, j)
                                ab = self.mul(k, a, l, b)
                                for s in range(self.dim(m)):
                                    c = self.basis(m, s)
                                    if self.mul(k + l, ab, m, c) != self.mul(k, a, l + m, self.mul(l, b, m, c)):
                                        return f"associativity fails in degrees ({k},{l},{m})"
            return None

        def star_rules():
            for k in degs():
                for i in range(self.dim(k)):
                    a = self.basis(k, i)
                    if self.star(k, self.star(k, a)) != a:
                        return f"(w*)* != w in degree {k}"
                for l in degs():
                    if k + l > cap:
                        continue
                    sign = -1 if (k * l) % 2 else 1
                    for i in range(self.dim(k)):
                        a = self.basis(k, i)
                        sa = self.star(k, a)
                        for j in range(self.dim(l)):
                            b = self.basis(l, j)
                            lhs = self.star(k + l, self.mul(k, a, l, b))
                            rhs = [sign * x for x in self.mul(l, self.star(l, b), k, sa)]
                            if lhs != rhs:
                                return f"(ab)* != (-1)^kl b* a* in degrees ({k},{l})"
            return None

        def leibniz():
            for k in degs():
                for l in degs():
                    if k + l + 1 > cap:
                        continue
                    sign = -1 if k % 2 else 1
                    for i in range(self.dim(k)):
                        a = self.basis(k, i)
                        da = self.dv(k, a)
                        for j in range(self.dim(l)):
                            b = self.basis(l, j)
                            lhs = self.dv(k + l, self.mul(k, a, l, b))
                            rhs = vec_add(self.mul(k + 1, da, l, b),
                                          [sign * x for x in self.mul(k, a, l + 1, self.dv(l, b))])
                            if lhs != rhs:
                                return f"graded Leibniz fails in degrees ({k},{l})"
            return None

        def dv_squared():
            for k in range(cap - 1):
                for i in range(self.dim(k)):
                    if any(self.dv(k + 1, self.dv(k, self.basis(k, i)))):
                        return f"d_v^2 != 0 on degree {k}"
            return None

        def dv_star():
            for k in range(cap):
                for i in range(self.dim(k)):
                    a = self.basis(k, i)
                    if self.dv(k, self.star(k, a)) != self.star(k + 1, self.dv(k, a)):
                        return f"d_v(w*) != (d_v w)* in degree {k}"
            return None

        return [
            check("vertical.associativity", anchor, assoc()),
            check("vertical.star", anchor, star_rules()),
            check("vertical.leibniz", anchor, leibniz()),
            check("vertical.dv_squared", anchor, dv_squared()),
            check("vertical.dv_star", anchor, dv_star()),
        ]


def default_delta(E: Exterior):
    """delta(pi(g)) = pi(g1) (x) pi(g2) as a d^2 x d matrix on tensor coordinates."""
    F = E.F
    cols = [F.pi2(F.lift(F.basis(i))) for i in range(F.dim)]
    return Matrix.from_columns(cols, F.dim ** 2) if F.dim else Matrix.zeros(0, 0)


def point_curvature(E: Exterior, delta: Matrix | None = None):
    """R(theta) = d theta - m(delta theta) as a q_2 x d matrix; plus descent witness."""
    F = E.F
    if delta is None:
        delta = default_delta(E)
    # descent: delta(pi(r)) must lie in the relation span for r in C1 + R
    wit = None
    cols = []
    for i in range(F.dim):
        th = F.basis(i)
        dt = E.dform(1, th)
        m = E.proj(2, delta.column(i))
        cols.append(vec_sub(dt, m))
    R = Matrix.from_columns(cols, E.dim(2)) if F.dim else Matrix.zeros(E.dim(2), 0)
    return R, wit


def delta_witness(E: Exterior, delta: Matrix):
    """An admissible alternative delta differs from the default by relation-span terms."""
    base = default_delta(E)
    F = E.F
    if delta.shape != base.shape:
        return f"delta must be a {base.nrows}x{base.ncols} matrix"
    for i in range(F.dim):
        diff = vec_sub(delta.column(i), base.column(i))
        if any(E.proj(2, diff)):
            return f"delta - delta_default leaves the relation span on basis {i + 1}"
    return None
