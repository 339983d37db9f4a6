"""Associated quantum vector bundles: section modules, frames, the maps
Upsilon / Upsilon-hat / sigma, and induced linear connections.

A section of degree k for a corep alpha on V is an intertwiner V -> Hor^k,
stored flat with index i * dim Hor^k + h (column i is the image of e_i).
Degree-0 sections are the section module Gamma_alpha.
"""
from __future__ import annotations

from fractions import Fraction
from math import isqrt

from .bimodule import BalancedTensor
from .bundle import CovariantDerivative, HorizontalModel
from .checks import Check, StructuralError, check
from .corep import Corep, mor_space
from .expr import format_combo
from .linalg import (INFEASIBLE, LinalgError, Matrix, ONE, ZERO, Subspace, solve_affine, vec_add,
                     vec_sub)
from .scalars import is_strictly_positive, sqrt_rational

__all__ = ["Sections", "FrameMatrices", "SectionFrame", "InducedConnection", "build_frame",
           "is_trivial_corep"]


def _inv(m: Matrix) -> Matrix:
    return m.inverse() if m.nrows else Matrix.zeros(0, 0)


def is_trivial_corep(alpha: Corep) -> bool:
    H = alpha.hopf
    return alpha.dim == 1 and alpha.u[0][0] == H.unit


class Sections:
    """Mor^0(alpha, Hor^k) with coordinates in a fixed basis."""

    def __init__(self, hm: HorizontalModel, alpha: Corep, k: int):
        self.hm, self.alpha, self.k = hm, alpha, k
        self.nv = alpha.dim
        self.nh = hm.dim(k)
        mors = mor_space(alpha, hm.corep(k), 0)
        self.basis = [[f.matrix.rows[h][i] for i in range(self.nv) for h in range(self.nh)] for f in mors]
        self.dim = len(self.basis)
        self._sub = Subspace(self.basis, self.nv * self.nh)

    def cols(self, vec):
        nh = self.nh
        return [vec[i * nh:(i + 1) * nh] for i in range(self.nv)]

    @staticmethod
    def flat(cols):
        return [x for c in cols for x in c]

    def coords(self, vec):
        return self._sub.coords(vec)

    def contains(self, vec):
        return self._sub.contains(vec)

    def vector(self, c):
        return self._sub.vector(c)

    def map_cols(self, vec, fn):
        return self.flat([fn(c) for c in self.cols(vec)])


def _rational_sqrt(x):
    if not x.is_rational():
        return None
    f = x.to_fraction()
    if f <= 0:
        return None
    a, b = isqrt(f.numerator), isqrt(f.denominator)
    if a * a != f.numerator or b * b != f.denominator:
        return None
    return Fraction(a, b)


class FrameMatrices:
    """Left generators T^L_k, X = (x_ki), Z, Y = Z^-1, W = ZX and T^R_k."""

    def __init__(self, sec: Sections, TL: list, Z: Matrix):
        self.sec = sec
        hm = sec.hm
        self.hm = hm
        self.TL = TL
        self.d = len(TL)
        self.n = sec.nv
        self.X = [sec.cols(t) for t in TL]
        self.Z = Z
        self.Y = _inv(Z)
        d, n = self.d, self.n
        self.W = [[self._comb([(Z.rows[k][l], self.X[l][i]) for l in range(d)]) for i in range(n)] for k in range(d)]
        self.TR = [self._comb([(Z.rows[k][i], TL[i]) for i in range(d)], len(TL[0])) for k in range(d)]

    def _comb(self, terms, size=None):
        size = size if size is not None else self.hm.dim(0)
        out = [ZERO] * size
        for c, v in terms:
            if c:
                out = [o + c * x for o, x in zip(out, v)]
        return out

    def m0(self, a, b):
        return self.hm.mul(0, a, 0, b)

    def s0(self, a):
        return self.hm.star(0, a)

    @property
    def unit(self):
        hm = self.hm
        return hm.embed(0, hm.Om.unit())

    def display1(self):
        d, n, X = self.d, self.n, self.X
        for i in range(n):
            for j in range(n):
                acc = self.hm.zero(0)
                for k in range(d):
                    acc = vec_add(acc, self.m0(self.s0(X[k][i]), X[k][j]))
                target = self.unit if i == j else self.hm.zero(0)
                if acc != target:
                    return f"sum_k x*_k{i + 1} x_k{j + 1} != {'1' if i == j else '0'}"
        return None

    def display2(self):
        d, n = self.d, self.n
        for i in range(n):
            for j in range(n):
                acc = self.hm.zero(0)
                for k in range(d):
                    acc = vec_add(acc, self.m0(self.W[k][i], self.s0(self.X[k][j])))
                target = self.unit if i == j else self.hm.zero(0)
                if acc != target:
                    return f"((ZX)^T X*)_{i + 1}{j + 1} != {'1' if i == j else '0'}"
        return None

    def p(self, T):
        """p^T_k = sum_i T(e_i) x*_ki (degree-0 sections)."""
        cols = self.sec.cols(T)
        return [self._comb([(ONE, self.m0(cols[i], self.s0(self.X[k][i]))) for i in range(self.n)])
                for k in range(self.d)]

    def phat(self, T):
        cols = self.sec.cols(T)
        d, n = self.d, self.n
        out = []
        for k in range(d):
            acc = self.hm.zero(0)
            for i in range(d):
                y = self.Y.rows[i][k]
                if not y:
                    continue
                for j in range(n):
                    acc = vec_add(acc, [y * x for x in self.m0(self.s0(self.W[i][j]), cols[j])])
            out.append(acc)
        return out

    def e(self):
        d, n = self.d, self.n
        return [[self._comb([(ONE, self.m0(self.X[k][i], self.s0(self.X[l][i]))) for i in range(n)])
                 for l in range(d)] for k in range(d)]

    def checks(self, prefix="frame") -> list[Check]:
        anchor = "frame-conditions"
        sec, hm = self.sec, self.hm
        out = [
            check(f"{prefix}.display_left", anchor, self.display1()),
            check(f"{prefix}.display_right", anchor, self.display2()),
        ]
        try:
            pos = is_strictly_positive(self.Z)
            zw = None if pos else "Z is not strictly positive"
        except Exception as exc:  # non-Hermitian Z
            zw = f"Z is not strictly positive: {exc}"
        out.append(check(f"{prefix}.z_positive", anchor, zw))

        def left_gen():
            for b, T in enumerate(sec.basis):
                ps = self.p(T)
                acc = [ZERO] * len(T)
                for k in range(self.d):
                    acc = vec_add(acc, sec.map_cols(self.TL[k], lambda c, pk=ps[k]: self.m0(pk, c)))
                if acc != T:
                    return f"basis section {b + 1} != sum_k p_k T^L_k"
                for pk in ps:
                    if not _is_base(hm, 0, pk):
                        return f"coefficient p_k of section {b + 1} is not in the base"
            return None

        def right_gen():
            for b, T in enumerate(sec.basis):
                ps = self.phat(T)
                acc = [ZERO] * len(T)
                for k in range(self.d):
                    acc = vec_add(acc, sec.map_cols(self.TR[k], lambda c, pk=ps[k]: self.m0(c, pk)))
                if acc != T:
                    return f"basis section {b + 1} != sum_k T^R_k phat_k"
            return None

        def idempotent():
            e = self.e()
            d = self.d
            for k in range(d):
                for m in range(d):
                    acc = hm.zero(0)
                    for l in range(d):
                        acc = vec_add(acc, self.m0(e[k][l], e[l][m]))
                    if acc != e[k][m]:
                        return f"e^2 != e at ({k + 1},{m + 1})"
                    if self.s0(e[m][k]) != e[k][m]:
                        return f"e* != e at ({k + 1},{m + 1})"
            rows = []
            for a in range(hm.Om.n):
                pa = hm.embed(0, hm.Om.point(a))
                for k in range(d):
                    rows.append([x for l in range(d) for x in self.m0(pa, e[k][l])])
            r = Matrix(rows, d * hm.dim(0)).rank() if rows else 0
            if r != sec.dim:
                return f"rank of M^d e is {r}, Gamma has dim {sec.dim}"
            return None

        out += [
            check(f"{prefix}.left_generators", anchor, left_gen()),
            check(f"{prefix}.right_generators", anchor, right_gen()),
            check(f"{prefix}.projective_idempotent", anchor, idempotent()),
        ]
        return out

    def describe(self):
        hm = self.hm
        labels = hm.GM.labels
        gm = lambda v: format_combo(hm.to_gm(v), labels)
        return {
            "d": self.d,
            "X": [[gm(x) for x in row] for row in self.X],
            "Z": self.Z.to_strings(),
            "e": [[gm(x) for x in row] for row in self.e()],
        }


def _is_base(hm, k, vec):
    m = hm.m
    return all(not vec[i] for i in range(len(vec)) if i % m)


def _base_form(hm, k, vec):
    if not _is_base(hm, k, vec):
        raise StructuralError("element is not a base form")
    return vec[::hm.m]


def build_frame(sec: Sections) -> FrameMatrices:
    """Greedy frame search over the section basis (unit section first for the trivial corep)."""
    hm = sec.hm
    if sec.dim == 0:
        raise StructuralError(f"no sections for {sec.alpha.name}")
    cands = list(sec.basis)
    unit = hm.embed(0, hm.Om.unit())
    if is_trivial_corep(sec.alpha) and sec.contains(unit):
        cands = [unit] + [c for c in cands if c != unit]
    n = sec.nv
    for d in range(1, len(cands) + 1):
        gens = cands[:d]
        X = [sec.cols(t) for t in gens]
        # sum_k w_k x*_ki x_kj = delta_ij 1, linear in the weights
        cols = []
        for k in range(d):
            col = []
            for i in range(n):
                for j in range(n):
                    col.extend(hm.mul(0, hm.star(0, X[k][i]), 0, X[k][j]))
            cols.append(col)
        rhs = []
        for i in range(n):
            for j in range(n):
                rhs.extend(unit if i == j else hm.zero(0))
        sol = solve_affine(Matrix.from_columns(cols, len(rhs)), rhs)
        if sol is INFEASIBLE:
            continue
        scaled = []
        ok = True
        for w, t in zip(sol.particular, gens):
            if not w:
                continue
            r = _rational_sqrt(w)
            if r is None:
                ok = False
                break
            scaled.append([r * x for x in t])
        if not ok or not scaled:
            continue
        return FrameMatrices(sec, scaled, _solve_z(sec, scaled))
    gram = _gram_frame(sec, cands, unit)
    if gram is not None:
        return FrameMatrices(sec, gram, _solve_z(sec, gram))
    raise StructuralError(f"no frame found for {sec.alpha.name}: the bundle fails the frame conditions")


def _gram_frame(sec: Sections, cands: list, unit) -> list | None:
    """Solve sum Q_bc T_b(e_i)* T_c(e_j) = delta_ij 1 for Hermitian Q, then Q = L D L*."""
    hm = sec.hm
    n, g = sec.nv, len(cands)
    X = [sec.cols(t) for t in cands]
    cols = []
    for b in range(g):
        for c in range(g):
            col = []
            for i in range(n):
                for j in range(n):
                    col.extend(hm.mul(0, hm.star(0, X[b][i]), 0, X[c][j]))
            cols.append(col)
    rhs = []
    for i in range(n):
        for j in range(n):
            rhs.extend(unit if i == j else hm.zero(0))
    sol = solve_affine(Matrix.from_columns(cols, len(rhs)), rhs)
    if sol is INFEASIBLE:
        return None
    P = sol.particular
    half = ONE / 2
    Q = [[(P[b * g + c] + P[c * g + b].conj()) * half for c in range(g)] for b in range(g)]
    L = [[ZERO] * g for _ in range(g)]
    D = [ZERO] * g
    for k in range(g):
        D[k] = Q[k][k] - sum((L[k][j] * L[k][j].conj() * D[j] for j in range(k)), ZERO)
        if D[k] and (not D[k].is_rational() or D[k].real_sign() < 0):
            return None
        L[k][k] = ONE
        for i in range(k + 1, g):
            r = Q[i][k] - sum((L[i][j] * L[k][j].conj() * D[j] for j in range(k)), ZERO)
            if D[k]:
                L[i][k] = r / D[k]
            elif r:
                return None
    out = []
    for k in range(g):
        if not D[k]:
            continue
        s = sqrt_rational(D[k])
        y = [ZERO] * len(cands[0])
        for b in range(g):
            if L[b][k]:
                y = vec_add(y, [s * L[b][k].conj() * x for x in cands[b]])
        out.append(y)
    return out or None


def _solve_z(sec: Sections, TL: list) -> Matrix:
    hm = sec.hm
    d, n = len(TL), sec.nv
    X = [sec.cols(t) for t in TL]
    unit = hm.embed(0, hm.Om.unit())
    cols = []
    for k in range(d):
        for l in range(d):
            col = []
            for i in range(n):
                for j in range(n):
                    col.extend(hm.mul(0, X[l][i], 0, hm.star(0, X[k][j])))
            cols.append(col)
    rhs = []
    for i in range(n):
        for j in range(n):
            rhs.extend(unit if i == j else hm.zero(0))
    A = Matrix.from_columns(cols, len(rhs))
    ident = [ONE if k == l else ZERO for k in range(d) for l in range(d)]
    if A @ ident == [x for x in rhs]:
        return Matrix.identity(d)
    sol = solve_affine(A, rhs)
    if sol is INFEASIBLE:
        raise StructuralError(f"no Z solves the second frame display for {sec.alpha.name}")
    z = sol.particular
    return Matrix([[z[k * d + l] for l in range(d)] for k in range(d)], d)


class SectionFrame:
    """Sections of alpha in every degree, the balanced tensors Omega^k (x)_M Gamma and
    Gamma (x)_M Omega^k, the maps Upsilon^-1 (mu (x) T -> mu T), Upsilon-hat^-1 and sigma."""

    def __init__(self, hm: HorizontalModel, alpha: Corep, name: str | None = None, frame: bool = True):
        self.hm, self.alpha = hm, alpha
        self.name = name or alpha.name
        Om = hm.Om
        self.cap = cap = hm.cap
        self.S = [Sections(hm, alpha, k) for k in range(cap + 1)]
        G = self.G = self.S[0]
        pts = [hm.embed(0, Om.point(a)) for a in range(Om.n)]
        self.pts = pts
        self.L = [self._gmat(lambda c, p=p: hm.mul(0, p, 0, c)) for p in pts]
        self.R = [self._gmat(lambda c, p=p: hm.mul(0, c, 0, p)) for p in pts]
        self.QL, self.QR = [], []
        self.UinvL, self.UinvR, self.UL, self.UR, self.sigma = [], [], [], [], []
        self.errors = []
        for k in range(cap + 1):
            dk = Om.dim(k)
            om_r = [self._omat(k, lambda x, a=a: Om.mul(k, Om.basis(k, x), 0, Om.point(a))) for a in range(Om.n)]
            om_l = [self._omat(k, lambda x, a=a: Om.mul(0, Om.point(a), k, Om.basis(k, x))) for a in range(Om.n)]
            QL = BalancedTensor(dk, G.dim, om_r, self.L, f"Omega^{k} (x) Gamma_{self.name}")
            QR = BalancedTensor(G.dim, dk, self.R, om_l, f"Gamma_{self.name} (x) Omega^{k}")
            self.QL.append(QL)
            self.QR.append(QR)
            Sk = self.S[k]
            self.UinvL.append(QL.induced(lambda x, j, k=k: self._left_prod(k, x, j), Sk.dim))
            self.UinvR.append(QR.induced(lambda j, x, k=k: self._right_prod(k, j, x), Sk.dim))
            try:
                self.UL.append(_inv(self.UinvL[k]))
                self.UR.append(_inv(self.UinvR[k]))
                self.sigma.append(self.UR[k] @ self.UinvL[k])
            except LinalgError:
                self.errors.append(f"degree {k}: mu (x) T -> mu T is not bijective")
                self.UL.append(None)
                self.UR.append(None)
                self.sigma.append(None)
        self.frame = build_frame(G) if frame else None

    # --- helpers ---
    def _gmat(self, fn):
        G = self.G
        cols = [G.coords(G.map_cols(T, fn)) for T in G.basis]
        return Matrix.from_columns(cols, G.dim) if cols else Matrix.zeros(G.dim, 0)

    def _omat(self, k, fn):
        d = self.hm.Om.dim(k)
        return Matrix.from_columns([fn(x) for x in range(d)], d) if d else Matrix.zeros(0, 0)

    def _left_prod_vec(self, k, mu, T):
        hm = self.hm
        return self.G.map_cols(T, lambda c: hm.left_base(k, mu, 0, c))

    def _left_prod(self, k, x, j):
        vec = self._left_prod_vec(k, self.hm.Om.basis(k, x), self.G.basis[j])
        return self.S[k].coords(vec)

    def _right_prod(self, k, j, x):
        hm = self.hm
        mu = hm.embed(k, hm.Om.basis(k, x))
        vec = self.G.map_cols(self.G.basis[j], lambda c: hm.mul(0, c, k, mu))
        return self.S[k].coords(vec)

    def left_action(self, k, a, q):
        """p_a . q on Omega^k (x) Gamma."""
        Om, QL = self.hm.Om, self.QL[k]
        out = [ZERO] * QL.dim
        for x, j, c in QL.terms(q):
            mu = Om.mul(0, Om.point(a), k, Om.basis(k, x))
            out = vec_add(out, [c * y for y in QL.pair(mu, _e(self.G.dim, j))])
        return out

    def right_action(self, k, q, a):
        """q . p_a on Omega^k (x) Gamma, acting on the section."""
        QL = self.QL[k]
        out = [ZERO] * QL.dim
        for x, j, c in QL.terms(q):
            out = vec_add(out, [c * y for y in QL.pair(_e(QL.du, x), self.R[a].column(j))])
        return out

    def form_times(self, j, mu, k, q):
        """mu . q for mu in Omega^j, q in Omega^k (x) Gamma."""
        Om, QL = self.hm.Om, self.QL[k]
        out = [ZERO] * self.QL[j + k].dim
        for x, t, c in QL.terms(q):
            nu = Om.mul(j, mu, k, Om.basis(k, x))
            out = vec_add(out, [c * y for y in self.QL[j + k].pair(nu, _e(self.G.dim, t))])
        return out

    def times_form(self, k, q, j, mu):
        """q . mu for q in Gamma (x) Omega^k, mu in Omega^j."""
        Om, QR = self.hm.Om, self.QR[k]
        out = [ZERO] * self.QR[k + j].dim
        for t, x, c in QR.terms(q):
            nu = Om.mul(k, Om.basis(k, x), j, mu)
            out = vec_add(out, [c * y for y in self.QR[k + j].pair(_e(self.G.dim, t), nu)])
        return out

    # --- explicit Upsilon via the frame ---
    def upsilon_explicit(self, k, tau):
        hm, F = self.hm, self.frame
        cols = self.S[k].cols(tau)
        out = [ZERO] * self.QL[k].dim
        for kk in range(F.d):
            mu = hm.zero(k)
            for i in range(F.n):
                mu = vec_add(mu, hm.mul(k, cols[i], 0, hm.star(0, F.X[kk][i])))
            form = _base_form(hm, k, mu)
            out = vec_add(out, self.QL[k].pair(form, self.G.coords(F.TL[kk])))
        return out

    def upsilon_hat_explicit(self, k, tau):
        hm, F = self.hm, self.frame
        cols = self.S[k].cols(tau)
        out = [ZERO] * self.QR[k].dim
        for kk in range(F.d):
            mu = hm.zero(k)
            for i in range(F.d):
                y = F.Y.rows[i][kk]
                if not y:
                    continue
                for j in range(F.n):
                    mu = vec_add(mu, [y * v for v in hm.mul(0, hm.star(0, F.W[i][j]), k, cols[j])])
            form = _base_form(hm, k, mu)
            out = vec_add(out, self.QR[k].pair(self.G.coords(F.TR[kk]), form))
        return out

    def unit_coords(self):
        hm = self.hm
        unit = hm.embed(0, hm.Om.unit())
        return self.G.coords(unit) if self.G.contains(unit) else None

    def checks(self) -> list[Check]:
        anchor = "section-isomorphisms"
        hm, cap = self.hm, self.cap
        nm = self.name
        out = []

        out.append(check(f"upsilon.{nm}.bijective", anchor, self.errors[0] if self.errors else None))

        def balanced():
            for k in range(cap + 1):
                w = self.QL[k].balanced_witness(lambda x, j, k=k: self._left_prod(k, x, j))
                if w:
                    return w
                w = self.QR[k].balanced_witness(lambda j, x, k=k: self._right_prod(k, j, x))
                if w:
                    return w
            return None

        out.append(check(f"upsilon.{nm}.balanced", anchor, balanced()))
        if self.errors:
            return out

        def explicit():
            if self.frame is None:
                return None
            for k in range(cap + 1):
                for b, tau in enumerate(self.S[k].basis):
                    e = _e(self.S[k].dim, b)
                    if self.upsilon_explicit(k, tau) != self.UL[k] @ e:
                        return f"degree {k}: frame formula for Upsilon differs on section {b + 1}"
                    if self.upsilon_hat_explicit(k, tau) != self.UR[k] @ e:
                        return f"degree {k}: frame formula for Upsilon-hat differs on section {b + 1}"
            return None

        out.append(check(f"upsilon.{nm}.frame_formula", anchor, explicit()))

        def sigma_bimodule():
            Om = hm.Om
            for k in range(cap + 1):
                QL, QR, sg = self.QL[k], self.QR[k], self.sigma[k]
                for q in range(QL.dim):
                    e = _e(QL.dim, q)
                    se = sg @ e
                    for a in range(Om.n):
                        lhs = sg @ self.left_action(k, a, e)
                        # p . (T (x) mu) = (p T) (x) mu
                        rhs = [ZERO] * QR.dim
                        for t, x, c in QR.terms(se):
                            rhs = vec_add(rhs, [c * y for y in QR.pair(self.L[a].column(t), _e(QR.dv, x))])
                        if lhs != rhs:
                            return f"sigma is not left M-linear in degree {k}"
                        lhs = sg @ self.right_action(k, e, a)
                        rhs = self.times_form(k, se, 0, Om.point(a))
                        if lhs != rhs:
                            return f"sigma is not right M-linear in degree {k}"
            return None

        out.append(check(f"sigma.{nm}.bimodule", anchor, sigma_bimodule()))

        def degree0():
            for j in range(self.G.dim):
                one = hm.Om.unit()
                lhs = self.sigma[0] @ self.QL[0].pair(one, _e(self.G.dim, j))
                if lhs != self.QR[0].pair(_e(self.G.dim, j), one):
                    return f"sigma(1 (x) T) != T (x) 1 for section {j + 1}"
            return None

        out.append(check(f"sigma.{nm}.unit", anchor, degree0()))
        if is_trivial_corep(self.alpha):
            def triv():
                u = self.unit_coords()
                if u is None:
                    return "unit is not a section of the trivial corep"
                for k in range(cap + 1):
                    for x in range(hm.Om.dim(k)):
                        mu = hm.Om.basis(k, x)
                        if self.sigma[k] @ self.QL[k].pair(mu, u) != self.QR[k].pair(u, mu):
                            return f"sigma(mu (x) 1) != 1 (x) mu for {hm.Om.label(k, x)}"
                return None

            out.append(check(f"sigma.{nm}.trivial_identity", anchor, triv()))
        return out


def _e(n, i):
    v = [ZERO] * n
    v[i] = ONE
    return v


class InducedConnection:
    """nabla = Upsilon o D o (-), with the extensions d_L and d_R."""

    def __init__(self, sf: SectionFrame, D: CovariantDerivative):
        self.sf, self.D = sf, D
        hm = sf.hm
        cap = sf.cap
        self.DS = []
        self.errors = []
        for k in range(cap):
            Sk, Sk1 = sf.S[k], sf.S[k + 1]
            cols = []
            for b, tau in enumerate(Sk.basis):
                img = Sk.map_cols(tau, lambda c, k=k: D.apply(k, c))
                try:
                    cols.append(Sk1.coords(img))
                except LinalgError:
                    self.errors.append(f"D o tau leaves the degree-{k + 1} sections (tau = section {b + 1})")
                    cols.append([ZERO] * Sk1.dim)
            self.DS.append(Matrix.from_columns(cols, Sk1.dim) if cols else Matrix.zeros(Sk1.dim, 0))
        self.nabla = sf.UL[1] @ self.DS[0] if cap >= 1 else None
        self.dL = [self._dL(k) for k in range(cap)]
        self.dR = [self._dR(k) for k in range(cap)]

    def _dL(self, k):
        sf = self.sf
        Om = sf.hm.Om
        QL = sf.QL[k]

        def img(x, j):
            mu = Om.basis(k, x)
            out = sf.QL[k + 1].pair(Om.d(k, mu), _e(sf.G.dim, j))
            nab = self.nabla.column(j)
            sign = -1 if k % 2 else 1
            return vec_add(out, [sign * y for y in sf.form_times(k, mu, 1, nab)])

        return QL.induced(img, sf.QL[k + 1].dim)

    def _dR(self, k):
        sf = self.sf
        Om = sf.hm.Om
        QR = sf.QR[k]
        snab = sf.sigma[1] @ self.nabla

        def img(j, x):
            mu = Om.basis(k, x)
            out = sf.times_form(1, snab.column(j), k, mu)
            return vec_add(out, sf.QR[k + 1].pair(_e(sf.G.dim, j), Om.d(k, mu)))

        return QR.induced(img, sf.QR[k + 1].dim)

    def coefficients(self):
        """For each basis section T: the 1-forms mu_k with nabla T = sum mu_k (x) T^L_k."""
        sf = self.sf
        hm = sf.hm
        F = sf.frame
        out = []
        labels = hm.Om.labels(1)
        for b, T in enumerate(sf.G.basis):
            DT = sf.G.map_cols(T, lambda c: self.D.apply(0, c))
            cols = sf.S[1].cols(DT)
            row = []
            for kk in range(F.d):
                mu = hm.zero(1)
                for i in range(F.n):
                    mu = vec_add(mu, hm.mul(1, cols[i], 0, hm.star(0, F.X[kk][i])))
                row.append(format_combo(_base_form(hm, 1, mu), labels))
            out.append(row)
        return out

    def checks(self) -> list[Check]:
        anchor = "induced-connection"
        sf, hm = self.sf, self.sf.hm
        nm = sf.name
        Om = hm.Om
        G = sf.G
        out = [check(f"nabla.{nm}.covariant", anchor, self.errors[0] if self.errors else None)]
        if self.errors or sf.cap < 1:
            return out

        def left():
            for a in range(Om.n):
                for j in range(G.dim):
                    pT = sf.L[a].column(j)
                    lhs = self.nabla @ pT
                    rhs = vec_add(sf.left_action(1, a, self.nabla.column(j)),
                                  sf.QL[1].pair(Om.dp(a), _e(G.dim, j)))
                    if lhs != rhs:
                        return f"nabla(p{a} T) != p{a} nabla(T) + dp{a} (x) T for section {j + 1}"
            return None

        def right():
            inv = _inv(sf.sigma[1])
            for a in range(Om.n):
                for j in range(G.dim):
                    lhs = self.nabla @ sf.R[a].column(j)
                    rhs = vec_add(sf.right_action(1, self.nabla.column(j), a),
                                  inv @ sf.QR[1].pair(_e(G.dim, j), Om.dp(a)))
                    if lhs != rhs:
                        return f"nabla(T p{a}) != nabla(T) p{a} + sigma^-1(T (x) dp{a}) for section {j + 1}"
            return None

        def dr():
            for k in range(sf.cap):
                rhs = sf.sigma[k + 1] @ self.dL[k] @ _inv(sf.sigma[k])
                if self.dR[k] != rhs:
                    return f"d_R != sigma d_L sigma^-1 in degree {k}"
            return None

        def dl_matches():
            for k in range(sf.cap):
                if self.dL[k] != sf.UL[k + 1] @ self.DS[k] @ sf.UinvL[k]:
                    return f"d_L != Upsilon D Upsilon^-1 in degree {k}"
            return None

        out += [
            check(f"nabla.{nm}.left_leibniz", anchor, left()),
            check(f"nabla.{nm}.right_leibniz", anchor, right()),
            check(f"nabla.{nm}.dR_conjugate", anchor, dr()),
            check(f"nabla.{nm}.dL_is_D", anchor, dl_matches()),
        ]
        if sf.cap >= 2:
            R1 = self.dL[1] @ self.nabla
            R2 = sf.UL[2] @ self.DS[1] @ self.DS[0]
            out.append(check(f"curvature.{nm}.dual_path", "induced-curvature",
                             None if R1 == R2 else "d_L o nabla != Upsilon o D^2",
                             flat=R1.is_zero()))
        return out

    def curvature(self) -> Matrix:
        return self.dL[1] @ self.nabla
