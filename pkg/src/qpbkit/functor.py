"""The associated-bundle functor on morphisms: images A_f / A*_f, the natural
isomorphisms for conjugation and tensor products, and exactness."""
from __future__ import annotations

from .assoc import InducedConnection, SectionFrame, _e, _inv
from .bimodule import BalancedTensor
from .checks import Check, check
from .corep import GradedMorphism, mor_space
from .linalg import INFEASIBLE, LinalgError, LinearMap, Matrix, ONE, ZERO, solve_affine, vec_add

__all__ = ["image_map", "MorphismImage", "ConjugateIso", "TensorIso", "exactness_checks",
           "short_exact_checks", "functoriality_witness", "naturality_conj_witness",
           "naturality_tensor_witness", "associativity_witness", "product_section"]


def image_map(src: SectionFrame, dst: SectionFrame, f: GradedMorphism, k: int = 0):
    """A_f (degree 0) or A*_f (degree 1) from sections of f.target to sections of f.source.

    Returns (LinearMap, witness)."""
    hm = src.hm
    S_src, S_dst = src.S[k], dst.S[k]
    F = f.matrix
    cols = []
    for b, T in enumerate(S_dst.basis):
        tc = S_dst.cols(T)
        if f.degree:
            tc = [hm.star(k, c) for c in tc]
        new = []
        for j in range(F.ncols):
            acc = [ZERO] * S_dst.nh
            for l in range(F.nrows):
                c = F.rows[l][j]
                if c:
                    c = c.conj() if f.degree else c
                    acc = [a + c * x for a, x in zip(acc, tc[l])]
            new.append(acc)
        vec = S_src.flat(new)
        try:
            cols.append(S_src.coords(vec))
        except LinalgError:
            return None, f"image of section {b + 1} is not a section of {src.name}"
    M = Matrix.from_columns(cols, S_src.dim) if cols else Matrix.zeros(S_src.dim, 0)
    return LinearMap(M, f.degree), None


def functoriality_witness(frames: dict, f: GradedMorphism, g: GradedMorphism, names) -> str | None:
    """A_{g o f} = A_f o A_g for f: a -> b, g: b -> c (names = (a, b, c))."""
    a, b, c = (frames[n] for n in names)
    Af, w1 = image_map(a, b, f)
    Ag, w2 = image_map(b, c, g)
    Agf, w3 = image_map(a, c, g.after(f))
    if w1 or w2 or w3:
        return w1 or w2 or w3
    if Agf != Af.after(Ag):
        return f"A_(g o f) != A_f o A_g for {names[0]} -> {names[1]} -> {names[2]}"
    return None


class MorphismImage:
    def __init__(self, src: SectionFrame, dst: SectionFrame, f: GradedMorphism,
                 ic_src: InducedConnection | None = None, ic_dst: InducedConnection | None = None,
                 label: str = ""):
        self.src, self.dst, self.f = src, dst, f
        self.ic_src, self.ic_dst = ic_src, ic_dst
        self.label = label or f"{src.name}->{dst.name}"
        self.A, self.error = image_map(src, dst, f)

    def _idA_L(self, k):
        src, dst, A = self.src, self.dst, self.A.matrix
        return dst.QL[k].induced(lambda x, j: src.QL[k].pair(_e(dst.QL[k].du, x), A.column(j)), src.QL[k].dim)

    def _Aid_R(self, k):
        src, dst, A = self.src, self.dst, self.A.matrix
        return dst.QR[k].induced(lambda j, x: src.QR[k].pair(A.column(j), _e(dst.QR[k].dv, x)), src.QR[k].dim)

    def _FA(self, k):
        """mu (x) T -> A(T) (x) mu*  (Omega^k (x) Gamma_dst -> Gamma_src (x) Omega^k), antilinear."""
        src, dst, A = self.src, self.dst, self.A.matrix
        Om = src.hm.Om
        return LinearMap(dst.QL[k].induced(
            lambda x, j: src.QR[k].pair(A.column(j), Om.star(k, Om.basis(k, x))), src.QR[k].dim), 1)

    def _AF(self, k):
        """T (x) mu -> mu* (x) A(T)  (Gamma_dst (x) Omega^k -> Omega^k (x) Gamma_src), antilinear."""
        src, dst, A = self.src, self.dst, self.A.matrix
        Om = src.hm.Om
        return LinearMap(dst.QR[k].induced(
            lambda j, x: src.QL[k].pair(Om.star(k, Om.basis(k, x)), A.column(j)), src.QL[k].dim), 1)

    def checks(self) -> list[Check]:
        anchor = "morphism-images"
        lab = self.label
        out = [check(f"functor.{lab}.image", anchor, self.error)]
        if self.error:
            return out
        src, dst, A = self.src, self.dst, self.A
        npts = src.hm.Om.n
        lm = lambda m: LinearMap(m, 0)

        def bimod():
            for a in range(npts):
                if self.f.degree == 0:
                    if A.after(lm(dst.L[a])) != lm(src.L[a]).after(A) or \
                            A.after(lm(dst.R[a])) != lm(src.R[a]).after(A):
                        return f"A_f is not M-bilinear at point {a}"
                else:
                    if A.after(lm(dst.L[a])) != lm(src.R[a]).after(A) or \
                            A.after(lm(dst.R[a])) != lm(src.L[a]).after(A):
                        return f"A*_f does not swap the M-actions at point {a}"
            return None

        out.append(check(f"functor.{lab}.bimodule", anchor, bimod()))
        cap = src.cap
        if self.f.degree == 0:
            if self.ic_src and self.ic_dst and cap >= 1:
                lhs = self.ic_src.nabla @ A.matrix
                rhs = self._idA_L(1) @ self.ic_dst.nabla
                out.append(check(f"functor.{lab}.square_connection", "square-connection",
                                 None if lhs == rhs else "nabla o A != (id (x) A) o nabla"))
            wit = None
            for k in range(cap + 1):
                if src.sigma[k] @ self._idA_L(k) != self._Aid_R(k) @ dst.sigma[k]:
                    wit = f"sigma o (id (x) A) != (A (x) id) o sigma in degree {k}"
                    break
            out.append(check(f"functor.{lab}.square_sigma", "square-sigma", wit))
        else:
            if self.ic_src and self.ic_dst and cap >= 1:
                lhs = self._FA(1).after(lm(self.ic_dst.nabla))
                rhs = lm(src.sigma[1] @ self.ic_src.nabla).after(A)
                out.append(check(f"functor.{lab}.square_connection", "square-connection-antilinear",
                                 None if lhs == rhs else "(* (x)T A) o nabla != sigma o nabla o A"))
            wit = None
            for k in range(cap + 1):
                lhs = self._FA(k)
                rhs = lm(src.sigma[k]).after(self._AF(k)).after(lm(dst.sigma[k]))
                if lhs != rhs:
                    wit = f"(* (x)T A) != sigma o (A (x)T *) o sigma in degree {k}"
                    break
            out.append(check(f"functor.{lab}.square_sigma", "square-sigma-antilinear", wit))
        return out


class ConjugateIso:
    """Abar: Gamma_conj(alpha) -> conj(Gamma_alpha), T -> T* (antilinear in coordinates)."""

    def __init__(self, sf: SectionFrame, sfc: SectionFrame, ic=None, icc=None):
        self.sf, self.sfc, self.ic, self.icc = sf, sfc, ic, icc
        self.A = self._star_map(sfc, sf)
        self.Ainv = self._star_map(sf, sfc)

    @staticmethod
    def _star_map(a: SectionFrame, b: SectionFrame):
        hm = a.hm
        cols = []
        for T in a.G.basis:
            vec = a.G.map_cols(T, lambda c: hm.star(0, c))
            try:
                cols.append(b.G.coords(vec))
            except LinalgError:
                return None
        return LinearMap(Matrix.from_columns(cols, b.G.dim) if cols else Matrix.zeros(b.G.dim, 0), 1)

    def checks(self) -> list[Check]:
        anchor = "conjugate-iso"
        sf, sfc = self.sf, self.sfc
        nm = sf.name
        if self.A is None or self.Ainv is None:
            return [check(f"conj.{nm}.bijective", anchor, "T -> T* does not map sections to sections")]
        out = [check(f"conj.{nm}.bijective", anchor,
                     None if self.A.is_invertible() and self.Ainv.after(self.A) == LinearMap.identity(sfc.G.dim)
                     else "T -> T* is not bijective")]
        lm = lambda m: LinearMap(m, 0)
        Om = sf.hm.Om

        def bimod():
            for a in range(Om.n):
                if self.A.after(lm(sfc.L[a])) != lm(sf.R[a]).after(self.A):
                    return f"(p T)* != T* p at point {a}"
            return None

        out.append(check(f"conj.{nm}.bimodule", anchor, bimod()))
        Ai = self.Ainv.matrix
        A = self.A.matrix
        if self.ic and self.icc and sf.cap >= 1:
            psi1 = LinearMap(sf.QR[1].induced(
                lambda j, y: sfc.QL[1].pair(Om.star(1, Om.basis(1, y)), Ai.column(j)), sfc.QL[1].dim), 1)
            rhs = psi1.after(lm(sf.sigma[1] @ self.ic.nabla)).after(self.A)
            out.append(check(f"conj.{nm}.square_connection", "square-connection",
                             None if lm(self.icc.nabla) == rhs else "conjugate connection square fails"))
        wit = None
        for k in range(sf.cap + 1):
            psi_in = LinearMap(sfc.QL[k].induced(
                lambda x, j: sf.QR[k].pair(A.column(j), Om.star(k, Om.basis(k, x))), sf.QR[k].dim), 1)
            psi_out = LinearMap(sf.QL[k].induced(
                lambda x, j: sfc.QR[k].pair(Ai.column(j), Om.star(k, Om.basis(k, x))), sfc.QR[k].dim), 1)
            rhs = psi_out.after(lm(_inv(sf.sigma[k]))).after(psi_in)
            if lm(sfc.sigma[k]) != rhs:
                wit = f"conjugate sigma square fails in degree {k}"
                break
        out.append(check(f"conj.{nm}.square_sigma", "square-sigma", wit))
        return out


def naturality_conj_witness(iso1: ConjugateIso, iso2: ConjugateIso, f: GradedMorphism,
                            fbar: GradedMorphism) -> str | None:
    """Abar_1 o A_fbar = A_f o Abar_2 for f: alpha1 -> alpha2 of degree 0."""
    A_fbar, w1 = image_map(iso1.sfc, iso2.sfc, fbar)
    A_f, w2 = image_map(iso1.sf, iso2.sf, f)
    if w1 or w2:
        return w1 or w2
    if iso1.A.after(A_fbar) != A_f.after(iso2.A):
        return "conjugation naturality square does not commute"
    return None


class TensorIso:
    """A^-1: Gamma_1 (x)_M Gamma_2 -> Gamma_(1 (x) 2), T1 (x) T2 -> (v1 (x) v2 -> T1(v1) T2(v2))."""

    def __init__(self, sf1: SectionFrame, sf2: SectionFrame, sf12: SectionFrame):
        self.sf1, self.sf2, self.sf12 = sf1, sf2, sf12
        self.T = BalancedTensor(sf1.G.dim, sf2.G.dim, sf1.R, sf2.L, f"Gamma_{sf1.name} (x) Gamma_{sf2.name}")
        self._cache = {}
        self.error = None
        try:
            self.Ainv = self.T.induced(self.pair, sf12.G.dim)
        except LinalgError:
            self.error = "T1(v1) T2(v2) is not a section of the tensor product"
            self.Ainv = None

    def pair(self, i, j):
        key = (i, j)
        if key not in self._cache:
            self._cache[key] = product_section(self.sf1, self.sf1.G.basis[i], self.sf2, self.sf2.G.basis[j],
                                               self.sf12)
        return self._cache[key]

    def bilinear(self, a, b):
        out = [ZERO] * self.sf12.G.dim
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    if y:
                        out = vec_add(out, [x * y * z for z in self.pair(i, j)])
        return out

    def checks(self, ic1=None, ic2=None, ic12=None) -> list[Check]:
        anchor = "tensor-iso"
        sf1, sf2, sf12 = self.sf1, self.sf2, self.sf12
        nm = f"{sf1.name},{sf2.name}"
        if self.error:
            return [check(f"tensor.{nm}.bijective", anchor, self.error)]
        bal = self.T.balanced_witness(self.pair)
        bij = None
        if self.Ainv.nrows != self.Ainv.ncols or self.Ainv.rank() != self.Ainv.nrows:
            bij = f"A^-1 is {self.Ainv.nrows}x{self.Ainv.ncols} of rank {self.Ainv.rank()}"
        out = [check(f"tensor.{nm}.balanced", anchor, bal),
               check(f"tensor.{nm}.bijective", anchor, bij, dim=self.T.dim)]
        Om = sf1.hm.Om
        G1, G2 = sf1.G, sf2.G
        if ic1 and ic2 and ic12 and sf1.cap >= 1:
            inv1 = _inv(sf1.sigma[1])
            wit = None
            for i in range(G1.dim):
                for j in range(G2.dim):
                    lhs = ic12.nabla @ self.pair(i, j)
                    rhs = [ZERO] * sf12.QL[1].dim
                    for y, i2, c in sf1.QL[1].terms(ic1.nabla.column(i)):
                        rhs = vec_add(rhs, [c * v for v in sf12.QL[1].pair(Om.basis(1, y), self.pair(i2, j))])
                    for y, j2, c in sf2.QL[1].terms(ic2.nabla.column(j)):
                        q = inv1 @ sf1.QR[1].pair(_e(G1.dim, i), Om.basis(1, y))
                        for z, i3, c2 in sf1.QL[1].terms(q):
                            rhs = vec_add(rhs, [c * c2 * v for v in sf12.QL[1].pair(Om.basis(1, z), self.pair(i3, j2))])
                    if lhs != rhs:
                        wit = f"tensor connection square fails on ({i + 1},{j + 1})"
                        break
                if wit:
                    break
            out.append(check(f"tensor.{nm}.square_connection", "square-connection", wit))
        wit = None
        for k in range(sf1.cap + 1):
            for x in range(Om.dim(k)):
                mu = Om.basis(k, x)
                for i in range(G1.dim):
                    s1 = sf1.sigma[k] @ sf1.QL[k].pair(mu, _e(G1.dim, i))
                    for j in range(G2.dim):
                        lhs = sf12.sigma[k] @ sf12.QL[k].pair(mu, self.pair(i, j))
                        rhs = [ZERO] * sf12.QR[k].dim
                        for i2, y, c in sf1.QR[k].terms(s1):
                            s2 = sf2.sigma[k] @ sf2.QL[k].pair(Om.basis(k, y), _e(G2.dim, j))
                            for j2, z, c2 in sf2.QR[k].terms(s2):
                                rhs = vec_add(rhs, [c * c2 * v for v in sf12.QR[k].pair(self.pair(i2, j2), Om.basis(k, z))])
                        if lhs != rhs:
                            wit = f"tensor sigma square fails in degree {k}"
                            break
                    if wit:
                        break
                if wit:
                    break
            if wit:
                break
        out.append(check(f"tensor.{nm}.square_sigma", "square-sigma", wit))
        return out


def product_section(sf1, T1, sf2, T2, sf12):
    hm = sf1.hm
    c1, c2 = sf1.G.cols(T1), sf2.G.cols(T2)
    cols = [hm.mul(0, a, 0, b) for a in c1 for b in c2]
    return sf12.G.coords(sf12.G.flat(cols))


def naturality_tensor_witness(t1: TensorIso, t2: TensorIso, f: GradedMorphism, fp: GradedMorphism,
                              ff: GradedMorphism) -> str | None:
    """A_(f (x) f')(A^-1(T (x) T')) = A^-1(A_f T (x) A_f' T') for degree-0 f, f'."""
    A_f, w1 = image_map(t1.sf1, t2.sf1, f)
    A_fp, w2 = image_map(t1.sf2, t2.sf2, fp)
    A_ff, w3 = image_map(t1.sf12, t2.sf12, ff)
    if w1 or w2 or w3:
        return w1 or w2 or w3
    for i in range(t2.sf1.G.dim):
        for j in range(t2.sf2.G.dim):
            lhs = A_ff(t2.pair(i, j))
            rhs = t1.bilinear(A_f(_e(t2.sf1.G.dim, i)), A_fp(_e(t2.sf2.G.dim, j)))
            if lhs != rhs:
                return f"tensor naturality square fails on ({i + 1},{j + 1})"
    return None


def associativity_witness(sf1, sf2, sf3, sf12, sf23, sf123) -> str | None:
    """(T1 T2) T3 = T1 (T2 T3) through the tensor isomorphisms."""
    for a in sf1.G.basis:
        for b in sf2.G.basis:
            ab = sf12.G.vector(product_section(sf1, a, sf2, b, sf12))
            for c in sf3.G.basis:
                bc = sf23.G.vector(product_section(sf2, b, sf3, c, sf23))
                left = product_section(sf12, ab, sf3, c, sf123)
                right = product_section(sf1, a, sf23, bc, sf123)
                if left != right:
                    return f"associativity fails on ({sf1.name}, {sf2.name}, {sf3.name})"
    return None


def _left_inverse(f: GradedMorphism):
    """g with g o f = id, searched in Mor(target, source) of the same degree."""
    basis = mor_space(f.target, f.source, f.degree)
    n = f.source.dim
    F = f.matrix
    cols = []
    for g in basis:
        inner = F.conj() if g.degree else F
        cols.append([x for row in (g.matrix @ inner).rows for x in row])
    ident = [ONE if i == j else ZERO for i in range(n) for j in range(n)]
    if not cols:
        return None
    sol = solve_affine(Matrix.from_columns(cols, n * n), ident)
    if sol is INFEASIBLE:
        return None
    G = Matrix.zeros(f.source.dim, f.target.dim)
    for c, g in zip(sol.particular, basis):
        if c:
            G = G + g.matrix.scale(c)
    return GradedMorphism(f.target, f.source, LinearMap(G, f.degree))


def exactness_checks(src: SectionFrame, dst: SectionFrame, f: GradedMorphism, label: str) -> list[Check]:
    """mono -> surjective image (with the explicit extension), epi -> injective image."""
    anchor = "exactness"
    A, err = image_map(src, dst, f)
    if err:
        return [check(f"exact.{label}", anchor, err)]
    F = f.matrix
    r = F.rank()
    out = []
    rA = A.matrix.rank()
    if r == F.ncols:  # mono
        wit = None if rA == src.G.dim else f"A_f has rank {rA} < {src.G.dim}"
        if wit is None:
            g = _left_inverse(f)
            if g is None:
                wit = "no left inverse morphism for the extension"
            else:
                Ag, w = image_map(dst, src, g)
                wit = w
                if not w:
                    for b in range(src.G.dim):
                        e = _e(src.G.dim, b)
                        if A(Ag(e)) != e:
                            wit = f"A_f(T^ext) != T for section {b + 1}"
                            break
        out.append(check(f"exact.{label}.mono_to_epi", anchor, wit, rank=rA))
    if r == F.nrows:  # epi
        out.append(check(f"exact.{label}.epi_to_mono", anchor,
                         None if rA == dst.G.dim else f"A_f has rank {rA} < {dst.G.dim}", rank=rA))
    return out


def short_exact_checks(sa, ssum, sb, iota: GradedMorphism, pi: GradedMorphism, label: str) -> list[Check]:
    anchor = "exactness"
    Ai, w1 = image_map(sa, ssum, iota)
    Ap, w2 = image_map(ssum, sb, pi)
    if w1 or w2:
        return [check(f"exact.{label}.sequence", anchor, w1 or w2)]
    comp = Ai.after(Ap)
    wit = None
    if not comp.matrix.is_zero():
        wit = "A_iota o A_pi != 0"
    elif Ai.matrix.rank() + Ap.matrix.rank() != ssum.G.dim:
        wit = f"rank {Ai.matrix.rank()} + {Ap.matrix.rank()} != dim {ssum.G.dim}"
    return [check(f"exact.{label}.sequence", anchor, wit,
                  dims=[sa.G.dim, ssum.G.dim, sb.G.dim])]
