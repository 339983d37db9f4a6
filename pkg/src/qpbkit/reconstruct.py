"""Rebuild a bundle with connection from its associated section frames.

GM' = sum_alpha Gamma_alpha (x) V_alpha, with the product transported through the
tensor isomorphisms and the decomposition of alpha (x) beta, the star through
degree-1 images, the coaction id (x) alpha, and D' from the induced connections.
The round trip is certified by Psi(T (x) v) = T(v).
"""
from __future__ import annotations

from itertools import product

from .assoc import InducedConnection, SectionFrame, _e, _inv
from .bundle import CovariantDerivative, HorizontalModel
from .checks import Check, check
from .corep import Corep, decompose, mor_space, tensor
from .functor import TensorIso, associativity_witness, image_map, product_section
from .linalg import LinalgError, Matrix, ZERO, solve_affine, INFEASIBLE, vec_add

__all__ = ["Reconstruction", "contragredient", "canonical_c"]


def contragredient(c: Corep, name: str | None = None) -> Corep:
    """alpha^c_ij = kappa(u_ji)."""
    H = c.hopf
    u = [[H.kappa(c.u[j][i]) for j in range(c.dim)] for i in range(c.dim)]
    return Corep(H, u, name or f"{c.name}^c")


def canonical_c(c: Corep):
    """The degree-0 morphism alpha -> alpha^cc, scaled to trace dim alpha."""
    cc = contragredient(contragredient(c))
    mors = mor_space(c, cc, 0)
    if len(mors) != 1:
        return None
    M = mors[0].matrix
    tr = sum((M.rows[i][i] for i in range(M.nrows)), ZERO)
    if tr:
        return M.scale(tr.inverse() * c.dim)
    for row in M.rows:
        for x in row:
            if x:
                return M.scale(x.inverse())
    return None


class Reconstruction:
    def __init__(self, hm: HorizontalModel, D: CovariantDerivative, irreps):
        self.hm, self.D = hm, D
        self.irreps = list(irreps)
        self.frames = {a.name: SectionFrame(hm, a) for a in self.irreps}
        self.ics = {a.name: InducedConnection(self.frames[a.name], D) for a in self.irreps}
        # block index (alpha, t, i) -> position in GM'
        self.index = {}
        self.blocks = []
        for a in self.irreps:
            g = self.frames[a.name].G.dim
            for t in range(g):
                for i in range(a.dim):
                    self.index[(a.name, t, i)] = len(self.blocks)
                    self.blocks.append((a.name, t, i))
        self.dim = len(self.blocks)
        self._by_name = {a.name: a for a in self.irreps}
        self._tensor_frames = {}
        self._decomp = {}

    # --- Psi ---
    def psi_basis(self, k, key):
        """Image of a basis element of degree-k GM' block in Hor^k."""
        a, t, i = key
        sk = self.frames[a].S[k]
        return sk.cols(sk.basis[t])[i]

    def psi_matrix(self, k=0) -> Matrix:
        cols = []
        for a in self.irreps:
            sk = self.frames[a.name].S[k]
            for t in range(sk.dim):
                cs = sk.cols(sk.basis[t])
                cols.extend(cs)
        return Matrix.from_columns(cols, self.hm.dim(k)) if cols else Matrix.zeros(self.hm.dim(k), 0)

    def psi(self, vec):
        out = self.hm.zero(0)
        for p, c in enumerate(vec):
            if c:
                out = vec_add(out, [c * x for x in self.psi_basis(0, self.blocks[p])])
        return out

    # --- structure of GM' ---
    def _tensor_frame(self, a, b):
        key = (a, b)
        if key not in self._tensor_frames:
            ca, cb = self._by_name[a], self._by_name[b]
            t = tensor(ca, cb)
            t.name = f"{a}(x){b}"
            sf = SectionFrame(self.hm, t, frame=False)
            self._tensor_frames[key] = sf
            dec = decompose(t, self.irreps)
            if not dec.complete:
                raise LinalgError(f"{a} (x) {b} does not decompose into the irreducible set")
            self._decomp[key] = (dec, _inv(dec.iso))
        return self._tensor_frames[key]

    def product_basis(self, x, y):
        a, t, i = self.blocks[x]
        b, s, j = self.blocks[y]
        fa, fb = self.frames[a], self.frames[b]
        sf = self._tensor_frame(a, b)
        dec, Qinv = self._decomp[(a, b)]
        P = product_section(fa, fa.G.basis[t], fb, fb.G.basis[s], sf)
        coeffs = Qinv.column(i * fb.alpha.dim + j)
        out = [ZERO] * self.dim
        pos = 0
        for gamma, mors in dec.blocks:
            fg = self.frames[gamma.name]
            for f in mors:
                A, err = image_map(fg, sf, f)
                if err:
                    raise LinalgError(err)
                img = A(P)
                for r in range(gamma.dim):
                    q = coeffs[pos + r]
                    if q:
                        for u, c in enumerate(img):
                            if c:
                                idx = self.index[(gamma.name, u, r)]
                                out[idx] = out[idx] + q * c
                pos += gamma.dim
        return out

    def mul(self, v, w):
        out = [ZERO] * self.dim
        for x, c in enumerate(v):
            if c:
                for y, e in enumerate(w):
                    if e:
                        out = vec_add(out, [c * e * z for z in self.product_basis(x, y)])
        return out

    def star_basis(self, x):
        a, t, i = self.blocks[x]
        gamma = self._by_name[a]
        for delta in self.irreps:
            mors = mor_space(delta, gamma, 1)
            if mors:
                f = mors[0]
                break
        else:
            raise LinalgError(f"no degree-1 morphism into {a}")
        A, err = image_map(self.frames[delta.name], self.frames[a], f)
        if err:
            raise LinalgError(err)
        img = A(_e(self.frames[a].G.dim, t))
        Finv = _inv(f.matrix)
        out = [ZERO] * self.dim
        for j in range(delta.dim):
            q = Finv.rows[j][i]
            if q:
                q = q.conj()
                for u, c in enumerate(img):
                    if c:
                        idx = self.index[(delta.name, u, j)]
                        out[idx] = out[idx] + q * c
        return out

    def coact_basis(self, x):
        """(id (x) alpha)(T (x) e_i) = sum_j T (x) e_j (x) u_ji, as a dense GM' (x) H vector."""
        a, t, i = self.blocks[x]
        c = self._by_name[a]
        n = c.hopf.n
        out = [ZERO] * (self.dim * n)
        for j in range(c.dim):
            for h, e in enumerate(c.u[j][i]):
                if e:
                    out[self.index[(a, t, j)] * n + h] += e
        return out

    def derivative_basis(self, x):
        """D'(T (x) v) = (nabla T)(v) read through Omega^1 (x) Gamma -> Hor^1."""
        a, t, i = self.blocks[x]
        sf, ic = self.frames[a], self.ics[a]
        sec = sf.UinvL[1] @ ic.nabla.column(t)
        return sf.S[1].cols(sf.S[1].vector(sec))[i]

    # --- verification ---
    def hypotheses(self) -> list[Check]:
        hm = self.hm
        Om = hm.Om
        anchor = "reconstruction-hypotheses"
        out = []
        triv = next((a for a in self.irreps if a.name == "triv"), None)
        w1 = None
        if triv is None:
            w1 = "no trivial corep in the irreducible set"
        else:
            sf = self.frames["triv"]
            if sf.G.dim != Om.n:
                w1 = f"Gamma_triv has dim {sf.G.dim}, base has {Om.n} points"
            else:
                for a in range(Om.n):
                    vec = sf.G.flat([hm.embed(0, Om.point(a))])
                    try:
                        sec = sf.G.coords(vec)
                    except LinalgError:
                        w1 = f"p{a} is not a trivial section"
                        break
                    if hm.cap >= 1:
                        img = sf.S[1].vector(self.ics["triv"].DS[0] @ sec)
                        if img != sf.S[1].flat([hm.embed(1, Om.dp(a))]):
                            w1 = f"nabla_triv(p{a}) != d p{a}"
                            break
        out.append(check("reconstruct.h1.trivial_block", anchor, w1))

        w2 = None
        for a, b in product(self.irreps, repeat=2):
            sf = self._tensor_frame(a.name, b.name)
            ti = TensorIso(self.frames[a.name], self.frames[b.name], sf)
            bad = [c for c in ti.checks() if not c.passed]
            if bad:
                w2 = f"({a.name}, {b.name}): {bad[0].witness}"
                break
        out.append(check("reconstruct.h2.tensor_isos", anchor, w2))

        w3 = None
        for a, b, c in product(self.irreps, repeat=3):
            sab = self._tensor_frame(a.name, b.name)
            sbc = self._tensor_frame(b.name, c.name)
            t3 = tensor(tensor(a, b), c)
            t3.name = f"{a.name}(x){b.name}(x){c.name}"
            s3 = SectionFrame(hm, t3, frame=False)
            w3 = associativity_witness(self.frames[a.name], self.frames[b.name], self.frames[c.name], sab, sbc, s3)
            if w3:
                break
        out.append(check("reconstruct.h3.associativity", anchor, w3))

        w4 = None
        cs = {}
        for a in self.irreps:
            sf = self.frames[a.name]
            if sf.frame is None:
                w4 = f"{a.name}: no frame"
                break
            bad = [c for c in sf.frame.checks() if not c.passed]
            if bad:
                w4 = f"{a.name}: {bad[0].witness}"
                break
            C = canonical_c(a)
            if C is None:
                w4 = f"{a.name}: no canonical morphism to the double contragredient"
                break
            cs[a.name] = C.to_strings()
        out.append(check("reconstruct.h4.frames", anchor, w4, C=cs))

        w5 = None
        for a in self.irreps:
            for c in self.frames[a.name].checks() + self.ics[a.name].checks():
                if c.name.endswith((".unit", ".dR_conjugate")) and not c.passed:
                    w5 = f"{a.name}: {c.witness}"
                    break
            if w5:
                break
        out.append(check("reconstruct.h5.sigma_and_dR", anchor, w5))
        return out

    def checks(self) -> list[Check]:
        hm = self.hm
        anchor = "reconstruction"
        out = self.hypotheses()
        P = self.psi_matrix(0)
        bij = None
        if P.nrows != P.ncols or P.rank() != P.nrows:
            bij = f"Psi is {P.nrows}x{P.ncols} of rank {P.rank()}"
        out.append(check("reconstruct.psi_bijective", anchor, bij, dim=self.dim))
        if bij:
            return out
        for k in range(1, hm.cap + 1):
            Pk = self.psi_matrix(k)
            wk = None
            if Pk.nrows != Pk.ncols or Pk.rank() != Pk.nrows:
                wk = f"degree {k}: Psi is {Pk.nrows}x{Pk.ncols} of rank {Pk.rank()}"
            out.append(check(f"reconstruct.psi_bijective_degree{k}", anchor, wk))

        basis = range(self.dim)

        def prod():
            for x, y in product(basis, repeat=2):
                lhs = self.psi(self.product_basis(x, y))
                rhs = hm.mul(0, self.psi(_e(self.dim, x)), 0, self.psi(_e(self.dim, y)))
                if lhs != rhs:
                    return f"Psi(x y) != Psi(x) Psi(y) on {self.label(x)}, {self.label(y)}"
            return None

        def unit():
            u = hm.embed(0, hm.Om.unit())
            sol = solve_affine(P, u)
            if sol is INFEASIBLE:
                return "unit not in the image of Psi"
            one = sol.particular
            for x in basis:
                e = _e(self.dim, x)
                if self.mul(one, e) != e or self.mul(e, one) != e:
                    return f"the preimage of 1 is not a unit on {self.label(x)}"
            return None

        def star():
            for x in basis:
                if self.psi(self.star_basis(x)) != hm.star(0, self.psi(_e(self.dim, x))):
                    return f"Psi(x*) != Psi(x)* on {self.label(x)}"
            return None

        def coaction():
            n = hm.H.n
            for x in basis:
                lhs = hm.coact(0, self.psi(_e(self.dim, x)))
                img = self.coact_basis(x)
                rhs = [ZERO] * len(lhs)
                for y in basis:
                    for h in range(n):
                        c = img[y * n + h]
                        if c:
                            for z, e in enumerate(self.psi_basis(0, self.blocks[y])):
                                if e:
                                    rhs[z * n + h] += c * e
                if lhs != rhs:
                    return f"Psi does not intertwine the coaction on {self.label(x)}"
            return None

        def derivative():
            if hm.cap < 1:
                return None
            for x in basis:
                if self.derivative_basis(x) != self.D.apply(0, self.psi(_e(self.dim, x))):
                    return f"D'({self.label(x)}) != D(Psi({self.label(x)}))"
            return None

        def gluing():
            if hm.cap < 1:
                return None
            for x, y in product(basis, repeat=2):
                xy = self.product_basis(x, y)
                lhs = [ZERO] * hm.dim(1)
                for z, c in enumerate(xy):
                    if c:
                        lhs = vec_add(lhs, [c * v for v in self.derivative_basis(z)])
                px, py = self.psi(_e(self.dim, x)), self.psi(_e(self.dim, y))
                rhs = vec_add(hm.mul(1, self.derivative_basis(x), 0, py), hm.mul(0, px, 1, self.derivative_basis(y)))
                if lhs != rhs:
                    return f"Leibniz gluing fails on {self.label(x)}, {self.label(y)}"
            return None

        out += [
            check("reconstruct.product", anchor, prod()),
            check("reconstruct.unit", anchor, unit()),
            check("reconstruct.star", anchor, star()),
            check("reconstruct.coaction", anchor, coaction()),
            check("reconstruct.derivative", anchor, derivative()),
            check("reconstruct.leibniz_gluing", anchor, gluing()),
        ]
        return out

    def label(self, x):
        a, t, i = self.blocks[x]
        return f"T{t + 1}^{a}(x)e{i + 1}"

    def certificate(self) -> dict:
        """Psi in GM coordinates: label of each GM' basis element -> T(v) in GM labels."""
        from .expr import format_combo
        hm = self.hm
        GM = hm.GM
        out = {}
        for x in range(self.dim):
            out[self.label(x)] = format_combo(hm.to_gm(self.psi(_e(self.dim, x))), GM.labels)
        return out
