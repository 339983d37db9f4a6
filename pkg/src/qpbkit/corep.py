"""Corepresentations of a finite Hopf *-algebra and their graded morphisms.

A corep on V = C^n is an n x n matrix u of algebra elements with
alpha(e_j) = sum_i e_i (x) u_ij.  Morphism matrices F act on column vectors;
degree-1 morphisms are antilinear: v -> F conj(v).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .checks import Check, StructuralError, check, first
from .hopf import HopfAlgebra
from .linalg import (LinearMap, Matrix, ONE, ZERO, block_diag, kernel, kron,
                     vec_add, vec_scale)
from .scalars import CycScalar, cyc

__all__ = [
    "Corep", "GradedMorphism", "MorphismPair", "check_corep", "mor_space", "conjugate",
    "conjugate_morphism", "direct_sum", "direct_sum_morphisms", "tensor",
    "tensor_morphisms", "decompose", "irreducible_set", "trivial_corep", "IrreducibleSet",
    "Decomposition", "regular_corep", "certify_irreducibles", "identity_morphism",
    "morphism_from_matrix", "intertwiner_witness",
]


class Corep:
    def __init__(self, hopf: HopfAlgebra, u, name: str = ""):
        self.hopf = hopf
        self.u = [[list(x) for x in row] for row in u]
        self.dim = len(self.u)
        if any(len(row) != self.dim for row in self.u):
            raise ValueError("corep matrix must be square")
        if any(len(x) != hopf.n for row in self.u for x in row):
            raise ValueError("corep entries must be elements of the Hopf algebra")
        self.name = name

    def __repr__(self):
        return f"Corep({self.name or '?'}, dim={self.dim})"

    def coact(self, v):
        """alpha(v) as a dense vector of V (x) H (lex)."""
        n = self.hopf.n
        out = [ZERO] * (self.dim * n)
        for j, c in enumerate(v):
            if not c:
                continue
            for i in range(self.dim):
                for x, a in enumerate(self.u[i][j]):
                    if a:
                        out[i * n + x] = out[i * n + x] + c * a
        return out

    def character(self):
        out = self.hopf.zero()
        for i in range(self.dim):
            out = vec_add(out, self.u[i][i])
        return out

    def entries_str(self):
        H = self.hopf
        return [[H.fmt(x) for x in row] for row in self.u]


def trivial_corep(hopf: HopfAlgebra, dim: int = 1, name: str = "triv") -> Corep:
    z = hopf.zero()
    return Corep(hopf, [[hopf.unit if i == j else z for j in range(dim)] for i in range(dim)], name)


def regular_corep(hopf: HopfAlgebra) -> Corep:
    """H coacting on itself by phi: phi(x_j) = sum_i x_i (x) u_ij."""
    n = hopf.n
    u = [[hopf.zero() for _ in range(n)] for _ in range(n)]
    for j in range(n):
        for (i, k), c in hopf.comult[j].items():
            u[i][j][k] = u[i][j][k] + c
    return Corep(hopf, u, "regular")


def check_corep(c: Corep, unitary: bool = False, prefix: str = "corep") -> list[Check]:
    H = c.hopf
    n = c.dim
    anchor = "corepresentation"

    def counit():
        for i in range(n):
            for j in range(n):
                if H.eps(c.u[i][j]) != (1 if i == j else 0):
                    return f"eps(u[{i + 1},{j + 1}]) != delta"
        return None

    def comodule():
        nh = H.n
        for i in range(n):
            for j in range(n):
                rhs = [ZERO] * (nh * nh)
                for k in range(n):
                    a, b = c.u[i][k], c.u[k][j]
                    for p, x in enumerate(a):
                        if x:
                            for q, y in enumerate(b):
                                if y:
                                    rhs[p * nh + q] = rhs[p * nh + q] + x * y
                if H.comul(c.u[i][j]) != rhs:
                    return f"phi(u[{i + 1},{j + 1}]) != sum_k u[{i + 1},k] (x) u[k,{j + 1}]"
        return None

    out = [check(f"{prefix}.counit", anchor, counit()),
           check(f"{prefix}.comodule", anchor, comodule())]
    if unitary:
        out.append(check(f"{prefix}.unitary", anchor, unitarity_witness(c)))
    return out


def unitarity_witness(c: Corep):
    H = c.hopf
    n = c.dim
    st = [[H.star(x) for x in row] for row in c.u]
    for i in range(n):
        for j in range(n):
            target = H.unit if i == j else H.zero()
            a = H.zero()
            b = H.zero()
            for k in range(n):
                a = vec_add(a, H.mul(st[k][i], c.u[k][j]))
                b = vec_add(b, H.mul(c.u[i][k], st[j][k]))
            if a != target:
                return f"sum_k u[k,{i + 1}]* u[k,{j + 1}] != delta"
            if b != target:
                return f"sum_k u[{i + 1},k] u[{j + 1},k]* != delta"
    return None


# --- morphisms --------------------------------------------------------------

@dataclass
class GradedMorphism:
    source: Corep
    target: Corep
    map: LinearMap

    @property
    def degree(self):
        return self.map.parity

    @property
    def matrix(self):
        return self.map.matrix

    def __call__(self, v):
        return self.map(v)

    def after(self, first: "GradedMorphism") -> "GradedMorphism":
        if first.target is not self.source and not _same_corep(first.target, self.source):
            raise ValueError("morphisms do not compose")
        return GradedMorphism(first.source, self.target, self.map.after(first.map))

    def is_intertwiner(self) -> bool:
        return intertwiner_witness(self) is None


def _same_corep(a: Corep, b: Corep) -> bool:
    return a.dim == b.dim and a.u == b.u


def _conj_el(H, x, degree):
    return H.star(x) if degree else x


def _mor_rows(a: Corep, b: Corep, degree: int):
    """Linear equations in F (dim_b x dim_a, var l*dim_a + j)."""
    H = a.hopf
    na, nb = a.dim, b.dim
    ua = [[_conj_el(H, x, degree) for x in row] for row in a.u]
    rows = []
    for l in range(nb):
        for j in range(na):
            for x in range(H.n):
                row = {}
                for i in range(na):
                    c = ua[i][j][x]
                    if c:
                        row[l * na + i] = row.get(l * na + i, ZERO) + c
                for m in range(nb):
                    c = b.u[l][m][x]
                    if c:
                        k = m * na + j
                        nv = row.get(k, ZERO) - c
                        row[k] = nv
                row = {k: v for k, v in row.items() if v}
                if row:
                    rows.append(row)
    return rows


def mor_space(a: Corep, b: Corep, degree: int = 0) -> list[GradedMorphism]:
    if a.hopf is not b.hopf and a.hopf.n != b.hopf.n:
        raise ValueError("coreps over different Hopf algebras")
    na, nb = a.dim, b.dim
    if na == 0 or nb == 0:
        return []
    basis = kernel(_mor_rows(a, b, degree), na * nb)
    out = []
    for v in basis:
        F = Matrix([[v[l * na + j] for j in range(na)] for l in range(nb)])
        out.append(GradedMorphism(a, b, LinearMap(F, degree)))
    return out


def intertwiner_witness(f: GradedMorphism):
    a, b = f.source, f.target
    na = a.dim
    F = f.matrix
    for r in _mor_rows(a, b, f.degree):
        acc = ZERO
        for k, c in r.items():
            acc = acc + c * F.rows[k // na][k % na]
        if acc:
            return "intertwining relation fails"
    return None


def morphism_from_matrix(a: Corep, b: Corep, F: Matrix, degree: int = 0) -> GradedMorphism:
    return GradedMorphism(a, b, LinearMap(F, degree))


def identity_morphism(a: Corep) -> GradedMorphism:
    return GradedMorphism(a, a, LinearMap.identity(a.dim))


# --- functors -----------------------------------------------------------------

def conjugate(c: Corep) -> Corep:
    H = c.hopf
    return Corep(H, [[H.star(x) for x in row] for row in c.u], f"conj({c.name})")


def conjugate_morphism(f: GradedMorphism, source: Corep | None = None, target: Corep | None = None):
    """conj o f o conj^-1 between the conjugate coreps; same parity, matrix conj(F)."""
    return GradedMorphism(source or conjugate(f.source), target or conjugate(f.target),
                          LinearMap(f.matrix.conj(), f.degree))


def direct_sum(a: Corep, b: Corep) -> Corep:
    H = a.hopf
    n = a.dim + b.dim
    z = H.zero()
    u = [[z for _ in range(n)] for _ in range(n)]
    for i in range(a.dim):
        for j in range(a.dim):
            u[i][j] = a.u[i][j]
    for i in range(b.dim):
        for j in range(b.dim):
            u[a.dim + i][a.dim + j] = b.u[i][j]
    return Corep(H, u, f"{a.name}+{b.name}")


def tensor(a: Corep, b: Corep) -> Corep:
    H = a.hopf
    u = []
    for i in range(a.dim):
        for k in range(b.dim):
            u.append([H.mul(a.u[i][j], b.u[k][l]) for j in range(a.dim) for l in range(b.dim)])
    return Corep(H, u, f"{a.name}*{b.name}")


@dataclass
class MorphismPair:
    """A morphism of the cross category: degree 0 (f1: a1->b1, f2: a2->b2) or
    degree 1 (f1: a1->b2, f2: a2->b1)."""
    f1: GradedMorphism
    f2: GradedMorphism

    def __post_init__(self):
        if self.f1.degree != self.f2.degree:
            raise ValueError("mixed-parity pair")

    @property
    def degree(self):
        return self.f1.degree

    def after(self, first: "MorphismPair") -> "MorphismPair":
        """(h1, h2) o (f1, f2): (h1 f1, h2 f2) in degree 0 of `first`, (h2 f1, h1 f2) in degree 1."""
        h1, h2 = self.f1, self.f2
        if first.degree == 0:
            return MorphismPair(h1.after(first.f1), h2.after(first.f2))
        return MorphismPair(h2.after(first.f1), h1.after(first.f2))


def direct_sum_morphisms(p: MorphismPair, a: tuple[Corep, Corep], b: tuple[Corep, Corep]) -> GradedMorphism:
    """a = (a1, a2) source pair, b = (b1, b2) target pair."""
    src, dst = direct_sum(*a), direct_sum(*b)
    F1, F2 = p.f1.matrix, p.f2.matrix
    if p.degree == 0:
        return GradedMorphism(src, dst, LinearMap(block_diag(F1, F2), 0))
    # (v1, v2) -> (f2(v2), f1(v1))
    n1, n2 = a[0].dim, a[1].dim
    m1, m2 = b[0].dim, b[1].dim
    M = Matrix.zeros(m1 + m2, n1 + n2)
    for r in range(m1):
        for c in range(n2):
            M.rows[r][n1 + c] = F2.rows[r][c]
    for r in range(m2):
        for c in range(n1):
            M.rows[m1 + r][c] = F1.rows[r][c]
    return GradedMorphism(src, dst, LinearMap(M, 1))


def tensor_morphisms(p: MorphismPair, a: tuple[Corep, Corep], b: tuple[Corep, Corep]) -> GradedMorphism:
    src, dst = tensor(*a), tensor(*b)
    F1, F2 = p.f1.matrix, p.f2.matrix
    if p.degree == 0:
        return GradedMorphism(src, dst, LinearMap(kron(F1, F2), 0))
    # v1 (x) v2 -> f2(v2) (x) f1(v1); rows (r, s) in b1 (x) b2, cols (j, l) in a1 (x) a2
    n1, n2 = a[0].dim, a[1].dim
    m1, m2 = b[0].dim, b[1].dim
    M = Matrix.zeros(m1 * m2, n1 * n2)
    for r in range(m1):
        for s in range(m2):
            for j in range(n1):
                for l in range(n2):
                    x, y = F2.rows[r][l], F1.rows[s][j]
                    if x and y:
                        M.rows[r * m2 + s][j * n2 + l] = x * y
    return GradedMorphism(src, dst, LinearMap(M, 1))


# --- decomposition and irreducibles ----------------------------------------------

@dataclass
class IrreducibleSet:
    hopf: HopfAlgebra
    members: list
    certified: bool = True
    notes: list = field(default_factory=list)

    def __iter__(self):
        return iter(self.members)

    def __len__(self):
        return len(self.members)

    def by_name(self, name) -> Corep:
        for m in self.members:
            if m.name == name:
                return m
        raise KeyError(name)

    @property
    def names(self):
        return [m.name for m in self.members]

    def trivial(self) -> Corep:
        return self.by_name("triv")


@dataclass
class Decomposition:
    multiplicities: dict
    blocks: list  # (irreducible, [GradedMorphism alpha -> c])
    iso: Matrix | None  # columns: images of the isotypic basis
    complete: bool

    def total(self):
        return sum(self.multiplicities.values())


def decompose(c: Corep, irreps) -> Decomposition:
    mult = {}
    blocks = []
    cols = []
    for alpha in irreps:
        mors = mor_space(alpha, c, 0)
        mult[alpha.name] = len(mors)
        blocks.append((alpha, mors))
        for f in mors:
            cols.extend(f.matrix.columns())
    if c.dim == 0:
        return Decomposition(mult, blocks, Matrix.zeros(0, 0), True)
    total = sum(mult[a.name] * a.dim for a in irreps)
    if total != c.dim:
        return Decomposition(mult, blocks, None, False)
    iso = Matrix.from_columns(cols, c.dim)
    return Decomposition(mult, blocks, iso, iso.rank() == c.dim)


def _function_algebra_irreps(H: HopfAlgebra) -> list[Corep]:
    G = H.group
    m = G.exponent
    N = m if m > 2 else 1
    zeta = [cyc(1, 1, k, m) if N > 1 else (ONE if k % m == 0 else -ONE) for k in range(m)]
    found = []
    chars = []
    total = 0
    for sub in G.subgroups:
        reps = G.coset_reps(sub)
        pos = {}
        for t, r in enumerate(reps):
            for h in sub:
                pos[G.table[r][h]] = (t, h)
        for chi in G.linear_characters(sub):
            d = len(reps)
            # rho(g)_{st} = chi(t_s^-1 g t_t) if it lies in the subgroup
            rho = {}
            for g in range(G.n):
                mat = [[ZERO] * d for _ in range(d)]
                for t in range(d):
                    s, h = pos[G.table[g][reps[t]]]
                    mat[s][t] = zeta[chi[h] % m]
                rho[g] = mat
            char = tuple(sum((rho[g][i][i] for i in range(d)), ZERO) for g in range(G.n))
            norm = sum((x * x.conj() for x in char), ZERO) / G.n
            if norm != 1 or char in chars:
                continue
            chars.append(char)
            u = [[[rho[g][i][j] for g in range(G.n)] for j in range(d)] for i in range(d)]
            found.append(Corep(H, u))
            total += d * d
            if total == G.n:
                return found
    return found


def _group_algebra_irreps(H: HopfAlgebra) -> list[Corep]:
    G = H.group
    out = []
    for g in range(G.n):
        out.append(Corep(H, [[H.basis(g)]], "triv" if g == G.e else f"g{g + 1}"))
    return out


def _name_irreps(H: HopfAlgebra, irr: list[Corep]) -> list[Corep]:
    G = H.group

    def char_key(c):
        return tuple(str(x) for x in c.character())

    ones = [c for c in irr if c.dim == 1]
    triv = [c for c in ones if c.u[0][0] == H.unit]
    rest = [c for c in ones if c not in triv]
    real = [c for c in rest if all(x.is_rational() for x in c.u[0][0])]
    named = []
    for c in triv:
        c.name = "triv"
        named.append(c)
    if len(real) == 1:
        real[0].name = "sign"
        named.append(real[0])
        rest = [c for c in rest if c is not real[0]]
    for k, c in enumerate(sorted(rest, key=char_key), 1):
        c.name = f"chi{k}"
        named.append(c)
    higher = sorted((c for c in irr if c.dim > 1), key=lambda c: (c.dim, char_key(c)))
    for k, c in enumerate(higher, 1):
        c.name = f"rho{k}"
        named.append(c)
    return named


def certify_irreducibles(H: HopfAlgebra, members: list[Corep]) -> list[Check]:
    anchor = "irreducible-set"
    out = []
    for c in members:
        for ch in check_corep(c, unitary=True, prefix=f"irreps.{c.name}"):
            out.append(ch)
    schur = None
    for i, a in enumerate(members):
        for j, b in enumerate(members):
            d = len(mor_space(a, b, 0))
            if d != (1 if i == j else 0):
                schur = f"dim Mor0({a.name},{b.name}) = {d}"
                break
        if schur:
            break
    out.append(check("irreps.schur", anchor, schur))
    count = sum(c.dim ** 2 for c in members)
    out.append(check("irreps.peter_weyl_count", anchor,
                     None if count == H.n else f"sum dim^2 = {count} != dim H = {H.n}"))
    dec = decompose(regular_corep(H), members)
    wit = None
    if not dec.complete:
        wit = "regular corep does not decompose over the set"
    else:
        bad = [c.name for c in members if dec.multiplicities[c.name] != c.dim]
        if bad:
            wit = f"regular multiplicity != dim for {bad[0]}"
    out.append(check("irreps.regular_decomposition", anchor, wit,
                     multiplicities=dict(dec.multiplicities)))
    return out


def irreducible_set(H: HopfAlgebra, provided: list[Corep] | None = None) -> IrreducibleSet:
    if H.kind == "function_algebra":
        members = _name_irreps(H, _function_algebra_irreps(H))
    elif H.kind == "group_algebra":
        members = _group_algebra_irreps(H)
    else:
        if not provided:
            raise StructuralError("custom Hopf algebras need their irreducible coreps listed")
        members = list(provided)
        triv = [c for c in members if c.dim == 1 and c.u[0][0] == H.unit]
        if triv:
            triv[0].name = "triv"
            members = triv + [c for c in members if c is not triv[0]]
    count = sum(c.dim ** 2 for c in members)
    if count != H.n:
        raise StructuralError(f"irreducible set incomplete: sum dim^2 = {count}, dim H = {H.n}")
    return IrreducibleSet(H, members)
