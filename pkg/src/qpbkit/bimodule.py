"""Balanced tensor products U (x)_M V over a base algebra spanned by points."""
from __future__ import annotations

from .linalg import Matrix, ONE, Quotient, ZERO


class BalancedTensor:
    """U (x)_M V as a quotient of U (x) V.

    right_u[a] / left_v[a] are the matrices of u -> u p_a and v -> p_a v.
    Ambient index of e_i (x) f_j is i * dim V + j.
    """

    def __init__(self, du: int, dv: int, right_u: list, left_v: list, name: str = ""):
        self.du, self.dv = du, dv
        self.name = name
        rels = []
        for Ra, La in zip(right_u, left_v):
            for i in range(du):
                ui = Ra.column(i)
                for j in range(dv):
                    vj = La.column(j)
                    rel = {}
                    for p, x in enumerate(ui):
                        if x:
                            rel[p * dv + j] = rel.get(p * dv + j, ZERO) + x
                    for q, y in enumerate(vj):
                        if y:
                            rel[i * dv + q] = rel.get(i * dv + q, ZERO) - y
                    rel = {k: v for k, v in rel.items() if v}
                    if rel:
                        rels.append(rel)
        self._rels = rels
        self.Q = Quotient(du * dv, rels)

    @property
    def dim(self):
        return self.Q.dim

    def index(self, i, j):
        return i * self.dv + j

    def outer(self, u, v):
        out = [ZERO] * (self.du * self.dv)
        for i, x in enumerate(u):
            if x:
                for j, y in enumerate(v):
                    if y:
                        out[i * self.dv + j] = out[i * self.dv + j] + x * y
        return out

    def pair(self, u, v):
        return self.Q.project(self.outer(u, v))

    def pair_basis(self, i, j):
        return self.Q.project({i * self.dv + j: ONE})

    def project(self, vec):
        return self.Q.project(vec)

    def lift(self, c):
        return self.Q.lift(c)

    def terms(self, c):
        """(i, j, coefficient) of the canonical lift."""
        return [(f // self.dv, f % self.dv, x) for f, x in zip(self.Q.free, c) if x]

    def induced(self, image_of_pair, target_dim: int) -> Matrix:
        """Matrix of the map on the quotient given on simple tensors e_i (x) f_j."""
        cols = [image_of_pair(f // self.dv, f % self.dv) for f in self.Q.free]
        return Matrix.from_columns(cols, target_dim) if cols else Matrix.zeros(target_dim, 0)

    def balanced_witness(self, image_of_pair):
        """None if the map on U (x) V kills every balancing relation."""
        cache = {}
        for rel in self._rels:
            acc = None
            for k, c in rel.items():
                if k not in cache:
                    cache[k] = image_of_pair(k // self.dv, k % self.dv)
                img = cache[k]
                acc = [c * x for x in img] if acc is None else [a + c * x for a, x in zip(acc, img)]
            if acc and any(acc):
                return f"map is not balanced over the base on {self.name or 'tensor'}"
        return None
