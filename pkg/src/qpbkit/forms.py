"""Universal differential calculus on n points, truncated at a degree cap.

Degree-k basis: paths e_{x0..xk} with consecutive points distinct, so that
e_{x0..xk} = p_{x0} dp_{x1} ... dp_{xk} and dim = n (n-1)^k.
"""
from __future__ import annotations

from functools import cached_property
from itertools import product

from .checks import Check, check
from .linalg import ONE, ZERO, vec_conj

MAX_CAP = 3


class PathCalculus:
    def __init__(self, n: int, cap: int = 2):
        if n < 1:
            raise ValueError("need at least one point")
        if not 0 <= cap <= MAX_CAP:
            raise ValueError(f"degree cap must be between 0 and {MAX_CAP}")
        self.n = n
        self.cap = cap
        self.paths = {}
        self.index = {}
        for k in range(cap + 2):  # one extra degree so d on the top degree has a target
            ps = [p for p in product(range(n), repeat=k + 1)
                  if all(p[i] != p[i + 1] for i in range(k))]
            self.paths[k] = ps
            self.index[k] = {p: i for i, p in enumerate(ps)}

    def dim(self, k):
        return len(self.paths[k]) if k in self.paths else 0

    def label(self, k, i):
        p = self.paths[k][i]
        return ("p" if k == 0 else "w") + "".join(str(x) for x in p)

    def labels(self, k):
        return [self.label(k, i) for i in range(self.dim(k))]

    def zero(self, k):
        return [ZERO] * self.dim(k)

    def basis(self, k, i):
        v = self.zero(k)
        v[i] = ONE
        return v

    def point(self, a):
        return self.basis(0, a)

    def unit(self):
        return [ONE] * self.n

    # --- structure ---
    def mul(self, k, a, l, b):
        out = self.zero(k + l)
        pk, pl = self.paths[k], self.paths[l]
        idx = self.index[k + l]
        for i, x in enumerate(a):
            if not x:
                continue
            p = pk[i]
            for j, y in enumerate(b):
                if y and pl[j][0] == p[-1]:
                    t = idx[p + pl[j][1:]]
                    out[t] = out[t] + x * y
        return out

    def d(self, k, a):
        out = self.zero(k + 1)
        idx = self.index[k + 1]
        for i, c in enumerate(a):
            if not c:
                continue
            p = self.paths[k][i]
            for pos in range(k + 2):
                sign = -1 if pos % 2 else 1
                left = p[pos - 1] if pos > 0 else None
                right = p[pos] if pos <= k else None
                for w in range(self.n):
                    if w == left or w == right:
                        continue
                    q = p[:pos] + (w,) + p[pos:]
                    t = idx[q]
                    out[t] = out[t] + sign * c
        return out

    def star(self, k, a):
        out = self.zero(k)
        sign = -1 if (k * (k + 1) // 2) % 2 else 1
        idx = self.index[k]
        for i, c in enumerate(a):
            if c:
                t = idx[tuple(reversed(self.paths[k][i]))]
                out[t] = out[t] + sign * c.conj()
        return out

    def dp(self, a):
        return self.d(0, self.point(a))

    def checks(self) -> list[Check]:
        anchor = "base-forms"
        cap = self.cap

        def assoc():
            for k, l, m in product(range(cap + 1), repeat=3):
                if k + l + m > cap:
                    continue
                for i in range(self.dim(k)):
                    for j in range(self.dim(l)):
                        ab = self.mul(k, self.basis(k, i), l, self.basis(l, j))
                        for s in range(self.dim(m)):
                            c = self.basis(m, s)
                            if self.mul(k + l, ab, m, c) != self.mul(k, self.basis(k, i), l + m,
                                                                     self.mul(l, self.basis(l, j), m, c)):
                                return f"associativity fails in degrees ({k},{l},{m})"
            return None

        def leibniz():
            for k, l in product(range(cap + 1), repeat=2):
                if k + l + 1 > cap:
                    continue
                sign = -1 if k % 2 else 1
                for i in range(self.dim(k)):
                    a = self.basis(k, i)
                    for j in range(self.dim(l)):
                        b = self.basis(l, j)
                        lhs = self.d(k + l, self.mul(k, a, l, b))
                        r1 = self.mul(k + 1, self.d(k, a), l, b)
                        r2 = self.mul(k, a, l + 1, self.d(l, b))
                        if lhs != [x + sign * y for x, y in zip(r1, r2)]:
                            return f"Leibniz fails on ({self.label(k, i)}, {self.label(l, j)})"
            return None

        def dsq():
            for k in range(cap - 1):
                for i in range(self.dim(k)):
                    if any(self.d(k + 1, self.d(k, self.basis(k, i)))):
                        return f"d^2 != 0 on {self.label(k, i)}"
            return None

        def star():
            for k in range(cap + 1):
                for i in range(self.dim(k)):
                    a = self.basis(k, i)
                    if self.star(k, self.star(k, a)) != a:
                        return f"(w*)* != w on {self.label(k, i)}"
                    if k < cap and self.d(k, self.star(k, a)) != self.star(k + 1, self.d(k, a)):
                        return f"d(w*) != (dw)* on {self.label(k, i)}"
            for k, l in product(range(cap + 1), repeat=2):
                if k + l > cap:
                    continue
                sign = -1 if (k * l) % 2 else 1
                for i in range(self.dim(k)):
                    for j in range(self.dim(l)):
                        a, b = self.basis(k, i), self.basis(l, j)
                        lhs = self.star(k + l, self.mul(k, a, l, b))
                        rhs = self.mul(l, self.star(l, b), k, self.star(k, a))
                        if lhs != [sign * x for x in rhs]:
                            return f"(ab)* != (-1)^kl b* a* on ({self.label(k, i)}, {self.label(l, j)})"
            return None

        def generated():
            # every path is p_{x0} dp_{x1} ... dp_{xk}
            for k in range(1, cap + 1):
                for i, p in enumerate(self.paths[k]):
                    acc, deg = self.point(p[0]), 0
                    for x in p[1:]:
                        acc = self.mul(deg, acc, 1, self.dp(x))
                        deg += 1
                    if acc != self.basis(k, i):
                        return f"{self.label(k, i)} != p dp .. dp"
            return None

        return [
            check("base.associativity", anchor, assoc()),
            check("base.leibniz", anchor, leibniz()),
            check("base.d_squared", anchor, dsq()),
            check("base.star", anchor, star()),
            check("base.generated_by_functions", anchor, generated(),
                  dims=[self.dim(k) for k in range(cap + 1)]),
        ]


def universal_base_calculus(n: int, cap: int = 2) -> PathCalculus:
    return PathCalculus(n, cap)
