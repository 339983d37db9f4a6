"""Finite groups from Cayley tables, plus the small built-in tables."""
from __future__ import annotations

from functools import cached_property
from itertools import permutations, product
from math import gcd


class GroupTableError(ValueError):
    pass


class FiniteGroup:
    """Group on {0..n-1}; table[a][b] = a*b."""

    def __init__(self, table, names=None):
        n = len(table)
        if n == 0:
            raise GroupTableError("empty Cayley table")
        for r, row in enumerate(table):
            if len(row) != n:
                raise GroupTableError(f"row {r + 1} has {len(row)} entries, expected {n}")
            for c, v in enumerate(row):
                if not isinstance(v, int) or not 0 <= v < n:
                    raise GroupTableError(f"entry ({r + 1},{c + 1}) out of range")
        self.table = [list(r) for r in table]
        self.n = n
        ids = [e for e in range(n) if all(table[e][x] == x and table[x][e] == x for x in range(n))]
        if not ids:
            raise GroupTableError("no identity element")
        self.e = ids[0]
        for a in range(n):
            for b in range(n):
                for c in range(n):
                    if table[table[a][b]][c] != table[a][table[b][c]]:
                        raise GroupTableError(
                            f"not associative at ({a + 1},{b + 1},{c + 1})")
        inv = []
        for a in range(n):
            cand = [b for b in range(n) if table[a][b] == self.e and table[b][a] == self.e]
            if not cand:
                raise GroupTableError(f"element {a + 1} has no inverse")
            inv.append(cand[0])
        self.inv = inv
        if names is None:
            names = ["e" if a == self.e else f"g{a + 1}" for a in range(n)]
        if len(names) != n or len(set(names)) != n:
            raise GroupTableError("element names must be distinct, one per row")
        self.names = list(names)

    @classmethod
    def from_one_based(cls, table, names=None):
        try:
            t = [[int(v) - 1 for v in row] for row in table]
        except (TypeError, ValueError):
            raise GroupTableError("Cayley table entries must be integers")
        return cls(t, names)

    def mul(self, a, b):
        return self.table[a][b]

    def power(self, a, k):
        out = self.e
        for _ in range(k):
            out = self.table[out][a]
        return out

    def order(self, a):
        k, x = 1, a
        while x != self.e:
            x = self.table[x][a]
            k += 1
        return k

    @cached_property
    def exponent(self):
        out = 1
        for a in range(self.n):
            o = self.order(a)
            out = out * o // gcd(out, o)
        return out

    def is_abelian(self):
        return all(self.table[a][b] == self.table[b][a] for a in range(self.n) for b in range(self.n))

    def closure(self, gens):
        sub = {self.e}
        frontier = [self.e]
        while frontier:
            x = frontier.pop()
            for g in gens:
                y = self.table[x][g]
                if y not in sub:
                    sub.add(y)
                    frontier.append(y)
        return frozenset(sub)

    @cached_property
    def subgroups(self):
        """All subgroups generated by at most two elements, largest first."""
        subs = {self.closure([])}
        for a in range(self.n):
            subs.add(self.closure([a]))
            for b in range(a + 1, self.n):
                subs.add(self.closure([a, b]))
        return sorted(subs, key=lambda s: (-len(s), sorted(s)))

    def generators(self, sub):
        """Small generating list of a subgroup (greedy)."""
        gens = []
        span = self.closure([])
        for a in sorted(sub):
            if a not in span:
                gens.append(a)
                span = self.closure(gens)
        return gens

    def linear_characters(self, sub):
        """Homomorphisms sub -> roots of unity as {elem: exponent mod m}, m = exponent(G)."""
        m = self.exponent
        gens = self.generators(sub)
        out = []
        for exps in product(range(m), repeat=len(gens)):
            # propagate values along words in the generators
            val = {self.e: 0}
            frontier = [self.e]
            ok = True
            while frontier and ok:
                x = frontier.pop()
                for g, k in zip(gens, exps):
                    y = self.table[x][g]
                    v = (val[x] + k) % m
                    if y in val:
                        if val[y] != v:
                            ok = False
                            break
                    else:
                        val[y] = v
                        frontier.append(y)
            if ok and all((val[a] + val[b] - val[self.table[a][b]]) % m == 0 for a in sub for b in sub):
                out.append(val)
        return out

    def coset_reps(self, sub):
        reps, seen = [], set()
        for g in range(self.n):
            if g in seen:
                continue
            reps.append(g)
            seen |= {self.table[g][h] for h in sub}
        return reps


def cyclic_table(n):
    return [[(a + b) % n for b in range(n)] for a in range(n)]


def symmetric_table(k):
    perms = sorted(permutations(range(k)))
    idx = {p: i for i, p in enumerate(perms)}
    # (p*q)(x) = p(q(x))
    return [[idx[tuple(p[q[x]] for x in range(k))] for q in perms] for p in perms]


def cyclic_group(n) -> FiniteGroup:
    names = ["e", "g"] + [f"g{k}" for k in range(2, n)]
    return FiniteGroup(cyclic_table(n), names[:n])


def symmetric_group(k) -> FiniteGroup:
    perms = sorted(permutations(range(k)))
    names = ["e" if p == tuple(range(k)) else "p" + "".join(str(x + 1) for x in p) for p in perms]
    return FiniteGroup(symmetric_table(k), names)
