"""Exact arithmetic in cyclotomic fields Q(zeta_N) with complex conjugation.

An element is a coefficient vector in the power basis 1, z, ..., z^(d-1),
d = phi(N), reduced modulo the N-th cyclotomic polynomial.
"""
from __future__ import annotations

import math
import threading
from fractions import Fraction
from functools import lru_cache

from mpmath import iv

__all__ = [
    "CycScalar", "cyc", "as_scalar", "zero", "one", "cyclotomic_poly",
    "is_strictly_positive", "common_conductor", "ScalarError", "sqrt_rational",
]


class ScalarError(ValueError):
    pass


def _poly_divmod(num, den):
    # integer polynomials, coefficient lists low -> high, den monic
    num = list(num)
    q = [0] * max(len(num) - len(den) + 1, 1)
    for i in range(len(num) - len(den), -1, -1):
        c = num[i + len(den) - 1]
        q[i] = c
        if c:
            for j, dc in enumerate(den):
                num[i + j] -= c * dc
    return q, num[: len(den) - 1]


@lru_cache(maxsize=None)
def cyclotomic_poly(n: int) -> tuple:
    """Coefficients (low to high) of the n-th cyclotomic polynomial."""
    if n < 1:
        raise ScalarError("conductor must be >= 1")
    num = [-1] + [0] * (n - 1) + [1]
    for d in range(1, n):
        if n % d == 0:
            num, r = _poly_divmod(num, list(cyclotomic_poly(d)))
            assert not any(r)
    while len(num) > 1 and num[-1] == 0:
        num.pop()
    return tuple(num)


class _Field:
    """Per-conductor tables: powers of z, conjugation matrix."""

    def __init__(self, n):
        self.n = n
        phi = cyclotomic_poly(n)
        self.d = d = len(phi) - 1
        # powers[k] = coefficient vector of z^k, k = 0..max(n, 2d-1)
        top = max(n, 2 * d)
        powers = []
        cur = [0] * d
        cur[0] = 1
        for _ in range(top):
            powers.append(tuple(cur))
            # multiply by z
            nxt = [0] + cur[:-1]
            carry = cur[-1]
            if carry:
                for j in range(d):
                    nxt[j] -= carry * phi[j]
            cur = nxt
        self.powers = powers
        self.conj_rows = [powers[(-j) % n] for j in range(d)]
        self.zero = tuple([Fraction(0)] * d)

    def reduce(self, prod):
        d = self.d
        out = list(prod[:d])
        for k in range(d, len(prod)):
            c = prod[k]
            if c:
                for j, p in enumerate(self.powers[k]):
                    if p:
                        out[j] += c * p
        return tuple(out)


_fields: dict = {}
_flock = threading.Lock()


def _field(n) -> _Field:
    f = _fields.get(n)
    if f is None:
        with _flock:
            f = _fields.get(n)
            if f is None:
                f = _fields[n] = _Field(n)
    return f


def common_conductor(*ns) -> int:
    out = 1
    for n in ns:
        out = out * n // math.gcd(out, n)
    return out


class CycScalar:
    """Immutable element of Q(zeta_N)."""

    __slots__ = ("coeffs", "conductor")

    def __init__(self, coeffs, conductor: int = 1):
        f = _field(conductor)
        coeffs = tuple(Fraction(c) for c in coeffs)
        if len(coeffs) != f.d:
            if len(coeffs) > f.d:
                coeffs = f.reduce(coeffs)
            else:
                coeffs = coeffs + (Fraction(0),) * (f.d - len(coeffs))
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "conductor", conductor)

    @classmethod
    def _raw(cls, coeffs, conductor):
        obj = object.__new__(cls)
        object.__setattr__(obj, "coeffs", coeffs)
        object.__setattr__(obj, "conductor", conductor)
        return obj

    def __setattr__(self, *a):
        raise AttributeError("CycScalar is immutable")

    # --- conversion -------------------------------------------------
    def promote(self, n: int) -> "CycScalar":
        """Rewrite in Q(zeta_n); requires conductor | n."""
        if n == self.conductor:
            return self
        if n % self.conductor:
            raise ScalarError(f"cannot promote conductor {self.conductor} to {n}")
        step = n // self.conductor
        f = _field(n)
        out = [Fraction(0)] * f.d
        for j, c in enumerate(self.coeffs):
            if c:
                for i, p in enumerate(f.powers[(j * step) % n]):
                    if p:
                        out[i] += c * p
        return CycScalar._raw(tuple(out), n)

    def _pair(self, other):
        if not isinstance(other, CycScalar):
            other = as_scalar(other, self.conductor)
        if other.conductor == self.conductor:
            return self, other
        n = common_conductor(self.conductor, other.conductor)
        return self.promote(n), other.promote(n)

    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    def to_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ScalarError("not rational")
        return self.coeffs[0]

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __bool__(self):
        return any(self.coeffs)

    # --- arithmetic -------------------------------------------------
    def __add__(self, other):
        a, b = self._pair(other)
        return CycScalar._raw(tuple(x + y for x, y in zip(a.coeffs, b.coeffs)), a.conductor)

    __radd__ = __add__

    def __neg__(self):
        return CycScalar._raw(tuple(-x for x in self.coeffs), self.conductor)

    def __sub__(self, other):
        a, b = self._pair(other)
        return CycScalar._raw(tuple(x - y for x, y in zip(a.coeffs, b.coeffs)), a.conductor)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        a, b = self._pair(other)
        ac, bc = a.coeffs, b.coeffs
        if len(ac) == 1:
            return CycScalar._raw((ac[0] * bc[0],), a.conductor)
        prod = [Fraction(0)] * (2 * len(ac) - 1)
        for i, x in enumerate(ac):
            if x:
                for j, y in enumerate(bc):
                    if y:
                        prod[i + j] += x * y
        return CycScalar._raw(_field(a.conductor).reduce(prod), a.conductor)

    __rmul__ = __mul__

    def inverse(self) -> "CycScalar":
        if self.is_zero():
            raise ZeroDivisionError("inverse of zero")
        d = len(self.coeffs)
        if d == 1:
            return CycScalar._raw((1 / self.coeffs[0],), self.conductor)
        # solve (multiplication-by-self matrix) y = e_0 over Q
        f = _field(self.conductor)
        cols = []
        for j in range(d):
            shifted = [Fraction(0)] * j + list(self.coeffs)
            cols.append(f.reduce(shifted) if len(shifted) > d else tuple(shifted) + (Fraction(0),) * (d - len(shifted)))
        rows = [[cols[j][i] for j in range(d)] + [Fraction(1 if i == 0 else 0)] for i in range(d)]
        for c in range(d):
            piv = next(r for r in range(c, d) if rows[r][c])
            rows[c], rows[piv] = rows[piv], rows[c]
            inv = 1 / rows[c][c]
            rows[c] = [x * inv for x in rows[c]]
            for r in range(d):
                if r != c and rows[r][c]:
                    fac = rows[r][c]
                    rows[r] = [x - fac * y for x, y in zip(rows[r], rows[c])]
        return CycScalar._raw(tuple(rows[i][d] for i in range(d)), self.conductor)

    def __truediv__(self, other):
        a, b = self._pair(other)
        return a * b.inverse()

    def __rtruediv__(self, other):
        return as_scalar(other, self.conductor) * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out = one(self.conductor)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def conj(self) -> "CycScalar":
        if len(self.coeffs) == 1:
            return self
        f = _field(self.conductor)
        out = [Fraction(0)] * f.d
        for c, row in zip(self.coeffs, f.conj_rows):
            if c:
                for i, p in enumerate(row):
                    if p:
                        out[i] += c * p
        return CycScalar._raw(tuple(out), self.conductor)

    def __eq__(self, other):
        if not isinstance(other, (CycScalar, int, Fraction)):
            return NotImplemented
        a, b = self._pair(other)
        return a.coeffs == b.coeffs

    def __hash__(self):
        if self.is_rational():
            return hash(self.coeffs[0])
        return hash((self.conductor, self.coeffs))

    # --- numerics ----------------------------------------------------
    def to_complex(self) -> complex:
        n = self.conductor
        return sum(float(c) * complex(math.cos(2 * math.pi * j / n), math.sin(2 * math.pi * j / n))
                   for j, c in enumerate(self.coeffs))

    def real_sign(self) -> int:
        """Sign of a real element, decided by interval refinement."""
        if self != self.conj():
            raise ScalarError("sign requested for a non-real element")
        if self.is_zero():
            return 0
        if self.is_rational():
            c = self.coeffs[0]
            return 1 if c > 0 else -1
        return _interval_sign(self.coeffs, self.conductor)

    # --- printing -----------------------------------------------------
    def __str__(self):
        return format_scalar(self)

    def __repr__(self):
        if self.conductor == 1:
            return f"CycScalar({self})"
        return f"CycScalar({self}; N={self.conductor})"


_ivlock = threading.Lock()


def _interval_sign(coeffs, n) -> int:
    prec = 53
    with _ivlock:
        saved = iv.prec
        try:
            while prec <= 1 << 14:
                iv.prec = prec
                two_pi = 2 * iv.pi
                acc = iv.mpf(0)
                for j, c in enumerate(coeffs):
                    if c:
                        acc += iv.mpf(c.numerator) / c.denominator * iv.cos(two_pi * j / n)
                if acc.a > 0:
                    return 1
                if acc.b < 0:
                    return -1
                prec *= 2
        finally:
            iv.prec = saved
    raise ScalarError("interval refinement did not decide the sign")


def format_scalar(x: CycScalar) -> str:
    parts = []
    for j, c in enumerate(x.coeffs):
        if not c:
            continue
        mono = "" if j == 0 else ("z" if j == 1 else f"z^{j}")
        mag = abs(c)
        if mono and mag == 1:
            body = mono
        else:
            body = str(mag) + ("*" + mono if mono else "")
        parts.append(("-" if c < 0 else "+", body))
    if not parts:
        return "0"
    out = ("-" if parts[0][0] == "-" else "") + parts[0][1]
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


@lru_cache(maxsize=None)
def zero(conductor: int = 1) -> CycScalar:
    return CycScalar._raw(_field(conductor).zero, conductor)


@lru_cache(maxsize=None)
def one(conductor: int = 1) -> CycScalar:
    d = _field(conductor).d
    return CycScalar._raw((Fraction(1),) + (Fraction(0),) * (d - 1), conductor)


def as_scalar(x, conductor: int = 1) -> CycScalar:
    if isinstance(x, CycScalar):
        if x.conductor == conductor:
            return x
        return x.promote(common_conductor(x.conductor, conductor))
    if isinstance(x, (int, Fraction)):
        d = _field(conductor).d
        return CycScalar._raw((Fraction(x),) + (Fraction(0),) * (d - 1), conductor)
    raise TypeError(f"cannot convert {type(x).__name__} to CycScalar")


def cyc(num: int, den: int, power: int, conductor: int) -> CycScalar:
    """(num/den) * zeta_conductor^power."""
    if den == 0:
        raise ScalarError("zero denominator")
    if conductor < 1:
        raise ScalarError("conductor must be >= 1")
    f = _field(conductor)
    c = Fraction(num, den)
    vec = tuple(c * p for p in f.powers[power % conductor])
    return CycScalar._raw(vec, conductor)


def _prime_factors(n: int) -> dict:
    out, p = {}, 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


@lru_cache(maxsize=None)
def _sqrt_prime(p: int) -> CycScalar:
    """Positive square root of a prime inside a cyclotomic field (Gauss sums)."""
    if p == 2:
        r = cyc(1, 1, 1, 8) + cyc(1, 1, 7, 8)
    else:
        g = zero(p)
        for a in range(1, p):
            g = g + cyc(pow(a, (p - 1) // 2, p) == 1 and 1 or -1, 1, a, p)
        r = g if p % 4 == 1 else g * cyc(-1, 1, 1, 4)
    return r if r.real_sign() > 0 else -r


def sqrt_rational(x) -> CycScalar | None:
    """Exact positive square root of a positive rational, or None."""
    if isinstance(x, CycScalar):
        if not x.is_rational():
            return None
        x = x.to_fraction()
    f = Fraction(x)
    if f <= 0:
        return None
    num = f.numerator * f.denominator
    out = as_scalar(Fraction(1, f.denominator))
    for p, e in _prime_factors(num).items():
        if e // 2:
            out = out * (p ** (e // 2))
        if e % 2:
            out = out * _sqrt_prime(p)
    return out


def _leading_minors(rows):
    """Bareiss elimination; returns the leading principal minors."""
    n = len(rows)
    a = [list(r) for r in rows]
    minors = []
    prev = one(a[0][0].conductor) if n else None
    for k in range(n):
        piv = a[k][k]
        minors.append(piv)
        if piv.is_zero():
            # minor vanishes; later minors are not needed for a positivity verdict
            break
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (piv * a[i][j] - a[i][k] * a[k][j]) / prev
        prev = piv
    return minors


def is_strictly_positive(m) -> bool:
    """True iff the Hermitian matrix m is positive definite.

    Accepts a Matrix or a list of rows. Non-Hermitian input raises.
    """
    rows = [list(r) for r in (m.rows if hasattr(m, "rows") and not isinstance(m, list) else m)]
    rows = [[as_scalar(x) for x in r] for r in rows]
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise ScalarError("matrix is not square")
    for i in range(n):
        for j in range(i, n):
            if rows[i][j] != rows[j][i].conj():
                raise ScalarError(f"matrix is not Hermitian at ({i + 1},{j + 1})")
    if n == 0:
        return True
    for minor in _leading_minors(rows):
        if minor.is_zero() or minor.real_sign() <= 0:
            return False
    return True
