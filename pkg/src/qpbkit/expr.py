"""Parser for the scalar / linear-combination syntax used in input files.

Grammar (whitespace ignored)::

    expr   := term (('+' | '-') term)*
    term   := unary ('*' unary)*
    unary  := '-' unary | power
    power  := atom ('^' integer)?
    atom   := number ('/' number)? | 'z' | label | '(' expr ')'

`z` is the chosen primitive root of unity of the declared conductor.
Every other identifier is a basis label.  A product of two label-bearing
factors needs a multiplication callback (algebra expressions); otherwise it
is rejected as nonlinear.
"""
from __future__ import annotations

import re
from fractions import Fraction
from typing import Callable

from .scalars import CycScalar, as_scalar, cyc, one

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z0-9_.']*)|(\S))")

CONST = ""  # key of the constant part of a linear combination


class ExprError(ValueError):
    def __init__(self, msg, column=None, text=None):
        self.msg = msg
        self.column = column
        self.text = text
        loc = f" at column {column}" if column is not None else ""
        super().__init__(f"{msg}{loc}")


def _tokenize(text):
    out = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m or m.end() == pos:
            break
        if m.group(0).strip() == "":
            break
        col = m.start(m.lastindex) + 1
        if m.group(1):
            out.append(("num", m.group(1), col))
        elif m.group(2):
            out.append(("id", m.group(2), col))
        else:
            out.append(("op", m.group(3), col))
        pos = m.end()
    out.append(("end", "", len(text) + 1))
    return out


Combo = dict  # label -> CycScalar ; CONST for the scalar part


class _Parser:
    def __init__(self, text, conductor, labels, mult):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0
        self.n = conductor
        self.labels = labels
        self.mult = mult

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def fail(self, msg, tok=None):
        tok = tok or self.peek()
        raise ExprError(msg, tok[2], self.text)

    def parse(self) -> Combo:
        if self.peek()[0] == "end":
            self.fail("empty expression")
        v = self.expr()
        if self.peek()[0] != "end":
            self.fail(f"unexpected {self.peek()[1]!r}")
        return v

    def expr(self):
        acc = self.term()
        while self.peek()[:2] in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            rhs = self.term()
            acc = _add(acc, rhs, -1 if op == "-" else 1)
        return acc

    def term(self):
        acc = self.unary()
        while self.peek()[:2] == ("op", "*"):
            tok = self.take()
            rhs = self.unary()
            acc = self._mul(acc, rhs, tok)
        return acc

    def unary(self):
        if self.peek()[:2] == ("op", "-"):
            self.take()
            return _scale(self.unary(), -1)
        if self.peek()[:2] == ("op", "+"):
            self.take()
            return self.unary()
        return self.power()

    def power(self):
        tok = self.peek()
        base = self.atom()
        if self.peek()[:2] == ("op", "^"):
            self.take()
            neg = False
            if self.peek()[:2] == ("op", "-"):
                self.take()
                neg = True
            e = self.take()
            if e[0] != "num":
                self.fail("exponent must be an integer literal", e)
            k = int(e[1]) * (-1 if neg else 1)
            if set(base) - {CONST}:
                if k < 0:
                    self.fail("negative power of an algebra element", tok)
                out = {CONST: one(self.n)}
                for _ in range(k):
                    out = self._mul(out, base, tok)
                return out
            return {CONST: base.get(CONST, as_scalar(0, self.n)) ** k}
        return base

    def atom(self):
        tok = self.take()
        kind, val, _ = tok
        if kind == "num":
            num = int(val)
            if self.peek()[:2] == ("op", "/"):
                self.take()
                d = self.take()
                if d[0] != "num":
                    self.fail("denominator must be an integer literal", d)
                if int(d[1]) == 0:
                    self.fail("zero denominator", d)
                return {CONST: as_scalar(Fraction(num, int(d[1])), self.n)}
            return {CONST: as_scalar(num, self.n)}
        if kind == "id":
            if val == "z":
                return {CONST: cyc(1, 1, 1, self.n)}
            if self.labels is not None and val not in self.labels:
                self.fail(f"unknown label {val!r}", tok)
            return {val: one(self.n)}
        if (kind, val) == ("op", "("):
            v = self.expr()
            if self.peek()[:2] != ("op", ")"):
                self.fail("expected ')'")
            self.take()
            return v
        self.fail(f"unexpected {val!r}" if kind != "end" else "unexpected end of expression", tok)

    def _mul(self, a, b, tok):
        a_lab = set(a) - {CONST}
        b_lab = set(b) - {CONST}
        if not a_lab or not b_lab:
            scal, other = (a, b) if not a_lab else (b, a)
            return _scale(other, scal.get(CONST, as_scalar(0, self.n)))
        if self.mult is None:
            self.fail("product of two labels is not linear here", tok)
        return self.mult(a, b)


def _add(a, b, sign=1):
    out = dict(a)
    for k, v in b.items():
        nv = out.get(k, 0 * v) + (v if sign > 0 else -v)
        if nv:
            out[k] = nv
        else:
            out.pop(k, None)
    return out


def _scale(a, c):
    c = as_scalar(c) if not isinstance(c, CycScalar) else c
    return {k: v * c for k, v in a.items() if v * c}


def parse_combo(text: str, conductor: int = 1, labels=None,
                mult: Callable[[Combo, Combo], Combo] | None = None) -> Combo:
    """Parse a linear combination of labels; constant part under key ''."""
    if not isinstance(text, str):
        if isinstance(text, int):
            text = str(text)
        else:
            raise ExprError(f"expected an expression string, got {type(text).__name__}")
    return _Parser(text, conductor, labels, mult).parse()


def parse_scalar(text, conductor: int = 1) -> CycScalar:
    if isinstance(text, int) and not isinstance(text, bool):
        return as_scalar(text, conductor)
    combo = parse_combo(text, conductor, labels=set())
    return combo.get(CONST, as_scalar(0, conductor))


def combo_to_vector(combo: Combo, labels: list, conductor: int = 1, unit=None) -> list:
    """Dense coordinates in the basis `labels`; the constant part uses `unit`."""
    idx = {lab: i for i, lab in enumerate(labels)}
    out = [as_scalar(0, 1)] * len(labels)
    for k, v in combo.items():
        if k == CONST:
            if not v:
                continue
            if unit is None:
                raise ExprError("a bare scalar is not allowed here")
            out = [o + v * u for o, u in zip(out, unit)]
        else:
            out[idx[k]] = out[idx[k]] + v
    return out


def format_combo(vec, labels) -> str:
    """Canonical text for a dense vector in the basis `labels`."""
    parts = []
    for c, lab in zip(vec, labels):
        if not c:
            continue
        s = str(c)
        if s == "1":
            body = lab
        elif s == "-1":
            body = "-" + lab
        elif " " in s:
            body = f"({s})*{lab}"
        else:
            body = f"{s}*{lab}"
        parts.append(body)
    if not parts:
        return "0"
    out = parts[0]
    for p in parts[1:]:
        out += " - " + p[1:] if p.startswith("-") else " + " + p
    return out
