"""Check records shared by every verifier."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any


class StructuralError(Exception):
    """Input is not an object of the supported kind (no Haar, no frame, ...)."""


@dataclass
class Check:
    name: str
    anchor: str
    passed: bool
    witness: Any = None
    level: str = "error"  # "warning" checks never change the exit status
    data: dict = field(default_factory=dict)

    @property
    def status(self) -> str:
        if self.passed:
            return "pass"
        return "warn" if self.level == "warning" else "fail"

    def __bool__(self):
        return self.passed


def check(name, anchor, witness=None, **data) -> Check:
    """witness None means pass."""
    return Check(name, anchor, witness is None, witness, data=data)


def first(iterable):
    """First non-None item, or None."""
    for x in iterable:
        if x is not None:
            return x
    return None


def all_passed(checks) -> bool:
    return all(c.passed or c.level == "warning" for c in checks)
