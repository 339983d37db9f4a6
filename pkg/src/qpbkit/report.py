"""Deterministic reports and golden-file comparison."""
from __future__ import annotations

import hashlib
import json

from .checks import Check
from .expr import ExprError, parse_combo
from .linalg import Matrix
from .scalars import CycScalar, ScalarError, format_scalar

__all__ = ["build_report", "to_json", "to_text", "diff_golden", "exit_status"]

VERSION = "0.1.0"


def _plain(x):
    if isinstance(x, CycScalar):
        return format_scalar(x)
    if isinstance(x, Matrix):
        return x.to_strings()
    if isinstance(x, dict):
        return {str(k): _plain(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_plain(v) for v in x]
    if x is None or isinstance(x, (bool, int, str)):
        return x
    return str(x)


def build_report(checks: list[Check], raw: bytes, suite: str, conductor: int = 1) -> dict:
    recs = []
    for c in checks:
        rec = {"name": c.name, "anchor": c.anchor, "status": c.status,
               "witness": None if c.witness is None else str(c.witness)}
        if c.data:
            rec["data"] = _plain(c.data)
        recs.append(rec)
    summary = {
        "total": len(recs),
        "pass": sum(r["status"] == "pass" for r in recs),
        "fail": sum(r["status"] == "fail" for r in recs),
        "warn": sum(r["status"] == "warn" for r in recs),
    }
    return {
        "tool": "qpbkit",
        "version": VERSION,
        "suite": suite,
        "conductor": conductor,
        "input_sha256": hashlib.sha256(raw).hexdigest(),
        "checks": recs,
        "summary": summary,
    }


def to_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True, ensure_ascii=True) + "\n"


def to_text(report: dict) -> str:
    lines = [f"qpbkit {report['version']}  suite={report['suite']}  input={report['input_sha256'][:12]}"]
    for r in report["checks"]:
        line = f"{r['status'].upper():4}  {r['name']}  [{r['anchor']}]"
        if r["witness"]:
            line += f"  -- {r['witness']}"
        lines.append(line)
    s = report["summary"]
    lines.append(f"{s['pass']} passed, {s['fail']} failed, {s['warn']} warnings ({s['total']} checks)")
    if "golden" in report:
        g = report["golden"]
        lines.append("golden: equal" if g["equal"] else f"golden: {len(g['differences'])} difference(s)")
        lines.extend(f"  {d}" for d in g["differences"])
    return "\n".join(lines) + "\n"


def exit_status(report: dict) -> int:
    if report["summary"]["fail"]:
        return 1
    if "golden" in report and not report["golden"]["equal"]:
        return 1
    return 0


def _same_scalar(a: str, b: str, N: int) -> bool:
    try:
        ca, cb = parse_combo(a, N), parse_combo(b, N)
    except (ExprError, ScalarError):
        return False
    keys = set(ca) | set(cb)
    zero = CycScalar((0,), 1)
    return all(ca.get(k, zero) == cb.get(k, zero) for k in keys)


def _diff(path, a, b, N, out):
    if isinstance(a, dict) and isinstance(b, dict):
        for k in sorted(set(a) | set(b)):
            if k not in a:
                out.append(f"{path}.{k}: missing in report")
            elif k not in b:
                out.append(f"{path}.{k}: missing in golden")
            else:
                _diff(f"{path}.{k}", a[k], b[k], N, out)
    elif isinstance(a, list) and isinstance(b, list):
        if len(a) != len(b):
            out.append(f"{path}: length {len(a)} vs golden {len(b)}")
        else:
            for i, (x, y) in enumerate(zip(a, b)):
                _diff(f"{path}[{i}]", x, y, N, out)
    elif isinstance(a, str) and isinstance(b, str):
        if a != b and not _same_scalar(a, b, N):
            out.append(f"{path}: {a!r} vs golden {b!r}")
    elif a != b:
        out.append(f"{path}: {a!r} vs golden {b!r}")


def diff_golden(report: dict, golden: dict) -> list[str]:
    """Field-by-field differences; check order is ignored, scalars compare by value."""
    if not isinstance(golden, dict) or "checks" not in golden:
        return ["golden: schema mismatch (no checks list)"]
    N = report.get("conductor", 1)
    out = []
    mine = {r["name"]: r for r in report["checks"]}
    theirs = {}
    for r in golden["checks"]:
        if not isinstance(r, dict) or "name" not in r:
            return ["golden: schema mismatch (check record without a name)"]
        theirs[r["name"]] = r
    for name in sorted(set(mine) | set(theirs)):
        if name not in theirs:
            out.append(f"{name}: not in golden")
        elif name not in mine:
            out.append(f"{name}: missing from report")
        else:
            a = {k: v for k, v in mine[name].items() if k != "name"}
            b = {k: v for k, v in theirs[name].items() if k != "name"}
            _diff(name, a, b, N, out)
    return out
