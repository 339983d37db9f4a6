"""Scenario files: one TOML document describing a Hopf algebra, coreps, a
calculus, a base and a bundle with connection.  All cross references are by
label.  Every user-facing problem raises FormatError with a location."""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import tomli

from .bundle import HorizontalModel, QPBundle, default_horizontal_basis, matrix_algebra, point_bundle, trivial_bundle
from .corep import Corep
from .expr import CONST, ExprError, combo_to_vector, parse_combo, parse_scalar
from .forms import MAX_CAP, PathCalculus
from .groups import FiniteGroup, GroupTableError
from .hopf import Algebra, HopfAlgebra, ShapeError, function_algebra, group_algebra
from .linalg import Matrix, ONE, ZERO
from .scalars import ScalarError, as_scalar

__all__ = ["FormatError", "Scenario", "load_scenario", "parse_scenario"]


class FormatError(ValueError):
    def __init__(self, where: str, msg: str):
        super().__init__(f"{where}: {msg}")
        self.where = where
        self.msg = msg


@dataclass
class CalculusSpec:
    generators: list
    degree_cap: int = 2
    delta: Matrix | None = None


@dataclass
class Scenario:
    name: str
    conductor: int
    hopf: HopfAlgebra | None = None
    coreps: dict = field(default_factory=dict)
    irreducibles: list | None = None
    calculus: CalculusSpec | None = None
    points: int | None = None
    bundle: QPBundle | None = None
    horizontal_basis: list | None = None
    omega: dict = field(default_factory=dict)
    degree_cap: int = 2
    model: HorizontalModel | None = None
    sections: list = field(default_factory=list)

    def horizontal_model(self) -> HorizontalModel:
        if self.model is None:
            base = PathCalculus(self.points or 1, self.degree_cap)
            basis = self.horizontal_basis or default_horizontal_basis(self.bundle)
            self.model = HorizontalModel(self.bundle, base, basis, self.omega)
        return self.model


def load_scenario(path) -> Scenario:
    p = Path(path)
    try:
        raw = p.read_bytes()
    except OSError as e:
        raise FormatError(str(p), f"cannot read file ({e.strerror})")
    return parse_scenario(raw, name=p.stem)


def parse_scenario(raw: bytes | str, name: str = "scenario") -> Scenario:
    text = raw.decode("utf-8") if isinstance(raw, bytes) else raw
    try:
        doc = tomli.loads(text)
    except tomli.TOMLDecodeError as e:
        raise FormatError("toml", str(e))
    except UnicodeDecodeError as e:
        raise FormatError("toml", f"not UTF-8 ({e.reason})")
    known = {"name", "conductor", "hopf", "corep", "calculus", "base", "bundle", "connection"}
    for k in doc:
        if k not in known:
            raise FormatError(k, "unknown section")
    N = doc.get("conductor", 1)
    if not isinstance(N, int) or N < 1:
        raise FormatError("conductor", "must be a positive integer")
    sc = Scenario(name=str(doc.get("name", name)), conductor=N, sections=sorted(doc))
    try:
        if "hopf" in doc:
            sc.hopf = _hopf(doc["hopf"], N)
        if "corep" in doc:
            _need(sc.hopf, "corep", "needs a [hopf] section")
            for cname, body in doc["corep"].items():
                sc.coreps[cname] = _corep(sc.hopf, cname, body, N)
            if sc.hopf.kind == "custom":
                sc.irreducibles = [c for c in sc.coreps.values()]
        if "calculus" in doc:
            _need(sc.hopf, "calculus", "needs a [hopf] section")
            sc.calculus = _calculus(sc.hopf, doc["calculus"], N)
        if "base" in doc:
            n = doc["base"].get("universal_points")
            if not isinstance(n, int) or n < 1:
                raise FormatError("base.universal_points", "must be a positive integer")
            extra = set(doc["base"]) - {"universal_points"}
            if extra:
                raise FormatError(f"base.{sorted(extra)[0]}", "only universal_points is supported")
            sc.points = n
        if "bundle" in doc:
            _need(sc.hopf, "bundle", "needs a [hopf] section")
            _bundle(sc, doc["bundle"], N)
        if "connection" in doc:
            _need(sc.bundle, "connection", "needs a [bundle] section")
            _connection(sc, doc["connection"], N)
    except (ExprError, ScalarError, ShapeError) as e:
        raise FormatError("expression", str(e))
    return sc


def _need(x, where, msg):
    if x is None:
        raise FormatError(where, msg)


def _combo(text, N, labels, where, unit=None):
    try:
        c = parse_combo(text, N, labels=set(labels))
    except ExprError as e:
        raise FormatError(where, f"{e.msg} in {text!r}")
    for k in c:
        if k != CONST and k not in labels:
            raise FormatError(where, f"unknown label {k!r}")
    try:
        return combo_to_vector(c, labels, N, unit)
    except ExprError as e:
        raise FormatError(where, e.msg)


def _scalar(text, N, where):
    try:
        return parse_scalar(text, N)
    except ExprError as e:
        raise FormatError(where, f"{e.msg} in {text!r}")


def _table(body, where, n):
    t = body.get("table")
    if not isinstance(t, list) or not t:
        raise FormatError(f"{where}.table", "expected a Cayley table (list of rows)")
    names = body.get("names")
    try:
        return FiniteGroup.from_one_based(t, names)
    except GroupTableError as e:
        raise FormatError(f"{where}.table", str(e))


def _hopf(body, N) -> HopfAlgebra:
    kind = body.get("type")
    name = body.get("name", "")
    if kind == "function_algebra":
        return function_algebra(_table(body, "hopf", N), name)
    if kind == "group_algebra":
        return group_algebra(_table(body, "hopf", N), name)
    if kind != "custom":
        raise FormatError("hopf.type", "expected function_algebra, group_algebra or custom")
    labels = body.get("labels")
    if not isinstance(labels, list) or not labels or len(set(labels)) != len(labels):
        raise FormatError("hopf.labels", "expected a list of distinct labels")
    n = len(labels)
    A = _algebra_parts(body, "hopf", labels, N)
    idx = {lab: i for i, lab in enumerate(labels)}
    comult = [{} for _ in range(n)]
    cm = body.get("comult", {})
    for lab in labels:
        terms = cm.get(lab)
        if not isinstance(terms, list):
            raise FormatError(f"hopf.comult.{lab}", "expected a list of [coefficient, left, right]")
        for t in terms:
            if not (isinstance(t, list) and len(t) == 3 and t[1] in idx and t[2] in idx):
                raise FormatError(f"hopf.comult.{lab}", f"bad term {t!r}")
            key = (idx[t[1]], idx[t[2]])
            comult[idx[lab]][key] = comult[idx[lab]].get(key, ZERO) + _scalar(t[0], N, f"hopf.comult.{lab}")
    cu = body.get("counit", {})
    counit = [_scalar(cu.get(lab, 0), N, f"hopf.counit.{lab}") for lab in labels]
    ap = body.get("antipode", {})
    cols = []
    for lab in labels:
        if lab not in ap:
            raise FormatError(f"hopf.antipode.{lab}", "missing")
        cols.append(_combo(ap[lab], N, labels, f"hopf.antipode.{lab}", A.unit))
    return HopfAlgebra(labels, A.mult, A.unit, A.star_matrix, comult, counit, Matrix.from_columns(cols, n),
                       name=name or "H", kind="custom")


def _algebra_parts(body, where, labels, N) -> Algebra:
    n = len(labels)
    idx = {lab: i for i, lab in enumerate(labels)}
    unit = _combo(body.get("unit", ""), N, labels, f"{where}.unit") if "unit" in body else None
    if unit is None:
        raise FormatError(f"{where}.unit", "missing")
    mult = [[{} for _ in range(n)] for _ in range(n)]
    for key, val in body.get("mult", {}).items():
        parts = key.split("*")
        if len(parts) != 2 or parts[0] not in idx or parts[1] not in idx:
            raise FormatError(f"{where}.mult", f"bad key {key!r}, expected 'a*b'")
        v = _combo(val, N, labels, f"{where}.mult.{key}", unit)
        mult[idx[parts[0]]][idx[parts[1]]] = {i: c for i, c in enumerate(v) if c}
    st = body.get("star", {})
    cols = []
    for lab in labels:
        if lab not in st:
            raise FormatError(f"{where}.star.{lab}", "missing")
        cols.append(_combo(st[lab], N, labels, f"{where}.star.{lab}", unit))
    return Algebra(labels, mult, unit, Matrix.from_columns(cols, n), name=body.get("name", ""))


def _element(H, text, N, where):
    return _combo(text, N, H.labels, where, H.unit)


def _corep(H, cname, body, N) -> Corep:
    where = f"corep.{cname}"
    m = body.get("matrix")
    dim = body.get("dim")
    if not isinstance(m, list) or not all(isinstance(r, list) for r in m):
        raise FormatError(f"{where}.matrix", "expected a square array of expressions")
    if dim is not None and dim != len(m):
        raise FormatError(f"{where}.dim", f"dim = {dim} but the matrix has {len(m)} rows")
    if any(len(r) != len(m) for r in m):
        raise FormatError(f"{where}.matrix", "matrix is not square")
    u = [[_element(H, x, N, f"{where}.matrix[{i + 1}][{j + 1}]") for j, x in enumerate(r)] for i, r in enumerate(m)]
    return Corep(H, u, cname)


def _calculus(H, body, N) -> CalculusSpec:
    gens = body.get("generators", [])
    if not isinstance(gens, list):
        raise FormatError("calculus.generators", "expected a list of expressions")
    vecs = [_element(H, g, N, f"calculus.generators[{i + 1}]") for i, g in enumerate(gens)]
    cap = body.get("degree_cap", 2)
    if not isinstance(cap, int) or not 1 <= cap <= MAX_CAP:
        raise FormatError("calculus.degree_cap", f"must be an integer in 1..{MAX_CAP}")
    delta = None
    if "delta" in body:
        rows = body["delta"]
        if not isinstance(rows, list) or not rows or not all(isinstance(r, list) for r in rows):
            raise FormatError("calculus.delta", "expected a matrix of scalars")
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise FormatError("calculus.delta", "ragged matrix")
        delta = Matrix([[_scalar(x, N, "calculus.delta") for x in r] for r in rows], width)
    return CalculusSpec(vecs, cap, delta)


def _bundle(sc: Scenario, body, N):
    H = sc.hopf
    kind = body.get("type")
    cap = body.get("degree_cap", 2)
    if not isinstance(cap, int) or not 0 <= cap <= MAX_CAP:
        raise FormatError("bundle.degree_cap", f"must be an integer in 0..{MAX_CAP}")
    sc.degree_cap = cap
    if kind == "hopf":
        sc.bundle = point_bundle(H)
        if sc.points is None:
            sc.points = 1
    elif kind == "trivial":
        _need(sc.points, "bundle", "type = trivial needs [base] universal_points")
        sc.bundle = trivial_bundle(sc.points, H)
    elif kind in ("matrix_algebra", "custom"):
        if kind == "matrix_algebra":
            k = body.get("size")
            if not isinstance(k, int) or k < 1:
                raise FormatError("bundle.size", "must be a positive integer")
            GM = matrix_algebra(k)
        else:
            labels = body.get("labels")
            if not isinstance(labels, list) or not labels or len(set(labels)) != len(labels):
                raise FormatError("bundle.labels", "expected a list of distinct labels")
            GM = _algebra_parts(body, "bundle", labels, N)
        u = _coaction(H, GM, body.get("coaction"), N)
        declared = sc.points if sc.points is not None else body.get("points")
        _need(declared, "bundle", "needs [base] universal_points")
        sc.bundle = QPBundle(GM, H, u, declared_points=declared, name=body.get("name", GM.name), kind=kind)
    else:
        raise FormatError("bundle.type", "expected matrix_algebra, trivial, hopf or custom")
    if sc.points is None:
        raise FormatError("base", "missing [base] universal_points")
    hb = body.get("horizontal_basis")
    if hb is not None:
        if not isinstance(hb, list) or not hb:
            raise FormatError("bundle.horizontal_basis", "expected a list of expressions")
        GM = sc.bundle.GM
        sc.horizontal_basis = [_combo(x, N, GM.labels, f"bundle.horizontal_basis[{i + 1}]", GM.unit)
                               for i, x in enumerate(hb)]


def _coaction(H, GM, spec, N) -> Corep:
    """Either a table label -> H-element (diagonal coaction x -> x (x) h) or a full matrix."""
    n = GM.n
    u = [[H.zero() for _ in range(n)] for _ in range(n)]
    if isinstance(spec, dict):
        for lab in GM.labels:
            if lab not in spec:
                raise FormatError(f"bundle.coaction.{lab}", "missing")
        for k in spec:
            if k not in GM.labels:
                raise FormatError(f"bundle.coaction.{k}", "unknown label")
        for i, lab in enumerate(GM.labels):
            u[i][i] = _element(H, spec[lab], N, f"bundle.coaction.{lab}")
    elif isinstance(spec, list):
        if len(spec) != n or any(not isinstance(r, list) or len(r) != n for r in spec):
            raise FormatError("bundle.coaction", f"expected a {n}x{n} matrix")
        u = [[_element(H, x, N, f"bundle.coaction[{i + 1}][{j + 1}]") for j, x in enumerate(r)]
             for i, r in enumerate(spec)]
    else:
        raise FormatError("bundle.coaction", "missing (table or matrix)")
    return Corep(H, u, "Phi")


def _connection(sc: Scenario, body, N):
    entries = body.get("omega", [])
    if not isinstance(entries, list):
        raise FormatError("connection.omega", "expected a list of {row, col, form}")
    base = PathCalculus(sc.points, max(sc.degree_cap, 1))
    labels = base.labels(1)
    out = {}
    for i, e in enumerate(entries):
        where = f"connection.omega[{i + 1}]"
        if not isinstance(e, dict) or set(e) != {"row", "col", "form"}:
            raise FormatError(where, "expected keys row, col, form")
        try:
            b, d = int(str(e["row"]).lstrip("s")), int(str(e["col"]).lstrip("s"))
        except ValueError:
            raise FormatError(where, "row/col must look like s<index>")
        out[(b, d)] = _combo(e["form"], N, labels, where)
    sc.omega = out
