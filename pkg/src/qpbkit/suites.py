"""Named verification suites over a parsed scenario."""
from __future__ import annotations

from itertools import product

from .assoc import InducedConnection, SectionFrame
from .bundle import CovariantDerivative, check_derivative, derivative_space
from .calculus import Exterior, VerticalForms, build_fodc, delta_witness, fodc_checks, point_curvature
from .checks import Check, StructuralError, check
from .corep import (check_corep, certify_irreducibles, conjugate, conjugate_morphism, decompose, direct_sum,
                    identity_morphism, irreducible_set, mor_space, regular_corep, tensor, tensor_morphisms,
                    MorphismPair)
from .fileformat import FormatError, Scenario
from .functor import (ConjugateIso, MorphismImage, TensorIso, associativity_witness, exactness_checks,
                      functoriality_witness, image_map, naturality_conj_witness, naturality_tensor_witness,
                      short_exact_checks)
from .hopf import check_hopf, haar_checks
from .linalg import LinearMap
from .reconstruct import Reconstruction

SUITES = ["hopf", "corep", "calculus", "bundle", "assoc", "reconstruct"]
NEEDS = {"hopf": "hopf", "corep": "hopf", "calculus": "calculus", "bundle": "bundle",
         "assoc": "bundle", "reconstruct": "bundle"}
DESCRIPTIONS = {
    "hopf": "Hopf *-algebra axioms and the Haar functional",
    "corep": "irreducible coreps, Schur dimensions, declared coreps and fusion",
    "calculus": "bicovariant calculus, invariant and vertical forms, point curvature",
    "bundle": "bundle axioms, horizontal model and covariant derivatives",
    "assoc": "section modules, frames, induced connections, functor images and natural isos",
    "reconstruct": "rebuilding the bundle with connection from its section frames",
}

# caps on the morphism corpus, so that large inputs stay bounded
_MAX_COMPOSABLE = 400


def _available(sc: Scenario, suite: str) -> bool:
    need = NEEDS[suite]
    return {"hopf": sc.hopf, "calculus": sc.calculus, "bundle": sc.bundle}[need] is not None


def run_suite(sc: Scenario, suite: str) -> list[Check]:
    if suite == "all":
        out = []
        for s in SUITES:
            if _available(sc, s):
                out += run_suite(sc, s)
        return out
    if suite not in SUITES:
        raise FormatError("suite", f"unknown suite {suite!r}")
    if not _available(sc, suite):
        raise FormatError(suite, f"suite needs a [{NEEDS[suite]}] section")
    try:
        return _RUNNERS[suite](sc)
    except StructuralError as e:
        return [check(f"{suite}.structure", "structure", str(e))]


def _irreps(sc: Scenario):
    return irreducible_set(sc.hopf, sc.irreducibles)


def hopf_suite(sc: Scenario) -> list[Check]:
    H = sc.hopf
    out = check_hopf(H)
    if all(c.passed for c in out):
        out += haar_checks(H)  # positivity is a warning for custom algebras
    return out


def corep_suite(sc: Scenario) -> list[Check]:
    H = sc.hopf
    irr = _irreps(sc)
    out = certify_irreducibles(H, irr.members)
    out.append(check("irreps.list", "irreducible-set", None,
                     names=irr.names, dims=[c.dim for c in irr.members]))
    for name, c in sorted(sc.coreps.items()):
        if sc.irreducibles is not None:
            continue
        out += check_corep(c, prefix=f"corep.{name}")
        dec = decompose(c, irr.members)
        out.append(check(f"corep.{name}.decomposition", "decomposition",
                         None if dec.complete else "isotypic blocks do not span",
                         multiplicities=dec.multiplicities))
    members = irr.members
    for i, a in enumerate(members):
        for b in members[i:]:
            dec = decompose(tensor(a, b), members)
            out.append(check(f"fusion.{a.name}.{b.name}", "fusion",
                             None if dec.complete else "tensor product does not decompose",
                             multiplicities={k: v for k, v in dec.multiplicities.items() if v}))
        dec = decompose(conjugate(a), members)
        hit = [k for k, v in dec.multiplicities.items() if v]
        out.append(check(f"conjugate.{a.name}", "conjugate-corep",
                         None if dec.complete and len(hit) == 1 and dec.total() == 1 else "conjugate is not irreducible",
                         equals=hit[0] if len(hit) == 1 else None))
    return out


def calculus_suite(sc: Scenario) -> list[Check]:
    H = sc.hopf
    spec = sc.calculus
    F = build_fodc(H, spec.generators)
    out = fodc_checks(F)
    if not all(c.passed for c in out):
        return out
    E = Exterior(F, spec.degree_cap)
    out += E.checks()
    V = VerticalForms(H, regular_corep(H), E)
    out += V.checks(max_triples=2000)
    if spec.degree_cap >= 2:
        R, _ = point_curvature(E)
        out.append(check("calculus.point_curvature", "point-curvature", None, R=R.to_strings()))
        if spec.delta is not None:
            w = delta_witness(E, spec.delta)
            out.append(check("calculus.delta_admissible", "embedded-differential", w))
            if w is None:
                R2, _ = point_curvature(E, spec.delta)
                out.append(check("calculus.curvature_delta_independent", "embedded-differential",
                                 None if R2 == R else "curvature depends on delta", R=R2.to_strings()))
    return out


def bundle_suite(sc: Scenario) -> list[Check]:
    B = sc.bundle
    out = B.checks()
    if not all(c.passed for c in out):
        return out
    hm = sc.horizontal_model()
    out += hm.Om.checks()
    out += hm.checks(_irreps(sc).members)
    D = CovariantDerivative(hm)
    dc = check_derivative(D)
    for c in dc:
        c.name = c.name.replace("derivative.", "derivative.declared.")
    out += dc
    sp = derivative_space(hm, D)
    if sp.particular is None:
        out.append(check("derivative.space", "covariant-derivative", "no covariant derivative exists"))
        return out
    members = [sp.particular] + [_shift(hm, sp.particular, disp) for disp in sp.displacements]
    wit = None
    for k, Dm in enumerate(members):
        bad = [c for c in check_derivative(Dm) if not c.passed]
        if bad:
            wit = f"member {k}: {bad[0].witness}"
            break
    out.append(check("derivative.space", "covariant-derivative", wit,
                     displacements=len(sp.displacements), particular=sp.particular.conn_strings()))
    out.append(check("derivative.space_star_stable", "covariant-derivative",
                     None if sp.star_stable else "displacement space is not star-stable"))
    return out


def _shift(hm, D, disp):
    conn = {k: list(v) for k, v in D.conn.items()}
    for key, w in disp.items():
        base = conn.get(key, hm.Om.zero(1))
        conn[key] = [a + b for a, b in zip(base, w)]
    return CovariantDerivative(hm, conn)


def _frames(sc: Scenario):
    hm = sc.horizontal_model()
    D = CovariantDerivative(hm)
    return hm, D


def _gate(sc: Scenario, suite: str) -> list[Check]:
    """Associated bundles only make sense over a bundle that passes its axioms."""
    bad = [c for c in sc.bundle.checks() if not c.passed]
    if bad:
        return [check(f"{suite}.bundle_gate", "bundle-axioms", f"{bad[0].name}: {bad[0].witness}")]
    return []


def assoc_suite(sc: Scenario) -> list[Check]:
    gate = _gate(sc, "assoc")
    if gate:
        return gate
    hm, D = _frames(sc)
    irr = _irreps(sc).members
    out = []
    sf, ic = {}, {}
    for a in irr:
        try:
            s = SectionFrame(hm, a)
        except StructuralError as e:
            out.append(check(f"frame.{a.name}.exists", "frame-conditions", str(e)))
            continue
        sf[a.name] = s
        fc = s.frame.checks(prefix=f"frame.{a.name}")
        fc[0].data.update(s.frame.describe())
        out += fc + s.checks()
        i = InducedConnection(s, D)
        ic[a.name] = i
        ic_checks = i.checks()
        if hm.cap >= 1:
            ic_checks[0].data["coefficients"] = i.coefficients()
        out += ic_checks
    if len(sf) != len(irr):
        return out

    # corep corpus for the functor: irreps, triv (+) alpha, conjugates, tensor squares
    cs = {a.name: a for a in irr}
    triv = cs["triv"]
    others = [a for a in irr if a.name != "triv"]
    alpha = others[0] if others else triv
    ts = direct_sum(triv, alpha)
    ts.name = f"triv+{alpha.name}"
    cs[ts.name] = ts
    for a in irr:
        c = conjugate(a)
        c.name = f"{a.name}~"
        cs[c.name] = c
    sq = tensor(alpha, alpha)
    sq.name = f"{alpha.name}(x){alpha.name}"
    cs[sq.name] = sq
    for name, c in cs.items():
        if name not in sf:
            sf[name] = SectionFrame(hm, c, name=name)
            ic[name] = InducedConnection(sf[name], D)

    names = sorted(cs)
    mors = {}
    for a, b in product(names, repeat=2):
        for deg in (0, 1):
            mors[(a, b, deg)] = mor_space(cs[a], cs[b], deg)
    # identity
    wit = None
    for n in names:
        A, err = image_map(sf[n], sf[n], identity_morphism(cs[n]))
        if err or A != LinearMap.identity(sf[n].G.dim):
            wit = f"A_id != id on {n}"
            break
    out.append(check("functor.identity", "morphism-images", wit))
    # images and their squares
    for (a, b, deg), fs in mors.items():
        for idx, f in enumerate(fs):
            mi = MorphismImage(sf[a], sf[b], f, ic[a], ic[b], label=f"{a}->{b}.deg{deg}.{idx + 1}")
            out += mi.checks()
    # contravariance on composable pairs
    count, wit = 0, None
    for a, b, c in product(names, repeat=3):
        for d1, d2 in product((0, 1), repeat=2):
            for f in mors[(a, b, d1)]:
                for g in mors[(b, c, d2)]:
                    if count >= _MAX_COMPOSABLE:
                        break
                    count += 1
                    w = functoriality_witness(sf, f, g, (a, b, c))
                    if w and not wit:
                        wit = w
    out.append(check("functor.contravariance", "morphism-images", wit, pairs=count))
    # conjugate isos and their naturality
    for a in irr:
        ci = ConjugateIso(sf[a.name], sf[f"{a.name}~"], ic[a.name], ic[f"{a.name}~"])
        out += ci.checks()
    wit, n11 = None, 0
    for a, b in [(ts.name, ts.name), (triv.name, ts.name), (ts.name, alpha.name)] + [(x.name, x.name) for x in irr]:
        ca, cb = conjugate(cs[a]), conjugate(cs[b])
        sa, sb = SectionFrame(hm, ca, name=f"{a}~", frame=False), SectionFrame(hm, cb, name=f"{b}~", frame=False)
        i1, i2 = ConjugateIso(sf[a], sa), ConjugateIso(sf[b], sb)
        for f in mors[(a, b, 0)]:
            n11 += 1
            w = naturality_conj_witness(i1, i2, f, conjugate_morphism(f, ca, cb))
            if w and not wit:
                wit = f"{a} -> {b}: {w}"
    out.append(check("natural.conjugate_square", "naturality-conjugate", wit, morphisms=n11))
    # tensor isos, their naturality and associativity
    tf = {}

    def tframe(a, b):
        if (a, b) not in tf:
            t = tensor(cs[a], cs[b])
            t.name = f"{a}(x){b}"
            tf[(a, b)] = (t, SectionFrame(hm, t, frame=False))
        return tf[(a, b)]

    for a, b in product([x.name for x in irr], repeat=2):
        t, s = tframe(a, b)
        ti = TensorIso(sf[a], sf[b], s)
        out += ti.checks(ic[a], ic[b], InducedConnection(s, D))
    wit, n12 = None, 0
    pairs = [(alpha.name, alpha.name, alpha.name, ts.name), (triv.name, alpha.name, ts.name, alpha.name),
             (alpha.name, triv.name, alpha.name, ts.name)]
    for a1, a2, b1, b2 in pairs:
        _, s1 = tframe(a1, a2)
        _, s2 = tframe(b1, b2)
        t1 = TensorIso(sf[a1], sf[a2], s1)
        t2 = TensorIso(sf[b1], sf[b2], s2)
        for f in mors[(a1, b1, 0)]:
            for fp in mors[(a2, b2, 0)]:
                n12 += 1
                ff = tensor_morphisms(MorphismPair(f, fp), (cs[a1], cs[a2]), (cs[b1], cs[b2]))
                w = naturality_tensor_witness(t1, t2, f, fp, ff)
                if w and not wit:
                    wit = f"({a1},{a2}) -> ({b1},{b2}): {w}"
    out.append(check("natural.tensor_square", "naturality-tensor", wit, morphisms=n12))
    wit = None
    for a, b, c in product([x.name for x in irr], repeat=3):
        _, sab = tframe(a, b)
        _, sbc = tframe(b, c)
        t3 = tensor(tensor(cs[a], cs[b]), cs[c])
        t3.name = f"{a}(x){b}(x){c}"
        s3 = SectionFrame(hm, t3, frame=False)
        w = associativity_witness(sf[a], sf[b], sf[c], sab, sbc, s3)
        if w:
            wit = w
            break
    out.append(check("natural.associativity", "tensor-associativity", wit))
    # exactness on 0 -> triv -> triv (+) alpha -> alpha -> 0
    iota = mors[(triv.name, ts.name, 0)]
    pi = mors[(ts.name, alpha.name, 0)]
    if alpha is not triv:
        out += exactness_checks(sf[triv.name], sf[ts.name], iota[0], "iota")
        out += exactness_checks(sf[ts.name], sf[alpha.name], pi[0], "pi")
        out += short_exact_checks(sf[triv.name], sf[ts.name], sf[alpha.name], iota[0], pi[0], ts.name)
    return out


def reconstruct_suite(sc: Scenario) -> list[Check]:
    gate = _gate(sc, "reconstruct")
    if gate:
        return gate
    hm, D = _frames(sc)
    R = Reconstruction(hm, D, _irreps(sc).members)
    out = R.checks()
    for c in out:
        if c.name == "reconstruct.psi_bijective" and c.passed:
            c.data["psi"] = R.certificate()
    return out


_RUNNERS = {
    "hopf": hopf_suite,
    "corep": corep_suite,
    "calculus": calculus_suite,
    "bundle": bundle_suite,
    "assoc": assoc_suite,
    "reconstruct": reconstruct_suite,
}
