from functools import lru_cache
from itertools import product

from hypothesis import given, strategies as st

from conftest import scenario
from qpbkit.assoc import InducedConnection, SectionFrame
from qpbkit.bundle import CovariantDerivative
from qpbkit.corep import (GradedMorphism, MorphismPair, conjugate, conjugate_morphism, direct_sum,
                          identity_morphism, irreducible_set, mor_space, tensor, tensor_morphisms)
from qpbkit.functor import (ConjugateIso, MorphismImage, TensorIso, associativity_witness, exactness_checks,
                            functoriality_witness, image_map, naturality_conj_witness,
                            naturality_tensor_witness, short_exact_checks)
from qpbkit.linalg import LinearMap
from qpbkit.scalars import cyc


@lru_cache(maxsize=None)
def world(name="m2_z2"):
    sc = scenario(name)
    hm = sc.horizontal_model()
    D = CovariantDerivative(hm)
    irr = irreducible_set(sc.hopf).members
    cs = {a.name: a for a in irr}
    ts = direct_sum(cs["triv"], cs["sign"])
    cs["triv+sign"] = ts
    for a in irr:
        cs[f"{a.name}~"] = conjugate(a)
    sq = tensor(cs["sign"], cs["sign"])
    cs["sign(x)sign"] = sq
    sf = {n: SectionFrame(hm, c, name=n) for n, c in cs.items()}
    ic = {n: InducedConnection(s, D) for n, s in sf.items()}
    return hm, D, cs, sf, ic


def failing(checks):
    return {c.name: c.witness for c in checks if not c.passed}


def test_identity_maps_to_identity():
    _, _, cs, sf, _ = world()
    for n, c in cs.items():
        A, err = image_map(sf[n], sf[n], identity_morphism(c))
        assert err is None and A == LinearMap.identity(sf[n].G.dim)


def _composable(cs):
    out = []
    names = sorted(cs)
    for a, b, c in product(names, repeat=3):
        for d1, d2 in product((0, 1), repeat=2):
            for f in mor_space(cs[a], cs[b], d1)[:1]:
                for g in mor_space(cs[b], cs[c], d2)[:1]:
                    out.append(((a, b, c), f, g))
    return out


def test_contravariant_functoriality():
    _, _, cs, sf, _ = world()
    pairs = _composable(cs)
    assert len(pairs) >= 10
    assert any(f.degree == 1 or g.degree == 1 for _, f, g in pairs)
    for names, f, g in pairs:
        assert functoriality_witness(sf, f, g, names) is None


@given(st.sampled_from(["triv", "sign", "triv+sign"]), st.sampled_from([0, 1]), st.integers(1, 7))
def test_image_is_semilinear_in_the_morphism(n, deg, k):
    _, _, cs, sf, _ = world()
    lam = cyc(1, 1, k, 8)
    for f in mor_space(cs[n], cs[n], deg):
        scaled = GradedMorphism(f.source, f.target, LinearMap(f.matrix.scale(lam), deg))
        A, _ = image_map(sf[n], sf[n], f)
        B, _ = image_map(sf[n], sf[n], scaled)
        assert B.matrix == A.matrix.scale(lam.conj() if deg else lam)
        assert B.parity == deg


def test_images_pass_squares_in_both_degrees():
    _, _, cs, sf, ic = world()
    seen = set()
    for a, b in product(sorted(cs), repeat=2):
        for deg in (0, 1):
            for f in mor_space(cs[a], cs[b], deg):
                checks = MorphismImage(sf[a], sf[b], f, ic[a], ic[b]).checks()
                assert not failing(checks)
                seen |= {c.anchor for c in checks}
    assert {"square-connection", "square-sigma", "square-connection-antilinear", "square-sigma-antilinear"} <= seen


class _FlippedImage(MorphismImage):
    def _FA(self, k):
        m = super()._FA(k)
        return LinearMap(m.matrix.scale(-1), 1)


def test_degree1_squares_detect_a_flipped_sign():
    _, _, cs, sf, ic = world()
    f = mor_space(cs["sign"], cs["sign"], 1)[0]
    bad = failing(_FlippedImage(sf["sign"], sf["sign"], f, ic["sign"], ic["sign"]).checks())
    assert set(bad) == {"functor.sign->sign.square_connection", "functor.sign->sign.square_sigma"}


def test_mono_epi_swap():
    _, _, cs, sf, _ = world()
    iota = mor_space(cs["triv"], cs["triv+sign"])[0]
    pi = mor_space(cs["triv+sign"], cs["sign"])[0]
    a = exactness_checks(sf["triv"], sf["triv+sign"], iota, "iota")
    b = exactness_checks(sf["triv+sign"], sf["sign"], pi, "pi")
    assert [c.name for c in a] == ["exact.iota.mono_to_epi"] and not failing(a)
    assert [c.name for c in b] == ["exact.pi.epi_to_mono"] and not failing(b)
    seq = short_exact_checks(sf["triv"], sf["triv+sign"], sf["sign"], iota, pi, "ts")
    assert not failing(seq) and seq[0].data["dims"] == [2, 4, 2]


def test_conjugate_isos_and_naturality():
    hm, _, cs, sf, ic = world()
    for n in ("triv", "sign"):
        iso = ConjugateIso(sf[n], sf[f"{n}~"], ic[n], ic[f"{n}~"])
        assert not failing(iso.checks())
    a, b = "triv+sign", "sign"
    ca, cb = conjugate(cs[a]), conjugate(cs[b])
    sa, sb = SectionFrame(hm, ca, frame=False), SectionFrame(hm, cb, frame=False)
    i1, i2 = ConjugateIso(sf[a], sa), ConjugateIso(sf[b], sb)
    for f in mor_space(cs[a], cs[b]):
        assert naturality_conj_witness(i1, i2, f, conjugate_morphism(f, ca, cb)) is None


def _tframe(hm, cs, a, b):
    return SectionFrame(hm, tensor(cs[a], cs[b]), frame=False)


def test_tensor_isos_naturality_and_associativity():
    hm, D, cs, sf, ic = world()
    for a, b in product(["triv", "sign"], repeat=2):
        s = _tframe(hm, cs, a, b)
        assert not failing(TensorIso(sf[a], sf[b], s).checks(ic[a], ic[b], InducedConnection(s, D)))
    a1, a2, b1, b2 = "triv", "sign", "triv+sign", "sign"
    t1 = TensorIso(sf[a1], sf[a2], _tframe(hm, cs, a1, a2))
    t2 = TensorIso(sf[b1], sf[b2], _tframe(hm, cs, b1, b2))
    n = 0
    for f, fp in product(mor_space(cs[a1], cs[b1]), mor_space(cs[a2], cs[b2])):
        ff = tensor_morphisms(MorphismPair(f, fp), (cs[a1], cs[a2]), (cs[b1], cs[b2]))
        assert naturality_tensor_witness(t1, t2, f, fp, ff) is None
        n += 1
    assert n >= 1
    s = {(x, y): _tframe(hm, cs, x, y) for x, y in product(["triv", "sign"], repeat=2)}
    for x, y, z in product(["triv", "sign"], repeat=3):
        s3 = SectionFrame(hm, tensor(tensor(cs[x], cs[y]), cs[z]), frame=False)
        assert associativity_witness(sf[x], sf[y], sf[z], s[(x, y)], s[(y, z)], s3) is None


def test_star_violation_breaks_only_star_squares():
    _, _, cs, sf, ic = world("star_violation")
    bad = set()
    for a, b in product(sorted(cs), repeat=2):
        for deg in (0, 1):
            for f in mor_space(cs[a], cs[b], deg):
                for name in failing(MorphismImage(sf[a], sf[b], f, ic[a], ic[b]).checks()):
                    bad.add((deg, name.rsplit(".", 1)[1]))
    assert bad and {d for d, _ in bad} == {1}
