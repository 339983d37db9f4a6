import pytest

from conftest import CORPUS
from qpbkit.fileformat import FormatError, load_scenario, parse_scenario

HOPF = '[hopf]\ntype = "function_algebra"\ntable = [[1, 2], [2, 1]]\n'


@pytest.mark.parametrize("text,where,msg", [
    ("name = \n", "toml", "line 1"),
    ('[hopf]\ntype = "weird"\n', "hopf.type", "expected function_algebra"),
    ('[hopf]\ntype = "function_algebra"\ntable = [[1, 2], [2, 2]]\n', "hopf.table", "no inverse"),
    (HOPF + "[base]\nuniversal_points = 1\nfoo = 2\n", "base.foo", "universal_points"),
    (HOPF + '[calculus]\ngenerators = []\ndegree_cap = 7\n', "calculus.degree_cap", "1..3"),
    (HOPF + '[calculus]\ngenerators = ["d_q"]\ndegree_cap = 2\n', "calculus.generators[1]", "unknown label"),
    ("bogus = 1\n" + HOPF, "bogus", "unknown section"),
    (HOPF + '[base]\nuniversal_points = 2\n[bundle]\ntype = "matrix_algebra"\nsize = 2\n'
     'coaction = { E11 = "d_e +", E12 = "d_e", E21 = "d_e", E22 = "d_e" }\n',
     "bundle.coaction.E11", "unexpected end"),
])
def test_errors_name_their_location(text, where, msg):
    with pytest.raises(FormatError) as e:
        parse_scenario(text)
    assert e.value.where == where
    assert msg in str(e.value)


def test_corpus_loads():
    names = sorted(p.stem for p in CORPUS.glob("*.toml"))
    assert "m2_z2" in names and "bad_cayley" in names
    for n in names:
        if n == "bad_cayley":
            with pytest.raises(FormatError):
                load_scenario(CORPUS / f"{n}.toml")
        else:
            sc = load_scenario(CORPUS / f"{n}.toml")
            assert sc.hopf is not None


def test_scenario_fields():
    sc = load_scenario(CORPUS / "z4_calculus.toml")
    assert sc.conductor == 4 and sc.bundle is None
    assert sc.calculus.degree_cap == 3 and sc.calculus.delta.shape == (4, 2)
    m2 = load_scenario(CORPUS / "m2_z2.toml")
    assert m2.bundle.GM.labels == ["E11", "E12", "E21", "E22"]
    assert m2.horizontal_model().m == 2


def test_custom_hopf_declares_irreducibles():
    sc = load_scenario(CORPUS / "custom_z2.toml")
    assert sc.hopf.kind == "custom"
    assert sorted(c.dim for c in sc.irreducibles) == [1, 1]
