import pytest
from hypothesis import given, strategies as st

from qpbkit.expr import CONST, ExprError, combo_to_vector, format_combo, parse_combo, parse_scalar
from qpbkit.scalars import as_scalar, cyc


def test_scalar_syntax():
    assert parse_scalar("3/4") == as_scalar(3) / 4
    assert parse_scalar("z^2", 4) == cyc(-1, 1, 0, 4)
    assert parse_scalar("-(1 - z)*2", 8) == cyc(-2, 1, 0, 8) + cyc(2, 1, 1, 8)
    assert parse_scalar(5) == as_scalar(5)


def test_combo_labels_and_constant():
    c = parse_combo("2*E11 - 1/1*E22 + 3", 1)
    assert c["E11"] == as_scalar(2) and c["E22"] == as_scalar(-1) and c[CONST] == as_scalar(3)
    v = combo_to_vector(c, ["E11", "E22"], unit=[as_scalar(1), as_scalar(1)])
    assert v == [as_scalar(5), as_scalar(2)]


@pytest.mark.parametrize("text,col", [("1 +", 4), ("2 ** x", 4), ("(a", 3), ("a $ b", 3)])
def test_errors_carry_column(text, col):
    with pytest.raises(ExprError) as e:
        parse_combo(text)
    assert e.value.column == col


def test_unknown_label_rejected():
    with pytest.raises(ExprError):
        parse_combo("a + q", labels={"a"})


def test_nonlinear_rejected_without_multiplication():
    with pytest.raises(ExprError):
        parse_combo("a*b")


def test_bare_scalar_needs_unit():
    with pytest.raises(ExprError):
        combo_to_vector(parse_combo("1"), ["a"])


coef = st.fractions(-4, 4, max_denominator=3)


@given(st.lists(coef, min_size=3, max_size=3))
def test_format_parse_roundtrip(cs):
    labels = ["d_e", "d_g", "w01"]
    vec = [as_scalar(c) for c in cs]
    text = format_combo(vec, labels)
    back = combo_to_vector(parse_combo(text, 1, labels=set(labels)), labels, unit=[as_scalar(0)] * 3)
    assert back == vec
