from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from arrh.arrangement import MultiArrangement
from arrh.families import x3
from arrh.linalg import GF, QQ
from arrh.textformat import ParseError, parse_arrangement_text, parse_product, serialize

SEVEN_LINES = """\
field Q
vars 3
1 0 0 ^3
0 1 0 ^3
0 0 1 ^3
1 -2 0
1 2 0
0 1 -1
1 0 -1
"""


def test_parse_example_file():
    A = parse_arrangement_text(SEVEN_LINES)
    assert A.field == QQ and A.nvars == 3 and A.size == 7
    assert A.mults == (3, 3, 3, 1, 1, 1, 1)


def test_comments_rationals_and_caret_forms():
    text = "# header\nfield GF(7)  # prime field\nvars 2\n1 1/2 ^2\n0 1^3\n"
    A = parse_arrangement_text(text)
    assert A.field == GF(7)
    assert A.mults == (2, 3)
    assert A.forms[0][1] == GF(7)(4)


@pytest.mark.parametrize("text, line, column", [
    ("field GF(4)\nvars 2\n1 0\n", 1, 7),
    ("field Q\nvars 2\n1 0 0\n", 3, 5),
    ("field Q\nvars 2\n1 x\n", 3, 3),
    ("field Q\nvars 2\n1 0 ^ 0\n", 3, 7),
    ("field Q\nvars 2\n1 0\n2 0\n", 4, 1),
    ("field Q\nvars 2\n0 0\n", 3, 1),
    ("vars 2\nfield Q\n", 1, 1),
    ("field Q\nvars 2\n1 ^ 2 0\n", 3, 3),
])
def test_errors_carry_line_and_column(text, line, column):
    with pytest.raises(ParseError) as info:
        parse_arrangement_text(text)
    assert (info.value.line, info.value.column) == (line, column)
    assert str(info.value).startswith(f"line {line}, column {column}: ")


def test_missing_sections():
    for text in ("", "field Q\n", "field Q\nvars 2\n"):
        with pytest.raises(ParseError):
            parse_arrangement_text(text)


def test_serialize_canonical():
    assert serialize(x3(-1, 2)) == "field Q\nvars 3\n1 0 0 ^2\n0 1 0 ^2\n0 0 1 ^2\n1 1 0\n1 0 1\n0 1 1\n"
    assert serialize(parse_arrangement_text(SEVEN_LINES)) == SEVEN_LINES


coeff = st.fractions(min_value=-5, max_value=5, max_denominator=4)


@given(st.integers(1, 4).flatmap(lambda n: st.lists(
    st.tuples(st.lists(coeff, min_size=n, max_size=n), st.integers(1, 5)), min_size=1, max_size=6)),
    st.sampled_from([0, 5, 7]))
@settings(max_examples=60, deadline=None)
def test_round_trip(rows, p):
    field = QQ if p == 0 else GF(p)
    forms, mults = [], []
    for f, m in rows:
        try:
            cand = [field(c) for c in f]
            MultiArrangement(field, forms + [cand])
        except (ValueError, ZeroDivisionError):
            continue
        forms.append(cand)
        mults.append(m)
    if not forms:
        return
    A = MultiArrangement(field, forms, mults)
    text = serialize(A)
    B = parse_arrangement_text(text)
    assert B.forms == A.forms and B.mults == A.mults and B.field == A.field
    assert serialize(B) == text


def test_parse_product():
    A = parse_product("x^3 y^3 (x-y)^3")
    assert A.nvars == 2 and A.mults == (3, 3, 3)
    assert [list(f) for f in A.forms] == [[1, 0], [0, 1], [1, -1]]
    A = parse_product("x (2x) y^2 (x - 1/2 y)")
    assert A.mults == (2, 2, 1)
    assert A.forms[2][1] == Fraction(-1, 2)
    A = parse_product("x1 x2 (x1 + x3)")
    assert A.nvars == 3


@pytest.mark.parametrize("text", ["x^3 (", "(x y)", "(x - x)", "x ^ y"])
def test_parse_product_errors(text):
    with pytest.raises(ParseError):
        parse_product(text)
