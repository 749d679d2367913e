# -*- coding: utf-8 -*-
from fractions import Fraction

import pytest
from sympy.polys.domains import QQ

from folhol.dsl import parse, parse_file, print_document
from folhol.errors import DSLSyntaxError
from folhol.exactalg import PolyVector

from conftest import EXAMPLES_DIR


def test_rotation_document(rotation_doc):
    assert rotation_doc.name == 'rot'
    assert rotation_doc.chart.var_names == ('x', 'y')
    ring = rotation_doc.chart.ring
    x, y = ring.gens
    assert rotation_doc.generators == (('X', PolyVector(ring, (-y, x))),)
    assert rotation_doc.point('p') == (QQ(1), QQ(1, 2))
    assert rotation_doc.point('origin') == (QQ(0), QQ(0))


def test_missing_chart_is_reported_with_position():
    text = "foliation f {\n    gen X = d(x);\n}\n"
    with pytest.raises(DSLSyntaxError) as err:
        parse(text)
    assert err.value.line == 1
    assert err.value.column == 13
    assert "chart declaration required" in str(err.value)


def test_rational_coefficients_are_exact():
    doc = parse("foliation f { chart dim 1 vars x; gen X = 1/3*x^2*d(x) - 2*d(x); slice S = { x = -5/4 }; }")
    ring = doc.chart.ring
    x = ring.gens[0]
    assert doc.generators[0][1] == PolyVector(ring, (QQ(1, 3) * x ** 2 - 2,))
    assert doc.slices == (('S', (('x', Fraction(-5, 4)),)),)


def test_power_operators_agree():
    a = parse("foliation f { chart dim 1 vars x; gen X = x**3*d(x); }")
    b = parse("foliation f { chart dim 1 vars x; gen X = x^3*d(x); }")
    assert a == b


@pytest.mark.parametrize("text, fragment", [
    ("foliation f { chart dim 1 vars x; gen X = y*d(x); }", "y"),
    ("foliation f { chart dim 1 vars x; gen X = 0.5*d(x); }", "non-rational"),
    ("foliation f { chart dim 2 vars x; gen X = d(x); }", "dim"),
    ("foliation f { chart dim 1 vars x; gen X = x; }", "vector field"),
    ("foliation f { chart dim 1 vars x; gen X = d(x)*d(x); }", ""),
    ("foliation f { chart dim 1 vars x; gen X = d(x); gen X = x*d(x); }", "twice"),
    ("foliation f { chart dim 1 vars x; }", "no generators"),
    ("foliation f { chart dim 1 vars x; gen X = d(x) $ ; }", "illegal"),
])
def test_invalid_documents(text, fragment):
    with pytest.raises(DSLSyntaxError) as err:
        parse(text)
    assert fragment in str(err.value)


def test_error_position_points_at_the_token():
    text = "foliation f {\n  chart dim 1 vars x;\n  gen X = z*d(x);\n}\n"
    with pytest.raises(DSLSyntaxError) as err:
        parse(text)
    assert err.value.line == 3
    assert str(err.value).startswith("3:")


def test_undeclared_names_raise_key_error(rotation_doc):
    with pytest.raises(KeyError):
        rotation_doc.leaf('L')
    with pytest.raises(KeyError):
        rotation_doc.point('q')


@pytest.mark.parametrize("path", sorted(str(p) for p in EXAMPLES_DIR.glob("*.fol")))
def test_print_then_parse_is_stable(path):
    doc = parse_file(path)
    printed = print_document(doc)
    again = parse(printed)
    assert again == doc
    assert print_document(again) == printed
