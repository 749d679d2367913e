# -*- coding: utf-8 -*-
import random
from fractions import Fraction
from itertools import product

import pytest
from sympy import sympify
from sympy.polys.domains import QQ
from sympy.polys.matrices import DomainMatrix

from folhol.errors import DimensionError, InconsistentSystemError
from folhol.exactalg import (
    PolyVector,
    evaluate,
    format_poly,
    format_vector,
    is_member,
    lift,
    linear_relation_space,
    make_ring,
    module_groebner,
    normal_form,
    partial_derivative,
    point_module_groebner,
    poly_arith,
    to_fraction,
    to_rational,
)
from folhol.exactalg import linalg
from folhol.exactalg.poly import total_degree


R = make_ring(('x', 'y'))
x, y = R.gens


def vec(*comps):
    return PolyVector(R, tuple(R(0) + c for c in comps))


def test_poly_arith_and_derivative():
    p = x ** 2 * y + QQ(1, 3) * y
    q = x - 1
    assert poly_arith(p, q, 'add') == x ** 2 * y + QQ(1, 3) * y + x - 1
    assert poly_arith(p, q, 'mul') == p * q
    assert partial_derivative(p, 0) == 2 * x * y
    assert partial_derivative(p, 1) == x ** 2 + QQ(1, 3)
    assert evaluate(p, (QQ(2), QQ(3))) == QQ(13)


def test_mismatched_rings_are_rejected():
    other = make_ring(('x', 'y', 'z'))
    with pytest.raises(DimensionError):
        poly_arith(x, other.gens[0], 'add')
    with pytest.raises(DimensionError):
        evaluate(x, (QQ(1),))


def test_to_rational_refuses_floats():
    assert to_rational("1/3") == QQ(1, 3)
    assert to_rational(Fraction(-2, 4)) == QQ(-1, 2)
    assert to_fraction(QQ(5, 7)) == Fraction(5, 7)
    with pytest.raises(TypeError):
        to_rational(0.5)


def test_format_poly_reads_back():
    p = QQ(1, 3) * x ** 2 * y - y + 2
    text = format_poly(p)
    assert R.from_expr(sympify(text.replace("^", "**"))) == p


def test_linalg_solve_and_nullspace():
    rows = [(QQ(1), QQ(2)), (QQ(2), QQ(4))]
    assert linalg.rank(rows) == 1
    basis = linalg.nullspace(rows, 2)
    assert len(basis) == 1
    c = basis[0]
    assert c[0] + 2 * c[1] == 0
    assert linalg.solve([(QQ(1), QQ(1)), (QQ(1), QQ(-1))], (QQ(3), QQ(1))) == (QQ(2), QQ(1))
    with pytest.raises(InconsistentSystemError):
        linalg.solve(rows, (QQ(1), QQ(0)))


def test_membership_of_ideal_generators():
    gens = [vec(x ** 2, 0), vec(0, x * y)]
    gb = module_groebner(gens)
    assert is_member(vec(x ** 3 + x ** 2 * y, x * y ** 2), gb)
    assert not is_member(vec(x, 0), gb)
    cof = lift(vec(x ** 3, 2 * x * y), gb)
    assert cof == (x, R(2))


def test_lift_reconstructs_element():
    gens = [vec(x, y), vec(y, x), vec(x * y, 0)]
    gb = module_groebner(gens)
    target = vec(x ** 2 + y ** 2 + x ** 2 * y, 2 * x * y)
    cof = lift(target, gb)
    assert cof is not None
    total = PolyVector.zero(R, 2)
    for c, g in zip(cof, gens):
        total = total + g.scale(c)
    assert total == target


def test_normal_form_is_zero_exactly_on_members():
    gb = point_module_groebner([vec(-y, x)], (QQ(0), QQ(0)))
    assert normal_form(vec(-x * y, x ** 2), gb).is_zero()
    assert not normal_form(vec(-y, x), gb).is_zero()


def test_linear_relation_space_finds_dependency():
    gens = [vec(x, 0), vec(y, 0), vec(0, x), vec(0, y)]
    gb = point_module_groebner(gens, (QQ(1), QQ(0)))
    # 在 (1, 0) 处 y d(x) 与 y d(y) 属于 I_x F
    relations = linear_relation_space(gens, gb)
    assert len(relations) == 2


def _random_poly(rng, ring, degree, density=0.25):
    acc = ring.zero
    nvars = ring.ngens
    for monom in product(range(degree + 1), repeat=nvars):
        if sum(monom) <= degree and rng.random() < density:
            acc += ring.term_new(monom, QQ(rng.randint(-2, 2)))
    return acc


def _random_vector(rng, ring, degree):
    return PolyVector(ring, tuple(_random_poly(rng, ring, degree) for _ in range(ring.ngens)))


def _truncated_jet_member(target, gens, bound):
    """
    截断射判定：是否存在余因子使 target = sum p_i g_i 且每项 p_i g_i 的次数不超过 bound
    """
    ring = target.ring
    nvars = ring.ngens
    columns = []
    for g in gens:
        room = bound - g.degree()
        for m in product(range(room + 1), repeat=nvars):
            if sum(m) <= room:
                columns.append(g.mul_term(m, QQ.one))
    keys = sorted({(pos, mono) for v in columns + [target]
                   for pos, comp in enumerate(v.components) for mono in comp.keys()})
    index = {key: r for r, key in enumerate(keys)}

    def matrix(vectors):
        rows = {}
        for c, v in enumerate(vectors):
            for pos, comp in enumerate(v.components):
                for mono, coeff in comp.items():
                    rows.setdefault(index[(pos, mono)], {})[c] = QQ(coeff)
        return DomainMatrix(rows, (len(keys), len(vectors)), QQ)

    if not columns:
        return target.is_zero()
    return matrix(columns).rank() == matrix(columns + [target]).rank()


def test_membership_agrees_with_truncated_jet_oracle():
    rng = random.Random(20240611)
    for _ in range(50):
        ring = make_ring(('x', 'y', 'z')[:rng.randint(2, 3)])
        gens = [_random_vector(rng, ring, rng.randint(1, 3)) for _ in range(rng.randint(1, 3))]
        gens = [g for g in gens if not g.is_zero()] or [PolyVector(ring, ring.gens)]
        if rng.random() < 0.5:
            target = PolyVector.zero(ring, ring.ngens)
            for g in gens:
                target = target + g.scale(_random_poly(rng, ring, max(0, 3 - g.degree())))
        else:
            target = _random_vector(rng, ring, 3)
        gb = module_groebner(gens)
        bound = max(target.degree(), 0) + 4
        assert is_member(target, gb) == _truncated_jet_member(target, gens, bound)


def test_groebner_basis_does_not_depend_on_generator_order():
    rng = random.Random(99)
    for _ in range(10):
        ring = make_ring(('x', 'y', 'z')[:rng.randint(2, 3)])
        gens = [_random_vector(rng, ring, 2) for _ in range(3)]
        gens = [g for g in gens if not g.is_zero()] or [PolyVector(ring, ring.gens)]
        expected = sorted(format_vector(b) for b in module_groebner(gens).basis)
        for _ in range(3):
            shuffled = list(gens)
            rng.shuffle(shuffled)
            assert sorted(format_vector(b) for b in module_groebner(shuffled).basis) == expected
