# -*- coding: utf-8 -*-
import random

import pytest
from sympy.polys.domains import QQ

from folhol.errors import DimensionError, TangencyError
from folhol.exactalg import PolyVector, format_vector, is_member, linalg, module_groebner
from folhol.exactalg.groebner import combination
from folhol.foliation import (
    Chart,
    CoordinateSubspace,
    Foliation,
    adapted_frame,
    bracket_table,
    involutivity_check,
    lie_bracket,
    linear_action_foliation,
    order_k_foliation,
    product,
    shift_chart,
    slice_restriction,
)
from folhol.pointwise import fiber_report

from conftest import load_example


CHART = Chart.of('x', 'y')
R = CHART.ring
x, y = R.gens


def field(a, b):
    return PolyVector(R, (R(0) + a, R(0) + b))


def _random_field(rng):
    comps = []
    for _ in range(2):
        acc = R.zero
        for i in range(3):
            for j in range(3 - i):
                if rng.random() < 0.5:
                    acc += QQ(rng.randint(-3, 3), rng.randint(1, 3)) * x ** i * y ** j
        comps.append(acc)
    return PolyVector(R, tuple(comps))


def test_bracket_jacobi_and_antisymmetry_on_random_triples():
    rng = random.Random(7)
    zero = PolyVector.zero(R, 2)
    for _ in range(100):
        a, b, c = (_random_field(rng) for _ in range(3))
        assert lie_bracket(a, b) == -lie_bracket(b, a)
        jacobi = (lie_bracket(a, lie_bracket(b, c))
                  + lie_bracket(b, lie_bracket(c, a))
                  + lie_bracket(c, lie_bracket(a, b)))
        assert jacobi == zero


def test_bracket_of_coordinate_fields():
    assert lie_bracket(field(1, 0), field(x, 0)) == field(1, 0)
    assert lie_bracket(field(x, 0), field(x ** 2, 0)) == field(x ** 2, 0)


def test_bracket_dimension_mismatch():
    other = Chart.of('x', 'y', 'z').ring
    with pytest.raises(DimensionError):
        lie_bracket(field(x, 0), PolyVector(other, (other.zero,) * 3))


def test_chart_rejects_inconsistent_declarations():
    with pytest.raises(DimensionError):
        Chart(3, ('x', 'y'))
    with pytest.raises(DimensionError):
        Chart(2, ('x', 'x'))


def test_torus_involutivity_witnesses(torus):
    result = involutivity_check(torus)
    assert result.involutive
    assert len(result.witnesses) == 6
    t1, t2 = torus.ring.gens[2], torus.ring.gens[3]
    zero, one = torus.ring.zero, torus.ring.one
    # 生成元顺序 v1, v2, w1, w2
    assert result.witnesses[(0, 1)] == (zero, zero, -one, one)
    assert result.witnesses[(0, 2)] == (zero, zero, t2, zero)
    assert result.witnesses[(0, 3)] == (zero, zero, -t2, t2)
    assert result.witnesses[(2, 3)] == (zero, zero, -t1 * t2, t1 * t2)


def test_non_involutive_pair_is_reported():
    foliation = Foliation(CHART, (field(1, 0), field(0, x)))
    result = involutivity_check(foliation)
    assert result.status == 'Unknown'
    assert result.failing_pair == (0, 1)


def test_bracket_table_closed_form(closed_form_doc):
    foliation = closed_form_doc.to_foliation()
    table = {(e.i, e.j): e for e in bracket_table(foliation)}
    ring = foliation.ring
    assert table[(0, 2)].witness == (ring.zero, ring.zero, ring(2))
    assert table[(1, 2)].witness == (ring.zero, ring.zero, ring(-3))
    assert table[(0, 1)].bracket.is_zero()


def test_adapted_frame_on_torus(torus):
    frame = adapted_frame(torus, (0, 0, 0, 0))
    assert frame.k == 2
    assert frame.leaf_indices == (0, 1)
    assert frame.tail_sources == (2, 3)
    for tail in frame.tail_generators:
        assert not any(tail.evaluate((QQ(0),) * 4))


def test_adapted_frame_recombines_tails():
    foliation = Foliation(CHART, (field(1, 0), field(1 + x, y)))
    frame = adapted_frame(foliation, (0, 0))
    assert frame.k == 1
    assert frame.tail_generators == (field(x, y),)
    assert frame.change_of_basis[1] == (QQ(-1), QQ(1))


def test_slice_restriction_of_torus_tails(torus):
    tails = Foliation(torus.chart, torus.generators[2:], "tails", ('w1', 'w2'))
    slice_spec = CoordinateSubspace.from_names(torus.chart, {'th1': 0, 'th2': 0})
    sliced = slice_restriction(tails, slice_spec)
    assert sliced.chart.var_names == ('t1', 't2')
    t1, t2 = sliced.ring.gens
    assert sliced.generators[0].components == (t1 ** 2 * t2, sliced.ring.zero)


def test_slice_restriction_tangency_failure():
    foliation = Foliation(CHART, (field(x, y),), "radial", ('E',))
    slice_spec = CoordinateSubspace.from_names(CHART, {'y': 1})
    with pytest.raises(TangencyError) as err:
        slice_restriction(foliation, slice_spec)
    assert err.value.generator == 'E'
    assert err.value.component == 'y'
    assert "不相切" in str(err.value)


def test_product_renames_clashes():
    f = Foliation(CHART, (field(-y, x),), "rot", ('X',))
    g = Foliation(Chart.of('x'), (PolyVector(Chart.of('x').ring, (Chart.of('x').ring.gens[0],)),), "e", ('X',))
    prod = product(f, g)
    assert prod.chart.var_names == ('x', 'y', 'x_2')
    assert prod.generator_names == ('X', 'X_2')
    report = fiber_report(prod, (0, 0, 0))
    assert report.dim_isotropy == 2


def test_shift_chart_moves_the_singular_point():
    f1 = order_k_foliation(1)
    shifted = shift_chart(f1, (2, 0))
    assert fiber_report(shifted, (2, 0)).dim_isotropy == 4
    assert fiber_report(shifted, (0, 0)).dim_isotropy == 0
    assert shifted.generators == order_k_foliation(1, center=(2, 0)).generators


def test_order_k_generators():
    f2 = order_k_foliation(2)
    assert f2.num_generators == 6
    assert f2.generator_names[:2] == ('A20', 'B20')


def test_linear_action_fiber_at_origin():
    rot = [[0, -1], [1, 0]]
    scale = [[1, 0], [0, 1]]
    foliation = linear_action_foliation([rot, scale], ('x', 'y'))
    report = fiber_report(foliation, (0, 0))
    assert report.dim_fiber == 2
    assert report.dim_tangent == 0
    assert fiber_report(foliation, (1, 0)).dim_tangent == 2


FRAME_CASES = [
    ("rotation", [(0, 0), (1, 0), ("1/2", "-1/3")]),
    ("xdx_x2dx", [(0,), (1,), ("-2/3",)]),
    ("torus", [(0, 0, 0, 0), (0, 0, 1, 0), ("1/2", 0, "1/3", "-1/2")]),
    ("order2", [(0, 0), (1, 1)]),
]


@pytest.mark.parametrize("name,points", FRAME_CASES)
def test_adapted_frame_is_a_change_of_basis(name, points):
    foliation = load_example(name).to_foliation()
    original_gb = module_groebner(foliation.generators)
    for point in points:
        frame = adapted_frame(foliation, point)
        values = foliation.evaluation_matrix(point)
        adapted_values = [g.evaluate(frame.base_point) for g in frame.generators]
        assert [tuple(r) for r in adapted_values] == [tuple(r) for r in linalg.matmul(frame.change_of_basis, values)]
        for row, g in zip(frame.change_of_basis, frame.generators):
            assert combination(foliation.generators, row) == g
        adapted_gb = module_groebner(frame.generators)
        assert all(is_member(g, original_gb) for g in frame.generators)
        assert all(is_member(g, adapted_gb) for g in foliation.generators)


@pytest.mark.parametrize("second", [
    linear_action_foliation([[[1, 0], [0, -1]], [[0, 1], [0, 0]], [[0, 0], [1, 0]]], ('s', 't'), "sl2"),
    order_k_foliation(2, var_names=('u', 'v')),
])
def test_slice_of_product_recovers_second_factor(rotation, second):
    prod = product(rotation, second)
    slice_spec = CoordinateSubspace.from_names(prod.chart, {'x': 0, 'y': 0})
    sliced = slice_restriction(prod, slice_spec)
    assert sliced.chart.var_names == second.chart.var_names
    assert sliced.generator_names == second.generator_names
    assert [format_vector(v) for v in sliced.generators] == [format_vector(v) for v in second.generators]
