# -*- coding: utf-8 -*-
import random

import pytest
from sympy.polys.domains import QQ

from folhol.errors import DependentFrameError, NonInvolutiveError
from folhol.exactalg import PolyVector, linalg
from folhol.exactalg.groebner import combination
from folhol.foliation import (
    Chart,
    CoordinateSubspace,
    Foliation,
    linear_action_foliation,
    order_k_foliation,
    shift_chart,
)
from folhol import pointwise
from folhol.pointwise import (
    LieAlgebraPresentation,
    algebroid_local_data,
    check_jacobi,
    classify_point,
    codimension,
    fiber_report,
    isotropy_algebra,
    lie_algebra_analysis,
    semicontinuity_probe,
    slice_isotropy_comparison,
    tangent_dim,
)

from conftest import load_example

SAMPLES_2D = [(0, 0), (1, 0), (0, 1), ("1/2", "-1/3"), (-2, 3), ("5/7", 1)]


@pytest.mark.parametrize("k", [1, 2, 3])
def test_order_k_fiber_dimension(k):
    report = fiber_report(order_k_foliation(k), (0, 0))
    assert report.dim_fiber == 2 * k + 2
    assert report.dim_isotropy == 2 * k + 2
    assert report.dim_tangent == 0


def test_rotation_pointwise_table(rotation):
    for point in SAMPLES_2D:
        report = fiber_report(rotation, point)
        at_origin = tuple(QQ(0) for _ in point) == report.point
        assert report.dim_fiber == 1
        assert report.dim_isotropy == (1 if at_origin else 0)
        assert classify_point(rotation, point) == ('Singular' if at_origin else 'Regular')


def test_xdx_pointwise_table(xdx):
    for p in (0, 1, -1, "1/2", "-3/4"):
        report = fiber_report(xdx, (p,))
        assert report.dim_fiber == 1
    assert isotropy_algebra(xdx, (0,)).dim == 1
    assert classify_point(xdx, (0,)) == 'Singular'
    assert classify_point(xdx, ("1/2",)) == 'Regular'


def test_fiber_extension_on_examples(rotation, xdx, xdx_x2dx, x2dx_x3dx, torus):
    cases = [
        (rotation, SAMPLES_2D),
        (xdx, [(0,), (1,)]),
        (xdx_x2dx, [(0,), (2,), ("-1/2",)]),
        (x2dx_x3dx, [(0,), (1,)]),
        (torus, [(0, 0, 0, 0), (0, 0, 1, 0), (0, 0, 1, 1), ("1/2", 0, 0, 2)]),
    ]
    for foliation, points in cases:
        for point in points:
            report = fiber_report(foliation, point)
            assert report.dim_fiber == report.dim_tangent + report.dim_isotropy


def test_abelian_isotropy_of_x2dx_x3dx(x2dx_x3dx):
    presentation = isotropy_algebra(x2dx_x3dx, (0,))
    # x^3 d(x) = x * x^2 d(x) 属于 I_0 F
    assert presentation.dim == 1
    flat = [c for plane in presentation.structure_constants for row in plane for c in row]
    assert all(c == 0 for c in flat)
    assert lie_algebra_analysis(presentation).abelian


def test_isotropy_of_xdx_x2dx_is_one_dimensional(xdx_x2dx):
    presentation = isotropy_algebra(xdx_x2dx, (0,))
    assert presentation.dim == 1
    assert check_jacobi(presentation)


def test_isotropy_refused_when_involutivity_unknown():
    chart = Chart.of('x', 'y')
    ring = chart.ring
    x, _ = ring.gens
    foliation = Foliation(chart, (PolyVector(ring, (ring.one, ring.zero)), PolyVector(ring, (ring.zero, x))))
    with pytest.raises(NonInvolutiveError, match="对合性未知"):
        isotropy_algebra(foliation, (0, 0))


def test_torus_isotropy_on_the_leaf(torus):
    presentation = isotropy_algebra(torus, (0, 0, 0, 0))
    assert presentation.dim == 2
    assert lie_algebra_analysis(presentation).abelian


def test_torus_algebroid(torus_doc, torus):
    leaf = torus_doc.leaf('L')
    data = algebroid_local_data(torus, leaf)
    ring = Chart.of('th1', 'th2').ring
    assert data.frame_names == ('v1', 'v2', 'w1', 'w2')
    assert data.anchor_table == (
        PolyVector(ring, (ring.one, ring.zero)),
        PolyVector(ring, (ring.zero, ring.one)),
        PolyVector.zero(ring, 2),
        PolyVector.zero(ring, 2),
    )
    nonzero = data.nonzero_brackets()
    assert list(nonzero) == [(0, 1)]
    assert nonzero[(0, 1)] == (ring.zero, ring.zero, -ring.one, ring.one)

    n = 4
    constants = [[[QQ(0)] * n for _ in range(n)] for _ in range(n)]
    for (a, b), coeffs in data.bracket_table.items():
        for g, p in enumerate(coeffs):
            value = p.LC if p else QQ(0)
            constants[a][b][g] = value
            constants[b][a][g] = -value
    analysis = lie_algebra_analysis(LieAlgebraPresentation.from_constants(constants))
    assert analysis.lower_central_series == (4, 1, 0)
    assert analysis.center_dim == 2
    assert analysis.nilpotent and not analysis.abelian


def test_closed_form_algebroid(closed_form_doc):
    foliation = closed_form_doc.to_foliation()
    data = algebroid_local_data(foliation, closed_form_doc.leaf('L'))
    ring = Chart.of('x1', 'x2').ring
    assert data.frame_names == ('X1', 'X2', 'w')
    nonzero = data.nonzero_brackets()
    assert nonzero[(0, 2)] == (ring.zero, ring.zero, ring(2))
    assert nonzero[(1, 2)] == (ring.zero, ring.zero, ring(-3))
    assert (0, 1) not in nonzero


def test_dependent_frame_is_rejected():
    chart = Chart.of('x', 't')
    ring = chart.ring
    x, t = ring.gens
    # t d(t) 与 t^2 d(t) 在 I_L F 模下相关：t^2 d(t) = t * (t d(t))
    foliation = Foliation(chart, (
        PolyVector(ring, (ring.one, ring.zero)),
        PolyVector(ring, (ring.zero, t)),
        PolyVector(ring, (ring.zero, t ** 2)),
    ))
    leaf = CoordinateSubspace.from_names(chart, {'t': 0})
    with pytest.raises(DependentFrameError):
        algebroid_local_data(foliation, leaf)


def test_codimension_and_tangent(rotation):
    assert codimension(rotation, (0, 0)) == 2
    assert codimension(rotation, (1, 0)) == 1
    assert tangent_dim(rotation, (1, 0)).dim == 1


def test_semicontinuity(rotation):
    report = semicontinuity_probe(rotation, (0, 0), [(1, 0), ("1/10", "1/10")])
    assert report.holds
    assert report.dim_tangent == 0


def test_slice_isotropy_matches_slice_fiber(torus, torus_doc):
    comparison = slice_isotropy_comparison(torus, (0, 0, 0, 0), torus_doc.slice('S'))
    assert comparison.dim_isotropy == 2
    assert comparison.agree


def _sl2_action():
    return linear_action_foliation([[[1, 0], [0, -1]], [[0, 1], [0, 0]], [[0, 0], [1, 0]]], ('x', 'y'), "sl2")


def _random_invertible(rng, n):
    while True:
        rows = [[QQ(rng.randint(-3, 3), rng.randint(1, 3)) for _ in range(n)] for _ in range(n)]
        if linalg.rank(rows) == n:
            return rows


def test_structure_constants_follow_witness_change_of_basis():
    foliation = _sl2_action()
    base = isotropy_algebra(foliation, (0, 0))
    assert base.dim == 3
    c = base.structure_constants
    assert any(c[a][b][g] for a in range(3) for b in range(3) for g in range(3))
    rng = random.Random(5)
    for _ in range(3):
        p = _random_invertible(rng, 3)
        p_inv = linalg.inverse(p)
        witnesses = [combination(base.basis_witnesses, row) for row in p]
        changed = isotropy_algebra(foliation, (0, 0), witnesses).structure_constants
        for a in range(3):
            for b in range(3):
                # [Y'_a, Y'_b] 在旧基下的系数
                old = [sum((p[a][i] * p[b][j] * c[i][j][k] for i in range(3) for j in range(3)), QQ.zero)
                       for k in range(3)]
                for g in range(3):
                    expected = sum((old[k] * p_inv[k][g] for k in range(3)), QQ.zero)
                    assert changed[a][b][g] == expected


SUITE = [
    ("rotation", (0, 0)),
    ("xdx", (0,)),
    ("xdx_x2dx", (0,)),
    ("x2dx_x3dx", (0,)),
    ("torus", (0, 0, 0, 0)),
    ("order1", (0, 0)),
    ("order2", (0, 0)),
    ("order3", (0, 0)),
]


@pytest.mark.parametrize("name,base", SUITE)
def test_semicontinuity_at_random_nearby_points(name, base):
    foliation = load_example(name).to_foliation()
    rng = random.Random(name)
    nearby = [tuple(QQ(rng.randint(-10, 10), 100) for _ in base) for _ in range(10)]
    report = semicontinuity_probe(foliation, base, nearby)
    assert report.holds
    assert len(report.nearby) == 10


@pytest.mark.parametrize("k", [1, 2, 3])
def test_order_k_isotropy_away_from_the_origin(k):
    center = (k, 0)
    shifted = shift_chart(order_k_foliation(k), center)
    centered = order_k_foliation(k, center=center)
    for foliation in (shifted, centered):
        report = fiber_report(foliation, center)
        assert report.dim_isotropy == 2 * k + 2
        assert report.dim_tangent == 0
    assert fiber_report(shifted, (0, 0)).dim_tangent == 2


def test_groebner_cache_is_bounded(rotation, monkeypatch):
    monkeypatch.setattr(pointwise, 'CACHE_MAXSIZE', 4)
    points = [(QQ(i, 7), QQ(-i, 5)) for i in range(12)]
    for point in points:
        assert fiber_report(rotation, point).dim_fiber == 1
        assert pointwise.cache_size() <= 4
    # 被淘汰的条目重新计算
    assert fiber_report(rotation, points[0]).dim_isotropy == 1
    assert fiber_report(rotation, points[1]).dim_isotropy == 0
