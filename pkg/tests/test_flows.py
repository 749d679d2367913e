# -*- coding: utf-8 -*-
import numpy as np
import pytest
from scipy.linalg import expm
from sympy.polys.domains import QQ

from folhol.errors import FlowDivergenceError, NotAZeroError
from folhol.exactalg import PolyVector
from folhol.flows import (
    FlowConfig,
    TimeDependentField,
    combination_flow,
    exp_flow,
    linearization,
    second_order_flow,
    time_dependent_flow,
    time_poly,
    to_float_matrix,
    variational_flow,
)
from folhol.foliation import Chart

CHART = Chart.of('x', 'y')
R = CHART.ring
x, y = R.gens


def field(a, b):
    return PolyVector(R, (R(0) + a, R(0) + b))


ROTATION = field(-y, x)
NONLINEAR = field(y + x * y, -x + QQ(1, 2) * x ** 2)


def rotation_matrix(angle):
    c, s = np.cos(angle), np.sin(angle)
    return np.array([[c, -s], [s, c]])


def test_rotation_flow_matches_closed_form():
    start = np.array([0.7, -0.2])
    for angle in (0.3, 1.0, 2.5):
        end = exp_flow(ROTATION, start, angle)
        assert np.max(np.abs(end - rotation_matrix(angle) @ start)) < 1e-8


def test_linear_variational_flow_is_matrix_exponential():
    a = np.array([[0.2, -1.0], [0.5, -0.3]])
    linear = field(QQ(1, 5) * x - y, QQ(1, 2) * x - QQ(3, 10) * y)
    end, jac = variational_flow(linear, [1.0, 2.0], 1.5)
    ref = expm(1.5 * a)
    assert np.max(np.abs(jac - ref)) < 1e-8
    assert np.max(np.abs(end - ref @ np.array([1.0, 2.0]))) < 1e-8


def test_variational_jacobian_against_finite_differences():
    start = np.array([0.3, -0.4])
    _, jac = variational_flow(NONLINEAR, start, 0.8)
    h = 1e-4
    fd = np.zeros((2, 2))
    for j in range(2):
        e = np.zeros(2)
        e[j] = h
        fd[:, j] = (exp_flow(NONLINEAR, start + e, 0.8) - exp_flow(NONLINEAR, start - e, 0.8)) / (2 * h)
    assert np.max(np.abs(jac - fd) / np.maximum(1.0, np.abs(fd))) < 1e-5


def test_flow_reversibility_and_additivity():
    start = np.array([0.25, 0.1])
    forward = exp_flow(NONLINEAR, start, 0.6)
    back = exp_flow(NONLINEAR, forward, -0.6)
    assert np.max(np.abs(back - start)) < 1e-8
    two_steps = exp_flow(NONLINEAR, exp_flow(NONLINEAR, start, 0.25), 0.35)
    assert np.max(np.abs(two_steps - forward)) < 1e-8


def test_blow_up_raises_divergence():
    ring = Chart.of('x').ring
    square = PolyVector(ring, (ring.gens[0] ** 2,))
    with pytest.raises(FlowDivergenceError) as err:
        exp_flow(square, [1.0], 2.0, FlowConfig(box_radius=1e3))
    assert err.value.last_time < 1.0


def test_time_dependent_flow_of_rescaled_field():
    # (1 + 2t) X 在 [0, 1] 上的流等于 X 的时间 2 流
    td = TimeDependentField(((time_poly([1, 2]), ROTATION),))
    start = [1.0, 0.0]
    end = time_dependent_flow(td, start, 0.0, 1.0)
    assert np.max(np.abs(end - rotation_matrix(2.0) @ np.array(start))) < 1e-8
    end, jac = time_dependent_flow(td, start, 0.0, 1.0, with_jacobian=True)
    assert np.max(np.abs(jac - rotation_matrix(2.0))) < 1e-8


def test_combination_flow_jacobian():
    scale = field(x, y)
    end, jac = combination_flow([ROTATION, scale], [1.0, 0.5], [1.0, 0.0], 1.0, with_jacobian=True)
    ref = expm(np.array([[0.5, -1.0], [1.0, 0.5]]))
    assert np.max(np.abs(jac - ref)) < 1e-8
    assert np.max(np.abs(end - ref[:, 0])) < 1e-8


def test_second_order_flow_first_order_blocks():
    pos, phi, s, t2 = second_order_flow([ROTATION], [0.7], [0.5, 0.5])
    assert np.max(np.abs(phi - rotation_matrix(0.7))) < 1e-8
    # d/dxi exp(xi X)(y) = X(exp(xi X)(y))
    assert np.max(np.abs(s[:, 0] - np.array([-pos[1], pos[0]]))) < 1e-8
    # d/dy_a 的导数：DX · Phi
    dx = np.array([[0.0, -1.0], [1.0, 0.0]])
    assert np.max(np.abs(t2[:, :, 0] - dx @ phi)) < 1e-7


def test_linearization_is_exact():
    rows = linearization(ROTATION, (0, 0))
    assert rows == ((QQ(0), QQ(-1)), (QQ(1), QQ(0)))
    assert np.allclose(to_float_matrix(rows), [[0, -1], [1, 0]])
    with pytest.raises(NotAZeroError):
        linearization(ROTATION, (1, 0))
