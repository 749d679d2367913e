# -*- coding: utf-8 -*-
"""
和乐探针
- morphism_check: BCH 乘积与线性化和乐的同态性
- kernel_linear_probe: 法向线性和乐不为单位阵时，该元素不在本质迷向核中
- discreteness_linear_probe: 切片尾生成元线性化的矩阵指数单射盒
- exponential_condition_witness_check: 时间相关流与单个向量场流在样本点上的比较
"""
import itertools
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np

from folhol.errors import MembershipError
from folhol.exactalg.groebner import combination, is_member
from folhol.flows import (
    TimeDependentField,
    combination_flow,
    exp_flow,
    linearization,
    time_dependent_flow,
    to_float_matrix,
)
from folhol.foliation import CoordinateSubspace, Foliation, adapted_frame, slice_restriction
from folhol.holonomy.bch import bch
from folhol.holonomy.bisubmersion import (
    HolonomyConfig,
    PathHolonomyBiSubmersion,
    delta_map,
    linear_holonomy,
)
from folhol.log import get_logger
from folhol.pointwise import isotropy_algebra, point_module

logger = get_logger('probes')


@dataclass(frozen=True)
class MorphismResult:
    passed: bool
    coefficients: Tuple[float, ...]
    lhs: np.ndarray = field(compare=False)
    rhs: np.ndarray = field(compare=False)
    deviation: float = 0.0
    fixed_point_deviation: float = 0.0


def morphism_check(U: PathHolonomyBiSubmersion, v1: Sequence[float], v2: Sequence[float],
                   tol: float = 1e-6, order: int = None, validity_box: float = None) -> MorphismResult:
    """
    线性化的同态性：N(Δ(v1 * v2)) = N(Δ(v1)) N(Δ(v2))

    群乘积 v1 * v2 对应流的复合 exp(v1) ∘ exp(v2)。向量场括号与线性化矩阵的交换子反号
    （[Ax, Bx] = (BA - AB)x），所以在向量场结构常数下乘积为 bch(v2, v1)。
    另外检查 exp(sum k1 Y) ∘ exp(sum k2 Y) 与 BCH 组合的流都固定基点
    """
    presentation = isotropy_algebra(U.foliation, U.base_point)
    witnesses = presentation.basis_witnesses
    order = U.config.bch_order if order is None else order
    product = bch(presentation, v2, v1, order)

    def normal(coeffs):
        delta = delta_map(U, coeffs, witnesses, validity_box)
        return linear_holonomy(U, delta.xi).normal_matrix

    n1 = normal(v1)
    n2 = normal(v2)
    lhs = normal(product)
    rhs = n1 @ n2
    deviation = float(np.max(np.abs(lhs - rhs), initial=0.0))

    x = U.base
    fixed = 0.0
    if witnesses:
        composed = combination_flow(witnesses, [float(c) for c in v2], x, 1.0, U.flow_config)
        composed = combination_flow(witnesses, [float(c) for c in v1], composed, 1.0, U.flow_config)
        direct = combination_flow(witnesses, [float(c) for c in product], x, 1.0, U.flow_config)
        fixed = float(max(np.max(np.abs(composed - x)), np.max(np.abs(direct - x))))
    passed = deviation <= tol and fixed <= tol
    if not passed:
        logger.warning(f"同态性检查失败: 偏差 {deviation:.3e}, 基点偏移 {fixed:.3e}")
    return MorphismResult(passed, tuple(float(c) for c in product), lhs, rhs, deviation, fixed)


@dataclass(frozen=True)
class KernelProbeResult:
    verdict: str
    normal_matrix: np.ndarray = field(compare=False)
    distance: float = 0.0


def kernel_linear_probe(U: PathHolonomyBiSubmersion, xi: Sequence[float], tol: float = 1e-6) -> KernelProbeResult:
    """
    u = (x, xi) ∈ U_x^x 处的核探针：‖N - I‖ > tol 时 NotInKernel，否则 Inconclusive
    """
    hol = linear_holonomy(U, xi)
    normal = hol.normal_matrix
    distance = float(np.max(np.abs(normal - np.eye(normal.shape[0])), initial=0.0))
    verdict = 'NotInKernel' if distance > tol else 'Inconclusive'
    return KernelProbeResult(verdict, normal, distance)


@dataclass(frozen=True)
class DiscretenessResult:
    """kind 为 'Box'（|gamma|∞ < radius）或 'Unbounded'"""
    kind: str
    radius: Optional[float]
    max_imag: float
    degenerate: bool
    linearizations: Tuple[tuple, ...] = field(compare=False, default=())


def face_grid(ell: int, samples: int):
    """
    单位 ∞-球面的面上的采样点：每个面固定一个坐标为 ±1，
    其余坐标取 [-1, 1] 上的等距点（每轴 samples 个；ell >= 3 时每轴最多 11 个）
    """
    if ell == 0:
        return np.zeros((0, 0))
    per_axis = samples if ell <= 2 else min(samples, 11)
    axis = np.linspace(-1.0, 1.0, per_axis)
    points = []
    for i in range(ell):
        for sign in (-1.0, 1.0):
            for rest in itertools.product(axis, repeat=ell - 1):
                p = list(rest)
                p.insert(i, sign)
                points.append(p)
    return np.array(points)


def discreteness_linear_probe(foliation: Foliation, point, slice_spec: CoordinateSubspace = None,
                              config: HolonomyConfig = None) -> DiscretenessResult:
    """
    切片尾生成元线性化 A_i 的矩阵指数单射盒

    sum gamma_i A_i 的特征值关于 gamma 线性缩放，所以盒半径为
    pi / max_{面采样点} max |Im lambda|；最大值为零时无界
    """
    config = config or HolonomyConfig()
    point = foliation.check_point(point)
    if slice_spec is None:
        slice_spec = CoordinateSubspace(foliation.chart, ())
    frame = adapted_frame(foliation, point)
    if not frame.tail_generators:
        return DiscretenessResult('Unbounded', None, 0.0, True, ())

    names = tuple(foliation.generator_names[i] for i in frame.tail_sources)
    tails = Foliation(foliation.chart, frame.tail_generators, f"{foliation.name}_tail", names)
    if slice_spec.fixed:
        sliced = slice_restriction(tails, slice_spec)
        slice_point = tuple(point[i] for i in slice_spec.free_indices)
    else:
        sliced = tails
        slice_point = point
    mats = [linearization(g, slice_point) for g in sliced.generators]
    arrays = [to_float_matrix(m) for m in mats]
    degenerate = all(not np.any(a) for a in arrays)
    if degenerate:
        return DiscretenessResult('Unbounded', None, 0.0, True, tuple(mats))

    grid = face_grid(len(arrays), config.face_samples)
    max_imag = 0.0
    for gamma in grid:
        combined = sum(g * a for g, a in zip(gamma, arrays))
        eig = np.linalg.eigvals(combined)
        max_imag = max(max_imag, float(np.max(np.abs(eig.imag))))
    if max_imag <= 1e-12:
        return DiscretenessResult('Unbounded', None, 0.0, False, tuple(mats))
    radius = float(np.pi / max_imag)
    logger.debug(f"{foliation.name}: 单射盒半径 {radius:.6g}（max |Im λ| = {max_imag:.6g}）")
    return DiscretenessResult('Box', radius, max_imag, False, tuple(mats))


@dataclass(frozen=True)
class WitnessCheckResult:
    passed: bool
    max_deviation: float
    deviations: Tuple[float, ...]


def _time_power_fields(field_td: TimeDependentField):
    """按 t 的幂次归并：sum_j coeff_{j,k} X_j"""
    grouped = {}
    for p, f in field_td.terms:
        for (k,), c in p.items():
            grouped.setdefault(k, []).append((c, f))
    return {k: combination([f for _, f in items], [c for c, _ in items]) for k, items in sorted(grouped.items())}


def exponential_condition_witness_check(slice_foliation: Foliation, point, field_td: TimeDependentField,
                                        z, samples, tol: float = 1e-6, flow_config=None) -> WitnessCheckResult:
    """
    在样本点上比较时间相关流（[0, 1]）与 Z 的时间一流

    Raises:
        MembershipError: Z 或 X_t 的某个 t 幂次系数场不属于 I_x F_S
    """
    gb = point_module(slice_foliation, point)
    if not is_member(z, gb):
        raise MembershipError("Z 不属于 I_x F_S", field='Z')
    for k, f in _time_power_fields(field_td).items():
        if not is_member(f, gb):
            raise MembershipError(f"X_t 的 t^{k} 系数场不属于 I_x F_S", field=f"t^{k}")

    deviations = []
    for s in samples:
        s = np.atleast_1d(np.asarray(s, dtype=float))
        a = time_dependent_flow(field_td, s, 0.0, 1.0, flow_config)
        b = exp_flow(z, s, 1.0, flow_config)
        deviations.append(float(np.max(np.abs(a - b))))
    worst = max(deviations) if deviations else 0.0
    return WitnessCheckResult(worst < tol, worst, tuple(deviations))
