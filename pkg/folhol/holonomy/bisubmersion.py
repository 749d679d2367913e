# -*- coding: utf-8 -*-
"""
路径和乐双浸没
U ⊂ M x R^n，源映射 (y, xi) -> y，目标映射 (y, xi) -> exp_y(sum xi_i X_i)，
其中 X_i 的类构成纤维 F_x 的一组基（极小性）
本模块提供目标映射、双截面携带的微分同胚、竖直提升、Δ 映射和线性化和乐
"""
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence, Tuple

import numpy as np
from sympy.polys.domains import QQ

from folhol.errors import (
    DimensionError,
    FixedPointError,
    InvarianceError,
    RankDeficiencyError,
    ValidityBoxError,
)
from folhol.exactalg.groebner import linear_relation_space
from folhol.exactalg.poly import PolyVector
from folhol.flows import (
    CompiledPoly,
    FlowConfig,
    combination_flow,
    compile_field,
    integrate,
    second_order_flow,
)
from folhol.foliation import Foliation
from folhol.log import get_logger
from folhol.pointwise import fiber_report, isotropy_algebra, point_module, tangent_dim

logger = get_logger('bisubmersion')


@dataclass(frozen=True)
class HolonomyConfig:
    """和乐计算的容差；默认值与配置文件 [holonomy] / [probe] 一致"""
    validity_box: float = 1.0
    drift_tol: float = 1e-6
    lift_cutoff: float = 1e-9
    lift_residual: float = 1e-7
    bch_order: int = 8
    grid_spacing: float = 0.1
    grid_radius: float = 0.5
    fixed_point_tol: float = 1e-8
    invariance_tol: float = 1e-6
    face_samples: int = 41

    @classmethod
    def from_settings(cls, settings):
        return cls(
            validity_box=settings.validity_box,
            drift_tol=settings.drift_tol,
            lift_cutoff=settings.lift_cutoff,
            lift_residual=settings.lift_residual,
            bch_order=settings.bch_order,
            grid_spacing=settings.grid_spacing,
            grid_radius=settings.grid_radius,
            fixed_point_tol=settings.fixed_point_tol,
            invariance_tol=settings.invariance_tol,
            face_samples=settings.face_samples,
        )


def _float_point(point):
    return np.array([float(QQ.to_sympy(v)) for v in point], dtype=float)


@dataclass(frozen=True)
class PathHolonomyBiSubmersion:
    """
    路径和乐双浸没

    domain_box 为 (y 相对基点的 ∞-范数半径, xi 的 ∞-范数半径)
    """
    foliation: Foliation
    base_point: tuple
    generator_indices: Tuple[int, ...]
    domain_box: Tuple[float, float]
    flow_config: FlowConfig = field(default_factory=FlowConfig)
    config: HolonomyConfig = field(default_factory=HolonomyConfig)

    @classmethod
    def build(cls, foliation: Foliation, point, generator_indices: Sequence[int] = None,
              flow_config: FlowConfig = None, config: HolonomyConfig = None,
              domain_box: Tuple[float, float] = (1e3, 10.0)):
        """
        在有理点处构造极小路径和乐双浸没

        Args:
            generator_indices: 生成元下标，其类必须构成 F_x 的基；默认取 fiber_report 给出的下标
        """
        point = foliation.check_point(point)
        report = fiber_report(foliation, point)
        if generator_indices is None:
            indices = report.fiber_basis_indices
        else:
            indices = tuple(int(i) for i in generator_indices)
            if len(indices) != report.dim_fiber:
                raise DimensionError(
                    f"双浸没需要 {report.dim_fiber} 个生成元（dim F_x），实际给出 {len(indices)} 个")
            chosen = [foliation.generators[i] for i in indices]
            if linear_relation_space(chosen, point_module(foliation, point)):
                raise DimensionError("所选生成元的类在 F_x 中线性相关")
        return cls(foliation, point, indices, tuple(float(r) for r in domain_box),
                   flow_config or FlowConfig(), config or HolonomyConfig())

    @property
    def fields(self) -> Tuple[PolyVector, ...]:
        return tuple(self.foliation.generators[i] for i in self.generator_indices)

    @property
    def n(self):
        return len(self.generator_indices)

    @property
    def d(self):
        return self.foliation.chart.dim

    @property
    def base(self):
        return _float_point(self.base_point)

    def check_domain(self, y, xi):
        y = np.asarray(y, dtype=float)
        xi = np.asarray(xi, dtype=float)
        if y.size != self.d or xi.size != self.n:
            raise DimensionError(f"(y, xi) 的维数应为 ({self.d}, {self.n})")
        y_radius, xi_radius = self.domain_box
        if np.max(np.abs(y - self.base), initial=0.0) > y_radius or np.max(np.abs(xi), initial=0.0) > xi_radius:
            raise ValidityBoxError(f"(y, xi) = ({y.tolist()}, {xi.tolist()}) 超出定义域盒")
        return y, xi

    def source(self, y, xi):
        y, _ = self.check_domain(y, xi)
        return y


def bisubmersion_target(U: PathHolonomyBiSubmersion, y, xi):
    """t(y, xi) = exp_y(sum xi_i X_i)"""
    y, xi = U.check_domain(y, xi)
    if not np.any(xi):
        return y.copy()
    return combination_flow(U.fields, xi, y, 1.0, U.flow_config)


def target_derivatives(U: PathHolonomyBiSubmersion, y, xi):
    """(t, dt/dy, dt/dxi, d^2 t/dy dxi)"""
    y, xi = U.check_domain(y, xi)
    return second_order_flow(U.fields, xi, y, U.flow_config)


@dataclass(frozen=True)
class Bisection:
    """双截面 phi: M_0 -> R^n，由多项式给出（分量属于图卡的多项式环）"""
    components: Tuple[object, ...]

    @classmethod
    def constant(cls, U: PathHolonomyBiSubmersion, xi):
        ring = U.foliation.ring
        xi = list(xi)
        if len(xi) != U.n:
            raise DimensionError(f"常值双截面需要 {U.n} 个系数")
        return cls(tuple(ring.ground_new(QQ(Fraction(c).numerator, Fraction(c).denominator)) for c in xi))

    @classmethod
    def zero(cls, U: PathHolonomyBiSubmersion):
        return cls(tuple(U.foliation.ring.zero for _ in range(U.n)))

    def evaluate(self, y):
        return np.array([CompiledPoly(p)(np.asarray(y, dtype=float)) for p in self.components])


class CarriedDiffeo:
    """双截面携带的局部微分同胚 y -> exp_y(sum phi_i(y) X_i)（系数在起点冻结）"""

    def __init__(self, U: PathHolonomyBiSubmersion, bisection: Bisection):
        if len(bisection.components) != U.n:
            raise DimensionError(f"双截面分量个数 {len(bisection.components)} 与 n={U.n} 不一致")
        self.U = U
        self.bisection = bisection
        self._phi = [CompiledPoly(p) for p in bisection.components]

    def __call__(self, y):
        y = np.asarray(y, dtype=float)
        xi = np.array([f(y) for f in self._phi])
        return bisubmersion_target(self.U, y, xi)

    def on_points(self, points):
        return np.array([self(p) for p in points])


def carried_diffeo(U: PathHolonomyBiSubmersion, bisection: Bisection) -> CarriedDiffeo:
    return CarriedDiffeo(U, bisection)


def tensor_grid(center, radius=0.5, spacing=0.1):
    """以 center 为中心、半径 radius、间距 spacing 的确定性张量网格"""
    center = np.asarray(center, dtype=float)
    steps = int(round(radius / spacing))
    axis = np.arange(-steps, steps + 1) * spacing
    mesh = np.meshgrid(*([axis] * center.size), indexing='ij')
    return np.stack([m.ravel() for m in mesh], axis=1) + center


def carried_diffeo_grid(U: PathHolonomyBiSubmersion, bisection: Bisection, center=None,
                        radius=None, spacing=None):
    """
    在张量网格上求携带的微分同胚

    Returns:
        (网格点, 像点)
    """
    center = U.base if center is None else np.asarray(center, dtype=float)
    radius = U.config.grid_radius if radius is None else radius
    spacing = U.config.grid_spacing if spacing is None else spacing
    points = tensor_grid(center, radius, spacing)
    return points, carried_diffeo(U, bisection).on_points(points)


def _min_norm(matrix, rhs, cutoff):
    pinv = np.linalg.pinv(matrix, rcond=cutoff)
    return pinv @ rhs


def vertical_lift(U: PathHolonomyBiSubmersion, index: int, y, xi):
    """
    竖直提升：解 (dt/dxi) v = X_index(t(y, xi)) 的最小范数解

    Raises:
        RankDeficiencyError: 残差超过容差，附带奇异值
    """
    if not 0 <= index < U.foliation.num_generators:
        raise DimensionError(f"生成元下标 {index} 越界")
    pos, _, s, _ = target_derivatives(U, y, xi)
    rhs = compile_field(U.foliation.generators[index]).value(pos)
    v = _min_norm(s, rhs, U.config.lift_cutoff)
    residual = float(np.linalg.norm(s @ v - rhs))
    if residual >= U.config.lift_residual:
        singular = np.linalg.svd(s, compute_uv=False)
        raise RankDeficiencyError(
            f"竖直提升残差 {residual:.3e} 超过 {U.config.lift_residual:.1e}",
            singular_values=singular.tolist())
    return v


@dataclass(frozen=True)
class LocalGroupElement:
    """g_x 固定基（isotropy_algebra 的见证向量场）下的坐标"""
    coefficients: Tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, 'coefficients', tuple(float(c) for c in self.coefficients))

    def check_box(self, box):
        if self.coefficients and max(abs(c) for c in self.coefficients) > box:
            raise ValidityBoxError(f"lambda = {list(self.coefficients)} 超出有效盒 {box}")


@dataclass(frozen=True)
class DeltaResult:
    y: Tuple[float, ...]
    xi: Tuple[float, ...]
    drift: float


def delta_map(U: PathHolonomyBiSubmersion, element, witnesses: Sequence[PolyVector] = None,
              validity_box: float = None) -> DeltaResult:
    """
    Δ(exp sum k_a [Y_a]) = exp_{(x, 0)}(竖直提升的 sum k_a Y_a)

    在 U_x^x 上零阶提升方程两边都为零，因此对每个 xi 同时解零阶方程和它对 y 的导数：
        S v = W(t),   sum_j T[:, a, j] v_j + S V[:, a] = DW(t) Phi[:, a]
    取 (v, V) 的最小范数解，积分 xi' = v 一个单位时间

    Args:
        element: LocalGroupElement 或系数序列
        witnesses: g_x 的见证向量场；默认取 isotropy_algebra 的见证
        validity_box: ‖lambda‖∞ 的上界；默认取配置

    Raises:
        ValidityBoxError: lambda 越界，或终点的目标偏离基点超过 drift_tol
    """
    if not isinstance(element, LocalGroupElement):
        element = LocalGroupElement(tuple(element))
    box = U.config.validity_box if validity_box is None else validity_box
    element.check_box(box)
    if witnesses is None:
        witnesses = isotropy_algebra(U.foliation, U.base_point).basis_witnesses
    witnesses = tuple(witnesses)
    if len(witnesses) != len(element.coefficients):
        raise DimensionError(f"lambda 的维数 {len(element.coefficients)} 与 g_x 的维数 {len(witnesses)} 不一致")

    x = U.base
    n, d = U.n, U.d
    if not any(element.coefficients):
        return DeltaResult(tuple(x), tuple([0.0] * n), 0.0)

    compiled = [compile_field(w) for w in witnesses]
    coeffs = element.coefficients

    def w_value(pos):
        return sum(c * cf.value(pos) for c, cf in zip(coeffs, compiled))

    def w_jac(pos):
        return sum(c * cf.jacobian(pos) for c, cf in zip(coeffs, compiled))

    def velocity(_, xi):
        pos, phi, s, t2 = second_order_flow(U.fields, xi, x, U.flow_config)
        # 未知量排列为 (v, V[:, 0], ..., V[:, d-1])
        rows = d + d * d
        cols = n + n * d
        system = np.zeros((rows, cols))
        rhs = np.zeros(rows)
        system[:d, :n] = s
        rhs[:d] = w_value(pos)
        dw = w_jac(pos) @ phi
        for a in range(d):
            r0 = d + a * d
            system[r0:r0 + d, :n] = t2[:, a, :]
            system[r0:r0 + d, n + a * n:n + (a + 1) * n] = s
            rhs[r0:r0 + d] = dw[:, a]
        sol = _min_norm(system, rhs, U.config.lift_cutoff)
        return sol[:n]

    xi_end = integrate(velocity, 0.0, np.zeros(n), 1.0, U.flow_config)
    U.check_domain(x, xi_end)
    landed = combination_flow(U.fields, xi_end, x, 1.0, U.flow_config) if np.any(xi_end) else x
    drift = float(np.max(np.abs(landed - x), initial=0.0))
    if drift > U.config.drift_tol:
        raise ValidityBoxError(f"目标偏离基点 {drift:.3e}，lambda 超出局部群")
    logger.debug(f"Δ({list(coeffs)}) = (x, {xi_end.tolist()}), 漂移 {drift:.2e}")
    return DeltaResult(tuple(x), tuple(xi_end.tolist()), drift)


@dataclass(frozen=True)
class LinearHolonomy:
    """不动点处携带微分同胚的雅可比矩阵及其在法空间上的诱导作用"""
    point: Tuple[float, ...]
    xi: Tuple[float, ...]
    full_jacobian: np.ndarray = field(compare=False)
    leaf_subspace: np.ndarray = field(compare=False)
    normal_matrix: np.ndarray = field(compare=False)
    invariance_defect: float = 0.0


def linear_holonomy(U: PathHolonomyBiSubmersion, xi) -> LinearHolonomy:
    """
    u = (x, xi) 处的线性化和乐

    叶子空间取 tangent_dim 的行最简基，补空间取非主元位置的标准基向量，
    法矩阵是雅可比矩阵在基 [L | C] 下的右下块

    Raises:
        FixedPointError: t(x, xi) 不等于 x
        InvarianceError: 雅可比矩阵不保持 F_x
    """
    x = U.base
    xi = np.asarray(xi, dtype=float)
    U.check_domain(x, xi)
    if np.any(xi):
        end, jac = combination_flow(U.fields, xi, x, 1.0, U.flow_config, with_jacobian=True)
    else:
        end, jac = x.copy(), np.eye(U.d)
    gap = float(np.max(np.abs(end - x), initial=0.0))
    if gap > U.config.fixed_point_tol:
        raise FixedPointError(f"目标把基点移动了 {gap:.3e}，(x, xi) 不在 U_x^x 中")

    tangent = tangent_dim(U.foliation, U.base_point)
    k = tangent.dim
    d = U.d
    leaf = np.array([[float(QQ.to_sympy(v)) for v in row] for row in tangent.basis], dtype=float).reshape(k, d).T
    pivots = set(tangent.pivots[:k])
    complement = np.eye(d)[:, [i for i in range(d) if i not in pivots]]
    basis = np.hstack([leaf, complement]) if k else complement

    defect = 0.0
    if k:
        image = jac @ leaf
        coords, *_ = np.linalg.lstsq(leaf, image, rcond=None)
        defect = float(np.max(np.abs(image - leaf @ coords)))
        if defect > U.config.invariance_tol:
            raise InvarianceError(f"Jacobian 不保持叶的切空间（偏差 {defect:.3e}）")
    adapted = np.linalg.solve(basis, jac @ basis)
    normal = adapted[k:, k:]
    return LinearHolonomy(tuple(x.tolist()), tuple(xi.tolist()), jac, leaf, normal, defect)
