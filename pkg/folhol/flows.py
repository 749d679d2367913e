# -*- coding: utf-8 -*-
"""
流积分模块
多项式向量场（以及时间相关的多项式向量场）的数值流，带变分方程（线性化流）
积分器为自适应 Dormand-Prince 5(4)，所有轨迹都必须停留在包围盒内，发散一律报告
浮点数只在本模块和 holonomy 子包中出现
"""
import functools
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np
from sympy.polys.domains import QQ
from sympy.polys.rings import PolyRing, PolyElement

from folhol.errors import DimensionError, FlowDivergenceError, NotAZeroError
from folhol.exactalg.poly import PolyVector, evaluate, partial_derivative, rational_point, to_rational
from folhol.log import get_logger

logger = get_logger('flows')

# Dormand-Prince 5(4) 系数表
_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B5 = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0])
_B4 = np.array([5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])
_E = _B5 - _B4


@dataclass(frozen=True)
class FlowConfig:
    """积分参数；默认值与配置文件 [flows] 一致"""
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_steps: int = 1000000
    box_radius: float = 1e6
    method: str = 'dopri5'

    def __post_init__(self):
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise ValueError("积分容差必须为正数")
        if self.max_steps < 1:
            raise ValueError("最大步数必须为正整数")
        if self.box_radius <= 0:
            raise ValueError("包围盒半径必须为正数")
        if self.method != 'dopri5':
            raise ValueError(f"不支持的积分方法: {self.method}")

    @classmethod
    def from_settings(cls, settings):
        return cls(settings.rel_tol, settings.abs_tol, settings.max_steps, settings.box_radius)


class CompiledPoly:
    """多项式的 numpy 求值器：指数矩阵 + 浮点系数"""

    def __init__(self, poly: PolyElement):
        terms = list(poly.items())
        n = poly.ring.ngens
        if terms:
            self.exponents = np.array([m for m, _ in terms], dtype=np.int64).reshape(len(terms), n)
            self.coeffs = np.array([float(QQ.to_sympy(c)) for _, c in terms])
        else:
            self.exponents = np.zeros((0, n), dtype=np.int64)
            self.coeffs = np.zeros(0)

    def __call__(self, x):
        if not self.coeffs.size:
            return 0.0
        return float(self.coeffs @ np.prod(np.power(x, self.exponents), axis=1))


class CompiledField:
    """
    向量场的数值求值器，附带符号求导得到的雅可比矩阵和 Hessian
    """

    def __init__(self, field: PolyVector):
        self.field = field
        self.dim = field.dim
        comps = field.components
        self.value_fns = [CompiledPoly(c) for c in comps]
        first = [[partial_derivative(c, j) for j in range(self.dim)] for c in comps]
        self.jac_fns = [[CompiledPoly(p) for p in row] for row in first]
        self._first = first
        self._hess_fns = None

    def value(self, x):
        return np.array([f(x) for f in self.value_fns])

    def jacobian(self, x):
        return np.array([[f(x) for f in row] for row in self.jac_fns])

    def hessian(self, x):
        """H[i, j, k] = d_j d_k X_i"""
        if self._hess_fns is None:
            self._hess_fns = [[[CompiledPoly(partial_derivative(p, k)) for k in range(self.dim)]
                               for p in row] for row in self._first]
        return np.array([[[f(x) for f in col] for col in row] for row in self._hess_fns])


@functools.lru_cache(maxsize=512)
def compile_field(field: PolyVector) -> CompiledField:
    return CompiledField(field)


_TIME_RING = PolyRing('t', QQ)


def time_poly(coeffs: Sequence) -> PolyElement:
    """按升幂系数构造关于 t 的多项式，例如 [0, 0, 3] -> 3 t^2"""
    t = _TIME_RING.gens[0]
    acc = _TIME_RING.zero
    for k, c in enumerate(coeffs):
        c = to_rational(c)
        if c:
            acc += t ** k * c
    return acc


@dataclass(frozen=True)
class TimeDependentField:
    """X_t = sum_j p_j(t) X_j"""
    terms: Tuple[Tuple[PolyElement, PolyVector], ...]

    def __post_init__(self):
        terms = tuple(self.terms)
        object.__setattr__(self, 'terms', terms)
        if not terms:
            raise DimensionError("时间相关向量场至少需要一项")
        first = terms[0][1]
        for p, f in terms:
            if f.dim != first.dim or f.ring != first.ring:
                raise DimensionError("时间相关向量场的各项必须属于同一图卡")
            if p.ring.ngens != 1:
                raise DimensionError("时间系数必须是单变量多项式")

    @classmethod
    def autonomous(cls, field: PolyVector):
        return cls(((_TIME_RING.one, field),))

    @property
    def dim(self):
        return self.terms[0][1].dim

    def _compiled(self):
        return [(_time_coeffs(p), compile_field(f)) for p, f in self.terms]


def _time_coeffs(p):
    """升幂浮点系数"""
    degree = max((m[0] for m in p.monoms()), default=0) if p else 0
    out = np.zeros(degree + 1)
    for (k,), c in p.items():
        out[k] = float(QQ.to_sympy(c))
    return out


def _time_value(coeffs, t):
    return float(sum(c * t ** k for k, c in enumerate(coeffs)))


def integrate(rhs, t0, y0, t1, cfg: FlowConfig, watch=None):
    """
    自适应 DOPRI5 积分 y' = rhs(t, y)，从 t0 积到 t1（t1 可以小于 t0）

    Args:
        rhs: 右端函数，返回与 y 同形状的数组
        watch: 参与包围盒检查的前 watch 个分量；None 表示全部

    Raises:
        FlowDivergenceError: 超过步数或离开包围盒
    """
    y = np.array(y0, dtype=float)
    t = float(t0)
    t1 = float(t1)
    if t1 == t:
        return y
    direction = 1.0 if t1 > t else -1.0
    span = abs(t1 - t)
    watch = y.size if watch is None else watch

    def outside(state):
        part = state[:watch]
        return not np.all(np.isfinite(state)) or (part.size and np.max(np.abs(part)) > cfg.box_radius)

    if outside(y):
        raise FlowDivergenceError(f"初值超出半径 {cfg.box_radius} 的包围盒",
                                  last_time=t, last_state=y)

    f0 = np.asarray(rhs(t, y), dtype=float)
    scale = cfg.abs_tol + cfg.rel_tol * np.abs(y)
    d0 = np.sqrt(np.mean((y / scale) ** 2))
    d1 = np.sqrt(np.mean((f0 / scale) ** 2))
    h = 0.01 * d0 / d1 if d0 > 1e-5 and d1 > 1e-5 else 1e-3
    h = min(max(h, 1e-6 * span), span)

    steps = 0
    while direction * (t1 - t) > 0:
        if steps >= cfg.max_steps:
            raise FlowDivergenceError(f"在 t={t:.6g} 处用完 {cfg.max_steps} 步的步数预算",
                                      last_time=t, last_state=y)
        steps += 1
        h = min(h, abs(t1 - t))
        hs = direction * h
        k = [f0]
        for s in range(1, 7):
            incr = sum(a * k[j] for j, a in enumerate(_A[s]) if a)
            k.append(np.asarray(rhs(t + _C[s] * hs, y + hs * incr), dtype=float))
        y_new = y + hs * sum(b * k[j] for j, b in enumerate(_B5) if b)
        err_vec = hs * sum(e * k[j] for j, e in enumerate(_E) if e)
        scale = cfg.abs_tol + cfg.rel_tol * np.maximum(np.abs(y), np.abs(y_new))
        err = float(np.sqrt(np.mean((err_vec / scale) ** 2))) if np.all(np.isfinite(err_vec)) else np.inf

        if err <= 1.0:
            t = t + hs if abs(t1 - (t + hs)) > 1e-14 * max(1.0, abs(t1)) else t1
            y = y_new
            if outside(y):
                raise FlowDivergenceError(
                    f"轨线在 t={t:.6g} 处离开半径 {cfg.box_radius} 的包围盒",
                    last_time=t, last_state=y)
            f0 = k[6]
            factor = 5.0 if err == 0 else min(5.0, max(0.2, 0.9 * err ** (-0.2)))
        else:
            factor = max(0.2, 0.9 * err ** (-0.2)) if np.isfinite(err) else 0.2
        h = h * factor
        if h < 1e-14 * max(1.0, abs(t)):
            raise FlowDivergenceError(f"t={t:.6g} 处步长下溢", last_time=t, last_state=y)
    logger.debug(f"DOPRI5 完成: {steps} 步, t={t:.6g}")
    return y


def _as_point(x0, dim):
    x = np.array([float(v) if not isinstance(v, type(QQ.one)) else float(QQ.to_sympy(v)) for v in x0],
                 dtype=float)
    if x.size != dim:
        raise DimensionError(f"初值维数 {x.size} 与向量场维数 {dim} 不一致")
    return x


def exp_flow(field: PolyVector, x0, time=1.0, cfg: FlowConfig = None):
    """向量场的时间 time 流在 x0 处的值"""
    cfg = cfg or FlowConfig()
    cf = compile_field(field)
    x = _as_point(x0, cf.dim)
    return integrate(lambda t, y: cf.value(y), 0.0, x, time, cfg)


def variational_flow(field: PolyVector, x0, time=1.0, cfg: FlowConfig = None):
    """
    联合积分 x' = X(x), Phi' = DX(x) Phi

    Returns:
        (终点, 时间 time 流在 x0 处的雅可比矩阵)
    """
    cfg = cfg or FlowConfig()
    cf = compile_field(field)
    d = cf.dim
    x = _as_point(x0, d)
    y0 = np.concatenate([x, np.eye(d).ravel()])

    def rhs(t, y):
        pos = y[:d]
        phi = y[d:].reshape(d, d)
        return np.concatenate([cf.value(pos), (cf.jacobian(pos) @ phi).ravel()])

    y = integrate(rhs, 0.0, y0, time, cfg, watch=d)
    return y[:d], y[d:].reshape(d, d)


def time_dependent_flow(field: TimeDependentField, x0, t0=0.0, t1=1.0, cfg: FlowConfig = None,
                        with_jacobian=False):
    """
    时间相关向量场从 t0 到 t1 的流；with_jacobian 为 True 时同时返回雅可比矩阵
    """
    cfg = cfg or FlowConfig()
    compiled = field._compiled()
    d = field.dim
    x = _as_point(x0, d)

    def value(t, pos):
        out = np.zeros(d)
        for coeffs, cf in compiled:
            w = _time_value(coeffs, t)
            if w:
                out += w * cf.value(pos)
        return out

    if not with_jacobian:
        return integrate(value, t0, x, t1, cfg)

    def jac(t, pos):
        out = np.zeros((d, d))
        for coeffs, cf in compiled:
            w = _time_value(coeffs, t)
            if w:
                out += w * cf.jacobian(pos)
        return out

    def rhs(t, y):
        pos = y[:d]
        phi = y[d:].reshape(d, d)
        return np.concatenate([value(t, pos), (jac(t, pos) @ phi).ravel()])

    y = integrate(rhs, t0, np.concatenate([x, np.eye(d).ravel()]), t1, cfg, watch=d)
    return y[:d], y[d:].reshape(d, d)


def linearization(field: PolyVector, point):
    """
    零点处的线性部分 [d_j X_i (x)]（精确有理矩阵）

    Raises:
        NotAZeroError: X(x) 不为零
    """
    point = rational_point(point)
    if len(point) != field.dim:
        raise DimensionError(f"点的维数 {len(point)} 与向量场维数 {field.dim} 不一致")
    if any(field.evaluate(point)):
        raise NotAZeroError(f"向量场在 {tuple(str(v) for v in point)} 处不为零")
    return tuple(tuple(evaluate(partial_derivative(c, j), point) for j in range(field.dim))
                 for c in field.components)


def to_float_matrix(rows):
    return np.array([[float(QQ.to_sympy(to_rational(v))) for v in row] for row in rows], dtype=float)


def _combined(compiled, coeffs):
    coeffs = [float(c) for c in coeffs]

    def value(pos):
        out = np.zeros(compiled[0].dim)
        for c, cf in zip(coeffs, compiled):
            if c:
                out += c * cf.value(pos)
        return out

    def jac(pos):
        d = compiled[0].dim
        out = np.zeros((d, d))
        for c, cf in zip(coeffs, compiled):
            if c:
                out += c * cf.jacobian(pos)
        return out

    def hess(pos):
        d = compiled[0].dim
        out = np.zeros((d, d, d))
        for c, cf in zip(coeffs, compiled):
            if c:
                out += c * cf.hessian(pos)
        return out

    return value, jac, hess


def combination_flow(fields: Sequence[PolyVector], coeffs, x0, time=1.0, cfg: FlowConfig = None,
                     with_jacobian=False):
    """
    冻结系数组合 sum c_i X_i 的流（系数为浮点数）

    Returns:
        终点；with_jacobian 为 True 时返回 (终点, 雅可比矩阵)
    """
    cfg = cfg or FlowConfig()
    compiled = [compile_field(f) for f in fields]
    if len(coeffs) != len(compiled):
        raise DimensionError(f"系数个数 {len(coeffs)} 与向量场个数 {len(compiled)} 不一致")
    d = compiled[0].dim
    x = _as_point(x0, d)
    value, jac, _ = _combined(compiled, coeffs)
    if not with_jacobian:
        return integrate(lambda t, y: value(y), 0.0, x, time, cfg)

    def rhs(t, y):
        pos = y[:d]
        phi = y[d:].reshape(d, d)
        return np.concatenate([value(pos), (jac(pos) @ phi).ravel()])

    y = integrate(rhs, 0.0, np.concatenate([x, np.eye(d).ravel()]), time, cfg, watch=d)
    return y[:d], y[d:].reshape(d, d)


def second_order_flow(fields: Sequence[PolyVector], coeffs, x0, cfg: FlowConfig = None):
    """
    目标映射 t(y, xi) = exp_y(sum xi_i X_i) 在 (x0, coeffs) 处的二阶变分数据

    Returns:
        (t, Phi = dt/dy, S = dt/dxi, T[:, a, j] = d^2 t / dy_a dxi_j)
    """
    cfg = cfg or FlowConfig()
    compiled = [compile_field(f) for f in fields]
    n = len(compiled)
    d = compiled[0].dim
    x = _as_point(x0, d)
    value, jac, hess = _combined(compiled, coeffs)
    sizes = (d, d * d, d * n, d * d * n)
    offsets = np.cumsum((0,) + sizes)

    def unpack(y):
        pos = y[offsets[0]:offsets[1]]
        phi = y[offsets[1]:offsets[2]].reshape(d, d)
        s = y[offsets[2]:offsets[3]].reshape(d, n)
        t2 = y[offsets[3]:offsets[4]].reshape(d, d, n)
        return pos, phi, s, t2

    def rhs(t, y):
        pos, phi, s, t2 = unpack(y)
        dz = jac(pos)
        d2z = hess(pos)
        xs = np.column_stack([cf.value(pos) for cf in compiled])
        dxs = [cf.jacobian(pos) for cf in compiled]
        phi_dot = dz @ phi
        s_dot = dz @ s + xs
        t_dot = np.einsum('ik,kaj->iaj', dz, t2)
        t_dot += np.einsum('ikl,ka,lj->iaj', d2z, phi, s)
        for j in range(n):
            t_dot[:, :, j] += dxs[j] @ phi
        return np.concatenate([value(pos), phi_dot.ravel(), s_dot.ravel(), t_dot.ravel()])

    y0 = np.concatenate([x, np.eye(d).ravel(), np.zeros(d * n), np.zeros(d * d * n)])
    y = integrate(rhs, 0.0, y0, 1.0, cfg, watch=d)
    return unpack(y)
