# -*- coding: utf-8 -*-
"""
逐点不变量模块
在有理点处精确计算叶切空间 F_x、纤维 F/I_x F、迷向 Lie 代数 g_x 及其结构常数、
正则/奇异分类，以及坐标子空间叶上的局部 Lie 代数胚数据 A_L
"""
import threading
from collections import OrderedDict
from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence, Tuple

from sympy.polys.domains import QQ

from folhol.errors import (
    DependentFrameError,
    DimensionError,
    InconsistentSystemError,
    NonInvolutiveError,
    TangencyError,
)
from folhol.exactalg import linalg
from folhol.exactalg.groebner import (
    ideal_times_module,
    lift,
    linear_relation_space,
    module_groebner,
    normal_form,
)
from folhol.exactalg.poly import PolyVector, rational_point, substitute, to_rational
from folhol.foliation import (
    AdaptedFrame,
    CoordinateSubspace,
    Foliation,
    adapted_frame,
    involutivity_check,
    lie_bracket,
    slice_restriction,
)
from folhol.log import get_logger

logger = get_logger('pointwise')

# (种类, 叶状结构键, 点或叶) -> ModuleGB / InvolutivityResult，按最近使用淘汰
CACHE_MAXSIZE = 256
_cache = OrderedDict()
_cache_lock = threading.Lock()


def _cached(key, builder):
    with _cache_lock:
        if key in _cache:
            _cache.move_to_end(key)
            return _cache[key]
    value = builder()
    with _cache_lock:
        value = _cache.setdefault(key, value)
        _cache.move_to_end(key)
        while len(_cache) > CACHE_MAXSIZE:
            _cache.popitem(last=False)
        return value


def cache_size():
    with _cache_lock:
        return len(_cache)


def clear_cache():
    with _cache_lock:
        _cache.clear()


def point_module(foliation: Foliation, point):
    """I_x F 的 Gröbner 基（带缓存）"""
    point = foliation.check_point(point)
    return _cached(('point', foliation.cache_key(), point),
                   lambda: module_groebner(ideal_times_module(foliation.generators, point)))


def leaf_module(foliation: Foliation, leaf: CoordinateSubspace):
    """I_L F 的 Gröbner 基，I_L 由叶的固定坐标生成"""
    point = [QQ.zero] * foliation.chart.dim
    for i, v in leaf.fixed:
        point[i] = v
    return _cached(('leaf', foliation.cache_key(), leaf.fixed),
                   lambda: module_groebner(ideal_times_module(foliation.generators, point,
                                                              leaf.fixed_indices)))


def cached_involutivity(foliation: Foliation):
    return _cached(('involutivity', foliation.cache_key()), lambda: involutivity_check(foliation))


@dataclass(frozen=True)
class TangentSpace:
    dim: int
    basis: Tuple[tuple, ...]
    pivots: Tuple[int, ...]


@dataclass(frozen=True)
class FiberReport:
    """有理点处的纤维报告"""
    point: tuple
    dim_tangent: int
    dim_fiber: int
    dim_isotropy: int
    relation_basis: Tuple[tuple, ...]
    fiber_basis_indices: Tuple[int, ...]
    num_generators: int


@dataclass(frozen=True)
class LieAlgebraPresentation:
    """
    有限维 Lie 代数的表示：见证向量场和结构常数
    structure_constants[a][b][c] 是 [Y_a, Y_b] 中 Y_c 的系数
    """
    dim: int
    basis_witnesses: Tuple[PolyVector, ...]
    structure_constants: tuple
    point: Optional[tuple] = None

    @classmethod
    def from_constants(cls, constants):
        """只有结构常数（没有见证向量场）的抽象表示"""
        n = len(constants)
        table = tuple(tuple(tuple(to_rational(c) for c in row) for row in plane) for plane in constants)
        for plane in table:
            if len(plane) != n or any(len(row) != n for row in plane):
                raise DimensionError("结构常数必须是 n x n x n 的")
        return cls(n, (), table, None)

    def bracket(self, u, v):
        """系数向量的括号"""
        n = self.dim
        out = [0] * n
        c = self.structure_constants
        for a in range(n):
            if not u[a]:
                continue
            for b in range(n):
                if not v[b]:
                    continue
                w = u[a] * v[b]
                for g in range(n):
                    if c[a][b][g]:
                        out[g] = out[g] + w * c[a][b][g]
        return out


@dataclass(frozen=True)
class LieAnalysis:
    abelian: bool
    derived_series: Tuple[int, ...]
    lower_central_series: Tuple[int, ...]
    center_dim: int
    nilpotent: bool
    solvable: bool

    @property
    def nilpotency_class(self):
        """下中心列到达零所需的步数；不幂零时为 None"""
        if not self.nilpotent:
            return None
        return len(self.lower_central_series) - 1


@dataclass(frozen=True)
class AlgebroidLocalData:
    """坐标子空间叶 L 上的 A_L 局部数据"""
    leaf_spec: CoordinateSubspace
    frame: Tuple[PolyVector, ...]
    frame_names: Tuple[str, ...]
    anchor_table: Tuple[PolyVector, ...]
    bracket_table: Dict[Tuple[int, int], tuple]
    leaf_var_names: Tuple[str, ...]

    def nonzero_brackets(self):
        return {k: v for k, v in self.bracket_table.items() if any(v)}


@dataclass(frozen=True)
class SemicontinuityReport:
    point: tuple
    dim_tangent: int
    dim_fiber: int
    nearby: Tuple[Tuple[tuple, int, int], ...]

    @property
    def holds(self):
        return all(self.dim_tangent <= t and self.dim_fiber >= f for _, t, f in self.nearby)


@dataclass(frozen=True)
class SliceComparison:
    dim_isotropy: int
    dim_slice_fiber: int
    slice_foliation: Foliation = field(compare=False)

    @property
    def agree(self):
        return self.dim_isotropy == self.dim_slice_fiber


def _class_vectors(forms):
    keys = sorted({(pos, monom) for f in forms
                   for pos, comp in enumerate(f.components) for monom in comp.keys()})
    return keys, [tuple(f.components[p].get(m, QQ.zero) for p, m in keys) for f in forms]


def _independent_prefix(vectors):
    """按顺序贪心选取线性无关的向量（字典序最前的极大无关组）"""
    chosen = []
    for i, v in enumerate(vectors):
        if not any(v):
            continue
        if linalg.rank([vectors[c] for c in chosen] + [v]) > len(chosen):
            chosen.append(i)
    return chosen


def tangent_dim(foliation: Foliation, point) -> TangentSpace:
    """求值矩阵 [X_i(x)] 的秩以及 F_x 的一组基（行最简形的非零行）"""
    values = foliation.evaluation_matrix(point)
    rows, pivots = linalg.rref(values)
    basis = tuple(r for r in rows if any(r))
    return TangentSpace(len(basis), basis, pivots)


def _isotropy_dimension(foliation, point, gb, frame=None):
    frame = frame or adapted_frame(foliation, point)
    forms = [normal_form(t, gb) for t in frame.tail_generators]
    _, vectors = _class_vectors(forms)
    return len(_independent_prefix(vectors))


def fiber_report(foliation: Foliation, point) -> FiberReport:
    """
    纤维报告：dim F_x = m - dim(关系空间)，dim F_x(切) 由求值矩阵秩给出，
    dim g_x 由适配标架尾生成元模 I_x F 的秩独立算出，三者满足 fiber = tangent + isotropy
    """
    point = foliation.check_point(point)
    gb = point_module(foliation, point)
    relations = linear_relation_space(foliation.generators, gb)
    m = foliation.num_generators
    dim_fiber = m - len(relations)

    forms = [normal_form(g, gb) for g in foliation.generators]
    _, vectors = _class_vectors(forms)
    fiber_indices = tuple(_independent_prefix(vectors))

    dim_tangent = tangent_dim(foliation, point).dim
    dim_isotropy = _isotropy_dimension(foliation, point, gb)
    if dim_fiber != dim_tangent + dim_isotropy or len(fiber_indices) != dim_fiber:
        raise InconsistentSystemError(
            f"{point} 处纤维维数关系不成立: 纤维 {dim_fiber}, "
            f"切空间 {dim_tangent}, 迷向 {dim_isotropy}")
    logger.debug(f"{foliation.name} @ {point}: 纤维 {dim_fiber}，切空间 {dim_tangent}，"
                 f"迷向 {dim_isotropy}")
    return FiberReport(point, dim_tangent, dim_fiber, dim_isotropy,
                       tuple(relations), fiber_indices, m)


def classify_point(foliation: Foliation, point) -> str:
    """Regular 当且仅当 g_x = 0，与 dim 纤维 = dim 切空间 交叉核对"""
    report = fiber_report(foliation, point)
    by_isotropy = report.dim_isotropy == 0
    by_fiber = report.dim_fiber == report.dim_tangent
    if by_isotropy != by_fiber:
        raise InconsistentSystemError(f"{report.point} 处两种分类判据不一致")
    return 'Regular' if by_isotropy else 'Singular'


def codimension(foliation: Foliation, point) -> int:
    return foliation.chart.dim - tangent_dim(foliation, point).dim


def _structure_constants(witnesses, gb):
    n = len(witnesses)
    witness_forms = [normal_form(w, gb) for w in witnesses]
    constants = [[[QQ.zero] * n for _ in range(n)] for _ in range(n)]
    for a in range(n):
        for b in range(a + 1, n):
            br = normal_form(lie_bracket(witnesses[a], witnesses[b]), gb)
            keys, vectors = _class_vectors(witness_forms + [br])
            rows = [[vectors[g][r] for g in range(n)] for r in range(len(keys))]
            rhs = [vectors[n][r] for r in range(len(keys))]
            try:
                coeffs = linalg.solve(rows, rhs)
            except InconsistentSystemError:
                raise InconsistentSystemError(
                    f"见证 {a} 与 {b} 的括号不在迷向类张成的空间中")
            for g in range(n):
                constants[a][b][g] = coeffs[g]
                constants[b][a][g] = -coeffs[g]
    return tuple(tuple(tuple(row) for row in plane) for plane in constants)


def check_jacobi(presentation: LieAlgebraPresentation):
    """结构常数的反对称性和 Jacobi 恒等式（精确）"""
    n = presentation.dim
    c = presentation.structure_constants
    for a in range(n):
        for b in range(n):
            for g in range(n):
                if c[a][b][g] != -c[b][a][g]:
                    return False
    for a in range(n):
        for b in range(n):
            for g in range(n):
                for e in range(n):
                    total = QQ.zero
                    for d in range(n):
                        total += (c[a][b][d] * c[d][g][e] + c[b][g][d] * c[d][a][e]
                                  + c[g][a][d] * c[d][b][e])
                    if total:
                        return False
    return True


def isotropy_algebra(foliation: Foliation, point, witnesses: Sequence[PolyVector] = None) -> LieAlgebraPresentation:
    """
    迷向 Lie 代数 g_x = F(x) / I_x F

    Args:
        foliation: 叶状结构（必须能证明对合）
        point: 有理点
        witnesses: 可选的见证向量场；默认取适配标架尾生成元中字典序最前的极大无关组

    Raises:
        NonInvolutiveError: 对合性为 Unknown
        InconsistentSystemError: 括号不能用见证类表示
    """
    point = foliation.check_point(point)
    involutivity = cached_involutivity(foliation)
    if not involutivity.involutive:
        i, j = involutivity.failing_pair
        raise NonInvolutiveError(
            f"对合性未知（{foliation.generator_names[i]} 与 "
            f"{foliation.generator_names[j]} 的括号），拒绝计算迷向代数")
    gb = point_module(foliation, point)
    frame = adapted_frame(foliation, point)
    dim = _isotropy_dimension(foliation, point, gb, frame)

    if witnesses is None:
        forms = [normal_form(t, gb) for t in frame.tail_generators]
        _, vectors = _class_vectors(forms)
        chosen = _independent_prefix(vectors)
        witnesses = tuple(frame.tail_generators[i] for i in chosen)
    else:
        witnesses = tuple(witnesses)
        for w in witnesses:
            if any(w.evaluate(point)):
                raise DimensionError("见证向量场必须在基点处为零")
        _, vectors = _class_vectors([normal_form(w, gb) for w in witnesses])
        if len(witnesses) != dim or len(_independent_prefix(vectors)) != dim:
            raise DimensionError(f"见证向量场必须给出 g_x 的一组基（维数 {dim}）")

    constants = _structure_constants(witnesses, gb)
    presentation = LieAlgebraPresentation(dim, witnesses, constants, point)
    if not check_jacobi(presentation):
        raise InconsistentSystemError("结构常数不满足 Jacobi 恒等式")
    return presentation


def _span_dim(vectors):
    vectors = [v for v in vectors if any(v)]
    if not vectors:
        return 0, []
    rows, _ = linalg.rref(vectors)
    basis = [r for r in rows if any(r)]
    return len(basis), basis


def _bracket_span(presentation, left, right):
    products = []
    for u in left:
        for v in right:
            products.append(tuple(to_rational(x) for x in presentation.bracket(u, v)))
    return _span_dim(products)


def lie_algebra_analysis(presentation: LieAlgebraPresentation) -> LieAnalysis:
    """导出列、下中心列、中心维数（有理数上的精确线性代数）"""
    n = presentation.dim
    c = presentation.structure_constants
    whole = [tuple(QQ.one if i == j else QQ.zero for i in range(n)) for j in range(n)]
    abelian = all(not c[a][b][g] for a in range(n) for b in range(n) for g in range(n))

    derived = [n]
    current = whole
    while derived[-1] > 0:
        dim, current = _bracket_span(presentation, current, current)
        if dim == derived[-1]:
            break
        derived.append(dim)

    lower = [n]
    current = whole
    while lower[-1] > 0:
        dim, current = _bracket_span(presentation, whole, current)
        if dim == lower[-1]:
            break
        lower.append(dim)

    if n:
        # [e_a, z] = 0 对所有 a：sum_b z_b c[a][b][g] = 0
        rows = [[c[a][b][g] for b in range(n)] for a in range(n) for g in range(n)]
        center_dim = len(linalg.nullspace(rows, n))
    else:
        center_dim = 0

    return LieAnalysis(
        abelian=abelian,
        derived_series=tuple(derived),
        lower_central_series=tuple(lower),
        center_dim=center_dim,
        nilpotent=lower[-1] == 0,
        solvable=derived[-1] == 0,
    )


def default_leaf_point(leaf: CoordinateSubspace):
    point = [QQ.zero] * leaf.chart.dim
    for i, v in leaf.fixed:
        point[i] = v
    return tuple(point)


def _restrict_to_leaf(vector, leaf, leaf_ring, name):
    values = leaf.values
    free = leaf.free_indices
    for j in leaf.fixed_indices:
        if substitute(vector.components[j], values, leaf_ring, free):
            raise TangencyError(
                f"{name} 与叶 {leaf.describe()} 不相切: "
                f"d({leaf.chart.var_names[j]}) 分量在叶上不为零",
                generator=name, component=leaf.chart.var_names[j])
    return PolyVector(leaf_ring, tuple(substitute(vector.components[k], values, leaf_ring, free)
                                       for k in free))


def algebroid_local_data(foliation: Foliation, leaf: CoordinateSubspace,
                         frame: AdaptedFrame = None) -> AlgebroidLocalData:
    """
    A_L 的局部数据

    Args:
        foliation: 叶状结构
        leaf: 坐标子空间，用户断言它包含在一片叶中
        frame: 叶上某点处的适配标架；默认取自由坐标为零的点

    Raises:
        DependentFrameError: 标架在 I_L F 模下线性相关
    """
    if leaf.chart != foliation.chart:
        raise DimensionError("叶与叶状结构的图卡不一致")
    if not leaf.free_indices:
        raise DimensionError("叶至少需要一个自由坐标")
    if frame is None:
        frame = adapted_frame(foliation, default_leaf_point(leaf))
    elif not leaf.contains(frame.base_point):
        raise DimensionError("适配标架的基点不在叶上")

    fields = frame.generators
    names = tuple(
        [foliation.generator_names[i] for i in frame.leaf_indices]
        + [foliation.generator_names[i] for i in frame.tail_sources])

    gb_leaf = leaf_module(foliation, leaf)
    relations = linear_relation_space(fields, gb_leaf)
    if relations:
        raise DependentFrameError(
            f"标架模 I_L F 线性相关: 关系 {[str(c) for c in relations[0]]}",
            relation=relations[0])

    leaf_chart = leaf.sub_chart()
    leaf_ring = leaf_chart.ring
    anchors = tuple(_restrict_to_leaf(f, leaf, leaf_ring, n) for f, n in zip(fields, names))

    gb_frame = module_groebner(fields)
    values = leaf.values
    free = leaf.free_indices
    n = len(fields)

    def structure(a, b):
        br = lie_bracket(fields[a], fields[b])
        cof = lift(br, gb_frame)
        if cof is None:
            raise NonInvolutiveError(f"括号 [{names[a]}, {names[b]}] 不在多项式模中")
        return tuple(substitute(c, values, leaf_ring, free) for c in cof)

    table = {}
    for a in range(n):
        for b in range(a + 1, n):
            ab = structure(a, b)
            ba = structure(b, a)
            if any(x + y for x, y in zip(ab, ba)):
                raise InconsistentSystemError(f"括号表在 ({a}, {b}) 处不反对称")
            table[(a, b)] = ab

    # 锚映射与括号相容：rho([A, B]) = [rho A, rho B]
    for (a, b), coeffs in table.items():
        lhs = PolyVector.zero(leaf_ring, leaf_chart.dim)
        for coeff, anchor in zip(coeffs, anchors):
            if coeff:
                lhs = lhs + anchor.scale(coeff)
        rhs = lie_bracket(anchors[a], anchors[b])
        if lhs != rhs:
            raise InconsistentSystemError(f"锚映射与 {names[a]}, {names[b]} 的括号不相容")

    logger.info(f"{foliation.name}: A_L 数据（秩 {n}，叶 {leaf.describe()}）计算完成")
    return AlgebroidLocalData(leaf, tuple(fields), names, anchors, table, leaf_chart.var_names)


def semicontinuity_probe(foliation: Foliation, point, nearby: Sequence) -> SemicontinuityReport:
    """x 处与邻近点处的切空间维数和纤维维数"""
    base = fiber_report(foliation, point)
    rows = []
    for q in nearby:
        r = fiber_report(foliation, q)
        rows.append((r.point, r.dim_tangent, r.dim_fiber))
    return SemicontinuityReport(base.point, base.dim_tangent, base.dim_fiber, tuple(rows))


def slice_isotropy_comparison(foliation: Foliation, point, slice_spec: CoordinateSubspace) -> SliceComparison:
    """
    比较 dim g_x 与切片叶状结构在 x 处的纤维维数（代表元限制）
    切片叶状结构由适配标架的尾生成元限制得到
    """
    point = foliation.check_point(point)
    if not slice_spec.contains(point):
        raise DimensionError(f"点 {point} 不在切片 {slice_spec.describe()} 上")
    frame = adapted_frame(foliation, point)
    report = fiber_report(foliation, point)
    if not frame.tail_generators:
        return SliceComparison(report.dim_isotropy, 0, None)
    names = tuple(foliation.generator_names[i] for i in frame.tail_sources)
    tails = Foliation(foliation.chart, frame.tail_generators, f"{foliation.name}_tail", names)
    sliced = slice_restriction(tails, slice_spec)
    slice_point = rational_point(point[i] for i in slice_spec.free_indices)
    slice_report = fiber_report(sliced, slice_point)
    return SliceComparison(report.dim_isotropy, slice_report.dim_fiber, sliced)
