# -*- coding: utf-8 -*-
"""
叶状结构核心模块
把奇异叶状结构表示为有限生成的多项式向量场模，提供 Lie 括号、对合性证书、
适配标架、切片限制、乘积以及几类常用构造（平移、k 阶消失族、线性作用）
"""
from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence, Tuple

from sympy import sympify
from sympy.polys.domains import QQ

from folhol.errors import DimensionError, TangencyError
from folhol.exactalg import linalg
from folhol.exactalg.groebner import lift, module_groebner
from folhol.exactalg.poly import (
    PolyVector,
    embed,
    make_ring,
    partial_derivative,
    rational_point,
    shift,
    substitute,
    to_rational,
)
from folhol.log import get_logger

logger = get_logger('foliation')


@dataclass(frozen=True)
class Chart:
    """坐标图卡：维数和变量名"""
    dim: int
    var_names: Tuple[str, ...]

    def __post_init__(self):
        names = tuple(str(n) for n in self.var_names)
        object.__setattr__(self, 'var_names', names)
        if self.dim < 1:
            raise DimensionError("图卡维数至少为 1")
        if len(names) != self.dim:
            raise DimensionError(f"变量个数 {len(names)} 与图卡维数 {self.dim} 不一致")
        if len(set(names)) != len(names):
            raise DimensionError(f"变量名重复: {list(names)}")

    @classmethod
    def of(cls, *names):
        return cls(len(names), tuple(names))

    @property
    def ring(self):
        # sympy 按 (符号, 域, 序) 缓存环，同名图卡得到同一个环
        return make_ring(self.var_names)

    def index(self, name):
        try:
            return self.var_names.index(name)
        except ValueError:
            raise DimensionError(f"未声明的变量: {name}")


@dataclass(frozen=True)
class Foliation:
    """由有序生成元列表给出的多项式叶状结构"""
    chart: Chart
    generators: Tuple[PolyVector, ...]
    name: str = "F"
    generator_names: Tuple[str, ...] = ()

    def __post_init__(self):
        gens = tuple(self.generators)
        object.__setattr__(self, 'generators', gens)
        if not gens:
            raise DimensionError("叶状结构至少需要一个生成元")
        ring = self.chart.ring
        for g in gens:
            if g.dim != self.chart.dim:
                raise DimensionError(f"生成元维数 {g.dim} 与图卡维数 {self.chart.dim} 不一致")
            if g.ring != ring:
                raise DimensionError("生成元的多项式环与图卡变量不一致")
        names = tuple(self.generator_names) or tuple(f"X{i + 1}" for i in range(len(gens)))
        if len(names) != len(gens):
            raise DimensionError("生成元名称个数与生成元个数不一致")
        object.__setattr__(self, 'generator_names', names)

    @classmethod
    def from_components(cls, chart, rows, name="F", generator_names=()):
        """
        用分量列表构造（分量可以是环元素、整数、Fraction 或字符串表达式）

        Args:
            chart: 图卡
            rows: 每个生成元的分量列表
        """
        ring = chart.ring
        gens = []
        for row in rows:
            comps = []
            for c in row:
                if isinstance(c, str):
                    comps.append(ring.from_expr(sympify(c)))
                elif hasattr(c, 'ring'):
                    comps.append(c)
                else:
                    comps.append(ring.ground_new(to_rational(c)))
            gens.append(PolyVector(ring, tuple(comps)))
        return cls(chart, tuple(gens), name, tuple(generator_names))

    @property
    def ring(self):
        return self.chart.ring

    @property
    def num_generators(self):
        return len(self.generators)

    def cache_key(self):
        """可哈希的内容键（用于 Gröbner 基缓存）"""
        return (
            self.chart.var_names,
            tuple(tuple(tuple(sorted(c.items())) for c in g.components) for g in self.generators),
        )

    def check_point(self, point):
        point = rational_point(point)
        if len(point) != self.chart.dim:
            raise DimensionError(f"点的维数 {len(point)} 与图卡维数 {self.chart.dim} 不一致")
        return point

    def evaluation_matrix(self, point):
        point = self.check_point(point)
        return tuple(g.evaluate(point) for g in self.generators)


@dataclass(frozen=True)
class CoordinateSubspace:
    """坐标子空间：若干变量固定为有理数值（用于叶和切片）"""
    chart: Chart
    fixed: Tuple[Tuple[int, object], ...]

    def __post_init__(self):
        fixed = tuple(sorted((int(i), to_rational(v)) for i, v in self.fixed))
        seen = set()
        for i, _ in fixed:
            if not 0 <= i < self.chart.dim:
                raise DimensionError(f"固定坐标下标 {i} 越界")
            if i in seen:
                raise DimensionError(f"坐标 {self.chart.var_names[i]} 被重复固定")
            seen.add(i)
        object.__setattr__(self, 'fixed', fixed)

    @classmethod
    def from_names(cls, chart, values: Dict[str, object]):
        return cls(chart, tuple((chart.index(name), v) for name, v in values.items()))

    @property
    def fixed_indices(self):
        return tuple(i for i, _ in self.fixed)

    @property
    def free_indices(self):
        fixed = set(self.fixed_indices)
        return tuple(i for i in range(self.chart.dim) if i not in fixed)

    @property
    def values(self):
        return dict(self.fixed)

    def contains(self, point):
        point = rational_point(point)
        return all(point[i] == v for i, v in self.fixed)

    def sub_chart(self):
        return Chart(len(self.free_indices), tuple(self.chart.var_names[i] for i in self.free_indices))

    def describe(self):
        return ", ".join(f"{self.chart.var_names[i]} = {v}" for i, v in self.fixed)


@dataclass(frozen=True)
class AdaptedFrame:
    """
    适配标架：前 k 个生成元在基点处的值线性无关，其余生成元在基点处为零
    change_of_basis 的第 r 行给出第 r 个新生成元在原生成元上的有理组合
    """
    base_point: tuple
    leaf_generators: Tuple[PolyVector, ...]
    tail_generators: Tuple[PolyVector, ...]
    change_of_basis: tuple
    leaf_indices: Tuple[int, ...] = ()
    tail_sources: Tuple[int, ...] = ()

    @property
    def k(self):
        return len(self.leaf_generators)

    @property
    def generators(self):
        return self.leaf_generators + self.tail_generators


@dataclass(frozen=True)
class InvolutivityResult:
    """对合性证书；status 为 'Involutive' 或 'Unknown'"""
    status: str
    witnesses: Dict[Tuple[int, int], tuple] = field(default_factory=dict)
    failing_pair: Optional[Tuple[int, int]] = None

    @property
    def involutive(self):
        return self.status == 'Involutive'


@dataclass(frozen=True)
class BracketEntry:
    i: int
    j: int
    bracket: PolyVector
    witness: Optional[tuple]


def lie_bracket(x: PolyVector, y: PolyVector) -> PolyVector:
    """[X, Y]_i = sum_j X_j d_j Y_i - Y_j d_j X_i"""
    if x.dim != y.dim or x.ring != y.ring:
        raise DimensionError(f"向量场维数不匹配: {x.dim} != {y.dim}")
    if x.dim != x.ring.ngens:
        raise DimensionError("向量场的分量个数必须等于变量个数")
    ring = x.ring
    comps = []
    for i in range(x.dim):
        acc = ring.zero
        for j in range(x.dim):
            if x.components[j]:
                acc += x.components[j] * partial_derivative(y.components[i], j)
            if y.components[j]:
                acc -= y.components[j] * partial_derivative(x.components[i], j)
        comps.append(acc)
    return PolyVector(ring, tuple(comps))


def bracket_table(foliation: Foliation, gb=None):
    """
    全部生成元括号 [X_i, X_j]（i < j）及其成员证书

    Returns:
        BracketEntry 列表；witness 为 None 表示括号不在多项式模中
    """
    gb = gb or module_groebner(foliation.generators)
    table = []
    gens = foliation.generators
    for i in range(len(gens)):
        for j in range(i + 1, len(gens)):
            b = lie_bracket(gens[i], gens[j])
            table.append(BracketEntry(i, j, b, lift(b, gb)))
    return table


def involutivity_check(foliation: Foliation) -> InvolutivityResult:
    """
    对合性检查：每个括号都在生成元张成的多项式模中则为 Involutive，
    否则报告第一个失败的生成元对（Unknown，多项式模成员关系只是充分条件）
    """
    gb = module_groebner(foliation.generators)
    witnesses = {}
    for entry in bracket_table(foliation, gb):
        if entry.witness is None:
            logger.info(f"{foliation.name}: 括号 [{foliation.generator_names[entry.i]}, "
                        f"{foliation.generator_names[entry.j]}] 不在多项式模中")
            return InvolutivityResult('Unknown', witnesses, (entry.i, entry.j))
        witnesses[(entry.i, entry.j)] = entry.witness
    return InvolutivityResult('Involutive', witnesses, None)


def adapted_frame(foliation: Foliation, point) -> AdaptedFrame:
    """
    在有理点处对求值矩阵做有理高斯消元：
    依次扫描生成元，值与已选值线性无关的成为叶生成元（最左主元优先），
    其余生成元减去叶生成元的组合使其在该点为零
    """
    point = foliation.check_point(point)
    values = foliation.evaluation_matrix(point)
    m = foliation.num_generators
    ring = foliation.ring

    chosen = []
    for i, row in enumerate(values):
        candidate = [values[c] for c in chosen] + [row]
        if linalg.rank(candidate) > len(chosen):
            chosen.append(i)

    leaf = tuple(foliation.generators[i] for i in chosen)
    tails = []
    tail_sources = []
    change = []
    for i in chosen:
        change.append(tuple(QQ.one if c == i else QQ.zero for c in range(m)))
    # 叶值矩阵的转置，用于解 value(X_i) = sum c_j value(leaf_j)
    leaf_cols = [[values[c][r] for c in chosen] for r in range(foliation.chart.dim)]
    for i in range(m):
        if i in chosen:
            continue
        if chosen:
            coeffs = linalg.solve(leaf_cols, values[i])
        else:
            coeffs = ()
        g = foliation.generators[i]
        row = [QQ.zero] * m
        row[i] = QQ.one
        for c, idx in zip(coeffs, chosen):
            if c:
                g = g - foliation.generators[idx].scale(c)
                row[idx] -= c
        tails.append(g)
        tail_sources.append(i)
        change.append(tuple(row))

    frame = AdaptedFrame(
        base_point=point,
        leaf_generators=leaf,
        tail_generators=tuple(tails),
        change_of_basis=tuple(change),
        leaf_indices=tuple(chosen),
        tail_sources=tuple(tail_sources),
    )
    logger.debug(f"{foliation.name}: 适配标架 k={frame.k}, 尾生成元 {len(tails)} 个, 环 {ring.symbols}")
    return frame


def slice_restriction(foliation: Foliation, slice_spec: CoordinateSubspace, name=None) -> Foliation:
    """
    把生成元限制到坐标切片上

    相切证书：代入切片值后，每个生成元沿固定坐标的分量必须恒为零

    Raises:
        TangencyError: 证书失败，指出生成元和分量
    """
    if slice_spec.chart != foliation.chart:
        raise DimensionError("切片与叶状结构的图卡不一致")
    values = slice_spec.values
    free = slice_spec.free_indices
    if not free:
        raise DimensionError("切片必须至少保留一个自由坐标")
    sub_chart = slice_spec.sub_chart()
    sub_ring = sub_chart.ring

    restricted = []
    names = []
    for g, gname in zip(foliation.generators, foliation.generator_names):
        for j in slice_spec.fixed_indices:
            if substitute(g.components[j], values, sub_ring, free):
                raise TangencyError(
                    f"生成元 {gname} 与切片 {slice_spec.describe()} 不相切: "
                    f"d({foliation.chart.var_names[j]}) 分量不恒为零",
                    generator=gname, component=foliation.chart.var_names[j])
        vec = PolyVector(sub_ring, tuple(substitute(g.components[k], values, sub_ring, free) for k in free))
        restricted.append(vec)
        names.append(gname)

    kept = [(v, n) for v, n in zip(restricted, names) if not v.is_zero()]
    if not kept:
        kept = list(zip(restricted, names))
    return Foliation(sub_chart, tuple(v for v, _ in kept), name or f"{foliation.name}_S",
                     tuple(n for _, n in kept))


def product(first: Foliation, second: Foliation, name=None) -> Foliation:
    """乘积叶状结构；第二个因子的重名变量加后缀"""
    names = list(first.chart.var_names)
    taken = set(names)
    for var in second.chart.var_names:
        new = var
        suffix = 2
        while new in taken:
            new = f"{var}_{suffix}"
            suffix += 1
        names.append(new)
        taken.add(new)
    chart = Chart(len(names), tuple(names))
    ring = chart.ring
    d1 = first.chart.dim
    d2 = second.chart.dim

    gens = []
    first_map = {i: i for i in range(d1)}
    for g in first.generators:
        comps = [embed(c, ring, first_map) for c in g.components] + [ring.zero] * d2
        gens.append(PolyVector(ring, tuple(comps)))
    second_map = {i: d1 + i for i in range(d2)}
    for g in second.generators:
        comps = [ring.zero] * d1 + [embed(c, ring, second_map) for c in g.components]
        gens.append(PolyVector(ring, tuple(comps)))

    gen_names = list(first.generator_names)
    for n in second.generator_names:
        new = n
        suffix = 2
        while new in gen_names:
            new = f"{n}_{suffix}"
            suffix += 1
        gen_names.append(new)
    return Foliation(chart, tuple(gens), name or f"{first.name}x{second.name}", tuple(gen_names))


def shift_chart(foliation: Foliation, offset, name=None) -> Foliation:
    """把叶状结构平移 offset：新生成元 X'(x) = X(x - offset)"""
    offset = foliation.check_point(offset)
    neg = [-v for v in offset]
    gens = tuple(PolyVector(g.ring, tuple(shift(c, neg) for c in g.components))
                 for g in foliation.generators)
    return Foliation(foliation.chart, gens, name or foliation.name, foliation.generator_names)


def order_k_foliation(k: int, center=(0, 0), var_names=('x', 'y')) -> Foliation:
    """
    平面上在 center 处 k 阶消失的向量场全体：
    (x-a)^i (y-b)^j d(x), (x-a)^i (y-b)^j d(y)，i + j = k
    """
    if k < 0:
        raise ValueError("k 必须非负")
    chart = Chart(2, tuple(var_names))
    ring = chart.ring
    a, b = rational_point(center)
    x, y = ring.gens
    gens = []
    names = []
    for i in range(k, -1, -1):
        j = k - i
        mono = (x - a) ** i * (y - b) ** j
        gens.append(PolyVector(ring, (mono, ring.zero)))
        names.append(f"A{i}{j}")
        gens.append(PolyVector(ring, (ring.zero, mono)))
        names.append(f"B{i}{j}")
    return Foliation(chart, tuple(gens), f"F{k}", tuple(names))


def linear_action_foliation(matrices: Sequence[Sequence[Sequence[object]]], var_names, name="lin") -> Foliation:
    """
    线性 Lie 代数作用的叶状结构：每个矩阵 A 给出向量场 x -> A x
    """
    var_names = tuple(var_names)
    chart = Chart(len(var_names), var_names)
    ring = chart.ring
    gens = []
    for a in matrices:
        if len(a) != chart.dim or any(len(row) != chart.dim for row in a):
            raise DimensionError(f"矩阵必须是 {chart.dim}x{chart.dim} 的")
        comps = []
        for row in a:
            acc = ring.zero
            for coeff, gen in zip(row, ring.gens):
                c = to_rational(coeff)
                if c:
                    acc += gen.mul_ground(c)
            comps.append(acc)
        gens.append(PolyVector(ring, tuple(comps)))
    return Foliation(chart, tuple(gens), name)
