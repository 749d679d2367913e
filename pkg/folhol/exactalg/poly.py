# -*- coding: utf-8 -*-
"""
精确多元多项式模块
系数域为有理数 QQ，多项式直接使用 sympy 的稀疏多项式环元素（单项式指数元组 -> 非零系数），
本模块在其上提供自由模元素 PolyVector 以及按规格约定的运算入口
"""
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Tuple

from sympy.polys.domains import QQ
from sympy.polys.monomials import monomial_div
from sympy.polys.orderings import grevlex
from sympy.polys.rings import PolyRing, PolyElement

from folhol.errors import DimensionError

# 多项式就是环元素，有理数就是 QQ 元素
Poly = PolyElement
Rational = type(QQ.one)


def make_ring(names):
    """
    按变量名构造 QQ 上的多项式环（单项式序为分次反字典序）

    Args:
        names: 变量名序列

    Returns:
        PolyRing
    """
    names = [str(n) for n in names]
    if not names:
        raise DimensionError("多项式环至少需要一个变量")
    if len(set(names)) != len(names):
        raise DimensionError(f"变量名重复: {names}")
    return PolyRing(names, QQ, grevlex)


def to_rational(value):
    """把 int / Fraction / 字符串 / QQ 元素转换为 QQ 元素"""
    if isinstance(value, Rational):
        return value
    if isinstance(value, bool):
        raise TypeError("布尔值不能作为有理数")
    if isinstance(value, int):
        return QQ(value)
    if isinstance(value, Fraction):
        return QQ(value.numerator, value.denominator)
    if isinstance(value, str):
        frac = Fraction(value.strip())
        return QQ(frac.numerator, frac.denominator)
    if isinstance(value, float):
        raise TypeError(f"浮点数 {value!r} 不能作为精确有理数，请使用 Fraction 或字符串")
    try:
        return QQ.from_sympy(value)
    except Exception:
        raise TypeError(f"无法转换为有理数: {value!r}")


def to_fraction(value):
    """QQ 元素转为 Fraction（用于报告输出）"""
    value = to_rational(value)
    return Fraction(int(QQ.numer(value)), int(QQ.denom(value)))


def rational_point(values):
    """把坐标序列转换为 QQ 元组"""
    return tuple(to_rational(v) for v in values)


def _check_same_ring(a, b):
    if a.ring.ngens != b.ring.ngens:
        raise DimensionError(f"变量个数不匹配: {a.ring.ngens} != {b.ring.ngens}")
    if a.ring != b.ring:
        raise DimensionError(f"多项式属于不同的环: {a.ring.symbols} / {b.ring.symbols}")


def poly_arith(a, b, op):
    """
    精确多项式加法 / 乘法

    Args:
        a, b: 同一环中的多项式
        op: 'add' 或 'mul'
    """
    _check_same_ring(a, b)
    if op == 'add':
        return a + b
    if op == 'mul':
        return a * b
    raise ValueError(f"未知运算: {op}")


def partial_derivative(a, var):
    """对第 var 个变量求偏导"""
    if not 0 <= var < a.ring.ngens:
        raise DimensionError(f"变量下标 {var} 越界（共 {a.ring.ngens} 个变量）")
    return a.diff(a.ring.gens[var])


def evaluate(a, point):
    """在有理点处精确求值"""
    if len(point) != a.ring.ngens:
        raise DimensionError(f"点的维数 {len(point)} 与变量个数 {a.ring.ngens} 不匹配")
    point = rational_point(point)
    total = QQ.zero
    for monom, coeff in a.items():
        term = coeff
        for value, exp in zip(point, monom):
            if exp:
                term = term * value ** exp
        total += term
    return total


def substitute(a, values, target_ring, keep):
    """
    部分代入：把 values 中给出的变量（下标 -> 有理数）代入，剩余变量按 keep 的顺序映射到 target_ring

    Args:
        a: 多项式
        values: {变量下标: 有理数}
        target_ring: 结果所在的环
        keep: 保留变量的原下标列表，顺序即 target_ring 的变量顺序
    """
    result = {}
    for monom, coeff in a.items():
        c = coeff
        for idx, value in values.items():
            if monom[idx]:
                c = c * value ** monom[idx]
        if not c:
            continue
        new_monom = tuple(monom[i] for i in keep)
        result[new_monom] = result.get(new_monom, QQ.zero) + c
    return target_ring.from_dict({m: c for m, c in result.items() if c})


def embed(a, target_ring, index_map):
    """把多项式按 index_map（原下标 -> 新下标）嵌入更大的环"""
    n = target_ring.ngens
    result = {}
    for monom, coeff in a.items():
        new_monom = [0] * n
        for old, new in index_map.items():
            new_monom[new] = monom[old]
        result[tuple(new_monom)] = coeff
    return target_ring.from_dict(result)


def shift(a, offsets):
    """平移变量 x_j -> x_j + offsets[j]"""
    ring = a.ring
    images = [g + to_rational(o) for g, o in zip(ring.gens, offsets)]
    return a.compose(list(zip(ring.gens, images)))


def total_degree(a):
    """总次数，零多项式返回 -1"""
    if not a:
        return -1
    return max(sum(m) for m in a.monoms())


@dataclass(frozen=True)
class PolyVector:
    """
    自由模 QQ[x]^dim 中的元素，也用来表示多项式向量场 sum_i a_i d_i
    """
    ring: PolyRing
    components: Tuple[PolyElement, ...]

    def __post_init__(self):
        if len(self.components) < 1:
            raise DimensionError("PolyVector 至少需要一个分量")
        for c in self.components:
            if c.ring != self.ring:
                raise DimensionError("PolyVector 的分量必须属于同一个环")

    @classmethod
    def from_polys(cls, polys: Sequence[PolyElement]):
        polys = tuple(polys)
        if not polys:
            raise DimensionError("PolyVector 至少需要一个分量")
        return cls(polys[0].ring, polys)

    @classmethod
    def zero(cls, ring, dim):
        return cls(ring, tuple(ring.zero for _ in range(dim)))

    @classmethod
    def unit(cls, ring, dim, index, coeff=None):
        comps = [ring.zero] * dim
        comps[index] = ring.one if coeff is None else coeff
        return cls(ring, tuple(comps))

    @property
    def dim(self):
        return len(self.components)

    @property
    def num_vars(self):
        return self.ring.ngens

    def _check(self, other):
        if self.dim != other.dim:
            raise DimensionError(f"模的秩不匹配: {self.dim} != {other.dim}")
        if self.ring != other.ring:
            raise DimensionError("向量属于不同的多项式环")

    def __add__(self, other):
        self._check(other)
        return PolyVector(self.ring, tuple(a + b for a, b in zip(self.components, other.components)))

    def __sub__(self, other):
        self._check(other)
        return PolyVector(self.ring, tuple(a - b for a, b in zip(self.components, other.components)))

    def __neg__(self):
        return PolyVector(self.ring, tuple(-a for a in self.components))

    def scale(self, factor):
        """乘以多项式或有理数"""
        if isinstance(factor, PolyElement):
            return PolyVector(self.ring, tuple(factor * a for a in self.components))
        c = to_rational(factor)
        return PolyVector(self.ring, tuple(a.mul_ground(c) for a in self.components))

    def mul_term(self, monom, coeff):
        return PolyVector(self.ring, tuple(a.mul_term((monom, coeff)) for a in self.components))

    def is_zero(self):
        return all(not c for c in self.components)

    def lead(self):
        """
        位置之上的项序（TOP）下的首项

        Returns:
            (位置, 单项式, 系数)；零向量返回 None
        """
        best = None
        best_key = None
        order = self.ring.order
        for pos, comp in enumerate(self.components):
            if not comp:
                continue
            monom = comp.LM
            key = (order(monom), -pos)
            if best_key is None or key > best_key:
                best_key = key
                best = (pos, monom, comp.LC)
        return best

    def evaluate(self, point):
        """在有理点处求值，返回 QQ 元组"""
        return tuple(evaluate(c, point) for c in self.components)

    def degree(self):
        return max(total_degree(c) for c in self.components)

    def __str__(self):
        return format_vector(self)


def lead_divides(lead_a, lead_b):
    """lead_a 的首项是否整除 lead_b 的首项（同一位置）"""
    return lead_a[0] == lead_b[0] and monomial_div(lead_b[1], lead_a[1]) is not None


def format_poly(p):
    """把多项式格式化为 DSL 可读回的字符串（按项序降序）"""
    if not p:
        return "0"
    names = [str(s) for s in p.ring.symbols]
    pieces = []
    for monom, coeff in p.terms():
        frac = to_fraction(coeff)
        factors = []
        for name, exp in zip(names, monom):
            if exp == 1:
                factors.append(name)
            elif exp > 1:
                factors.append(f"{name}^{exp}")
        sign = "-" if frac < 0 else "+"
        mag = abs(frac)
        if factors:
            body = "*".join(factors)
            if mag != 1:
                body = f"{_format_fraction(mag)}*{body}"
        else:
            body = _format_fraction(mag)
        pieces.append((sign, body))
    first_sign, first_body = pieces[0]
    out = ("-" if first_sign == "-" else "") + first_body
    for sign, body in pieces[1:]:
        out += f" {sign} {body}"
    return out


def _format_fraction(frac):
    if frac.denominator == 1:
        return str(frac.numerator)
    return f"{frac.numerator}/{frac.denominator}"


def format_vector(v, var_names=None):
    """把向量场格式化为 sum (a_i)*d(x_i) 形式"""
    names = var_names or [str(s) for s in v.ring.symbols]
    parts = []
    for name, comp in zip(names, v.components):
        if not comp:
            continue
        parts.append(f"({format_poly(comp)})*d({name})")
    return " + ".join(parts) if parts else "0"
