# -*- coding: utf-8 -*-
"""
Baker-Campbell-Hausdorff 乘积
在结构常数给出的有限维 Lie 代数中计算 log(exp(X) exp(Y)) 的截断级数，
齐次分量用 Varadarajan 递推：
    z_1 = X + Y
    (n+1) z_{n+1} = 1/2 [X - Y, z_n]
                    + sum_{p>=1, 2p<=n} B_{2p}/(2p)! sum_{k_1+...+k_{2p}=n} [z_{k_1}, [..., [z_{k_{2p}}, X + Y]]]
代数幂零且类数小于截断阶时级数精确终止
"""
from fractions import Fraction
from functools import lru_cache
from math import factorial

from sympy import bernoulli

from folhol.exactalg.poly import Rational, to_fraction
from folhol.log import get_logger
from folhol.pointwise import LieAlgebraPresentation, lie_algebra_analysis

logger = get_logger('bch')


@lru_cache(maxsize=None)
def _bernoulli_weight(m):
    b = bernoulli(m)
    return Fraction(int(b.p), int(b.q)) / factorial(m)


def _compositions(total, parts):
    """total 拆成 parts 个正整数的有序分拆"""
    if parts == 1:
        yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _is_exact(values):
    return all(isinstance(v, (int, Fraction, Rational)) and not isinstance(v, bool) for v in values)


class _Algebra:
    """按输入类型选择 Fraction 或 float 运算的括号"""

    def __init__(self, presentation, exact):
        n = presentation.dim
        convert = to_fraction if exact else (lambda c: float(to_fraction(c)))
        self.n = n
        self.zero = Fraction(0) if exact else 0.0
        self.entries = []
        c = presentation.structure_constants
        for a in range(n):
            for b in range(n):
                for g in range(n):
                    if c[a][b][g]:
                        self.entries.append((a, b, g, convert(c[a][b][g])))

    def bracket(self, u, v):
        out = [self.zero] * self.n
        for a, b, g, c in self.entries:
            if u[a] and v[b]:
                out[g] += u[a] * v[b] * c
        return out

    @staticmethod
    def add(u, v):
        return [a + b for a, b in zip(u, v)]

    @staticmethod
    def scale(s, u):
        return [s * a for a in u]


def bch_terms(presentation: LieAlgebraPresentation, v1, v2, order: int = 8):
    """
    BCH 级数的齐次分量 z_1, ..., z_order（z_n 关于 (v1, v2) 是 n 次齐次的）

    输入全是整数/分数/有理数时精确计算（Fraction），否则用浮点数
    """
    if order < 1:
        raise ValueError("BCH 截断阶必须至少为 1")
    n = presentation.dim
    v1 = list(v1)
    v2 = list(v2)
    if len(v1) != n or len(v2) != n:
        raise ValueError(f"系数向量的长度必须等于代数维数 {n}")
    exact = _is_exact(v1 + v2)
    alg = _Algebra(presentation, exact)
    if exact:
        x = [to_fraction(v) for v in v1]
        y = [to_fraction(v) for v in v2]
    else:
        x = [float(v) for v in v1]
        y = [float(v) for v in v2]

    s = alg.add(x, y)
    d = alg.add(x, alg.scale(-1, y))
    half = Fraction(1, 2) if exact else 0.5
    terms = [s]
    for m in range(1, order):
        acc = alg.scale(half, alg.bracket(d, terms[m - 1]))
        p = 1
        while 2 * p <= m:
            weight = _bernoulli_weight(2 * p)
            weight = weight if exact else float(weight)
            inner_sum = [alg.zero] * n
            for ks in _compositions(m, 2 * p):
                nested = s
                for k in reversed(ks):
                    nested = alg.bracket(terms[k - 1], nested)
                inner_sum = alg.add(inner_sum, nested)
            acc = alg.add(acc, alg.scale(weight, inner_sum))
            p += 1
        factor = Fraction(1, m + 1) if exact else 1.0 / (m + 1)
        terms.append(alg.scale(factor, acc))
    return terms


def bch(presentation: LieAlgebraPresentation, v1, v2, order: int = 8):
    """
    截断 BCH 乘积 log(exp(v1) exp(v2))

    代数幂零（类数 c）时自动截断到 c 阶，结果精确
    """
    if order < 1:
        raise ValueError("BCH 截断阶必须至少为 1")
    analysis = lie_algebra_analysis(presentation)
    effective = order
    if analysis.nilpotent:
        effective = max(1, min(order, analysis.nilpotency_class))
        if effective < order:
            logger.debug(f"代数幂零（类数 {analysis.nilpotency_class}），BCH 级数在 {effective} 阶终止")
    terms = bch_terms(presentation, v1, v2, effective)
    total = terms[0]
    for t in terms[1:]:
        total = [a + b for a, b in zip(total, t)]
    return total
