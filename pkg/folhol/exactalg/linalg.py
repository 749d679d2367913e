# -*- coding: utf-8 -*-
"""
有理数域上的精确线性代数
所有矩阵运算交给 sympy.Matrix（元素为 sympy.Rational），出入口统一为 QQ 元素
"""
from sympy import Matrix, Rational as SymRational
from sympy.polys.domains import QQ

from folhol.errors import InconsistentSystemError
from folhol.exactalg.poly import to_rational


def to_matrix(rows, ncols=None):
    """QQ 元素的二维列表 -> sympy.Matrix"""
    rows = [list(r) for r in rows]
    if not rows:
        return Matrix.zeros(0, ncols or 0)
    return Matrix([[QQ.to_sympy(to_rational(v)) for v in r] for r in rows])


def from_sym(value):
    return QQ.from_sympy(SymRational(value))


def matrix_rows(m):
    """sympy.Matrix -> QQ 元素的二维元组"""
    return tuple(tuple(from_sym(m[i, j]) for j in range(m.cols)) for i in range(m.rows))


def rank(rows, ncols=None):
    m = to_matrix(rows, ncols)
    if m.rows == 0 or m.cols == 0:
        return 0
    return m.rank()


def rref(rows, ncols=None):
    """
    行最简形

    Returns:
        (行最简形的行元组, 主元列下标元组)
    """
    m = to_matrix(rows, ncols)
    if m.rows == 0:
        return (), ()
    reduced, pivots = m.rref()
    return matrix_rows(reduced), tuple(pivots)


def nullspace(rows, ncols):
    """
    右零空间 {c : M c = 0} 的一组基（按 sympy 的自由变量顺序，确定性）

    Args:
        rows: 矩阵的行
        ncols: 列数（行为空时用于确定维数）

    Returns:
        QQ 元组的列表
    """
    rows = [list(r) for r in rows]
    if not rows or all(all(not to_rational(v) for v in r) for r in rows):
        return [tuple(QQ.one if i == j else QQ.zero for i in range(ncols)) for j in range(ncols)]
    m = to_matrix(rows)
    basis = []
    for vec in m.nullspace():
        basis.append(tuple(from_sym(vec[i]) for i in range(vec.rows)))
    return basis


def solve(rows, rhs):
    """
    求解 M c = rhs 的一个精确解（有多解时取自由变量为零的解）

    Raises:
        InconsistentSystemError: 方程组无解
    """
    ncols = len(rows[0]) if rows else 0
    if ncols == 0:
        if any(to_rational(b) for b in rhs):
            raise InconsistentSystemError("无未知量但右端非零")
        return ()
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    reduced, pivots = rref(aug)
    if ncols in pivots:
        raise InconsistentSystemError("精确线性方程组无解")
    solution = [QQ.zero] * ncols
    for row, piv in zip(reduced, pivots):
        solution[piv] = row[ncols]
    return tuple(solution)


def inverse(rows):
    m = to_matrix(rows)
    return matrix_rows(m.inv())


def identity(n):
    return tuple(tuple(QQ.one if i == j else QQ.zero for j in range(n)) for i in range(n))


def matmul(a, b):
    return matrix_rows(to_matrix(a) * to_matrix(b))
