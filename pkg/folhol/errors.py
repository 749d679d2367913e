# -*- coding: utf-8 -*-
"""
异常定义模块
所有分析错误都继承自 FolholError，命令行在顶层统一捕获并写入报告
"""


class FolholError(Exception):
    """folhol 分析错误基类"""
    pass


class DimensionError(FolholError):
    """变量个数、秩或图卡维数不匹配"""
    pass


class TangencyError(FolholError):
    """切片相切证书失败"""

    def __init__(self, message, generator=None, component=None):
        super().__init__(message)
        self.generator = generator
        self.component = component


class DependentFrameError(FolholError):
    """标架在 I_L F 模下线性相关"""

    def __init__(self, message, relation=None):
        super().__init__(message)
        self.relation = relation


class NonInvolutiveError(FolholError):
    """对合性无法确认（Unknown）时拒绝计算迷向代数"""
    pass


class InconsistentSystemError(FolholError):
    """精确线性方程组无解"""
    pass


class NotAZeroError(FolholError):
    """在向量场的非零点处请求线性化"""
    pass


class FlowDivergenceError(FolholError):
    """积分步数超限或离开包围盒"""

    def __init__(self, message, last_time=None, last_state=None):
        super().__init__(message)
        self.last_time = last_time
        self.last_state = last_state


class RankDeficiencyError(FolholError):
    """竖直提升残差超过容差"""

    def __init__(self, message, singular_values=None):
        super().__init__(message)
        self.singular_values = singular_values


class ValidityBoxError(FolholError):
    """参数超出有效盒，或 Δ 的目标点漂移过大"""
    pass


class FixedPointError(FolholError):
    """目标映射不固定基点"""
    pass


class InvarianceError(FolholError):
    """雅可比矩阵不保持叶切空间"""
    pass


class MembershipError(FolholError):
    """向量场不属于 I_x F_S"""

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class DSLSyntaxError(FolholError):
    """叶状结构文档解析错误，带行列号"""

    def __init__(self, message, line=None, column=None):
        self.message = message
        self.line = line
        self.column = column
        if line is not None:
            super().__init__(f"{line}:{column}: {message}")
        else:
            super().__init__(message)
