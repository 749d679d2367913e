# -*- coding: utf-8 -*-
"""
folhol - 奇异叶状结构的符号-数值分析工具
精确计算逐点不变量（切空间、纤维、迷向李代数、局部李代数胚数据），
并数值实现路径和乐双淹没、Δ 映射、BCH 乘积与线性化和乐
"""

__version__ = "1.0.0"
TOOL_NAME = "folhol"
