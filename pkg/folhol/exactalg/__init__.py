# -*- coding: utf-8 -*-
"""
精确代数子包
有理数多元多项式、自由模元素、精确线性代数和子模 Gröbner 基
"""
from folhol.exactalg.poly import (
    Poly,
    PolyVector,
    Rational,
    evaluate,
    format_poly,
    format_vector,
    make_ring,
    partial_derivative,
    poly_arith,
    rational_point,
    to_fraction,
    to_rational,
)
from folhol.exactalg.groebner import (
    ModuleGB,
    combination,
    ideal_times_module,
    is_member,
    lift,
    linear_relation_space,
    module_groebner,
    normal_form,
    point_module_groebner,
)

__all__ = [
    'Poly',
    'PolyVector',
    'Rational',
    'evaluate',
    'format_poly',
    'format_vector',
    'make_ring',
    'partial_derivative',
    'poly_arith',
    'rational_point',
    'to_fraction',
    'to_rational',
    'ModuleGB',
    'combination',
    'ideal_times_module',
    'is_member',
    'lift',
    'linear_relation_space',
    'module_groebner',
    'normal_form',
    'point_module_groebner',
]
