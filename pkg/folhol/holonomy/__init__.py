# -*- coding: utf-8 -*-
"""
和乐子包
路径和乐双浸没、双截面、Δ 映射、BCH 乘积、线性化和乐与各类探针
"""
from folhol.holonomy.bisubmersion import (
    Bisection,
    CarriedDiffeo,
    DeltaResult,
    HolonomyConfig,
    LinearHolonomy,
    LocalGroupElement,
    PathHolonomyBiSubmersion,
    bisubmersion_target,
    carried_diffeo,
    carried_diffeo_grid,
    delta_map,
    linear_holonomy,
    tensor_grid,
    vertical_lift,
)
from folhol.holonomy.bch import bch, bch_terms
from folhol.holonomy.probes import (
    DiscretenessResult,
    KernelProbeResult,
    MorphismResult,
    WitnessCheckResult,
    discreteness_linear_probe,
    exponential_condition_witness_check,
    face_grid,
    kernel_linear_probe,
    morphism_check,
)

__all__ = [
    'Bisection',
    'CarriedDiffeo',
    'DeltaResult',
    'HolonomyConfig',
    'LinearHolonomy',
    'LocalGroupElement',
    'PathHolonomyBiSubmersion',
    'bisubmersion_target',
    'carried_diffeo',
    'carried_diffeo_grid',
    'delta_map',
    'linear_holonomy',
    'tensor_grid',
    'vertical_lift',
    'bch',
    'bch_terms',
    'DiscretenessResult',
    'KernelProbeResult',
    'MorphismResult',
    'WitnessCheckResult',
    'discreteness_linear_probe',
    'exponential_condition_witness_check',
    'face_grid',
    'kernel_linear_probe',
    'morphism_check',
]
