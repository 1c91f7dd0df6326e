"""Spectral toolkit for substitutions on compact alphabets."""

from .alphabet import (
    Angle, Circle, CircleChar, CircleGroup, Cyclic, CyclicChar, CyclicGroup, ExtNat,
    ExtNatSpace, GOLDEN, INF, PhiContext, Product, ProductChar, ProductGroup, TrivialChar,
    character_angle, compose, eval_unit, exact_sum_is_zero,
)
from .substitution import (
    Constant, ConstantLengthGroup, NonConstantTable, Spin, Translation, TwoSidedWord, apply,
    detect_period, normalize_pseudo_fixed, primitivity_probe, pseudo_fixed_prefix,
)

__version__ = "0.1.0"
