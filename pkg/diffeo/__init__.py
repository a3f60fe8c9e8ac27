"""
Diffeomorphism Module

Increasing 1D diffeomorphisms (affine, polynomial, tabulated), named subgroups
and their samplers, and the planar gradient families Ha, Hs and Hr.
"""

from diffeo.diffeo1d import (
    Affine,
    Diffeo1D,
    PolynomialMonotone,
    SampledMonotone,
    compose,
    convex_combo_of_inverses,
    inverse,
)
from diffeo.diffeo2d import Diffeo2D, Ha, Hr, Hs, LinearGradient, hr_compose, hr_inverse
from diffeo.groups import GroupKind, GroupSpec1D, group_membership

__all__ = [
    'Diffeo1D', 'Affine', 'PolynomialMonotone', 'SampledMonotone',
    'compose', 'inverse', 'convex_combo_of_inverses',
    'GroupKind', 'GroupSpec1D', 'group_membership',
    'Diffeo2D', 'Ha', 'Hs', 'Hr', 'LinearGradient', 'hr_compose', 'hr_inverse',
]
