"""
OT Oracle Module

Independent references for checking the transforms: closed-form 1D W2 through
quantile functions and an exact LP solver for small 2D problems.
"""

from ot_oracle.kantorovich import CouplingPlan, barycentric_map, kantorovich_lp_2d
from ot_oracle.quantile import w2_quantile_oracle

__all__ = ['CouplingPlan', 'kantorovich_lp_2d', 'barycentric_map', 'w2_quantile_oracle']
