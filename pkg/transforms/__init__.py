"""
Transforms Module

The 1D cumulative distribution transform, 2D linear optimal transport on the
class P_r, and the Radon-CDT.
"""

from transforms.cdt import apply_diffeo_1d, cdt_forward, cdt_inverse, composition_push, w2_distance
from transforms.maps import TransportMap1D, TransportMap2D

__all__ = [
    'TransportMap1D', 'TransportMap2D',
    'cdt_forward', 'cdt_inverse', 'apply_diffeo_1d', 'composition_push', 'w2_distance',
]
