"""
Signal Core Module

Uniform grids, unit-mass densities, CDF/quantile tables, the shared error
hierarchy and the CSV formats used by every transportlab package.
"""

from signal_core.density import (
    CdfTable,
    Image2D,
    Signal1D,
    cdf,
    normalize,
    normalize_image,
    quantile,
    resample_image,
    support_interval,
)
from signal_core.grid import Grid1D, Grid2D

__all__ = [
    'Grid1D', 'Grid2D', 'Signal1D', 'Image2D', 'CdfTable',
    'normalize', 'normalize_image', 'cdf', 'quantile', 'support_interval', 'resample_image',
]
