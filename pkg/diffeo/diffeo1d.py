"""
Increasing diffeomorphisms of the real line (or of a validity interval).

Three representations are supported: Affine maps, monotone polynomials and
tabulated monotone maps (PCHIP-interpolated). Operations keep the cheapest
exact representation and fall back to tabulation on 4096 nodes otherwise.
"""

import logging
import math
from abc import ABC, abstractmethod
from typing import Optional, Sequence, Tuple, Union

import numpy as np
from numpy.polynomial import Polynomial
from scipy.interpolate import PchipInterpolator

from signal_core.errors import DomainMismatch, NotInvertible, OutOfDomain, OutOfRange

logger = logging.getLogger(__name__)

SCAN_POINTS = 4096
TABLE_POINTS = 4096
INVERSE_TOLERANCE = 1e-12
# Scan window used for checks on maps valid on the whole line
UNBOUNDED_SCAN_WINDOW = (-1.0, 1.0)

ArrayLike = Union[float, Sequence[float], np.ndarray]
Interval = Tuple[float, float]


class Diffeo1D(ABC):
    """Strictly increasing C^1 map with a validity interval."""

    kind = "diffeo"

    def __init__(self, domain: Interval):
        lo, hi = float(domain[0]), float(domain[1])
        if not lo < hi:
            raise DomainMismatch(f"Empty validity interval [{lo}, {hi}]")
        self.domain: Interval = (lo, hi)

    @abstractmethod
    def _eval(self, x: np.ndarray) -> np.ndarray:
        ...

    @abstractmethod
    def _derivative(self, x: np.ndarray) -> np.ndarray:
        ...

    @abstractmethod
    def inverse(self) -> "Diffeo1D":
        ...

    @property
    def bounded(self) -> bool:
        return math.isfinite(self.domain[0]) and math.isfinite(self.domain[1])

    def _checked(self, x: ArrayLike) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        lo, hi = self.domain
        span = hi - lo if self.bounded else 1.0
        slack = 1e-9 * max(1.0, span)
        if np.any(x < lo - slack) or np.any(x > hi + slack):
            raise OutOfDomain(
                f"{self.kind} evaluated at [{np.min(x):.6g}, {np.max(x):.6g}] "
                f"outside its domain [{lo:.6g}, {hi:.6g}]"
            )
        return np.clip(x, lo, hi)

    def __call__(self, x: ArrayLike) -> np.ndarray:
        return self._eval(self._checked(x))

    def derivative(self, x: ArrayLike) -> np.ndarray:
        return self._derivative(self._checked(x))

    def scan_nodes(self, n: int = SCAN_POINTS) -> np.ndarray:
        lo, hi = self.domain
        if not math.isfinite(lo):
            lo = UNBOUNDED_SCAN_WINDOW[0] if not math.isfinite(hi) else hi - 2.0
        if not math.isfinite(hi):
            hi = max(UNBOUNDED_SCAN_WINDOW[1], lo + 2.0)
        return np.linspace(lo, hi, n)

    def image(self) -> Interval:
        """Image of the validity interval."""
        lo, hi = self.domain
        a = float(self(lo)) if math.isfinite(lo) else -math.inf
        b = float(self(hi)) if math.isfinite(hi) else math.inf
        return a, b

    def to_table(self, n: int = TABLE_POINTS) -> "SampledMonotone":
        if not self.bounded:
            raise DomainMismatch(f"Cannot tabulate {self.kind} on an unbounded interval")
        nodes = np.linspace(self.domain[0], self.domain[1], n)
        return SampledMonotone(nodes, self(nodes))

    def __repr__(self) -> str:
        return f"{type(self).__name__}(domain={self.domain})"


class Affine(Diffeo1D):
    """h(x) = alpha * x - mu with alpha > 0."""

    kind = "affine"

    def __init__(self, alpha: float, mu: float, domain: Interval = (-math.inf, math.inf)):
        super().__init__(domain)
        if not alpha > 0:
            raise NotInvertible(f"Affine slope must be positive, got {alpha}")
        self.alpha = float(alpha)
        self.mu = float(mu)

    def _eval(self, x: np.ndarray) -> np.ndarray:
        return self.alpha * x - self.mu

    def _derivative(self, x: np.ndarray) -> np.ndarray:
        return np.full_like(x, self.alpha, dtype=float)

    def inverse(self) -> "Affine":
        return Affine(1.0 / self.alpha, -self.mu / self.alpha, self.image())

    def as_polynomial(self) -> Polynomial:
        return Polynomial([-self.mu, self.alpha])

    @property
    def is_identity(self) -> bool:
        return self.alpha == 1.0 and self.mu == 0.0 and not self.bounded

    def __repr__(self) -> str:
        return f"Affine(alpha={self.alpha!r}, mu={self.mu!r})"


class PolynomialMonotone(Diffeo1D):
    """
    Polynomial c0 + c1 x + ... + ck x^k, strictly increasing on its domain.

    Monotonicity is checked on a 4096-point scan of the derivative.
    """

    kind = "polynomial"

    def __init__(self, coefficients: Sequence[float], domain: Interval):
        super().__init__(domain)
        if not self.bounded:
            raise DomainMismatch("PolynomialMonotone requires a bounded domain")
        self.poly = Polynomial(np.asarray(coefficients, dtype=float))
        self.dpoly = self.poly.deriv()
        slopes = self.dpoly(self.scan_nodes())
        if not np.all(slopes > 0):
            raise NotInvertible(
                f"Polynomial is not increasing on {self.domain}: min derivative {slopes.min():.6g}"
            )

    @property
    def coefficients(self) -> np.ndarray:
        return self.poly.coef.copy()

    @property
    def degree(self) -> int:
        return self.poly.degree()

    def _eval(self, x: np.ndarray) -> np.ndarray:
        return self.poly(x)

    def _derivative(self, x: np.ndarray) -> np.ndarray:
        return self.dpoly(x)

    def inverse(self) -> "SampledMonotone":
        lo, hi = self.domain
        targets = np.linspace(float(self.poly(lo)), float(self.poly(hi)), TABLE_POINTS)
        roots = bisect_increasing(self.poly, targets, lo, hi)
        roots[0], roots[-1] = lo, hi
        return SampledMonotone(targets, roots)

    def __repr__(self) -> str:
        return f"PolynomialMonotone(coefficients={self.poly.coef.tolist()}, domain={self.domain})"


class SampledMonotone(Diffeo1D):
    """Strictly increasing table interpolated with a monotone PCHIP spline."""

    kind = "sampled"

    def __init__(self, nodes: Sequence[float], values: Sequence[float]):
        nodes = np.asarray(nodes, dtype=float)
        values = np.asarray(values, dtype=float)
        if nodes.shape != values.shape or nodes.ndim != 1 or nodes.size < 2:
            raise DomainMismatch("SampledMonotone needs matching 1D node and value arrays")
        if not (np.all(np.diff(nodes) > 0) and np.all(np.diff(values) > 0)):
            raise NotInvertible("SampledMonotone table must be strictly increasing")
        super().__init__((float(nodes[0]), float(nodes[-1])))
        self.nodes = nodes
        self.values = values
        self._spline = PchipInterpolator(nodes, values, extrapolate=False)
        self._slope = self._spline.derivative()

    def _eval(self, x: np.ndarray) -> np.ndarray:
        return self._spline(x)

    def _derivative(self, x: np.ndarray) -> np.ndarray:
        return self._slope(x)

    def inverse(self) -> "SampledMonotone":
        return SampledMonotone(self.values, self.nodes)

    def __repr__(self) -> str:
        return f"SampledMonotone(n={self.nodes.size}, domain={self.domain})"


def bisect_increasing(fn, targets: np.ndarray, lo: float, hi: float,
                      tol: float = INVERSE_TOLERANCE) -> np.ndarray:
    """Solve fn(x) = t for every target at once by bisection on [lo, hi]."""
    a = np.full(targets.shape, lo, dtype=float)
    b = np.full(targets.shape, hi, dtype=float)
    width = hi - lo
    iterations = int(np.ceil(np.log2(max(width, tol) / tol))) + 1
    for _ in range(iterations):
        mid = 0.5 * (a + b)
        below = fn(mid) < targets
        a = np.where(below, mid, a)
        b = np.where(below, b, mid)
    return 0.5 * (a + b)


def identity() -> Affine:
    return Affine(1.0, 0.0)


def translation(mu: float) -> Affine:
    """x -> x - mu, which shifts signals to the right by mu."""
    return Affine(1.0, mu)


def evaluate(h: Diffeo1D, x: ArrayLike) -> np.ndarray:
    """h(x); raises OutOfDomain off the validity interval."""
    return h(x)


def derivative(h: Diffeo1D, x: ArrayLike) -> np.ndarray:
    return h.derivative(x)


def inverse(h: Diffeo1D) -> Diffeo1D:
    """
    Functional inverse. Affine maps invert exactly; polynomials are inverted by
    bisection to 1e-12 at 4096 nodes; tables swap their axes.
    """
    return h.inverse()


def _preimage_domain(outer: Diffeo1D, inner: Diffeo1D) -> Interval:
    """Largest subinterval of inner's domain that inner maps into outer's domain."""
    lo, hi = inner.domain
    out_lo, out_hi = outer.domain
    img_lo, img_hi = inner.image()
    inner_inv = None
    if math.isfinite(out_lo) and out_lo > img_lo:
        if out_lo >= img_hi:
            raise DomainMismatch("Inner map never reaches the outer map's domain")
        inner_inv = inner.inverse()
        lo = max(lo, float(inner_inv(out_lo)))
    if math.isfinite(out_hi) and out_hi < img_hi:
        if out_hi <= img_lo:
            raise DomainMismatch("Inner map never reaches the outer map's domain")
        inner_inv = inner_inv or inner.inverse()
        hi = min(hi, float(inner_inv(out_hi)))
    if not lo < hi:
        raise DomainMismatch("Composition has an empty domain")
    return lo, hi


def _as_polynomial(h: Diffeo1D) -> Optional[Polynomial]:
    if isinstance(h, PolynomialMonotone):
        return h.poly
    if isinstance(h, Affine):
        return h.as_polynomial()
    return None


def compose(outer: Diffeo1D, inner: Diffeo1D) -> Diffeo1D:
    """
    outer o inner, i.e. x -> outer(inner(x)).

    Identity is neutral, Affine o Affine stays Affine, polynomial/affine mixes
    stay exact polynomials; anything involving a table is tabulated.

    Raises:
        DomainMismatch: If inner never lands in outer's domain
    """
    if isinstance(outer, Affine) and outer.is_identity:
        return inner
    if isinstance(inner, Affine) and inner.is_identity:
        return outer
    domain = _preimage_domain(outer, inner)
    if isinstance(outer, Affine) and isinstance(inner, Affine):
        return Affine(outer.alpha * inner.alpha, outer.alpha * inner.mu + outer.mu, domain)
    p_outer, p_inner = _as_polynomial(outer), _as_polynomial(inner)
    if p_outer is not None and p_inner is not None:
        return PolynomialMonotone(p_outer(p_inner).coef, domain)
    if not (math.isfinite(domain[0]) and math.isfinite(domain[1])):
        raise DomainMismatch("Tabulated composition needs a bounded domain")
    nodes = np.linspace(domain[0], domain[1], TABLE_POINTS)
    return SampledMonotone(nodes, outer(inner(nodes)))


def convex_combo_of_inverses(h1: Diffeo1D, h2: Diffeo1D, alpha: float) -> Diffeo1D:
    """
    Map g whose inverse is alpha * h1^{-1} + (1 - alpha) * h2^{-1}.

    Args:
        h1: First diffeomorphism
        h2: Second diffeomorphism
        alpha: Weight in [0, 1]

    Returns:
        g, exact for affine pairs and tabulated otherwise

    Raises:
        OutOfRange: If alpha is outside [0, 1]
        DomainMismatch: If the inverses share no common interval
    """
    if not 0.0 <= alpha <= 1.0:
        raise OutOfRange(f"Convex weight must lie in [0, 1], got {alpha}")
    if alpha == 1.0:
        return h1
    if alpha == 0.0:
        return h2
    if isinstance(h1, Affine) and isinstance(h2, Affine) and not h1.bounded and not h2.bounded:
        slope = alpha / h1.alpha + (1.0 - alpha) / h2.alpha
        offset = alpha * h1.mu / h1.alpha + (1.0 - alpha) * h2.mu / h2.alpha
        # Inverse of y -> slope * y + offset
        return Affine(1.0 / slope, offset / slope)

    lo1, hi1 = h1.image()
    lo2, hi2 = h2.image()
    lo, hi = max(lo1, lo2), min(hi1, hi2)
    if not (math.isfinite(lo) and math.isfinite(hi)) or not lo < hi:
        raise DomainMismatch(f"Inverse domains do not overlap: [{lo1}, {hi1}] vs [{lo2}, {hi2}]")
    y = np.linspace(lo, hi, TABLE_POINTS)
    mixed = alpha * h1.inverse()(y) + (1.0 - alpha) * h2.inverse()(y)
    return SampledMonotone(mixed, y)


def sup_distance(h1: Diffeo1D, h2: Diffeo1D, nodes: Optional[np.ndarray] = None) -> float:
    """Largest |h1 - h2| on a scan of the shared domain."""
    if nodes is None:
        lo = max(h1.domain[0], h2.domain[0])
        hi = min(h1.domain[1], h2.domain[1])
        if not lo < hi:
            return math.inf
        probe = Affine(1.0, 0.0, (lo, hi)) if math.isfinite(lo) and math.isfinite(hi) else h1
        nodes = probe.scan_nodes(1024)
    return float(np.max(np.abs(h1(nodes) - h2(nodes))))
