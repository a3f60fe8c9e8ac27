"""
Increasing 1D profiles used as f' and g' in the rotated-coordinate family H_r.

Each profile knows its derivative, its inverse and its antiderivative
(normalized to vanish at 0), which is all H_r needs for evaluation, Jacobians,
inverses and potentials.
"""

import math
from abc import ABC, abstractmethod
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import PchipInterpolator

from signal_core.errors import NotInvertible, OutOfDomain

Interval = Tuple[float, float]


class Profile(ABC):
    """Strictly increasing scalar function with a validity interval."""

    kind = "profile"

    def __init__(self, domain: Interval):
        self.domain: Interval = (float(domain[0]), float(domain[1]))

    @abstractmethod
    def _eval(self, t: np.ndarray) -> np.ndarray:
        ...

    @abstractmethod
    def _slope(self, t: np.ndarray) -> np.ndarray:
        ...

    @abstractmethod
    def _primitive(self, t: np.ndarray) -> np.ndarray:
        ...

    @abstractmethod
    def inverse(self) -> "Profile":
        ...

    def _checked(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        lo, hi = self.domain
        slack = 1e-12 * max(1.0, abs(lo) if math.isfinite(lo) else 1.0, abs(hi) if math.isfinite(hi) else 1.0)
        if np.any(t < lo - slack) or np.any(t > hi + slack):
            raise OutOfDomain(
                f"{self.kind} profile evaluated at [{np.min(t):.6g}, {np.max(t):.6g}] "
                f"outside [{lo:.6g}, {hi:.6g}]"
            )
        return np.clip(t, lo, hi)

    def __call__(self, t) -> np.ndarray:
        return self._eval(self._checked(t))

    def derivative(self, t) -> np.ndarray:
        return self._slope(self._checked(t))

    def antiderivative(self, t) -> np.ndarray:
        """Integral of the profile from 0 to t."""
        return self._primitive(self._checked(t))


class AffinePlus(Profile):
    """t -> a t + b with a > 0."""

    kind = "affine_plus"

    def __init__(self, a: float, b: float):
        super().__init__((-math.inf, math.inf))
        if not a > 0:
            raise NotInvertible(f"AffinePlus slope must be positive, got {a}")
        self.a = float(a)
        self.b = float(b)

    def _eval(self, t):
        return self.a * t + self.b

    def _slope(self, t):
        return np.full_like(t, self.a, dtype=float)

    def _primitive(self, t):
        return 0.5 * self.a * t ** 2 + self.b * t

    def inverse(self) -> "AffinePlus":
        return AffinePlus(1.0 / self.a, -self.b / self.a)

    def __repr__(self) -> str:
        return f"AffinePlus(a={self.a!r}, b={self.b!r})"


class QuadraticMonotone(Profile):
    """
    t -> a t^2 + b t + c on the increasing branch t > -b / (2a).

    Raises:
        NotInvertible: If the domain crosses the vertex
    """

    kind = "quadratic"

    def __init__(self, a: float, b: float, c: float = 0.0, domain: Optional[Interval] = None):
        if a < 0:
            raise NotInvertible(f"QuadraticMonotone needs a >= 0, got {a}")
        if a == 0 and not b > 0:
            raise NotInvertible("A linear QuadraticMonotone needs b > 0")
        vertex = -b / (2.0 * a) if a > 0 else -math.inf
        if domain is None:
            domain = (vertex, math.inf)
        if domain[0] < vertex - 1e-12 * max(1.0, abs(vertex)):
            raise NotInvertible(f"Domain {domain} crosses the vertex at {vertex:.6g}")
        super().__init__(domain)
        self.a, self.b, self.c = float(a), float(b), float(c)

    def _eval(self, t):
        return (self.a * t + self.b) * t + self.c

    def _slope(self, t):
        return 2.0 * self.a * t + self.b

    def _primitive(self, t):
        return self.a * t ** 3 / 3.0 + 0.5 * self.b * t ** 2 + self.c * t

    def inverse(self) -> "QuadraticRoot":
        lo, hi = self.domain
        image = (
            float(self._eval(np.asarray(lo))) if math.isfinite(lo) else -math.inf,
            float(self._eval(np.asarray(hi))) if math.isfinite(hi) else math.inf,
        )
        return QuadraticRoot(self.a, self.b, self.c, image)

    def __repr__(self) -> str:
        return f"QuadraticMonotone(a={self.a!r}, b={self.b!r}, c={self.c!r}, domain={self.domain})"


class QuadraticRoot(Profile):
    """Inverse of QuadraticMonotone: s -> t with a t^2 + b t + c = s on the increasing branch."""

    kind = "quadratic_root"

    def __init__(self, a: float, b: float, c: float = 0.0, domain: Optional[Interval] = None):
        self.a, self.b, self.c = float(a), float(b), float(c)
        floor = self.c - self.b ** 2 / (4.0 * self.a) if self.a > 0 else -math.inf
        if domain is None:
            domain = (floor, math.inf)
        if domain[0] < floor - 1e-12 * max(1.0, abs(floor)):
            raise NotInvertible(f"Domain {domain} reaches below the quadratic minimum {floor:.6g}")
        super().__init__(domain)

    def _root(self, s):
        shifted = s - self.c
        disc = np.sqrt(np.maximum(self.b ** 2 + 4.0 * self.a * shifted, 0.0))
        # Cancellation-free form of (-b + disc) / (2a)
        return 2.0 * shifted / (self.b + disc)

    def _eval(self, s):
        return self._root(s)

    def _slope(self, s):
        return 1.0 / np.sqrt(self.b ** 2 + 4.0 * self.a * (s - self.c))

    def _primitive(self, s):
        def inner(t):
            return 2.0 * self.a * t ** 3 / 3.0 + 0.5 * self.b * t ** 2
        return inner(self._root(s)) - inner(self._root(np.asarray(0.0)))

    def inverse(self) -> QuadraticMonotone:
        lo, hi = self.domain
        domain = (
            float(self._root(np.asarray(lo))) if math.isfinite(lo) else -math.inf,
            float(self._root(np.asarray(hi))) if math.isfinite(hi) else math.inf,
        )
        return QuadraticMonotone(self.a, self.b, self.c, domain)

    def __repr__(self) -> str:
        return f"QuadraticRoot(a={self.a!r}, b={self.b!r}, c={self.c!r}, domain={self.domain})"


class SampledProfile(Profile):
    """Strictly increasing table interpolated with PCHIP."""

    kind = "sampled"

    def __init__(self, nodes: Sequence[float], values: Sequence[float]):
        nodes = np.asarray(nodes, dtype=float)
        values = np.asarray(values, dtype=float)
        if nodes.shape != values.shape or nodes.size < 2:
            raise NotInvertible("SampledProfile needs matching node and value arrays")
        if not (np.all(np.diff(nodes) > 0) and np.all(np.diff(values) > 0)):
            raise NotInvertible("SampledProfile table must be strictly increasing")
        super().__init__((float(nodes[0]), float(nodes[-1])))
        self.nodes, self.values = nodes, values
        self._spline = PchipInterpolator(nodes, values, extrapolate=False)
        self._dspline = self._spline.derivative()
        self._ispline = self._spline.antiderivative()
        anchor = min(max(0.0, nodes[0]), nodes[-1])
        self._offset = float(self._ispline(anchor))

    def _eval(self, t):
        return self._spline(t)

    def _slope(self, t):
        return self._dspline(t)

    def _primitive(self, t):
        return self._ispline(t) - self._offset

    def inverse(self) -> "SampledProfile":
        return SampledProfile(self.values, self.nodes)

    def __repr__(self) -> str:
        return f"SampledProfile(n={self.nodes.size}, domain={self.domain})"


class ComposedProfile(Profile):
    """t -> outer(inner(t)), kept symbolic so inverses and compositions stay exact."""

    kind = "composed"

    def __init__(self, outer: Profile, inner: Profile):
        super().__init__(inner.domain)
        self.outer, self.inner = outer, inner

    def _eval(self, t):
        return self.outer(self.inner(t))

    def _slope(self, t):
        return self.outer.derivative(self.inner(t)) * self.inner.derivative(t)

    def _primitive(self, t):
        integrate = np.vectorize(lambda end: quad(lambda s: float(self._eval(np.asarray(s))), 0.0, end)[0])
        return integrate(t)

    def inverse(self) -> "ComposedProfile":
        return ComposedProfile(self.inner.inverse(), self.outer.inverse())

    def __repr__(self) -> str:
        return f"ComposedProfile(outer={self.outer!r}, inner={self.inner!r})"


def compose_profiles(outer: Profile, inner: Profile) -> Profile:
    """outer o inner; affine pairs collapse to a single AffinePlus."""
    if isinstance(outer, AffinePlus) and isinstance(inner, AffinePlus):
        return AffinePlus(outer.a * inner.a, outer.a * inner.b + outer.b)
    return ComposedProfile(outer, inner)
