"""
Rejection sampler for random increasing polynomial diffeomorphisms on [0, 1].
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from diffeo.diffeo1d import SCAN_POINTS, PolynomialMonotone
from signal_core.errors import ConfigError, SamplingExhausted

logger = logging.getLogger(__name__)

MIN_ACCEPTANCE_RATE = 1e-4
BATCH_SIZE = 256


@dataclass(frozen=True)
class SupportConstraint:
    """
    Accept h only if h^{-1}(support) stays inside domain with a margin, so the
    generated signals keep their support on the grid.
    """
    support: Tuple[float, float]
    domain: Tuple[float, float] = (0.0, 1.0)
    margin: float = 0.01


def default_boxes(degree: int) -> List[Tuple[float, float]]:
    """Coefficient boxes centred on the identity map."""
    boxes = [(-0.1, 0.1), (0.6, 1.4)]
    boxes.extend((-0.25, 0.25) for _ in range(2, degree + 1))
    return boxes[: degree + 1]


def sample_polynomial_diffeos(
    degree: int,
    count: int,
    seed: int,
    constraint: SupportConstraint,
    boxes: Optional[Sequence[Tuple[float, float]]] = None,
) -> List[PolynomialMonotone]:
    """
    Draw count increasing polynomials of the given degree.

    Coefficients are uniform in their boxes; a draw is kept when its derivative
    is positive on a 4096-point scan of the domain and it maps the domain over
    the constrained support.

    Args:
        degree: Polynomial degree (>= 1)
        count: Number of accepted samples
        seed: Seed for numpy's default generator
        constraint: Support constraint on the inverse images
        boxes: Optional (low, high) per coefficient, lowest order first

    Returns:
        List of PolynomialMonotone, deterministic for a fixed seed

    Raises:
        SamplingExhausted: If the acceptance rate drops below 1/10000
    """
    if degree < 1:
        raise ConfigError(f"Polynomial degree must be at least 1, got {degree}")
    boxes = list(boxes) if boxes is not None else default_boxes(degree)
    if len(boxes) != degree + 1:
        raise ConfigError(f"Expected {degree + 1} coefficient boxes, got {len(boxes)}")

    rng = np.random.default_rng(seed)
    lows = np.array([b[0] for b in boxes], dtype=float)
    highs = np.array([b[1] for b in boxes], dtype=float)
    a, b = constraint.domain
    s0, s1 = constraint.support
    scan = np.linspace(a, b, SCAN_POINTS)
    # Derivative basis: k * x^(k-1) for k = 1..degree
    powers = np.arange(1, degree + 1)
    slope_basis = powers[None, :] * scan[:, None] ** (powers[None, :] - 1)

    accepted: List[PolynomialMonotone] = []
    draws = 0
    while len(accepted) < count:
        coefs = rng.uniform(lows, highs, size=(BATCH_SIZE, degree + 1))
        draws += BATCH_SIZE
        slopes = coefs[:, 1:] @ slope_basis.T
        at_a = np.polynomial.polynomial.polyval(a, coefs.T)
        at_b = np.polynomial.polynomial.polyval(b, coefs.T)
        ok = (
            np.all(slopes > 0, axis=1)
            & (at_a <= s0 - constraint.margin)
            & (at_b >= s1 + constraint.margin)
        )
        for row in coefs[ok]:
            if len(accepted) == count:
                break
            accepted.append(PolynomialMonotone(row, constraint.domain))
        rate = len(accepted) / draws
        if draws >= 1.0 / MIN_ACCEPTANCE_RATE and rate < MIN_ACCEPTANCE_RATE:
            raise SamplingExhausted(
                f"Acceptance rate {rate:.2e} below {MIN_ACCEPTANCE_RATE:.0e} after {draws} draws"
            )
    logger.info(f"Sampled {count} degree-{degree} diffeomorphisms in {draws} draws")
    return accepted
