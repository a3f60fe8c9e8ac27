"""
Two-class Fisher linear discriminant.
"""

import logging
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from signal_core.errors import DimensionMismatch, PreconditionError

logger = logging.getLogger(__name__)

RIDGE_FACTOR = 1e-6
MIN_CLASS_SAMPLES = 2


@dataclass(frozen=True, eq=False)
class LdaModel:
    """
    Projection direction (unit norm) and the midpoint threshold between the
    projected class means. Samples projecting above the threshold are
    assigned to class b.
    """
    direction: np.ndarray
    threshold: float
    mean_a: np.ndarray
    mean_b: np.ndarray
    ridge: float
    degenerate: bool = False

    def project(self, features: np.ndarray) -> np.ndarray:
        return np.asarray(features, dtype=float) @ self.direction

    def predict(self, features: np.ndarray) -> np.ndarray:
        """1 for class b, 0 for class a."""
        return (self.project(features) > self.threshold).astype(int)

    def accuracy(self, features_a: np.ndarray, features_b: np.ndarray) -> float:
        correct = np.sum(self.predict(features_a) == 0) + np.sum(self.predict(features_b) == 1)
        return float(correct) / (len(features_a) + len(features_b))


def _as_matrix(features, name: str) -> np.ndarray:
    X = np.asarray(features, dtype=float)
    if X.ndim == 1:
        X = X[None, :]
    if X.ndim != 2 or X.size == 0:
        raise DimensionMismatch(f"{name} must be a non-empty list of vectors, got shape {X.shape}")
    return X


def lda_fit(features_a, features_b) -> LdaModel:
    """
    Fit the Fisher discriminant between two classes.

    The direction solves (S_w + lambda I) w = mean_b - mean_a with the pooled
    within-class scatter S_w and lambda = 1e-6 * trace(S_w) / dim (1 when the
    scatter vanishes). Identical class means give a degenerate model along the
    first axis.

    Args:
        features_a: Samples of class a, one vector per row
        features_b: Samples of class b

    Returns:
        LdaModel

    Raises:
        DimensionMismatch: If the inputs are empty or their dimensions differ
        PreconditionError: If a class has fewer than two samples
    """
    A = _as_matrix(features_a, "features_a")
    B = _as_matrix(features_b, "features_b")
    for name, X in (("features_a", A), ("features_b", B)):
        if X.shape[0] < MIN_CLASS_SAMPLES:
            raise PreconditionError(f"{name} needs at least {MIN_CLASS_SAMPLES} samples, got {X.shape[0]}")
    if A.shape[1] != B.shape[1]:
        raise DimensionMismatch(f"Feature dimensions differ: {A.shape[1]} vs {B.shape[1]}")
    dim = A.shape[1]

    mean_a, mean_b = A.mean(axis=0), B.mean(axis=0)
    centred_a, centred_b = A - mean_a, B - mean_b
    scatter = centred_a.T @ centred_a + centred_b.T @ centred_b
    trace = float(np.trace(scatter))
    ridge = RIDGE_FACTOR * trace / dim if trace > 0 else 1.0

    difference = mean_b - mean_a
    scale = max(1.0, float(np.linalg.norm(mean_a)), float(np.linalg.norm(mean_b)))
    if float(np.linalg.norm(difference)) <= 1e-12 * scale:
        logger.warning("LDA class means coincide; returning a degenerate model")
        direction = np.zeros(dim)
        direction[0] = 1.0
        degenerate = True
    else:
        direction = linalg.solve(scatter + ridge * np.eye(dim), difference, assume_a="pos")
        direction /= np.linalg.norm(direction)
        degenerate = False

    threshold = 0.5 * float(direction @ mean_a + direction @ mean_b)
    logger.debug(f"LDA fit on {A.shape[0]}+{B.shape[0]} samples, dim {dim}, ridge {ridge:.3g}")
    return LdaModel(direction=direction, threshold=threshold, mean_a=mean_a, mean_b=mean_b,
                    ridge=ridge, degenerate=degenerate)
