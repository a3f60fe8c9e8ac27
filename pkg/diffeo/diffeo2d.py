"""
Planar gradient diffeomorphisms: isotropic affine (Ha), symmetric-shear affine
(Hs), the rotated-coordinate family (Hr) and general linear gradients.

Hr maps are built from two increasing profiles f' and g':

    h(x, y) = 1/2 [f'(x + y) + g'(x - y),  f'(x + y) - g'(x - y)]

which is the gradient of phi = 1/2 (f(x + y) + g(x - y)). The family is closed
under composition and inversion, and Ha is a subset of Hs is a subset of Hr.
"""

import logging
from abc import ABC, abstractmethod
from typing import Callable, Tuple, Union

import numpy as np

from diffeo.profiles import AffinePlus, Profile, QuadraticMonotone, compose_profiles
from signal_core.errors import NotInvertible, PreconditionError

logger = logging.getLogger(__name__)

CURL_GRID = 128
CURL_TOLERANCE = 1e-4
HS_TOLERANCE = 1e-9

Field = Callable[[np.ndarray, np.ndarray], Tuple[np.ndarray, np.ndarray]]


class Diffeo2D(ABC):
    """Gradient map of a convex potential on (a subset of) the plane."""

    kind = "diffeo2d"

    @abstractmethod
    def __call__(self, x, y) -> Tuple[np.ndarray, np.ndarray]:
        ...

    @abstractmethod
    def jacobian(self, x, y) -> np.ndarray:
        """Jacobian matrices, shape broadcast(x, y).shape + (2, 2)."""

    @abstractmethod
    def potential(self, x, y) -> np.ndarray:
        ...

    @abstractmethod
    def inverse(self) -> "Diffeo2D":
        ...

    @abstractmethod
    def to_hr(self) -> "Hr":
        ...

    def jacobian_det(self, x, y) -> np.ndarray:
        return np.linalg.det(self.jacobian(x, y))


def _linear_jacobian(matrix: np.ndarray, x, y) -> np.ndarray:
    shape = np.broadcast(np.asarray(x), np.asarray(y)).shape
    return np.broadcast_to(matrix, shape + (2, 2)).copy()


class LinearGradient(Diffeo2D):
    """x -> A x with A symmetric positive definite (gradient of x^T A x / 2)."""

    kind = "linear"

    def __init__(self, matrix):
        matrix = np.asarray(matrix, dtype=float)
        if matrix.shape != (2, 2) or not np.allclose(matrix, matrix.T, atol=HS_TOLERANCE):
            raise PreconditionError("LinearGradient needs a symmetric 2x2 matrix")
        if np.min(np.linalg.eigvalsh(matrix)) <= 0:
            raise NotInvertible("LinearGradient matrix must be positive definite")
        self.matrix = matrix

    def __call__(self, x, y):
        x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
        m = self.matrix
        return m[0, 0] * x + m[0, 1] * y, m[1, 0] * x + m[1, 1] * y

    def jacobian(self, x, y):
        return _linear_jacobian(self.matrix, x, y)

    def potential(self, x, y):
        x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
        m = self.matrix
        return 0.5 * (m[0, 0] * x * x + 2.0 * m[0, 1] * x * y + m[1, 1] * y * y)

    def inverse(self) -> "LinearGradient":
        return LinearGradient(np.linalg.inv(self.matrix))

    def to_hr(self) -> "Hr":
        return Hs.from_matrix(self.matrix, np.zeros(2)).to_hr()

    def __repr__(self) -> str:
        return f"LinearGradient(matrix={self.matrix.tolist()})"


class Ha(Diffeo2D):
    """x -> a x + u with a > 0."""

    kind = "Ha"

    def __init__(self, a: float, u=(0.0, 0.0)):
        if not a > 0:
            raise NotInvertible(f"Ha scale must be positive, got {a}")
        self.a = float(a)
        self.u = np.asarray(u, dtype=float).reshape(2)

    def __call__(self, x, y):
        return self.a * np.asarray(x, dtype=float) + self.u[0], self.a * np.asarray(y, dtype=float) + self.u[1]

    def jacobian(self, x, y):
        return _linear_jacobian(self.a * np.eye(2), x, y)

    def potential(self, x, y):
        x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
        return 0.5 * self.a * (x * x + y * y) + self.u[0] * x + self.u[1] * y

    def inverse(self) -> "Ha":
        return Ha(1.0 / self.a, -self.u / self.a)

    def to_hs(self) -> "Hs":
        return Hs(0.5 * self.a, 0.5 * self.a, self.u[0] + self.u[1], self.u[0] - self.u[1])

    def to_hr(self) -> "Hr":
        return self.to_hs().to_hr()

    def __repr__(self) -> str:
        return f"Ha(a={self.a!r}, u={self.u.tolist()})"


class Hs(Diffeo2D):
    """
    x -> A x + u with A = [[a1 + a2, a1 - a2], [a1 - a2, a1 + a2]] and
    u = 1/2 (b1 + b2, b1 - b2); the quadratic-profile case of Hr with
    f = a1 t^2 + b1 t and g = a2 t^2 + b2 t.
    """

    kind = "Hs"

    def __init__(self, a1: float, a2: float, b1: float = 0.0, b2: float = 0.0):
        if not (a1 > 0 and a2 > 0):
            raise NotInvertible(f"Hs needs a1, a2 > 0, got {a1}, {a2}")
        self.a1, self.a2, self.b1, self.b2 = float(a1), float(a2), float(b1), float(b2)

    @property
    def matrix(self) -> np.ndarray:
        s, d = self.a1 + self.a2, self.a1 - self.a2
        return np.array([[s, d], [d, s]])

    @property
    def shift(self) -> np.ndarray:
        return 0.5 * np.array([self.b1 + self.b2, self.b1 - self.b2])

    @classmethod
    def from_matrix(cls, matrix, shift, tol: float = HS_TOLERANCE) -> "Hs":
        """
        Recover Hs parameters from x -> A x + u.

        Raises:
            PreconditionError: If A is not of the Hs form
        """
        matrix = np.asarray(matrix, dtype=float)
        shift = np.asarray(shift, dtype=float).reshape(2)
        if not hs_membership(matrix, shift, tol):
            raise PreconditionError(f"Matrix {matrix.tolist()} is not in Hs")
        a1 = 0.5 * (matrix[0, 0] + matrix[0, 1])
        a2 = 0.5 * (matrix[0, 0] - matrix[0, 1])
        return cls(a1, a2, shift[0] + shift[1], shift[0] - shift[1])

    def __call__(self, x, y):
        x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
        m, u = self.matrix, self.shift
        return m[0, 0] * x + m[0, 1] * y + u[0], m[1, 0] * x + m[1, 1] * y + u[1]

    def jacobian(self, x, y):
        return _linear_jacobian(self.matrix, x, y)

    def potential(self, x, y):
        s = np.asarray(x, dtype=float) + np.asarray(y, dtype=float)
        d = np.asarray(x, dtype=float) - np.asarray(y, dtype=float)
        return 0.5 * (self.a1 * s * s + self.b1 * s + self.a2 * d * d + self.b2 * d)

    def inverse(self) -> "Hs":
        return Hs(0.25 / self.a1, 0.25 / self.a2, -0.5 * self.b1 / self.a1, -0.5 * self.b2 / self.a2)

    def to_hr(self) -> "Hr":
        return Hr(AffinePlus(2.0 * self.a1, self.b1), AffinePlus(2.0 * self.a2, self.b2))

    def __repr__(self) -> str:
        return f"Hs(a1={self.a1!r}, a2={self.a2!r}, b1={self.b1!r}, b2={self.b2!r})"


class Hr(Diffeo2D):
    """Rotated-coordinate gradient map built from profiles f' and g'."""

    kind = "Hr"

    def __init__(self, f_prime: Profile, g_prime: Profile):
        self.f_prime = f_prime
        self.g_prime = g_prime

    def __call__(self, x, y):
        x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
        fs = self.f_prime(x + y)
        gd = self.g_prime(x - y)
        return 0.5 * (fs + gd), 0.5 * (fs - gd)

    def jacobian(self, x, y):
        x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
        fpp = self.f_prime.derivative(x + y)
        gpp = self.g_prime.derivative(x - y)
        jac = np.empty(np.broadcast(fpp, gpp).shape + (2, 2))
        jac[..., 0, 0] = jac[..., 1, 1] = 0.5 * (fpp + gpp)
        jac[..., 0, 1] = jac[..., 1, 0] = 0.5 * (fpp - gpp)
        return jac

    def jacobian_det(self, x, y):
        # det = f''(x + y) g''(x - y)
        x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
        return self.f_prime.derivative(x + y) * self.g_prime.derivative(x - y)

    def potential(self, x, y):
        x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
        return 0.5 * (self.f_prime.antiderivative(x + y) + self.g_prime.antiderivative(x - y))

    def inverse(self) -> "Hr":
        return Hr(self.f_prime.inverse(), self.g_prime.inverse())

    def to_hr(self) -> "Hr":
        return self

    def __repr__(self) -> str:
        return f"Hr(f_prime={self.f_prime!r}, g_prime={self.g_prime!r})"


def quadratic_bend() -> Hr:
    """Hr with f'(t) = t + 0.1 t^2 (valid for t > -5) and g' = id."""
    return Hr(QuadraticMonotone(0.1, 1.0), AffinePlus(1.0, 0.0))


def eval2(h: Diffeo2D, x, y) -> Tuple[np.ndarray, np.ndarray]:
    return h(x, y)


def jacobian(h: Diffeo2D, x, y) -> np.ndarray:
    return h.jacobian(x, y)


def potential_value(h: Diffeo2D, x, y) -> np.ndarray:
    """Potential phi with grad phi = h, normalized by f(0) = g(0) = 0 for Hr."""
    return h.potential(x, y)


def hr_inverse(h: Diffeo2D) -> Hr:
    """Inverse in Hr form, built from the inverse profiles."""
    return h.to_hr().inverse()


def hr_compose(h1: Diffeo2D, h2: Diffeo2D) -> Hr:
    """h1 o h2 in Hr form, with profiles f1' o f2' and g1' o g2'."""
    r1, r2 = h1.to_hr(), h2.to_hr()
    return Hr(compose_profiles(r1.f_prime, r2.f_prime), compose_profiles(r1.g_prime, r2.g_prime))


def hs_membership(matrix, shift=(0.0, 0.0), tol: float = HS_TOLERANCE) -> bool:
    """True if x -> A x + u has the Hs form (symmetric, equal diagonal, positive definite)."""
    matrix = np.asarray(matrix, dtype=float)
    if matrix.shape != (2, 2):
        return False
    if abs(matrix[0, 1] - matrix[1, 0]) > tol or abs(matrix[0, 0] - matrix[1, 1]) > tol:
        return False
    a1 = 0.5 * (matrix[0, 0] + matrix[0, 1])
    a2 = 0.5 * (matrix[0, 0] - matrix[0, 1])
    return a1 > 0 and a2 > 0


def hs_compose(h1: Hs, h2: Hs) -> Hs:
    return Hs(2.0 * h1.a1 * h2.a1, 2.0 * h1.a2 * h2.a2, 2.0 * h1.a1 * h2.b1 + h1.b1, 2.0 * h1.a2 * h2.b2 + h1.b2)


def hs_convex_combination(h1: Hs, h2: Hs, alpha: float) -> Hs:
    beta = 1.0 - alpha
    return Hs(alpha * h1.a1 + beta * h2.a1, alpha * h1.a2 + beta * h2.a2,
              alpha * h1.b1 + beta * h2.b1, alpha * h1.b2 + beta * h2.b2)


def is_curl_free(field: Union[Diffeo2D, Field], box: Tuple[float, float, float, float],
                 n: int = CURL_GRID, tol: float = CURL_TOLERANCE) -> bool:
    """
    Check dh1/dy = dh2/dx by central differences on an n x n grid of the box.

    Args:
        field: Map (x, y) -> (h1, h2)
        box: (xmin, xmax, ymin, ymax)
        n: Grid size per axis
        tol: Largest admissible curl

    Returns:
        True if the discrete curl stays below tol everywhere
    """
    return max_curl(field, box, n) <= tol


def max_curl(field: Union[Diffeo2D, Field], box: Tuple[float, float, float, float], n: int = CURL_GRID) -> float:
    xmin, xmax, ymin, ymax = box
    X, Y = np.meshgrid(np.linspace(xmin, xmax, n), np.linspace(ymin, ymax, n), indexing="ij")
    step = 1e-5 * max(xmax - xmin, ymax - ymin)
    h1_up, _ = field(X, Y + step)
    h1_down, _ = field(X, Y - step)
    _, h2_right = field(X + step, Y)
    _, h2_left = field(X - step, Y)
    curl = (h1_up - h1_down) / (2 * step) - (h2_right - h2_left) / (2 * step)
    return float(np.max(np.abs(curl)))
