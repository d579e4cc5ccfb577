"""Cayley almost complex structures J^A_x = A^-1 R_{A(x)} A on S^6.

For A in SO(7) the operator A^T R_{Ax} A kills x and preserves T_xS^6, so it is
already the fiber operator (zero on the normal line).  It is linear in x, which
makes batched evaluation a single contraction.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import octonion
from .errors import DegenerateDirection
from .sphere import (
    H_FIRST,
    geodesic,
    parallel_transport,
    project_tangent,
    random_points,
    sphere_point,
    tangent_projector,
)


@dataclass(frozen=True, eq=False)
class CayleyStructure:
    """The section x -> A^-1 R_{A(x)} A of the twistor bundle."""

    rotation: np.ndarray
    _operators: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        A = np.array(self.rotation, dtype=float)
        octonion.check_rotation(A, tol=1e-9)
        A.flags.writeable = False
        object.__setattr__(self, "rotation", A)
        # M[k] = A^T R_{A e_k} A, so that J_x = sum_k x_k M[k]
        RA = np.tensordot(A.T, octonion.RIGHT, axes=(1, 0))  # RA[k] = R_{A e_k}
        M = np.einsum("ai,kab,bj->kij", A, RA, A)
        M.flags.writeable = False
        object.__setattr__(self, "_operators", M)

    @classmethod
    def standard(cls):
        return cls(np.eye(7))

    def evaluate(self, x):
        """Fiber operator(s) at x; x has shape (7,) or (N, 7)."""
        return np.tensordot(np.asarray(x, dtype=float), self._operators, axes=(-1, 0))

    def derivative(self, X):
        """Ambient derivative of x -> J_x in direction X (the closed form A^-1 R_{AX} A)."""
        return self.evaluate(X)

    def to_json(self):
        return {"rotation": self.rotation.ravel().tolist(), "convention": octonion.CONVENTION}

    @classmethod
    def from_json(cls, data):
        if data.get("convention") != octonion.CONVENTION:
            raise ValueError(f"unsupported convention tag {data.get('convention')!r}")
        rot = np.asarray(data["rotation"], dtype=float)
        if rot.size != 49:
            raise ValueError("rotation must have 49 entries")
        return cls(rot.reshape(7, 7))


class VariableCayleySection:
    """x -> A(x)^-1 R_{A(x) x} A(x) for an x-dependent rotation field A.

    Pointwise a Cayley operator, hence a section of the twistor bundle, but not a
    Cayley structure when A varies; used as a negative control.
    """

    def __init__(self, rotation_field):
        self.rotation_field = rotation_field

    def evaluate(self, x):
        x = np.asarray(x, dtype=float)
        if x.ndim == 2:
            return np.array([self.evaluate(xi) for xi in x])
        A = self.rotation_field(x)
        return A.T @ octonion.right_mul_operator(A @ x) @ A


def evaluate(S, x):
    return S.evaluate(x)


def fiber_operator_residuals(p, J):
    """Invariant residuals of a 7x7 fiber operator at p.

    Returns a dict with tangency (|Jp| and |p^T J|), square (|J^2 + P|),
    skew (|J + J^T|) and the orientation sign of the J-adapted frame.
    """
    p = np.asarray(p, dtype=float)
    P = tangent_projector(p)
    from .twistor import adapted_frame  # local import, twistor depends on this module

    return {
        "tangency": float(max(np.max(np.abs(J @ p)), np.max(np.abs(p @ J)))),
        "square": float(np.max(np.abs(J @ J + P))),
        "skew": float(np.max(np.abs(J + J.T))),
        "orientation": adapted_frame(p, J)[1],
    }


def operator_distance(J1, J2):
    """Largest singular value of J1 - J2 (broadcasts over leading axes)."""
    return np.linalg.norm(np.asarray(J1) - np.asarray(J2), ord=2, axis=(-2, -1))


@dataclass(frozen=True)
class EqualityReport:
    equal: bool
    max_difference: float
    worst_point: np.ndarray

    def __bool__(self):
        return self.equal


def structures_equal(S1, S2, samples=100, tol=1e-8, seed=0):
    """Compare two sections at ``samples`` seeded random points by operator norm."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    xs = random_points(samples, seed)
    diff = operator_distance(S1.evaluate(xs), S2.evaluate(xs))
    i = int(np.argmax(diff))
    return EqualityReport(bool(diff[i] <= tol), float(diff[i]), xs[i])


def nabla_J(S, p, X, Y, h=H_FIRST):
    """(nabla_X J) Y at p.

    Y is extended by parallel transport along the geodesic in direction X, so
    nabla_X Y = 0 at p and (nabla_X J) Y is the tangential part of the derivative
    of J(Y~) along the geodesic.
    """
    p = np.asarray(p, dtype=float)
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    if np.linalg.norm(X) < 1e-13:
        raise DegenerateDirection("|X| too small")
    xp, xm = geodesic(p, X, h), geodesic(p, X, -h)
    yp = parallel_transport(p, xp) @ Y
    ym = parallel_transport(p, xm) @ Y
    diff = S.evaluate(xp) @ yp - S.evaluate(xm) @ ym
    return project_tangent(p, diff / (2 * h))


def nabla_J_closed_form(S, p, X, Y):
    """Exact (nabla_X J) Y = P_p (A^-1 R_{AX} A) Y for a Cayley structure."""
    return project_tangent(p, S.derivative(X) @ Y)


@dataclass(frozen=True)
class NearlyKahlerReport:
    samples: int
    max_residual: float  # max |(nabla_X J) X| / |X|^2
    strictness: float  # max |(nabla_X J) Y| over mixed unit pairs
    tol: float

    @property
    def passed(self):
        return self.max_residual <= self.tol and self.strictness > 0.0

    def __bool__(self):
        return self.passed


def is_nearly_kahler(S, samples=500, h=H_FIRST, tol=5e-7, seed=0):
    """Sample (nabla_X J) X over random unit (p, X); report residual and a strictness witness."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = np.random.default_rng(seed)
    worst, strict = 0.0, 0.0
    for _ in range(samples):
        p = sphere_point(rng.normal(size=7))
        X = project_tangent(p, rng.normal(size=7))
        Y = project_tangent(p, rng.normal(size=7))
        X /= np.linalg.norm(X)
        Y /= np.linalg.norm(Y)
        worst = max(worst, float(np.linalg.norm(nabla_J(S, p, X, X, h))))
        strict = max(strict, float(np.linalg.norm(nabla_J(S, p, X, Y, h))))
    return NearlyKahlerReport(samples, worst, strict, tol)
