"""The round unit sphere S^6 in Im O = R^7.

Tangent vectors are ambient 7-vectors orthogonal to the base point.  The
Levi-Civita connection is the tangential part of the ambient derivative, and
operator fields are compared across fibers by the two-plane rotation that is
the parallel transport along the connecting great circle.

Orientation: a tangent frame (u1, ..., u6) at p is positive iff
det(p, u1, ..., u6) > 0 in the e1..e7 basis.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import AntipodalTransport, DegenerateDirection, NearPole
from .exterior import AlternatingForm

#: default finite-difference steps
H_FIRST = 1e-4
H_NESTED = 1e-3


def sphere_point(v):
    """Normalize a nonzero 7-vector onto S^6."""
    v = np.asarray(v, dtype=float)
    n = np.linalg.norm(v, axis=-1, keepdims=True)
    if np.any(n == 0):
        raise ValueError("the zero vector has no direction")
    return v / n


def random_points(n, seed=None):
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    return sphere_point(rng.normal(size=(n, 7)))


def random_tangent(p, seed=None, n=None):
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    size = (7,) if n is None else (n, 7)
    return project_tangent(p, rng.normal(size=size))


def project_tangent(p, v):
    """v - <v, p> p (broadcasts over leading axes)."""
    p = np.asarray(p, dtype=float)
    v = np.asarray(v, dtype=float)
    return v - np.sum(v * p, axis=-1, keepdims=True) * p


def tangent_projector(p):
    p = np.asarray(p, dtype=float)
    return np.eye(7) - np.outer(p, p)


def geodesic(p, X, t):
    """Great circle through p with initial velocity X, evaluated at t."""
    speed = np.linalg.norm(X)
    if speed < 1e-13:
        raise DegenerateDirection(f"|X| = {speed:.3e}")
    return np.cos(t * speed) * p + np.sin(t * speed) * (X / speed)


def parallel_transport(p, q):
    """Rotation in span(p, q) taking p to q and fixing the orthogonal complement.

    Restricted to T_pS^6 it is the parallel transport along the shorter great arc.
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    c = float(p @ q)
    if c < -1.0 + 1e-10:
        raise AntipodalTransport("transport between antipodal points is not unique")
    s = p + q
    return np.eye(7) - np.outer(s, s) / (1.0 + c) + 2.0 * np.outer(q, p)


@dataclass(frozen=True)
class Frame:
    """Positive orthonormal frame of T_pS^6; ``columns`` is 7x6."""

    base: np.ndarray
    columns: np.ndarray

    def coords(self, v):
        return self.columns.T @ v

    def vector(self, c):
        return self.columns @ c

    def restrict_operator(self, M):
        """6x6 matrix of a 7x7 operator in this frame."""
        return self.columns.T @ M @ self.columns

    def extend_operator(self, m):
        return self.columns @ m @ self.columns.T


def _greedy_complete(vectors, count):
    """Extend orthonormal ``vectors`` by picking, each time, the basis vector with the
    largest residual after projecting out the current span."""
    vecs = list(vectors)
    E = np.eye(7)
    while len(vecs) < count:
        Q = np.array(vecs)
        resid = E - (E @ Q.T) @ Q
        norms = np.linalg.norm(resid, axis=1)
        u = resid[int(np.argmax(norms))]
        vecs.append(u / np.linalg.norm(u))
    return vecs


def tangent_frame(p):
    """Deterministic positive orthonormal frame at p."""
    p = sphere_point(p)
    vecs = _greedy_complete([p], 7)
    # re-orthogonalize once more for 1e-15 level orthonormality
    Q, _ = np.linalg.qr(np.array(vecs).T)
    Q *= np.sign(np.diag(Q))
    Q[:, 0] = p
    if np.linalg.det(Q) < 0:
        Q[:, -1] *= -1
    return Frame(p, Q[:, 1:])


def orientation_sign(p, columns):
    """+1 if the tangent frame ``columns`` (7x6) at p is positive, else -1."""
    return 1 if np.linalg.det(np.column_stack([p, columns])) > 0 else -1


def levi_civita_derivative(F, p, X, h=H_FIRST):
    """Covariant derivative at p along X of a vector field or operator field F.

    F maps a sphere point to an ambient 7-vector (tangent vector field) or a 7x7
    operator.  The field is sampled on the geodesic through p with velocity X;
    operator values are conjugated back to T_pS^6 by parallel transport before
    differencing.  Central differences, O(h^2).
    """
    if not 0 < h <= 1e-3:
        raise ValueError("h must lie in (0, 1e-3]")
    speed = np.linalg.norm(X)
    if speed < 1e-13:
        raise DegenerateDirection(f"|X| = {speed:.3e}")
    p = np.asarray(p, dtype=float)
    xp, xm = geodesic(p, X, h), geodesic(p, X, -h)
    fp, fm = np.asarray(F(xp), dtype=float), np.asarray(F(xm), dtype=float)
    P = tangent_projector(p)
    if fp.ndim == 1:
        return P @ (fp - fm) / (2 * h)
    Tp, Tm = parallel_transport(xp, p), parallel_transport(xm, p)
    diff = Tp @ fp @ Tp.T - Tm @ fm @ Tm.T
    return P @ diff @ P / (2 * h)


class StereographicChart:
    """Stereographic projection from ``pole`` onto pole-perp, coordinates in a
    fixed orthonormal frame of pole-perp.  The antipode of the pole maps to 0."""

    def __init__(self, pole):
        self.pole = sphere_point(pole)
        self.basis = tangent_frame(self.pole).columns  # 7x6

    def forward(self, x):
        x = np.asarray(x, dtype=float)
        if np.linalg.norm(x - self.pole) < 1e-6:
            raise NearPole("point is within 1e-6 of the projection pole")
        return (self.basis.T @ x) / (1.0 - x @ self.pole)

    def inverse(self, u):
        u = np.asarray(u, dtype=float)
        s = u @ u + 1.0
        return (2.0 * (self.basis @ u) + (s - 2.0) * self.pole) / s

    def jacobian(self, u):
        """7x6 derivative of ``inverse`` at u."""
        u = np.asarray(u, dtype=float)
        s = u @ u + 1.0
        Eu = self.basis @ u
        return 2.0 * self.basis / s + np.outer(4.0 * (self.pole - Eu) / s**2, u)


def _chart_form(field, chart, u):
    x = chart.inverse(u)
    return field(x).pullback(chart.jacobian(u))


def exterior_derivative_on_sphere(field, p, h=H_FIRST, pole=None, richardson=False):
    """d of a k-form field on S^6 at p, by central differences in a stereographic chart.

    ``field(x)`` returns an :class:`AlternatingForm` on R^7 whose restriction to
    T_xS^6 is the value of the form at x.  The result is returned as a 7-dimensional
    (k+1)-form at p that vanishes on the normal direction.  The chart pole defaults
    to -p, so that p sits at the chart origin.
    """
    p = sphere_point(p)
    chart = StereographicChart(-p if pole is None else pole)
    u0 = chart.forward(p)
    if np.linalg.norm(u0) > 10.0:
        raise NearPole(f"chart norm {np.linalg.norm(u0):.2f} exceeds 10")

    def derivative(step):
        total = None
        for j in range(6):
            du = np.zeros(6)
            du[j] = step
            diff = (_chart_form(field, chart, u0 + du) - _chart_form(field, chart, u0 - du)) / (2 * step)
            term = AlternatingForm.basis(6, (j,)) ^ diff
            total = term if total is None else total + term
        return total

    d = derivative(h)
    if richardson:
        d = (4.0 * derivative(h / 2) - d) / 3.0
    # coordinates of a tangent vector V at p are J^+ V
    return d.pullback(np.linalg.pinv(chart.jacobian(u0)))


def restrict(form, frame):
    """The 6-dimensional form obtained by evaluating an ambient form on a tangent frame."""
    return form.pullback(frame.columns)
