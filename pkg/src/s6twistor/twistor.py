"""The twistor bundle Z+(S^6, g0) and the one-parameter families of Cayley
structures through its points.

A twistor point is (p, J_p) with J_p an orthogonal complex structure on T_pS^6
inducing the standard orientation.  Every such point lies on the circle of Cayley
structures  phi -> J^{lambda(phi) A},  where A is a rotation about p carrying J_p
to the standard structure and lambda(phi) = cos(phi) + sin(phi) J_std on T_pS^6.
lambda(2 pi / 3) is central in SU(3) and therefore in G2, which makes the family
periodic with period 2 pi / 3.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import least_squares, minimize_scalar

from . import octonion
from .cayley import CayleyStructure, operator_distance, structures_equal
from .errors import NotThroughPoint, OrientationMismatch
from .sphere import (
    H_FIRST,
    levi_civita_derivative,
    random_points,
    sphere_point,
    tangent_frame,
    tangent_projector,
)

PERIOD = 2.0 * np.pi / 3.0
CONVENTION = "lambda-left-v1"


def reduce_phi(phi):
    """Family parameter reduced into [0, 2 pi / 3)."""
    r = float(np.mod(phi, PERIOD))
    return 0.0 if r >= PERIOD else r


def phi_distance(a, b):
    """Distance between two family parameters on the circle of length 2 pi / 3."""
    d = abs(reduce_phi(a) - reduce_phi(b))
    return min(d, PERIOD - d)


def adapted_frame(p, J):
    """J-adapted orthonormal frame (u1, Ju1, u2, Ju2, u3, Ju3) of T_pS^6 and its orientation sign.

    Each u_{k+1} is the standard basis vector with the largest residual after
    projecting out span(p, u1, Ju1, ..., u_k, Ju_k), normalized.
    """
    p = np.asarray(p, dtype=float)
    J = np.asarray(J, dtype=float)
    E = np.eye(7)
    span = [p]
    for _ in range(3):
        Q = np.array(span)
        resid = E - (E @ Q.T) @ Q
        u = resid[int(np.argmax(np.linalg.norm(resid, axis=1)))]
        u /= np.linalg.norm(u)
        v = J @ u
        v -= np.array(span).T @ (np.array(span) @ v)
        v /= np.linalg.norm(v)
        span += [u, v]
    cols = np.array(span[1:]).T
    sign = 1 if np.linalg.det(np.column_stack([p, cols])) > 0 else -1
    return cols, sign


@dataclass(frozen=True, eq=False)
class TwistorPoint:
    point: np.ndarray
    operator: np.ndarray

    def __post_init__(self):
        p = np.array(self.point, dtype=float)
        J = np.array(self.operator, dtype=float)
        if p.shape != (7,) or J.shape != (7, 7):
            raise ValueError("a twistor point is a 7-vector and a 7x7 operator")
        if abs(np.linalg.norm(p) - 1.0) > 1e-9:
            raise ValueError(f"point is not on S^6 (|p| = {np.linalg.norm(p):.12f})")
        if abs(np.linalg.norm(p) - 1.0) > 4 * np.finfo(float).eps:
            # renormalizing an already-unit vector can move its last bits; skip it so
            # serialization round-trips exactly
            p = p / np.linalg.norm(p)
        for arr in (p, J):
            arr.flags.writeable = False
        object.__setattr__(self, "point", p)
        object.__setattr__(self, "operator", J)

    def residuals(self):
        P = tangent_projector(self.point)
        J = self.operator
        return {
            "tangency": float(max(np.max(np.abs(J @ self.point)), np.max(np.abs(self.point @ J)))),
            "square": float(np.max(np.abs(J @ J + P))),
            "skew": float(np.max(np.abs(J + J.T))),
            "orientation": adapted_frame(self.point, J)[1],
        }

    def validate(self, tol=1e-9):
        """Raise unless the operator is an orthogonal complex structure of the standard orientation."""
        r = self.residuals()
        for name in ("tangency", "square", "skew"):
            if r[name] > tol:
                raise ValueError(f"fiber operator fails the {name} invariant ({r[name]:.3e})")
        if r["orientation"] != 1:
            raise OrientationMismatch("operator induces the opposite orientation; not a point of Z+")
        return self

    def to_json(self):
        return {"point": self.point.tolist(), "operator": self.operator.ravel().tolist()}

    @classmethod
    def from_json(cls, data):
        op = np.asarray(data["operator"], dtype=float)
        if op.size != 49:
            raise ValueError("operator must have 49 entries")
        return cls(np.asarray(data["point"], dtype=float), op.reshape(7, 7)).validate()


def standard_operator(p):
    """The standard Cayley structure at p, y -> y p."""
    return octonion.right_mul_operator(p)


def random_twistor_point(seed=None):
    """Random p on S^6 and J_p = B^T J_std B for a Haar-random rotation B about p."""
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    p = random_points(1, rng)[0]
    B = octonion.random_rotation(6, rng, axis=p)
    return TwistorPoint(p, B.T @ standard_operator(p) @ B)


def lift_to_cayley(tp):
    """A Cayley structure J^A with A(p) = p and J^A_p = J_p."""
    p = tp.point
    frame_j, sign_j = adapted_frame(p, tp.operator)
    frame_s, sign_s = adapted_frame(p, standard_operator(p))
    if sign_j != 1:
        raise OrientationMismatch("operator induces the opposite orientation; not a point of Z+")
    assert sign_s == 1, "standard structure must induce the standard orientation"
    A = np.outer(p, p) + frame_s @ frame_j.T
    return CayleyStructure(A)


def lambda_operator(p, phi):
    """cos(phi) Id + sin(phi) J_std on T_pS^6, fixing p."""
    p = np.asarray(p, dtype=float)
    P = tangent_projector(p)
    return np.outer(p, p) + np.cos(phi) * P + np.sin(phi) * standard_operator(p)


@dataclass(frozen=True, eq=False)
class StructureFamily:
    """The circle {p, J_p} of Cayley structures through a twistor point."""

    base: TwistorPoint
    lift: np.ndarray

    def rotation(self, phi):
        return lambda_operator(self.base.point, phi) @ self.lift

    def __call__(self, phi):
        return CayleyStructure(self.rotation(phi))

    def to_json(self):
        return {
            "base": self.base.to_json(),
            "lift": self.lift.ravel().tolist(),
            "convention": CONVENTION,
        }


def family_through(tp):
    return StructureFamily(tp, lift_to_cayley(tp).rotation)


def _check_through(S, tp, tol=1e-9):
    d = float(operator_distance(S.evaluate(tp.point), tp.operator))
    if d > tol:
        raise NotThroughPoint(f"section misses the twistor point by {d:.3e}")
    return d


# -- intersections -------------------------------------------------------------


@dataclass(frozen=True)
class Cluster:
    point: np.ndarray
    residual: float
    size: int


@dataclass
class IntersectionResult:
    samples: int
    degenerate: bool
    clusters: list = field(default_factory=list)
    min_sample_difference: float = 0.0
    min_difference_outside: float = 0.0
    max_sample_difference: float = 0.0

    def cluster_points(self):
        return np.array([c.point for c in self.clusters]).reshape(-1, 7)


def _geodesic_distance(x, y):
    return float(np.arccos(np.clip(x @ y, -1.0, 1.0)))


def _refine_zero(S1, S2, x0):
    frame = tangent_frame(x0).columns

    def residual(t):
        x = sphere_point(x0 + frame @ t)
        return (S1.evaluate(x) - S2.evaluate(x)).ravel()

    sol = least_squares(residual, np.zeros(6), method="lm", xtol=1e-15, ftol=1e-15, gtol=1e-15)
    x = sphere_point(x0 + frame @ sol.x)
    return x, float(operator_distance(S1.evaluate(x), S2.evaluate(x)))


def intersection_scan(
    S1, S2, grid=10_000, tol=1e-10, seed=0, cluster_radius=0.05, max_seeds=16, seed_separation=0.3
):
    """Points where two sections agree, located by sampling and local refinement.

    ``grid`` random points are sampled; well-separated low-difference samples seed a
    Levenberg-Marquardt solve of J1(x) = J2(x) on the sphere.  Converged zeros with
    operator-norm residual <= tol are merged into clusters of geodesic radius
    ``cluster_radius``.
    """
    xs = random_points(grid, seed)
    diff = operator_distance(S1.evaluate(xs), S2.evaluate(xs))
    result = IntersectionResult(
        samples=grid,
        degenerate=bool(np.max(diff) <= tol),
        min_sample_difference=float(np.min(diff)),
        max_sample_difference=float(np.max(diff)),
    )
    if result.degenerate:
        result.min_difference_outside = result.min_sample_difference
        return result

    order = np.argsort(diff)[: max(max_seeds, grid // 50)]
    seeds = []
    for i in order:
        if all(_geodesic_distance(xs[i], s) >= seed_separation for s in seeds):
            seeds.append(xs[i])
        if len(seeds) == max_seeds:
            break

    zeros = []
    for x0 in seeds:
        x, r = _refine_zero(S1, S2, x0)
        if r <= tol:
            zeros.append((x, r))

    clusters = []
    for x, r in zeros:
        for k, c in enumerate(clusters):
            if _geodesic_distance(x, c.point) < cluster_radius:
                best = c if c.residual <= r else Cluster(x, r, c.size)
                clusters[k] = Cluster(best.point, best.residual, c.size + 1)
                break
        else:
            clusters.append(Cluster(x, r, 1))
    result.clusters = clusters

    if clusters:
        centers = np.array([c.point for c in clusters])
        dist = np.arccos(np.clip(xs @ centers.T, -1.0, 1.0))
        outside = np.all(dist > cluster_radius, axis=1)
        result.min_difference_outside = float(np.min(diff[outside])) if outside.any() else np.inf
    else:
        result.min_difference_outside = result.min_sample_difference
    return result


# -- tangent spaces of sections ------------------------------------------------


def fiber_tangent_basis(p, J):
    """Frobenius-orthonormal basis (6, 7, 7) of skew operators on T_pS^6 anticommuting with J.

    This is the tangent space of the fiber SO(6)/U(3) at J.
    """
    F = tangent_frame(p).columns
    j = F.T @ J @ F
    iu = np.triu_indices(6, 1)
    gens = []
    for a, b in zip(*iu):
        s = np.zeros((6, 6))
        s[a, b], s[b, a] = 1.0, -1.0
        gens.append(s)
    gens = np.array(gens)
    constraint = np.array([(s @ j + j @ s).ravel() for s in gens]).T  # 36 x 15
    _, sv, vt = np.linalg.svd(constraint)
    null = vt[np.sum(sv > 1e-9) :]
    if null.shape[0] != 6:
        raise ValueError(f"fiber tangent has dimension {null.shape[0]}, expected 6")
    basis = np.tensordot(null, gens, axes=1)
    flat = basis.reshape(6, 36)
    q, _ = np.linalg.qr(flat.T)
    basis = q.T.reshape(6, 6, 6)
    return np.einsum("ia,kab,jb->kij", F, basis, F)


@dataclass(frozen=True, eq=False)
class SectionTangentSpace:
    base: TwistorPoint
    directions: np.ndarray  # (6, 7): positive orthonormal frame of T_pS^6
    K: np.ndarray  # (6, 7, 7): derivative of the transported operator along each direction

    def anticommutation_residual(self):
        J = self.base.operator
        return float(max(np.max(np.abs(k @ J + J @ k)) for k in self.K))

    def skew_residual(self):
        return float(max(np.max(np.abs(k + k.T)) for k in self.K))

    def vectors(self, fiber_basis=None):
        """The six tangent vectors in coordinates of T_pS^6 x (fiber tangent), shape (6, 12)."""
        if fiber_basis is None:
            fiber_basis = fiber_tangent_basis(self.base.point, self.base.operator)
        frame = tangent_frame(self.base.point).columns
        xs = self.directions @ frame
        ks = np.einsum("nij,mij->nm", self.K, fiber_basis)
        return np.hstack([xs, ks])


def section_tangent(S, tp, h=H_FIRST):
    """Tangent space of the graph of S at (p, J_p), by finite differences."""
    _check_through(S, tp)
    frame = tangent_frame(tp.point).columns
    Ks = np.array([levi_civita_derivative(S.evaluate, tp.point, X, h) for X in frame.T])
    return SectionTangentSpace(tp, frame.T.copy(), Ks)


def section_tangent_closed_form(S, tp):
    """K(X) = P (A^-1 R_{AX} A) P for each frame direction X."""
    frame = tangent_frame(tp.point).columns
    P = tangent_projector(tp.point)
    Ks = np.array([P @ S.derivative(X) @ P for X in frame.T])
    return SectionTangentSpace(tp, frame.T.copy(), Ks)


@dataclass(frozen=True)
class TransversalityReport:
    rank: int
    min_singular_value: float
    singular_values: np.ndarray

    @property
    def transverse(self):
        return self.rank == 12


def transversality_test(S1, S2, tp, h=H_FIRST, rank_tol=1e-6):
    """Rank and smallest singular value of the two stacked section tangent bases."""
    _check_through(S1, tp)
    _check_through(S2, tp)
    basis = fiber_tangent_basis(tp.point, tp.operator)
    M = np.vstack([section_tangent(S1, tp, h).vectors(basis), section_tangent(S2, tp, h).vectors(basis)])
    sv = np.linalg.svd(M, compute_uv=False)
    return TransversalityReport(int(np.sum(sv > rank_tol)), float(sv[-1]), sv)


# -- family membership ---------------------------------------------------------


@dataclass(frozen=True)
class MembershipResult:
    member: bool
    phi: float | None
    residual: float

    def __bool__(self):
        return self.member


def membership_test(S, tp, samples=100, tol=1e-6, seed=0, probes=3, grid=48):
    """Decide whether S belongs to the family through tp and recover its parameter.

    The squared distance between family members and S at a few generic probe
    points is scanned on a grid, minimized by golden-section search, and polished
    with Gauss-Newton steps; the candidate is then certified with structures_equal.
    """
    _check_through(S, tp)
    fam = family_through(tp)
    xs = random_points(probes, np.random.default_rng([seed, 1]))
    target = S.evaluate(xs)

    def resid(phi):
        return (fam(phi).evaluate(xs) - target).ravel()

    def objective(phi):
        r = resid(phi)
        return float(r @ r)

    phis = np.arange(grid) * (PERIOD / grid)
    vals = [objective(f) for f in phis]
    i = int(np.argmin(vals))
    step = PERIOD / grid
    res = minimize_scalar(objective, bracket=(phis[i] - step, phis[i], phis[i] + step), method="golden")
    phi = float(res.x)
    for _ in range(3):
        r = resid(phi)
        dr = (resid(phi + 1e-6) - resid(phi - 1e-6)) / 2e-6
        denom = float(dr @ dr)
        if denom == 0.0:
            break
        phi -= float(r @ dr) / denom
    phi = reduce_phi(phi)
    cert = structures_equal(S, fam(phi), samples=samples, tol=tol, seed=seed)
    return MembershipResult(cert.equal, phi if cert.equal else None, cert.max_difference)
