"""Stable 3-forms in six dimensions, SU(3)-structures and the cone over S^6.

Sign conventions
----------------
* ``hitchin`` builds K(X) = A(iota_X psi ^ psi) with A inverting first-slot
  contraction into the volume form, and returns J = -K / sqrt(-tau).  With this
  sign, Re(dz1 ^ dz2 ^ dz3) gives the complex structure for which dz_k are
  (1,0)-forms, in the complex orientation dx1 ^ dy1 ^ ... ^ dx3 ^ dy3.
* The G2 form on Im O is phi(x, y, z) = <y x, z>, the associative form of the
  right product, so that iota_x phi = g(R_x ., .) on T_xS^6.  Together the cone
  over S^6 returns the standard Cayley structure y -> y x and the round metric.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from . import octonion
from .errors import Unstable
from .exterior import AlternatingForm, five_form_to_vector, interior, volume_form, wedge
from .sphere import H_FIRST, exterior_derivative_on_sphere, restrict, sphere_point, tangent_frame


@dataclass(frozen=True)
class HitchinResult:
    K: np.ndarray
    tau: float
    kappa: float
    J: np.ndarray | None

    @property
    def stable(self):
        return self.J is not None


def hitchin(psi, vol=None):
    """Hitchin's invariants of a 3-form on R^6: K, tau = tr(K^2)/6 and J when tau < 0."""
    if psi.dim != 6 or psi.degree != 3:
        raise ValueError("hitchin expects a 3-form on R^6")
    if vol is None:
        vol = volume_form(6)
    E = np.eye(6)
    K = np.column_stack([five_form_to_vector(wedge(interior(E[j], psi), psi), vol) for j in range(6)])
    tau = float(np.trace(K @ K)) / 6.0
    if tau < 0:
        kappa = float(np.sqrt(-tau))
        return HitchinResult(K, tau, kappa, -K / kappa)
    return HitchinResult(K, tau, 0.0, None)


def standard_complex_volume():
    """(Re, Im) of dz1 ^ dz2 ^ dz3 on R^6 with coordinates (x1, y1, x2, y2, x3, y3)."""
    a = [AlternatingForm.basis(6, (2 * k,)) for k in range(3)]
    b = [AlternatingForm.basis(6, (2 * k + 1,)) for k in range(3)]
    re = AlternatingForm.zero(6, 3)
    im = AlternatingForm.zero(6, 3)
    # expand (a1 + i b1)(a2 + i b2)(a3 + i b3)
    for choice in itertools.product((0, 1), repeat=3):
        term = wedge(wedge((a, b)[choice[0]][0], (a, b)[choice[1]][1]), (a, b)[choice[2]][2])
        n_imag = sum(choice)
        unit = (1, 1j, -1, -1j)[n_imag % 4]
        re = re + term * unit.real
        im = im + term * unit.imag
    return re, im


def standard_complex_structure():
    """J0 with J0 dx_k = dy_k direction: J0 e_{x_k} = e_{y_k}."""
    J = np.zeros((6, 6))
    for k in range(3):
        J[2 * k + 1, 2 * k] = 1.0
        J[2 * k, 2 * k + 1] = -1.0
    return J


def standard_kahler_form():
    """omega0 = sum dx_k ^ dy_k, so omega0(X, Y) = <J0 X, Y>."""
    out = AlternatingForm.zero(6, 2)
    for k in range(3):
        out = out + AlternatingForm.basis(6, (2 * k, 2 * k + 1))
    return out


def lambda_rotate(psi_pair, phi):
    """Re(lambda^3 Psi) = cos(3 phi) Re Psi - sin(3 phi) Im Psi."""
    re, im = psi_pair
    if not hitchin(re).stable:
        raise Unstable("Re Psi is not a stable 3-form")
    return re * np.cos(3 * phi) - im * np.sin(3 * phi)


def lambda_pullback(re_psi, phi):
    """psi(lambda X, lambda Y, lambda Z) with lambda = cos(phi) + sin(phi) J_psi."""
    h = hitchin(re_psi)
    if not h.stable:
        raise Unstable("Re Psi is not a stable 3-form")
    lam = np.cos(phi) * np.eye(6) + np.sin(phi) * h.J
    return re_psi.pullback(lam)


def g2_three_form():
    """phi(x, y, z) = <y x, z> on Im O = R^7."""
    S = octonion.STRUCTURE
    coeffs = [S[j + 1, i + 1, k + 1] for i, j, k in itertools.combinations(range(7), 3)]
    return AlternatingForm(7, 3, coeffs)


def slot_contract(form, M):
    """The form (X1, X2, ...) -> form(M X1, X2, ...), alternated.

    Exactly alternating when the result is alternating, e.g. for M = J_psi and
    form = psi.
    """
    T = np.einsum("a...,ai->i...", form.to_tensor(), M)
    return AlternatingForm.from_tensor(T)


def phi_hat(psi, J):
    """The 3-form with iota_{JX} phi_hat = iota_X psi, i.e. phi_hat = -psi(J ., ., .)."""
    return -slot_contract(psi, J)


@dataclass(frozen=True, eq=False)
class SU3Structure:
    """(omega, psi) on R^6 with J = J_psi and metric g(X, Y) = omega(X, J Y).

    ``frame`` (7x6), when present, identifies R^6 with a tangent space of S^6.
    """

    omega: AlternatingForm
    psi: AlternatingForm
    J: np.ndarray
    metric: np.ndarray
    frame: np.ndarray | None = None

    @classmethod
    def from_forms(cls, omega, psi, frame=None, vol=None):
        h = hitchin(psi, vol)
        if not h.stable:
            raise Unstable(f"psi is not stable (tau = {h.tau:.3e})")
        g = omega.to_tensor() @ h.J
        return cls(omega, psi, h.J, g, frame)

    def residuals(self):
        g = self.metric
        return {
            "omega_wedge_psi": wedge(self.omega, self.psi).norm(),
            "metric_symmetry": float(np.max(np.abs(g - g.T))),
            "metric_min_eigenvalue": float(np.min(np.linalg.eigvalsh((g + g.T) / 2))),
            "hermitian": float(np.max(np.abs(self.J.T @ g @ self.J - g))),
            "omega_cubed": float(wedge(wedge(self.omega, self.omega), self.omega).coeffs[0]),
        }

    def ambient_J(self):
        if self.frame is None:
            raise ValueError("structure has no frame")
        return self.frame @ self.J @ self.frame.T

    def im_psi(self):
        return phi_hat(self.psi, self.J)


def cone_extract(p):
    """SU(3)-structure at p from the constant G2 form on R^7 = cone over S^6.

    omega = iota_p phi and psi = phi restricted to T_pS^6, expressed in the positive
    frame ``tangent_frame(p)``.
    """
    p = sphere_point(p)
    rho = g2_three_form()
    frame = tangent_frame(p).columns
    omega = restrict(interior(p, rho), _Frame(frame))
    psi = restrict(rho, _Frame(frame))
    return SU3Structure.from_forms(omega, psi, frame=frame)


class _Frame:
    # minimal adapter for sphere.restrict
    def __init__(self, columns):
        self.columns = columns


def rotate_su3(s, A, convention="pullback"):
    """Transform an SU(3)-structure by A in SO(6).

    ``"pullback"``: omega_A = omega(A^-1 ., A^-1 .), psi_A = psi(A^-1 ., A^-1 ., A^-1 .);
    then J_A = A J A^-1 and the metric is carried along as a pullback.
    ``"mixed"``: omega by A^-1 but psi_A = psi(A ., A ., A .), as sometimes written;
    J and omega then need not be compatible.
    """
    A = np.asarray(A, dtype=float)
    Ainv = A.T
    omega = s.omega.pullback(Ainv)
    if convention == "pullback":
        psi = s.psi.pullback(Ainv)
    elif convention == "mixed":
        psi = s.psi.pullback(A)
    else:
        raise ValueError(f"unknown convention {convention!r}")
    h = hitchin(psi)
    if not h.stable:
        raise Unstable("rotated psi is not stable")
    g = omega.to_tensor() @ h.J
    return SU3Structure(omega, psi, h.J, g, s.frame)


# -- nearly Kaehler equations on S^6 -------------------------------------------


def _omega_field(x):
    return interior(x, _RHO)


def _phi_hat_field(x):
    frame = tangent_frame(x).columns
    psi = _RHO.pullback(frame)
    h = hitchin(psi)
    return phi_hat(psi, h.J).pullback(frame.T)


@dataclass(frozen=True)
class PDEReport:
    residual_domega: float  # max |d omega - 3 psi|
    mu: float  # least-squares fit of d phi_hat = -2 mu omega ^ omega
    residual_dphi: float

    def to_json(self):
        return {"residual_domega": self.residual_domega, "mu": self.mu, "residual_dphi": self.residual_dphi}


def nk_pde_check(p, h=H_FIRST):
    """Finite-difference check of d omega = 3 psi and d phi_hat = -2 mu omega ^ omega at p."""
    p = sphere_point(p)
    s = cone_extract(p)
    frame = _Frame(s.frame)
    d_omega = restrict(exterior_derivative_on_sphere(_omega_field, p, h), frame)
    d_phi = restrict(exterior_derivative_on_sphere(_phi_hat_field, p, h), frame)
    ww = wedge(s.omega, s.omega)
    mu = -float(d_phi.coeffs @ ww.coeffs) / (2.0 * float(ww.coeffs @ ww.coeffs))
    return PDEReport(
        residual_domega=(d_omega - 3.0 * s.psi).norm(),
        mu=mu,
        residual_dphi=(d_phi + 2.0 * mu * ww).norm(),
    )


_RHO = g2_three_form()
