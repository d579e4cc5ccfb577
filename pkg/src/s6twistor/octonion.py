"""Octonion arithmetic, the inner product on Im O, G2 and its Lie algebra.

The multiplication table is generated by Cayley-Dickson doubling of the
quaternions,

    (a, b)(c, d) = (ac - conj(d) b, d a + b conj(c)),

with coefficients ordered e0 = 1, e1, e2, e3 (quaternion units) and
e4 = (0, 1) the doubling unit, e5 = e1 e4 ... as produced by the recursion.
Imaginary octonions are stored as 7-vectors over e1..e7.
"""
from __future__ import annotations

import itertools

import numpy as np
import scipy.linalg
from scipy.stats import special_ortho_group

from . import _backend
from .errors import LeibnizViolation

CONVENTION = "cayley-dickson-v1"


def _qmul(a, b):
    a0, a1, a2, a3 = a
    b0, b1, b2, b3 = b
    return (
        a0 * b0 - a1 * b1 - a2 * b2 - a3 * b3,
        a0 * b1 + a1 * b0 + a2 * b3 - a3 * b2,
        a0 * b2 - a1 * b3 + a2 * b0 + a3 * b1,
        a0 * b3 + a1 * b2 - a2 * b1 + a3 * b0,
    )


def _qconj(a):
    return (a[0], -a[1], -a[2], -a[3])


def _cd_mul(x, y):
    a, b, c, d = x[:4], x[4:], y[:4], y[4:]
    left = np.subtract(_qmul(a, c), _qmul(_qconj(d), b))
    right = np.add(_qmul(d, a), _qmul(b, _qconj(c)))
    return np.concatenate([left, right])


def _build_table():
    eye = np.eye(8)
    idx = np.zeros((8, 8), dtype=np.intp)
    sgn = np.zeros((8, 8))
    for i, j in itertools.product(range(8), repeat=2):
        prod = _cd_mul(eye[i], eye[j])
        k = int(np.argmax(np.abs(prod)))
        assert abs(abs(prod[k]) - 1.0) == 0.0 and np.count_nonzero(prod) == 1
        idx[i, j] = k
        sgn[i, j] = prod[k]
    return idx, sgn


TABLE_INDEX, TABLE_SIGN = _build_table()
TABLE_INDEX.flags.writeable = False
TABLE_SIGN.flags.writeable = False

#: Dense structure constants: e_i e_j = sum_k STRUCTURE[i, j, k] e_k.
STRUCTURE = np.zeros((8, 8, 8))
for _i, _j in itertools.product(range(8), repeat=2):
    STRUCTURE[_i, _j, TABLE_INDEX[_i, _j]] = TABLE_SIGN[_i, _j]
STRUCTURE.flags.writeable = False

#: RIGHT[k] is the 7x7 matrix of y -> Im(y e_{k+1}) on Im O.
RIGHT = np.ascontiguousarray(np.transpose(STRUCTURE[1:, 1:, 1:], (1, 2, 0)))
RIGHT.flags.writeable = False


def multiply(x, y):
    """Cayley product of octonions given as arrays with trailing dimension 8."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    shape = np.broadcast_shapes(x.shape, y.shape)
    xb = np.broadcast_to(x, shape).reshape(-1, 8)
    yb = np.broadcast_to(y, shape).reshape(-1, 8)
    out = _backend.signed_table_mul(xb, yb, TABLE_INDEX, TABLE_SIGN)
    return out.reshape(shape)


def conj(x):
    x = np.array(x, dtype=float)
    x[..., 1:] *= -1
    return x


def embed(v):
    """Imaginary 7-vector(s) -> octonion(s) with zero real part."""
    v = np.asarray(v, dtype=float)
    return np.concatenate([np.zeros(v.shape[:-1] + (1,)), v], axis=-1)


def inner(x, y):
    """<x, y> = -Re(xy) for imaginary octonions given as 7-vectors."""
    return -multiply(embed(x), embed(y))[..., 0]


def right_mul_operator(x):
    """7x7 matrix of y -> Im(y x) on Im O (R_x in the text)."""
    return np.tensordot(np.asarray(x, dtype=float), RIGHT, axes=(-1, 0))


def left_mul_operator(x):
    """7x7 matrix of y -> Im(x y)."""
    return -right_mul_operator(x)


class Octonion:
    """Thin value wrapper so that octonions can be written as ``x * y``."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        c = np.array(coeffs, dtype=float)
        if c.shape != (8,):
            raise ValueError(f"an octonion has 8 coefficients, got shape {c.shape}")
        c.flags.writeable = False
        self.coeffs = c

    @classmethod
    def unit(cls, i):
        return cls(np.eye(8)[i])

    @classmethod
    def imaginary(cls, v):
        return cls(embed(v))

    @property
    def real(self):
        return float(self.coeffs[0])

    @property
    def imag(self):
        return self.coeffs[1:].copy()

    def __mul__(self, other):
        if isinstance(other, Octonion):
            return Octonion(multiply(self.coeffs, other.coeffs))
        return Octonion(self.coeffs * other)

    def __rmul__(self, other):
        return Octonion(self.coeffs * other)

    def __add__(self, other):
        return Octonion(self.coeffs + other.coeffs)

    def __sub__(self, other):
        return Octonion(self.coeffs - other.coeffs)

    def __neg__(self):
        return Octonion(-self.coeffs)

    def conjugate(self):
        return Octonion(conj(self.coeffs))

    def norm(self):
        return float(np.linalg.norm(self.coeffs))

    def __eq__(self, other):
        return isinstance(other, Octonion) and np.array_equal(self.coeffs, other.coeffs)

    def __hash__(self):
        return hash(self.coeffs.tobytes())

    def __repr__(self):
        return f"Octonion({self.coeffs.tolist()!r})"


# -- rotations and G2 ---------------------------------------------------------


def check_rotation(A, tol=1e-12):
    """Raise ValueError unless A is a 7x7 special orthogonal matrix within tol."""
    A = np.asarray(A, dtype=float)
    if A.shape != (7, 7):
        raise ValueError(f"expected a 7x7 matrix, got {A.shape}")
    ortho = np.max(np.abs(A.T @ A - np.eye(7)))
    if ortho > tol:
        raise ValueError(f"matrix is not orthogonal (residual {ortho:.3e})")
    det = np.linalg.det(A)
    if abs(det - 1.0) > tol:
        raise ValueError(f"matrix does not have det +1 (det = {det:.6f})")
    return A


def automorphism_defect(A):
    """max over imaginary basis pairs of |A(e_i e_j) - A(e_i) A(e_j)|.

    A acts on Im O and fixes 1; real parts are compared too, so a non-orthogonal A
    also shows a defect.
    """
    A8 = np.eye(8)
    A8[1:, 1:] = np.asarray(A, dtype=float)
    E = np.eye(8)[1:]
    prods = multiply(E[:, None, :], E[None, :, :])
    lhs = prods @ A8.T
    AE = E @ A8.T
    rhs = multiply(AE[:, None, :], AE[None, :, :])
    return float(np.max(np.abs(lhs - rhs)))


def is_g2(A, tol=1e-9):
    """True iff A (extended by fixing 1) is an automorphism of the octonions."""
    return automorphism_defect(A) <= tol


def leibniz_defect(D):
    """max over imaginary basis pairs of |D(ab) - D(a)b - aD(b)| (D(1) = 0)."""
    D8 = np.zeros((8, 8))
    D8[1:, 1:] = np.asarray(D, dtype=float)
    E = np.eye(8)[1:]
    DE = E @ D8.T
    lhs = multiply(E[:, None, :], E[None, :, :]) @ D8.T
    rhs = multiply(DE[:, None, :], E[None, :, :]) + multiply(E[:, None, :], DE[None, :, :])
    return float(np.max(np.abs(lhs - rhs)))


def standard_derivation(a, b, check=True):
    """The derivation z -> [[a,b], z] - 3((ab)z - a(bz)) of O, as a 7x7 matrix on Im O."""
    a8, b8 = embed(a), embed(b)
    ab = multiply(a8, b8) - multiply(b8, a8)
    Z = np.eye(8)[1:]
    comm = multiply(ab, Z) - multiply(Z, ab)
    assoc = multiply(multiply(a8, b8), Z) - multiply(a8, multiply(b8, Z))
    images = comm - 3.0 * assoc
    # derivations kill 1 and preserve Im O; the real parts vanish identically
    D = images[:, 1:].T
    if check:
        defect = leibniz_defect(D)
        scale = max(1.0, float(np.max(np.abs(D))))
        if defect > 1e-10 * scale:
            raise LeibnizViolation(f"Leibniz defect {defect:.3e}")
    return D


def derivation_basis():
    """The 21 derivations D_{e_i, e_j} (i < j); they span g2 (dimension 14)."""
    E = np.eye(7)
    return np.array([standard_derivation(E[i], E[j]) for i, j in itertools.combinations(range(7), 2)])


def _rng(seed):
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def random_rotation(dim=7, seed=None, axis=None):
    """Haar-distributed element of SO(7), or of the SO(6) fixing ``axis`` when dim == 6.

    For dim == 6 the default axis is e7. The result always acts on R^7.
    """
    rng = _rng(seed)
    if dim == 7:
        return special_ortho_group.rvs(7, random_state=rng)
    if dim != 6:
        raise ValueError("dim must be 6 or 7")
    if axis is None:
        axis = np.eye(7)[6]
    axis = np.asarray(axis, dtype=float)
    axis = axis / np.linalg.norm(axis)
    Q = np.column_stack([axis, scipy.linalg.null_space(axis[None, :])])
    if np.linalg.det(Q) < 0:
        Q[:, -1] *= -1
    B = special_ortho_group.rvs(6, random_state=rng)
    block = np.eye(7)
    block[1:, 1:] = B
    return Q @ block @ Q.T


def random_derivation(seed=None, scale=1.0):
    """Gaussian combination of the generators D_{e_i, e_j}."""
    rng = _rng(seed)
    coeffs = rng.normal(scale=scale, size=21)
    return np.tensordot(coeffs, _DERIVATION_BASIS, axes=1)


def random_g2(seed=None, steps=3):
    """Product of ``steps`` exponentials of random derivations; an element of G2."""
    if steps < 1:
        raise ValueError("steps must be >= 1")
    rng = _rng(seed)
    G = np.eye(7)
    for _ in range(steps):
        G = scipy.linalg.expm(random_derivation(rng)) @ G
    return G


def expm_derivation(D):
    return scipy.linalg.expm(np.asarray(D, dtype=float))


_DERIVATION_BASIS = derivation_basis()
_DERIVATION_BASIS.flags.writeable = False
