"""Alternating multilinear forms on R^n stored on strictly increasing index tuples.

A k-form ``a`` on R^n keeps ``C(n, k)`` coefficients ``a[I]`` for I = (i1 < ... < ik),
with ``a = sum_I a[I] e^{i1} ^ ... ^ e^{ik}``.  Evaluation follows the determinant
convention, ``(e^1 ^ e^2)(e_1, e_2) = 1``.  Interior products contract the first slot.
"""
from __future__ import annotations

import itertools
import math
from functools import lru_cache

import numpy as np

from . import _backend
from .errors import DegenerateVolume, DegreeOverflow


@lru_cache(maxsize=None)
def index_tuples(n, k):
    """Lex-ordered increasing k-tuples of range(n)."""
    return tuple(itertools.combinations(range(n), k))


@lru_cache(maxsize=None)
def _position(n, k):
    return {t: i for i, t in enumerate(index_tuples(n, k))}


@lru_cache(maxsize=None)
def _tuple_array(n, k):
    arr = np.array(index_tuples(n, k), dtype=np.intp).reshape(-1, k)
    arr.flags.writeable = False
    return arr


def _shuffle_sign(first, second):
    # sign of the permutation sorting first + second (disjoint, each increasing)
    inversions = sum(1 for a in first for b in second if a > b)
    return -1.0 if inversions % 2 else 1.0


@lru_cache(maxsize=None)
def _wedge_table(n, k, l):
    pos_a, pos_b, pos_out = _position(n, k), _position(n, l), _position(n, k + l)
    out_idx, a_idx, b_idx, sign = [], [], [], []
    for K in index_tuples(n, k + l):
        for I in itertools.combinations(K, k):
            J = tuple(x for x in K if x not in I)
            out_idx.append(pos_out[K])
            a_idx.append(pos_a[I])
            b_idx.append(pos_b[J])
            sign.append(_shuffle_sign(I, J))
    return (
        np.array(out_idx, dtype=np.intp),
        np.array(a_idx, dtype=np.intp),
        np.array(b_idx, dtype=np.intp),
        np.array(sign),
    )


@lru_cache(maxsize=None)
def _interior_table(n, k):
    # (iota_v a)[I] = sum_{j not in I} (-1)^{#(i in I, i < j)} v_j a[sorted(I + j)]
    pos_a, pos_out = _position(n, k), _position(n, k - 1)
    out_idx, v_idx, a_idx, sign = [], [], [], []
    for I in index_tuples(n, k - 1):
        for j in range(n):
            if j in I:
                continue
            before = sum(1 for i in I if i < j)
            out_idx.append(pos_out[I])
            v_idx.append(j)
            a_idx.append(pos_a[tuple(sorted(I + (j,)))])
            sign.append(-1.0 if before % 2 else 1.0)
    return (
        np.array(out_idx, dtype=np.intp),
        np.array(v_idx, dtype=np.intp),
        np.array(a_idx, dtype=np.intp),
        np.array(sign),
    )


def _minors(M, rows, cols):
    """det(M[I, J]) for every row tuple I and column tuple J, shape (len(rows), len(cols))."""
    k = rows.shape[1]
    if k == 0:
        return np.ones((1, 1))
    sub = M[rows[:, None, :, None], cols[None, :, None, :]]
    return np.linalg.det(sub)


class AlternatingForm:
    """A k-form on R^dim."""

    __slots__ = ("dim", "degree", "coeffs")

    def __init__(self, dim, degree, coeffs):
        if not 0 <= degree <= dim:
            raise DegreeOverflow(f"degree {degree} is not in [0, {dim}]")
        c = np.array(coeffs, dtype=float).reshape(-1)
        if c.shape != (math.comb(dim, degree),):
            raise ValueError(
                f"a {degree}-form on R^{dim} has {math.comb(dim, degree)} coefficients, got {c.size}"
            )
        c.flags.writeable = False
        self.dim = dim
        self.degree = degree
        self.coeffs = c

    # construction ---------------------------------------------------------

    @classmethod
    def zero(cls, dim, degree):
        return cls(dim, degree, np.zeros(math.comb(dim, degree)))

    @classmethod
    def basis(cls, dim, indices):
        """e^{i1} ^ ... ^ e^{ik} for arbitrary (possibly unsorted) 0-based indices."""
        indices = tuple(indices)
        form = cls.zero(dim, len(indices))
        if len(set(indices)) < len(indices):
            return form
        order = sorted(indices)
        sign = _permutation_sign([order.index(i) for i in indices])
        c = np.zeros(math.comb(dim, len(indices)))
        c[_position(dim, len(indices))[tuple(order)]] = sign
        return cls(dim, len(indices), c)

    @classmethod
    def covector(cls, v):
        v = np.asarray(v, dtype=float)
        return cls(v.size, 1, v)

    @classmethod
    def from_tensor(cls, T):
        """Read the increasing-index entries of a totally antisymmetric array."""
        T = np.asarray(T, dtype=float)
        n, k = (T.shape[0] if T.ndim else 0), T.ndim
        if k == 0:
            return cls(0, 0, [float(T)])
        rows = _tuple_array(n, k)
        return cls(n, k, T[tuple(rows.T)])

    @classmethod
    def from_multilinear(cls, f, dim, degree):
        """Sample an alternating multilinear function on basis tuples."""
        E = np.eye(dim)
        return cls(dim, degree, [f(*E[list(I)]) for I in index_tuples(dim, degree)])

    def to_tensor(self):
        n, k = self.dim, self.degree
        T = np.zeros((n,) * k)
        for val, I in zip(self.coeffs, index_tuples(n, k)):
            if val == 0.0:
                continue
            for perm in itertools.permutations(range(k)):
                T[tuple(I[p] for p in perm)] = _permutation_sign(perm) * val
        return T

    # evaluation and algebra ------------------------------------------------

    def __call__(self, *vectors):
        if len(vectors) != self.degree:
            raise ValueError(f"{self.degree}-form evaluated on {len(vectors)} vectors")
        if self.degree == 0:
            return float(self.coeffs[0])
        V = np.column_stack(vectors)
        return float(self.coeffs @ _minors(V, _tuple_array(self.dim, self.degree), np.arange(self.degree)[None, :])[:, 0])

    def _check_same_space(self, other):
        if not isinstance(other, AlternatingForm):
            return NotImplemented
        if (self.dim, self.degree) != (other.dim, other.degree):
            raise ValueError(
                f"cannot combine a {self.degree}-form on R^{self.dim} with a "
                f"{other.degree}-form on R^{other.dim}"
            )
        return None

    def __add__(self, other):
        bad = self._check_same_space(other)
        if bad is NotImplemented:
            return bad
        return AlternatingForm(self.dim, self.degree, self.coeffs + other.coeffs)

    def __sub__(self, other):
        bad = self._check_same_space(other)
        if bad is NotImplemented:
            return bad
        return AlternatingForm(self.dim, self.degree, self.coeffs - other.coeffs)

    def __neg__(self):
        return AlternatingForm(self.dim, self.degree, -self.coeffs)

    def __mul__(self, scalar):
        return AlternatingForm(self.dim, self.degree, self.coeffs * float(scalar))

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return AlternatingForm(self.dim, self.degree, self.coeffs / float(scalar))

    def __xor__(self, other):
        return wedge(self, other)

    def wedge(self, other):
        return wedge(self, other)

    def interior(self, X):
        return interior(X, self)

    def pullback(self, M):
        """Pull back along the linear map M: R^m -> R^dim (an dim x m matrix)."""
        M = np.asarray(M, dtype=float)
        if M.shape[0] != self.dim:
            raise ValueError(f"map has {M.shape[0]} rows, form lives on R^{self.dim}")
        m, k = M.shape[1], self.degree
        if k > m:
            raise DegreeOverflow(f"cannot pull a {k}-form back to R^{m}")
        minors = _minors(M, _tuple_array(self.dim, k), _tuple_array(m, k))
        return AlternatingForm(m, k, self.coeffs @ minors)

    def norm(self):
        """Max-abs coefficient norm."""
        return float(np.max(np.abs(self.coeffs))) if self.coeffs.size else 0.0

    def allclose(self, other, atol):
        return (self - other).norm() <= atol

    def to_json(self):
        return {"dim": self.dim, "degree": self.degree, "coefficients": self.coeffs.tolist()}

    @classmethod
    def from_json(cls, data):
        return cls(int(data["dim"]), int(data["degree"]), data["coefficients"])

    def __repr__(self):
        return f"AlternatingForm(dim={self.dim}, degree={self.degree}, coeffs={self.coeffs.tolist()!r})"


def _permutation_sign(perm):
    perm = list(perm)
    sign = 1
    for i in range(len(perm)):
        for j in range(i + 1, len(perm)):
            if perm[i] > perm[j]:
                sign = -sign
    return sign


def wedge(a, b):
    """Exterior product a ^ b."""
    if a.dim != b.dim:
        raise ValueError("forms live on different spaces")
    n, k, l = a.dim, a.degree, b.degree
    if k + l > n:
        raise DegreeOverflow(f"{k}-form ^ {l}-form exceeds dimension {n}")
    table = _wedge_table(n, k, l)
    out = _backend.sparse_bilinear(
        a.coeffs[None, :], b.coeffs[None, :], *table, math.comb(n, k + l)
    )
    return AlternatingForm(n, k + l, out[0])


def wedge_many(*forms):
    out = forms[0]
    for f in forms[1:]:
        out = wedge(out, f)
    return out


def interior(X, a):
    """Contraction of ``a`` with the vector X in the first slot."""
    if a.degree < 1:
        raise DegreeOverflow("cannot contract a 0-form")
    X = np.asarray(X, dtype=float)
    if X.shape != (a.dim,):
        raise ValueError(f"vector of shape {X.shape} for a form on R^{a.dim}")
    out_idx, v_idx, a_idx, sign = _interior_table(a.dim, a.degree)
    out = _backend.sparse_bilinear(
        X[None, :], a.coeffs[None, :], out_idx, v_idx, a_idx, sign, math.comb(a.dim, a.degree - 1)
    )
    return AlternatingForm(a.dim, a.degree - 1, out[0])


def volume_form(dim):
    return AlternatingForm(dim, dim, [1.0])


def five_form_to_vector(phi5, vol):
    """The vector v with iota_v vol = phi5 (in units of the volume scalar).

    With vol = c e^1 ^ ... ^ e^n, iota_{e_j} vol = c (-1)^j * (e^1 ^ .. omit j .. ^ e^n),
    so the inverse is read off coefficient by coefficient.
    """
    n = vol.dim
    if vol.degree != n or phi5.dim != n or phi5.degree != n - 1:
        raise ValueError("expected an (n-1)-form and a top form on the same R^n")
    c = float(vol.coeffs[0])
    if abs(c) < 1e-300:
        raise DegenerateVolume("volume form vanishes")
    # index_tuples(n, n-1) in lex order omit n-1, n-2, ..., 0 respectively
    omitted = np.arange(n - 1, -1, -1)
    v = np.zeros(n)
    v[omitted] = phi5.coeffs * (-1.0) ** omitted / c
    return v
