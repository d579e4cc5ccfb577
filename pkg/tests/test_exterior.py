import itertools
import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from s6twistor.exterior import (
    AlternatingForm,
    five_form_to_vector,
    index_tuples,
    interior,
    volume_form,
    wedge,
    wedge_many,
)
from math import comb

finite = st.floats(-5, 5, allow_nan=False, allow_infinity=False)


def forms(dim, degree):
    return arrays(np.float64, comb(dim, degree), elements=finite).map(lambda c: AlternatingForm(dim, degree, c))


def test_index_tuples_lexicographic():
    assert [tuple(t) for t in index_tuples(4, 2)] == list(itertools.combinations(range(4), 2))


def test_basis_and_evaluation():
    e = np.eye(5)
    f = AlternatingForm.basis(5, (0, 2))
    assert f(e[0], e[2]) == 1.0
    assert f(e[2], e[0]) == -1.0
    assert f(e[0], e[1]) == 0.0


def test_basis_sorts_indices():
    assert AlternatingForm.basis(5, (2, 0)).allclose(-AlternatingForm.basis(5, (0, 2)), 0)
    assert AlternatingForm.basis(5, (1, 1)).norm() == 0.0


@given(forms(6, 2), forms(6, 3))
def test_wedge_graded_commutativity(a, b):
    assert (a ^ b).allclose((-1) ** (2 * 3) * (b ^ a), 1e-10)


@given(forms(6, 1), forms(6, 1))
def test_one_forms_anticommute(a, b):
    assert (a ^ b).allclose(-(b ^ a), 1e-12)
    assert (a ^ a).norm() < 1e-12


@given(forms(7, 1), forms(7, 2), forms(7, 2))
def test_wedge_associative(a, b, c):
    assert ((a ^ b) ^ c).allclose(a ^ (b ^ c), 1e-9)


@given(forms(6, 2), forms(6, 2), arrays(np.float64, 6, elements=finite))
def test_interior_is_antiderivation(a, b, X):
    lhs = interior(X, a ^ b)
    rhs = (interior(X, a) ^ b) + (a ^ interior(X, b))
    assert lhs.allclose(rhs, 1e-9)


@given(forms(5, 3), arrays(np.float64, (3, 5), elements=finite))
def test_tensor_round_trip(f, V):
    g = AlternatingForm.from_tensor(f.to_tensor())
    assert g.allclose(f, 1e-12)
    T = f.to_tensor()
    assert f(*V) == pytest.approx(np.einsum("ijk,i,j,k->", T, *V), abs=1e-9)


@given(forms(6, 3), arrays(np.float64, (6, 4), elements=finite))
def test_pullback_matches_evaluation(f, M):
    g = f.pullback(M)
    e = np.eye(4)
    for idx in index_tuples(4, 3):
        assert g(*e[list(idx)]) == pytest.approx(f(*M[:, list(idx)].T), abs=1e-8)


def test_from_multilinear(rng):
    A = rng.normal(size=(4, 4))
    f = AlternatingForm.from_multilinear(lambda x, y: x @ (A - A.T) @ y / 2, 4, 2)
    x, y = rng.normal(size=(2, 4))
    assert f(x, y) == pytest.approx(x @ (A - A.T) @ y / 2)


def test_volume_form_and_determinant(rng):
    V = rng.normal(size=(6, 6))
    assert volume_form(6)(*V) == pytest.approx(np.linalg.det(V))


def test_five_form_to_vector(rng):
    vol = volume_form(6)
    v = rng.normal(size=6)
    assert np.allclose(five_form_to_vector(interior(v, vol), vol), v)


def test_arithmetic_and_mismatch():
    a = AlternatingForm.basis(4, (0, 1))
    b = AlternatingForm.basis(4, (2, 3))
    assert (2 * a)((1, 0, 0, 0), (0, 1, 0, 0)) == 2.0
    assert ((a + b) / 2).norm() == 0.5
    with pytest.raises(ValueError):
        a + AlternatingForm.basis(4, (0,))
    with pytest.raises(ValueError):
        a + AlternatingForm.basis(5, (0, 1))


def test_coefficients_read_only():
    f = AlternatingForm.basis(4, (0, 1))
    with pytest.raises(ValueError):
        f.coeffs[0] = 3.0


def test_wedge_many_degree_overflow():
    from s6twistor.errors import DegreeOverflow

    a = AlternatingForm.basis(3, (0, 1))
    with pytest.raises(DegreeOverflow):
        wedge_many(a, a)


def test_json_round_trip(rng):
    f = AlternatingForm(6, 3, rng.normal(size=20))
    g = AlternatingForm.from_json(json.loads(json.dumps(f.to_json())))
    assert np.array_equal(f.coeffs, g.coeffs)


def test_wrong_coefficient_count():
    with pytest.raises(ValueError):
        AlternatingForm(4, 2, np.zeros(5))


def test_wedge_function_matches_operator(rng):
    a = AlternatingForm(5, 2, rng.normal(size=10))
    b = AlternatingForm(5, 1, rng.normal(size=5))
    assert wedge(a, b).allclose(a ^ b, 0)
