import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from s6twistor import octonion
from s6twistor.errors import LeibnizViolation
from s6twistor.octonion import Octonion, multiply

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)
octs = arrays(np.float64, 8, elements=finite)


def test_table_basics():
    E = np.eye(8)
    for i in range(8):
        assert np.array_equal(multiply(E[0], E[i]), E[i])
        assert np.array_equal(multiply(E[i], E[0]), E[i])
    for i in range(1, 8):
        assert np.array_equal(multiply(E[i], E[i]), -E[0])
        for j in range(1, 8):
            if i != j:
                assert np.array_equal(multiply(E[i], E[j]), -multiply(E[j], E[i]))


def test_table_is_signed_permutation():
    for i in range(8):
        assert sorted(octonion.TABLE_INDEX[i]) == list(range(8))
    assert set(np.unique(octonion.TABLE_SIGN)) <= {-1.0, 1.0}


@given(octs, octs)
def test_composition(x, y):
    lhs = np.linalg.norm(multiply(x, y))
    rhs = np.linalg.norm(x) * np.linalg.norm(y)
    assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-12)


@given(octs, octs)
def test_alternativity(x, y):
    scale = 1.0 + np.linalg.norm(x) ** 2 * np.linalg.norm(y)
    assert np.allclose(multiply(multiply(x, x), y), multiply(x, multiply(x, y)), atol=1e-12 * scale)
    assert np.allclose(multiply(multiply(y, x), x), multiply(y, multiply(x, x)), atol=1e-12 * scale)


@given(octs, octs, octs)
def test_moufang(x, y, z):
    scale = 1.0 + np.linalg.norm(x) ** 2 * np.linalg.norm(y) * np.linalg.norm(z)
    lhs = multiply(multiply(multiply(x, y), x), z)
    rhs = multiply(x, multiply(y, multiply(x, z)))
    assert np.allclose(lhs, rhs, atol=1e-11 * scale)


def test_not_associative():
    E = np.eye(8)
    a = multiply(multiply(E[1], E[2]), E[4])
    b = multiply(E[1], multiply(E[2], E[4]))
    assert np.array_equal(a, -b)


@given(arrays(np.float64, 7, elements=finite), arrays(np.float64, 7, elements=finite))
def test_inner_product_is_dot(u, v):
    assert octonion.inner(u, v) == pytest.approx(u @ v, abs=1e-12)


def test_conj_and_norm(rng):
    x = rng.normal(size=8)
    xx = multiply(x, octonion.conj(x))
    assert np.allclose(xx, np.eye(8)[0] * (x @ x), atol=1e-13)


def test_octonion_class(rng):
    a, b = Octonion(rng.normal(size=8)), Octonion(rng.normal(size=8))
    assert np.allclose((a * b).coeffs, multiply(a.coeffs, b.coeffs))
    assert (a * 2).coeffs == pytest.approx(2 * a.coeffs)
    assert np.allclose((a + b - b).coeffs, a.coeffs)
    assert Octonion.unit(3) == Octonion(np.eye(8)[3])
    assert a.conjugate().real == a.real
    assert np.allclose(a.conjugate().imag, -a.imag)
    assert a.norm() == pytest.approx(np.linalg.norm(a.coeffs))
    with pytest.raises(ValueError):
        Octonion(np.zeros(7))


def test_right_and_left_operators(rng):
    x, y = rng.normal(size=(2, 7))
    assert np.allclose(octonion.right_mul_operator(x) @ y, multiply(octonion.embed(y), octonion.embed(x))[1:])
    assert np.allclose(octonion.left_mul_operator(x) @ y, multiply(octonion.embed(x), octonion.embed(y))[1:])
    R = octonion.right_mul_operator(x)
    assert np.allclose(R, -R.T)


def test_derivation_basis_spans_g2():
    B = octonion.derivation_basis()
    assert B.shape == (21, 7, 7)
    assert np.linalg.matrix_rank(B.reshape(21, 49), tol=1e-10) == 14
    for D in B:
        assert octonion.leibniz_defect(D) < 1e-12
        assert np.allclose(D, -D.T)


def test_non_derivation_detected(rng):
    W = rng.normal(size=(7, 7))
    assert octonion.leibniz_defect(W - W.T) > 1e-2


def test_standard_derivation_check_flag():
    E = np.eye(7)
    D = octonion.standard_derivation(E[0], E[1])
    assert octonion.leibniz_defect(D) < 1e-13
    assert not octonion.standard_derivation(E[0], E[0], check=False).any()


def test_leibniz_violation_is_arithmetic_error():
    assert issubclass(LeibnizViolation, ArithmeticError)


@pytest.mark.parametrize("seed", range(5))
def test_random_g2_is_automorphism(seed):
    G = octonion.random_g2(seed)
    assert octonion.is_g2(G)
    assert octonion.automorphism_defect(G) < 1e-12


def test_random_rotation_is_not_g2():
    A = octonion.random_rotation(7, 0)
    assert np.allclose(A.T @ A, np.eye(7), atol=1e-12)
    assert np.linalg.det(A) == pytest.approx(1.0)
    assert not octonion.is_g2(A)


def test_random_rotation_dim6_fixes_axis(rng):
    p = rng.normal(size=7)
    p /= np.linalg.norm(p)
    B = octonion.random_rotation(6, rng, axis=p)
    assert np.allclose(B @ p, p, atol=1e-13)
    assert np.linalg.det(B) == pytest.approx(1.0)


def test_random_rotation_bad_dim():
    with pytest.raises(ValueError):
        octonion.random_rotation(5)


def test_random_g2_steps():
    with pytest.raises(ValueError):
        octonion.random_g2(0, steps=0)


def test_check_rotation_rejects():
    with pytest.raises(ValueError):
        octonion.check_rotation(np.diag([1, 1, 1, 1, 1, 1, -1.0]))
    with pytest.raises(ValueError):
        octonion.check_rotation(2 * np.eye(7))


def test_batched_multiply_broadcasts(rng):
    x = rng.normal(size=(4, 3, 8))
    y = rng.normal(size=8)
    out = multiply(x, y)
    assert out.shape == (4, 3, 8)
    assert np.allclose(out[2, 1], multiply(x[2, 1], y))
