import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from s6twistor.errors import AntipodalTransport, DegenerateDirection, NearPole
from s6twistor.exterior import AlternatingForm, interior, volume_form
from s6twistor.sphere import (
    StereographicChart,
    exterior_derivative_on_sphere,
    geodesic,
    levi_civita_derivative,
    orientation_sign,
    parallel_transport,
    project_tangent,
    random_points,
    random_tangent,
    sphere_point,
    tangent_frame,
    tangent_projector,
)

seeds = st.integers(0, 2**32 - 1)


def test_sphere_point_rejects_zero():
    with pytest.raises(ValueError):
        sphere_point(np.zeros(7))


@given(seeds)
def test_tangent_frame_positive_orthonormal(seed):
    p = random_points(1, seed)[0]
    F = tangent_frame(p)
    assert np.allclose(F.columns.T @ F.columns, np.eye(6), atol=1e-13)
    assert np.allclose(p @ F.columns, 0, atol=1e-13)
    assert orientation_sign(p, F.columns) == 1


def test_tangent_frame_deterministic():
    p = random_points(1, 3)[0]
    assert np.array_equal(tangent_frame(p).columns, tangent_frame(p).columns)


@given(seeds)
def test_parallel_transport_properties(seed):
    rng = np.random.default_rng(seed)
    p, q = random_points(2, rng)
    T = parallel_transport(p, q)
    assert np.allclose(T @ p, q, atol=1e-12)
    assert np.allclose(T.T @ T, np.eye(7), atol=1e-12)
    assert np.linalg.det(T) == pytest.approx(1.0)
    # vectors orthogonal to both points are fixed
    Q, _ = np.linalg.qr(np.column_stack([p, q]))
    w = rng.normal(size=7)
    w -= Q @ (Q.T @ w)
    assert np.allclose(T @ w, w, atol=1e-10)


def test_transport_antipodal():
    p = random_points(1, 0)[0]
    with pytest.raises(AntipodalTransport):
        parallel_transport(p, -p)


def test_geodesic_stays_on_sphere(rng):
    p = random_points(1, rng)[0]
    X = random_tangent(p, rng)
    for t in (0.1, 1.0, 3.0):
        assert np.linalg.norm(geodesic(p, X, t)) == pytest.approx(1.0)
    with pytest.raises(DegenerateDirection):
        geodesic(p, np.zeros(7), 0.1)


def test_levi_civita_of_parallel_field_vanishes(rng):
    q = random_points(1, rng)[0]
    v = project_tangent(q, rng.normal(size=7))
    field = lambda x: parallel_transport(q, x) @ v
    # radially transported from q, the field is parallel at q
    X = project_tangent(q, rng.normal(size=7))
    assert np.linalg.norm(levi_civita_derivative(field, q, X)) < 1e-7


def test_levi_civita_of_projected_constant(rng):
    # nabla_X (P a) = -<a, p> X for the projection of a constant vector a
    p = random_points(1, rng)[0]
    a = rng.normal(size=7)
    X = random_tangent(p, rng)
    got = levi_civita_derivative(lambda x: project_tangent(x, a), p, X)
    assert np.allclose(got, -(a @ p) * X, atol=1e-7)


def test_levi_civita_step_bounds(rng):
    p = random_points(1, rng)[0]
    with pytest.raises(ValueError):
        levi_civita_derivative(lambda x: x, p, random_tangent(p, rng), h=1e-2)


def test_chart_round_trip_and_jacobian(rng):
    chart = StereographicChart(random_points(1, rng)[0])
    u = rng.normal(size=6)
    x = chart.inverse(u)
    assert np.linalg.norm(x) == pytest.approx(1.0)
    assert np.allclose(chart.forward(x), u, atol=1e-12)
    h = 1e-6
    fd = np.column_stack([(chart.inverse(u + h * e) - chart.inverse(u - h * e)) / (2 * h) for e in np.eye(6)])
    assert np.allclose(chart.jacobian(u), fd, atol=1e-8)


def test_chart_near_pole():
    pole = random_points(1, 1)[0]
    chart = StereographicChart(pole)
    with pytest.raises(NearPole):
        chart.forward(pole)


def test_d_of_closed_form_vanishes(rng):
    # the restriction of a constant form is closed
    const = AlternatingForm(7, 2, rng.normal(size=21))
    p = random_points(1, rng)[0]
    d = exterior_derivative_on_sphere(lambda x: const, p)
    assert d.norm() < 1e-8


def test_d_of_iota_volume(rng):
    alpha = AlternatingForm(7, 3, rng.normal(size=35))
    p = random_points(1, rng)[0]
    F = tangent_frame(p).columns
    d = exterior_derivative_on_sphere(lambda x: interior(x, alpha), p, richardson=True)
    # for the Euler field, d iota_x alpha = L_x alpha = 3 alpha (alpha constant, degree 3)
    assert (d.pullback(F) - 3 * alpha.pullback(F)).norm() < 1e-9


def test_projector(rng):
    p = random_points(1, rng)[0]
    P = tangent_projector(p)
    assert np.allclose(P @ P, P)
    assert np.allclose(P @ p, 0)
