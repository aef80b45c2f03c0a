import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kahlerdeform.geometry import (
    DegenerateError,
    DomainError,
    GeometrySpec,
    TangentVector,
    christoffel_from_jets,
    closed_conformal_residual,
    complex_structure_residual,
    conformal_factor,
    hermitian_frame_at,
    hermitian_residual,
    inner,
    kahler_residual,
    one_form_exterior_derivative,
    orthonormalize,
    sample_points,
    theta_Jxi,
    theta_xi,
    two_form_exterior_derivative,
)
from kahlerdeform.jet import jet_eval
from kahlerdeform.models import build_model


@pytest.fixture(scope="module")
def ball():
    return build_model("flat_ball", 2, 1.0)


@pytest.fixture(scope="module")
def cone():
    return build_model("cone_round_sphere", 2, 1.0)


def test_geometry_spec_validates():
    with pytest.raises(ValueError):
        GeometrySpec(0, 1.0, lambda x: None, lambda x: None, lambda x: True)
    with pytest.raises(ValueError):
        GeometrySpec(1, 0.0, lambda x: None, lambda x: None, lambda x: True)


def test_check_point(ball):
    with pytest.raises(DomainError):
        ball.check_point([1.0, 0.0, 0.0, 0.0])
    with pytest.raises(ValueError):
        ball.check_point([0.1, 0.1])
    np.testing.assert_array_equal(ball.check_point([0.1, 0, 0, 0]), [0.1, 0, 0, 0])


def test_tangent_vector_helpers(ball):
    x = np.array([0.3, 0.1, 0.0, 0.2])
    X = TangentVector(x, [1.0, 0.0, 0.0, 0.0])
    Y = TangentVector(x, [0.0, 1.0, 0.0, 0.0])
    assert inner(ball, X, Y) == 0.0
    assert theta_xi(ball, X) == pytest.approx(0.3)
    # J xi = (-0.1, 0.3, 0, 0) for xi = (0.3, 0.1, 0, 0.2) with J d_x = d_y
    assert theta_Jxi(ball, X) == pytest.approx(-0.1)
    with pytest.raises(ValueError):
        inner(ball, X, TangentVector(x + 0.01, [1, 0, 0, 0]))


@pytest.mark.parametrize("model", ["flat_ball", "cone_round_sphere"])
def test_builtin_models_are_kahler_with_unit_psi(model):
    geom = build_model(model, 2, 1.0)
    rng = np.random.default_rng(1)
    for x in sample_points(geom, 10, rng):
        assert complex_structure_residual(geom, x) < 1e-12
        assert hermitian_residual(geom, x) < 1e-12
        assert kahler_residual(geom, x) < 1e-10
        assert conformal_factor(geom, x) == pytest.approx(1.0, abs=1e-12)
        assert np.max(np.abs(closed_conformal_residual(geom, x, rng.normal(size=4)))) < 1e-10


def test_polar_christoffels():
    # dr^2 + r^2 dth^2: Gamma^r_thth = -r, Gamma^th_rth = 1/r
    G, dG, _ = jet_eval(lambda p: [[1.0, 0.0], [0.0, p[0] * p[0]]], [2.0, 0.3])
    gam = christoffel_from_jets(G, dG)
    assert gam[0, 1, 1] == pytest.approx(-2.0)
    assert gam[1, 0, 1] == pytest.approx(0.5)
    assert gam[1, 1, 0] == pytest.approx(0.5)
    assert abs(gam[0, 0, 0]) + abs(gam[1, 1, 1]) == 0.0


def test_hermitian_frame(cone):
    x = sample_points(cone, 1, np.random.default_rng(2))[0]
    first = cone.J_value(x) @ cone.xi_value(x)
    F = hermitian_frame_at(cone, x, first=first).matrix()
    G = cone.metric_value(x)
    np.testing.assert_allclose(F.T @ G @ F, np.eye(4), atol=1e-12)
    np.testing.assert_allclose(F[:, 1], cone.J_value(x) @ F[:, 0], atol=1e-12)
    np.testing.assert_allclose(F[:, 0], first / math.sqrt(first @ G @ first), atol=1e-12)
    with pytest.raises(DegenerateError):
        hermitian_frame_at(cone, x, first=np.zeros(4))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**31))
def test_orthonormalize(seed):
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(4, 4))
    G = A @ A.T + 4 * np.eye(4)
    V = rng.normal(size=(4, 3))
    E = orthonormalize(V, G)
    np.testing.assert_allclose(E.T @ G @ E, np.eye(3), atol=1e-10)


def test_orthonormalize_rejects_dependent():
    with pytest.raises(DegenerateError):
        orthonormalize(np.array([[1.0, 2.0], [0.0, 0.0]]), np.eye(2))


def test_exterior_derivatives():
    # omega = x0 dx1 ^ dx2 has d omega = dx0 ^ dx1 ^ dx2
    def omega(p):
        z = 0.0 * p[0]
        return [[z, z, z], [z, z, p[0]], [z, -p[0], z]]

    dw = two_form_exterior_derivative(omega, [0.5, 0.2, 0.1])
    assert dw[0, 1, 2] == pytest.approx(1.0)
    assert dw[1, 0, 2] == pytest.approx(-1.0)
    with pytest.raises(ValueError):
        two_form_exterior_derivative(lambda p: [[p[0], 1.0], [1.0, 0.0]], [0.1, 0.2])
    # theta = x0 dx1 has d theta = dx0 ^ dx1
    dt = one_form_exterior_derivative(lambda p: [0.0 * p[0], p[0]], [0.3, 0.4])
    np.testing.assert_array_equal(dt, [[0.0, 1.0], [-1.0, 0.0]])


def test_sample_points_deterministic_and_in_domain(ball):
    a = sample_points(ball, 20, np.random.default_rng(5))
    b = sample_points(ball, 20, np.random.default_rng(5))
    np.testing.assert_array_equal(a, b)
    assert all(ball.domain(p) for p in a)
    with pytest.raises(ValueError):
        sample_points(ball, 1, np.random.default_rng(0), box=np.zeros((2, 2)))
    with pytest.raises(RuntimeError):
        sample_points(ball, 1, np.random.default_rng(0), box=np.tile([5.0, 6.0], (4, 1)), max_tries=10)


def test_warped_conformal_factor_is_derivative_of_f():
    geom = build_model("warped_generic", 2, f="quadratic:1,1,0.5")
    for x in sample_points(geom, 5, np.random.default_rng(3)):
        t = x[0]
        assert conformal_factor(geom, x) == pytest.approx(2 * t + 1, rel=1e-12)
        assert np.max(np.abs(closed_conformal_residual(geom, x, np.ones(4)))) < 1e-10
