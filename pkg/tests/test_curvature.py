import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kahlerdeform import jet
from kahlerdeform.curvature import (
    CONVENTION_TAG,
    curvature,
    holomorphic_sectional,
    lie_derivative_metric,
    orthonormal_frame,
    ricci,
    ricci_direction,
    sectional,
    symmetry_residuals,
)
from kahlerdeform.geometry import DegenerateError
from kahlerdeform.models import standard_J


def sphere_metric(p):
    s = jet.sin(p[0])
    return [[1.0, 0.0], [0.0, s * s]]


def half_plane_metric(p):
    w = 1.0 / (p[1] * p[1])
    return [[w, 0.0], [0.0, w]]


def round_s3_metric(p):
    # S^3 in hyperspherical angles
    s1 = jet.sin(p[0])
    s2 = jet.sin(p[1])
    return [[1.0, 0.0, 0.0], [0.0, s1 * s1, 0.0], [0.0, 0.0, s1 * s1 * s2 * s2]]


@settings(max_examples=25, deadline=None)
@given(st.floats(0.3, 2.8), st.floats(-3.0, 3.0))
def test_unit_sphere_has_curvature_one(th, ph):
    cd = curvature(sphere_metric, [th, ph])
    assert sectional(cd, [1.0, 0.0], [0.0, 1.0]) == pytest.approx(1.0, abs=1e-12)
    np.testing.assert_allclose(cd.ricci, cd.metric, atol=1e-12)


def test_sign_convention_on_sphere():
    # R(X, Y)Y = K (<Y, Y> X - <X, Y> Y) with K = +1
    cd = curvature(sphere_metric, [1.0, 0.2])
    X, Y = np.array([1.0, 0.0]), np.array([0.0, 1.0])
    np.testing.assert_allclose(cd.R(X, Y, Y), cd.inner(Y, Y) * X, atol=1e-12)
    assert CONVENTION_TAG.startswith("R+")


@settings(max_examples=25, deadline=None)
@given(st.floats(-2.0, 2.0), st.floats(0.2, 3.0))
def test_hyperbolic_half_plane(x, y):
    cd = curvature(half_plane_metric, [x, y])
    assert sectional(cd, [1.0, 0.3], [0.2, 1.0]) == pytest.approx(-1.0, abs=1e-10)


def test_round_s3_is_einstein():
    cd = curvature(round_s3_metric, [1.1, 0.7, 0.4])
    np.testing.assert_allclose(cd.ricci, 2.0 * cd.metric, atol=1e-12)
    V = np.array([0.3, 1.0, -2.0])
    assert ricci_direction(cd, V) == pytest.approx(1.0)


def test_symmetries_and_frame_trace():
    cd = curvature(round_s3_metric, [0.9, 1.3, -0.5])
    res = symmetry_residuals(cd)
    assert max(res.values()) < 1e-12
    np.testing.assert_allclose(cd.ricci_frame_trace(), cd.ricci, atol=1e-12)
    F = orthonormal_frame(cd.metric)
    np.testing.assert_allclose(F.T @ cd.metric @ F, np.eye(3), atol=1e-12)


def test_flat_metric_in_polar_coordinates():
    cd = curvature(lambda p: [[1.0, 0.0], [0.0, p[0] * p[0]]], [1.7, 0.3])
    assert np.max(np.abs(cd.riemann)) < 1e-13
    np.testing.assert_allclose(ricci(lambda p: np.eye(2), [0.0, 0.0]), 0.0)


def test_holomorphic_sectional_fubini_study_like_sphere():
    # S^2 with its complex structure: K(X) = sectional curvature = 1
    cd = curvature(sphere_metric, [1.2, 0.0])
    s = np.sin(1.2)
    J = np.array([[0.0, -s], [1.0 / s, 0.0]])
    assert holomorphic_sectional(cd, J, [1.0, 0.5]) == pytest.approx(1.0)
    with pytest.raises(DegenerateError):
        holomorphic_sectional(cd, J, [0.0, 0.0])


def test_degenerate_plane_raises():
    cd = curvature(lambda p: np.eye(2), [0.0, 0.0])
    with pytest.raises(DegenerateError):
        sectional(cd, [1.0, 0.0], [2.0, 0.0])


def test_non_positive_metric_rejected():
    with pytest.raises(ValueError):
        curvature(lambda p: [[1.0, 0.0], [0.0, -1.0]], [0.0, 0.0])


def test_lie_derivative_of_euclidean_metric():
    x = np.array([0.3, -0.2, 0.5, 0.1])
    J0 = standard_J(4)
    rot = lambda p: list(np.asarray(J0, dtype=object).dot(np.asarray(p, dtype=object)))
    np.testing.assert_allclose(lie_derivative_metric(rot, lambda p: np.eye(4), x), 0.0, atol=1e-14)
    # position field: L_xi g = 2 g
    np.testing.assert_allclose(lie_derivative_metric(lambda p: list(p), lambda p: np.eye(4), x), 2 * np.eye(4))
