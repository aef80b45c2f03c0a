import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kahlerdeform import deformation as dfm
from kahlerdeform.checks import corrupted_xi_geometry
from kahlerdeform.geometry import DomainError, hermitian_residual, sample_points
from kahlerdeform.models import build_model

BASES = {
    "ball1": lambda: build_model("flat_ball", 1, 1.0),
    "ball2": lambda: build_model("flat_ball", 2, 1.0),
    "ball3c4": lambda: build_model("flat_ball", 3, 4.0),
    "cone": lambda: build_model("cone_round_sphere", 2, 1.0),
}


@pytest.fixture(params=sorted(BASES))
def flat_geom(request):
    return BASES[request.param]()


def _points(geom, k=6, seed=0):
    return sample_points(geom, k, np.random.default_rng(seed))


def test_deform_needs_complex_structure():
    with pytest.raises(ValueError, match="complex structure"):
        dfm.deform(build_model("warped_generic"))


def test_deformation_undefined_beyond_c():
    dg = dfm.deform(build_model("flat_ball", 1, 1.0))
    with pytest.raises(DomainError):
        dg.gtilde_eval(np.array([1.0, 0.5]))
    with pytest.raises(DomainError):
        dg.check_point([0.9999, 0.0])


def test_gtilde_explicit_value():
    dg = dfm.deform(build_model("flat_ball", 1, 1.0))
    x = np.array([0.5, 0.0])
    mu = 1.0 / 0.75
    # xi = (0.5, 0), Jxi = (0, 0.5): g~ = mu I + mu^2 diag(0.25, 0.25)
    np.testing.assert_allclose(dg.metric_value(x), (mu + 0.25 * mu * mu) * np.eye(2))
    assert dg.mu_value(x) == pytest.approx(mu)


def test_first_order_identities(flat_geom):
    dg = dfm.deform(flat_geom)
    tilde = dg.as_geometry()
    for x in _points(flat_geom):
        assert hermitian_residual(tilde, x) < 1e-10
        assert np.all(np.linalg.eigvalsh(dg.metric_value(x)) > 0)
        assert dg.mu_value(x) >= 1.0 / dg.c
        assert dfm.kahler_form_two_routes_residual(dg, x) < 1e-12
        assert dfm.kahler_closure_residual(dg, x) < 1e-7
        assert dfm.dmu_identity_residual(dg, x) < 1e-12
        assert dfm.mu_derivative_residual(dg, x) < 1e-12
        assert dfm.gtilde_xi_identities_residual(dg, x) < 1e-10
        assert dfm.connection_residual(dg, x) < 1e-7
        assert dfm.metric_compatibility_residual(dg, x) < 1e-12
        assert dfm.dtheta_Jxi_identity_residual(flat_geom, x) < 1e-10


def test_first_order_identities_nonflat(nonflat_geom):
    dg = dfm.deform(nonflat_geom)
    for x in _points(nonflat_geom, 4):
        assert dfm.kahler_closure_residual(dg, x) < 1e-8
        assert dfm.connection_residual(dg, x) < 1e-10
        assert dfm.metric_compatibility_residual(dg, x) < 1e-12
        assert dfm.dmu_identity_residual(dg, x) < 1e-12
        assert dfm.dtheta_Jxi_identity_residual(nonflat_geom, x) < 1e-10


def test_curvature_closed_forms_nonflat(nonflat_geom):
    dg = dfm.deform(nonflat_geom)
    rng = np.random.default_rng(11)
    for x in _points(nonflat_geom, 4):
        tcd = dg.curvature_tilde(x)
        X, Y, Z = rng.normal(size=(3, dg.dim))
        a = dfm.riemann_tilde_closed_form(dg, x, X, Y, Z)
        b = tcd.R(X, Y, Z)
        assert np.max(np.abs(a - b)) / np.max(np.abs(b)) < 1e-10
        assert dfm.holomorphic_sectional_tilde_closed_form(dg, x, X) == pytest.approx(
            dfm.holomorphic_sectional_tilde_numeric(dg, x, X), abs=1e-10
        )
        ric = dfm.ricci_tilde_closed_form(dg, x, X, Y)
        assert ric.total == pytest.approx(float(X @ tcd.ricci_frame_trace() @ Y), abs=1e-10)
        assert set(ric.terms) == {"ric", "curv_xi_jxi", "ric_xi_hat", "ric_mixed", "curv_cross", "einstein"}


def test_ricci_xi_hat_two_routes(nonflat_geom):
    for x in _points(nonflat_geom, 4):
        assert dfm.ricci_xi_hat(nonflat_geom, x) == pytest.approx(dfm.ricci_xi_hat_from_psi(nonflat_geom, x), abs=1e-12)


@pytest.mark.parametrize("name", ["surface_sinh", "surface_sin", "surface_t2"])
def test_ricci_xi_hat_on_surfaces(name):
    # on a surface Ric(xi^) is the Gaussian curvature -f''/f
    from conftest import NONFLAT

    geom = NONFLAT[name]()
    x = _points(geom, 1)[0]
    expected = {"surface_sinh": -1.0, "surface_sin": 1.0, "surface_t2": -2.0 / x[0] ** 2}[name]
    assert dfm.ricci_xi_hat(geom, x) == pytest.approx(expected, rel=1e-12)


def test_flat_base_holomorphic_curvature_is_minus_four(flat_geom):
    dg = dfm.deform(flat_geom)
    rng = np.random.default_rng(3)
    for x in _points(flat_geom, 4):
        for _ in range(3):
            X = rng.normal(size=dg.dim)
            assert dfm.holomorphic_sectional_tilde_numeric(dg, x, X) == pytest.approx(-4.0, abs=1e-8)
            r = dfm.decay_bounds(dg, x, X)
            assert r.satisfied and abs(r.margin) < 1e-8


def test_decay_orthogonal_bound_is_reported():
    dg = dfm.deform(build_model("flat_ball", 2, 1.0))
    x = np.array([0.4, 0.1, 0.0, 0.0])
    r = dfm.decay_bounds(dg, x, [0.0, 0.0, 1.0, 0.3])
    assert r.bound_orthogonal == pytest.approx(-4.0)
    assert dfm.decay_bounds(dg, x, [1.0, 0.0, 0.0, 0.0]).bound_orthogonal is None


def test_decay_bound_holds_for_positive_curvature_surface():
    from conftest import NONFLAT

    geom = NONFLAT["surface_sin"]()
    dg = dfm.deform(geom)
    for x in _points(geom, 6):
        assert dfm.decay_bounds(dg, x, [1.0, 0.0]).satisfied


@pytest.mark.parametrize("name", ["surface_sinh", "surface_t2", "disc_x_plane"])
def test_decay_bound_needs_nonnegative_curvature(name):
    # counterexamples: K < 0 or Ric(xi^) < 0 on the base breaks the bound
    from conftest import NONFLAT

    geom = NONFLAT[name]()
    dg = dfm.deform(geom)
    x = _points(geom, 1, seed=2)[0]
    X = np.zeros(dg.dim)
    X[0] = 1.0
    r = dfm.decay_bounds(dg, x, X)
    assert not r.satisfied
    assert r.K_tilde == pytest.approx(dfm.holomorphic_sectional_tilde_closed_form(dg, x, X), abs=1e-10)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_einstein_on_flat_ball(n):
    geom = build_model("flat_ball", n, 1.0)
    assert dfm.einstein_residual(dfm.deform(geom), _points(geom, 4)) < 1e-10


def test_einstein_requires_ricci_flat_base():
    from conftest import NONFLAT

    geom = NONFLAT["surface_sin"]()
    with pytest.raises(ValueError, match="Ricci-flat"):
        dfm.einstein_residual(dfm.deform(geom), _points(geom, 1))


def test_xi_not_closed_conformal_for_gtilde():
    dg = dfm.deform(build_model("flat_ball", 2, 1.0))
    x = np.array([0.5, 0.0, 0.0, 0.0])
    assert dfm.xi_not_closed_conformal_tilde(dg, x) == pytest.approx(1.0 / 6.0)
    assert dfm.xi_not_closed_conformal_tilde(dg, x, connection="base") < 1e-14
    # in complex dimension one span{xi, Jxi} is everything and the failure disappears
    dg1 = dfm.deform(build_model("flat_ball", 1, 1.0))
    assert dfm.xi_not_closed_conformal_tilde(dg1, np.array([0.5, 0.2])) < 1e-12


def test_corrupted_xi_breaks_dtheta_identity():
    geom = corrupted_xi_geometry(build_model("flat_ball", 2, 1.0))
    for x in _points(geom, 4):
        assert dfm.dtheta_Jxi_identity_residual(geom, x) > 1e-3


@pytest.mark.parametrize("r", [0.5, 0.9, 0.99])
def test_radial_length_is_artanh(r):
    dg = dfm.deform(build_model("flat_ball", 2, 1.0))
    L = dfm.curve_length_tilde(dg, dfm.radial_segment([1.0, 2.0, 0.0, -1.0], 0.0, r), 0.0, 1.0)
    assert L == pytest.approx(math.atanh(r), abs=1e-8)


def test_length_properties():
    dg = dfm.deform(build_model("flat_ball", 1, 1.0))
    seg = dfm.radial_segment([1.0, 0.0], 0.0, 0.9)
    assert dfm.curve_length_tilde(dg, seg, 0.3, 0.3) == 0.0
    assert dfm.curve_length_tilde(dg, seg, 1.0, 0.0) == pytest.approx(-math.atanh(0.9))
    lengths = [dfm.curve_length_tilde(dg, dfm.radial_segment([1.0, 0.0], 0.0, r), 0.0, 1.0) for r in (0.1, 0.5, 0.9)]
    assert lengths == sorted(lengths)
    with pytest.raises(DomainError):
        dfm.curve_length_tilde(dg, dfm.radial_segment([1.0, 0.0], 0.0, 1.2), 0.0, 1.0)


@settings(max_examples=20, deadline=None)
@given(st.floats(0.0, 0.95), st.floats(0.0, 0.95))
def test_length_dominates_log_bound(r0, r1):
    r0, r1 = sorted((r0, r1))
    dg = dfm.deform(build_model("flat_ball", 1, 1.0))
    L = dfm.curve_length_tilde(dg, dfm.radial_segment([0.0, 1.0], r0, r1), 0.0, 1.0)
    assert L >= dfm.length_lower_bound(1.0, r0, r1) - 1e-12


@settings(max_examples=20, deadline=None)
@given(st.lists(st.floats(-0.5, 0.5), min_size=4, max_size=4), st.integers(0, 2**31))
def test_riemann_closed_form_on_ball_property(x, seed):
    dg = dfm.deform(build_model("flat_ball", 2, 1.0))
    X, Y, Z = np.random.default_rng(seed).normal(size=(3, 4))
    a = dfm.riemann_tilde_closed_form(dg, x, X, Y, Z)
    b = dfm.riemann_tilde_numeric(dg, x, X, Y, Z)
    assert np.max(np.abs(a - b)) <= 1e-9 * max(1.0, np.max(np.abs(b)))


@settings(max_examples=20, deadline=None)
@given(st.lists(st.floats(-0.55, 0.55), min_size=4, max_size=4))
def test_nabla_tilde_matches_closed_form_property(x):
    dg = dfm.deform(build_model("flat_ball", 2, 1.0))
    assert dfm.connection_residual(dg, x) < 1e-9
