import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kahlerdeform import deformation as dfm
from kahlerdeform import submanifold as sm
from kahlerdeform.geometry import DegenerateError, sample_points
from kahlerdeform.models import build_model, radial_projection_chart


@pytest.fixture(scope="module")
def ball():
    return build_model("flat_ball", 2, 1.0)


@pytest.fixture(scope="module")
def cone():
    return build_model("cone_round_sphere", 2, 1.0)


def _pts(geom, k=4, seed=0):
    return sample_points(geom, k, np.random.default_rng(seed))


@pytest.mark.parametrize("choice", ["g", "gtilde"])
def test_leaf_frame_xi_perp(ball, choice):
    dg = dfm.deform(ball)
    x = np.array([0.3, 0.2, -0.1, 0.25])
    leaf = sm.leaf_frame(dg, x, "xi_perp", choice)
    M = leaf.metric()
    E = leaf.tangent_matrix()
    N = leaf.normal_matrix()
    assert E.shape == (4, 3) and N.shape == (4, 1)
    np.testing.assert_allclose(E.T @ M @ E, np.eye(3), atol=1e-12)
    assert leaf.orthogonality_residual() < 1e-12
    # the first tangent vector is Jxi normalized
    Jxi = ball.J_value(x) @ x
    np.testing.assert_allclose(E[:, 0], Jxi / np.sqrt(Jxi @ M @ Jxi), atol=1e-12)


def test_leaf_frame_xi_jxi(ball):
    dg = dfm.deform(ball)
    x = np.array([0.3, 0.2, -0.1, 0.25])
    leaf = sm.leaf_frame(dg, x, "xi_Jxi", "gtilde")
    assert len(leaf.normal_basis) == 2
    assert leaf.orthogonality_residual() < 1e-12
    one = sm.leaf_frame(dfm.deform(build_model("flat_ball", 1)), [0.3, 0.1], "xi_Jxi", "gtilde")
    assert one.normal_basis == () and one.normal_matrix().shape == (2, 0)
    assert one.orthogonality_residual() == 0.0


def test_leaf_frame_errors(ball):
    with pytest.raises(DegenerateError):
        sm.leaf_frame(ball, np.zeros(4))
    with pytest.raises(ValueError):
        sm.leaf_frame(ball, [0.1, 0, 0, 0], which="other")
    with pytest.raises(ValueError):
        sm.leaf_frame(ball, [0.1, 0, 0, 0], metric_choice="gtilde")
    with pytest.raises(ValueError):
        sm.leaf_frame(build_model("warped_generic"), _pts(build_model("warped_generic"), 1)[0], "xi_Jxi")


def test_second_fundamental_form_rejects_normal_vectors(ball):
    x = np.array([0.3, 0.0, 0.2, 0.0])
    leaf = sm.leaf_frame(ball, x)
    with pytest.raises(ValueError, match="not tangent"):
        sm.second_fundamental_form(leaf, x, x)


@pytest.mark.parametrize("model", ["flat_ball", "cone_round_sphere"])
def test_umbilicity_and_alpha_tilde(model):
    geom = build_model(model, 2)
    dg = dfm.deform(geom)
    rng = np.random.default_rng(1)
    for x in _pts(geom):
        leaf = sm.leaf_frame(geom, x)
        X, Y = (leaf.tangent_matrix() @ rng.normal(size=(3, 2))).T
        assert sm.umbilicity_residual(geom, x, X, Y) < 1e-10
        assert sm.umbilicity_residual(geom, x, X, Y, method="chart") < 1e-10
        lt = sm.leaf_frame(dg, x, "xi_perp", "gtilde")
        X, Y = (lt.tangent_matrix() @ rng.normal(size=(3, 2))).T
        a = sm.second_fundamental_form(lt, X, Y)
        np.testing.assert_allclose(a, sm.second_fundamental_form_tilde_closed_form(dg, x, X, Y), atol=1e-10)
        np.testing.assert_allclose(a, sm.second_fundamental_form(lt, X, Y, "chart"), atol=1e-10)
        np.testing.assert_allclose(a, sm.second_fundamental_form_tilde(dg, sm.leaf_frame(dg, x), X, Y), atol=1e-12)


def test_alpha_independent_of_leaf_chart(ball):
    dg = dfm.deform(ball)
    x = np.array([0.2, -0.3, 0.1, 0.4])
    lt = sm.leaf_frame(dg, x, "xi_perp", "gtilde")
    X, Y = lt.tangent_matrix()[:, 0], lt.tangent_matrix()[:, 2]
    a = sm.second_fundamental_form(lt, X, Y, "chart", chart=radial_projection_chart(x))
    b = sm.second_fundamental_form(lt, X, Y, "chart", chart=sm.graph_chart(x))
    np.testing.assert_allclose(a, b, atol=1e-12)


def test_shared_jets_match_per_vector_extension(cone):
    dg = dfm.deform(cone)
    x = _pts(cone, 1)[0]
    lt = sm.leaf_frame(dg, x, "xi_perp", "gtilde")
    jets = sm.extension_jets(lt.geom, lt.base)
    E = lt.tangent_matrix()
    for i in range(3):
        for j in range(3):
            np.testing.assert_allclose(
                sm.second_fundamental_form(lt, E[:, i], E[:, j], jets=jets),
                sm.second_fundamental_form(lt, E[:, i], E[:, j]),
                atol=1e-12,
            )


@pytest.mark.parametrize("n,c", [(1, 1.0), (2, 1.0), (3, 4.0)])
def test_mean_curvature_trace_closed_form(n, c):
    # the frame trace equals -psi ((2n - 1) c + |xi|^2) / (c mu |xi|^2) xi
    geom = build_model("flat_ball", n, c)
    dg = dfm.deform(geom)
    for x in _pts(geom, 3):
        p = dfm.point_data(dg, x)
        expected = -p.psi * ((2 * n - 1) * c + p.norm2) / (c * p.mu * p.norm2) * p.xi
        np.testing.assert_allclose(sm.mean_curvature_trace(dg, x), expected, rtol=1e-9, atol=1e-12)
        np.testing.assert_allclose(sm.mean_curvature_trace(dg, x, "closed_form"), expected, rtol=1e-9, atol=1e-12)


def test_mean_curvature_constant_on_leaf(cone):
    dg = dfm.deform(cone)
    rng = np.random.default_rng(5)
    x = _pts(cone, 1)[0]
    pts = np.vstack([x, sm.leaf_points(cone, x, 5, rng)])
    np.testing.assert_allclose(pts[:, 0], x[0])
    assert sm.mean_curvature_spread(dg, pts) < 1e-10


def test_mean_curvature_unknown_source(ball):
    with pytest.raises(ValueError):
        sm.mean_curvature_trace(dfm.deform(ball), [0.3, 0, 0, 0], source="nope")


def test_sigma_leaves(ball):
    dg = dfm.deform(ball)
    for x in _pts(ball):
        assert sm.totally_geodesic_tilde_residual(dg, x) < 1e-10
        assert np.max(np.abs(sm.sigma_second_fundamental_form(ball, x)[("xi", "Jxi")])) < 1e-12
        assert np.max(np.abs(sm.bracket_xi_Jxi(ball, x))) < 1e-14
        assert sm.nabla_tilde_xi_Jxi_residual(dg, x) < 1e-10
    assert sm.totally_geodesic_tilde_residual(dfm.deform(build_model("flat_ball", 1)), [0.3, 0.1]) is None


def test_killing_fields(ball):
    dg = dfm.deform(ball)
    x = np.array([0.5, 0.0, 0.0, 0.0])
    assert max(sm.killing_residuals(ball, dg, x)) < 1e-12
    # L_xi g = 2 g; for g~ the worst g~-unit leaf direction is Jxi, where
    # (L_xi g~)(Jxi, Jxi) / g~(Jxi, Jxi) = 10/3 at |xi|^2 = 1/4, c = 1
    kg, kt = sm.killing_residuals(ball, dg, x, V=ball.xi)
    assert kg == pytest.approx(2.0)
    assert kt == pytest.approx(10.0 / 3.0)


@pytest.mark.parametrize("model", ["flat_ball", "cone_round_sphere"])
def test_gauss_equation_two_routes(model):
    geom = build_model(model, 2)
    dg = dfm.deform(geom)
    for x in _pts(geom, 2):
        chart = geom.leaf_chart(x)
        assert sm.gauss_two_route_residual(sm.gauss_induced_riemann(geom.metric, chart)) < 1e-9
        assert sm.gauss_two_route_residual(sm.gauss_induced_riemann(dg.gtilde_eval, chart)) < 1e-7


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**31))
def test_sasaki_identity_on_unit_sphere_leaf(seed):
    geom = build_model("flat_ball", 2, 4.0)
    rng = np.random.default_rng(seed)
    v = rng.normal(size=4)
    x = v / np.linalg.norm(v)
    assert sm.sasaki_identity_residual(geom, x, rng=rng) < 1e-10
    assert sm.sasaki_identity_residual(geom, x, rescale=False, rng=rng) < 1e-10


def test_sasaki_needs_unit_reeb_normalization(ball):
    x = np.array([0.6, 0.0, 0.0, 0.0])
    assert sm.sasaki_identity_residual(ball, x) < 1e-10
    assert sm.sasaki_identity_residual(ball, x, rescale=False) > 1e-3


def test_sasaki_on_cone_leaves(cone):
    for x in _pts(cone, 3):
        assert sm.sasaki_identity_residual(cone, x) < 1e-9
    with pytest.raises(ValueError):
        sm.sasaki_identity_residual(build_model("warped_generic"), _pts(build_model("warped_generic"), 1)[0])
