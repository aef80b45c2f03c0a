"""Registry of verification checks run by the CLI.

Each check evaluates a residual per sample and is one of four kinds:

``identity``          pass iff max residual <= tolerance
``inequality``        residual is the bound violation ``max(0, -margin)``; same rule
``negative_control``  the identity is expected to break: pass iff max residual > tolerance
``report_only``       residuals are reported, pass is not applicable

Tolerances belong to a class (``first`` for quantities built from first
derivatives, ``second`` for curvature-level quantities) so the CLI can
override them per class.
"""

from __future__ import annotations

import math
import zlib
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import deformation as dfm
from . import models
from . import submanifold as sm
from .curvature import CurvatureData, curvature, holomorphic_sectional, symmetry_residuals
from .geometry import (
    GeometrySpec,
    closed_conformal_residual,
    complex_structure_residual,
    conformal_factor,
    covariant_derivative_xi,
    hermitian_residual,
    kahler_residual,
    sample_points,
)

KINDS = ("identity", "inequality", "negative_control", "report_only")


@dataclass
class Outcome:
    residuals: list = field(default_factory=list)
    notes: list = field(default_factory=list)
    details: dict = field(default_factory=dict)

    def add(self, r: float):
        self.residuals.append(float(r))


@dataclass(frozen=True)
class Check:
    id: str
    kind: str
    order: str
    tolerance: float
    anchor: str
    run: Callable
    requires: frozenset = frozenset()
    min_complex_dim: int = 1
    models: Optional[frozenset] = None


class Context:
    """Shared sample points and per-point curvature caches for one run."""

    def __init__(self, geom: GeometrySpec, points: np.ndarray, seed: int):
        self.geom = geom
        self.points = points
        self.seed = seed
        self.dg = dfm.deform(geom) if geom.J is not None else None
        self._base = {}
        self._tilde = {}

    def rng(self, check_id: str) -> np.random.Generator:
        return np.random.default_rng(np.random.SeedSequence([self.seed, zlib.crc32(check_id.encode())]))

    def base_cd(self, i: int) -> CurvatureData:
        if i not in self._base:
            self._base[i] = curvature(self.geom.metric, self.points[i])
        return self._base[i]

    def tilde_cd(self, i: int) -> CurvatureData:
        if i not in self._tilde:
            self._tilde[i] = self.dg.curvature_tilde(self.points[i])
        return self._tilde[i]


def _rel(a, b) -> float:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return float(np.max(np.abs(a - b)) / max(1.0, float(np.max(np.abs(a))), float(np.max(np.abs(b)))))


def _random_unit(G: np.ndarray, rng) -> np.ndarray:
    v = rng.normal(size=G.shape[0])
    return v / math.sqrt(v @ G @ v)


def _orth_to_xi_jxi(p: dfm.PointData, rng) -> np.ndarray:
    v = rng.normal(size=p.G.shape[0])
    for w in (p.xi, p.Jxi):
        v = v - (w @ p.G @ v) / (w @ p.G @ w) * w
    return v / math.sqrt(v @ p.G @ v)


def _leaf_tangent(leaf: sm.LeafFrame, rng) -> np.ndarray:
    E = leaf.tangent_matrix()
    return E @ rng.normal(size=E.shape[1])


# -- base geometry ----------------------------------------------------------------


def _c_complex_structure(ctx, rng):
    return Outcome([complex_structure_residual(ctx.geom, x) for x in ctx.points])


def _c_hermitian(ctx, rng):
    return Outcome([hermitian_residual(ctx.geom, x) for x in ctx.points])


def _c_kahler(ctx, rng):
    return Outcome([kahler_residual(ctx.geom, x) for x in ctx.points])


def _c_closed_conformal(ctx, rng):
    out = Outcome()
    for x in ctx.points:
        A = covariant_derivative_xi(ctx.geom, x)
        out.add(np.max(np.abs(A - np.trace(A) / ctx.geom.dim * np.eye(ctx.geom.dim))))
    return out


def expected_psi(geom: GeometrySpec, x) -> Optional[float]:
    if geom.name in ("flat_ball", "cone_round_sphere"):
        return 1.0
    if geom.name == "warped_generic":
        kind, *coef = geom.params["f"]
        t = x[0]
        return coef[0] if kind == "affine" else 2 * coef[0] * t + coef[1]
    return None


def _c_psi_value(ctx, rng):
    return Outcome([abs(conformal_factor(ctx.geom, x) - expected_psi(ctx.geom, x)) for x in ctx.points])


def _c_dtheta_jxi(ctx, rng):
    return Outcome([dfm.dtheta_Jxi_identity_residual(ctx.geom, x) for x in ctx.points])


def _c_ricci_xi_normalization(ctx, rng):
    out = Outcome()
    for i, x in enumerate(ctx.points):
        cd = ctx.base_cd(i)
        out.add(abs(dfm.ricci_xi_hat(ctx.geom, x, cd) - dfm.ricci_xi_hat_from_psi(ctx.geom, x, cd)))
    return out


# -- deformation --------------------------------------------------------------------


def _c_gtilde_hermitian(ctx, rng):
    out = Outcome()
    for x in ctx.points:
        Gt = ctx.dg.metric_value(x)
        J = ctx.geom.J_value(x)
        herm = np.max(np.abs(J.T @ Gt @ J - Gt))
        pos = 0.0 if np.linalg.eigvalsh(Gt)[0] > 0 else 1.0
        out.add(max(herm, pos))
    return out


def _c_kahler_closure(ctx, rng):
    return Outcome([dfm.kahler_closure_residual(ctx.dg, x) for x in ctx.points])


def _c_kahler_form_two_routes(ctx, rng):
    return Outcome([dfm.kahler_form_two_routes_residual(ctx.dg, x) for x in ctx.points])


def _c_dmu(ctx, rng):
    return Outcome([dfm.dmu_identity_residual(ctx.dg, x) for x in ctx.points])


def _c_mu_chain(ctx, rng):
    return Outcome([dfm.mu_derivative_residual(ctx.dg, x) for x in ctx.points])


def _c_mu_lower(ctx, rng):
    # mu >= 1/c, with equality only where xi vanishes
    return Outcome([max(0.0, 1.0 / ctx.geom.c - ctx.dg.mu_value(x)) for x in ctx.points])


def _c_gtilde_xi(ctx, rng):
    return Outcome([dfm.gtilde_xi_identities_residual(ctx.dg, x) for x in ctx.points])


def _c_connection(ctx, rng):
    return Outcome([dfm.connection_residual(ctx.dg, x) for x in ctx.points])


def _c_compat(ctx, rng):
    return Outcome([dfm.metric_compatibility_residual(ctx.dg, x) for x in ctx.points])


def _c_nabla_xi_jxi(ctx, rng):
    return Outcome([sm.nabla_tilde_xi_Jxi_residual(ctx.dg, x) for x in ctx.points])


def _c_riemann_formula(ctx, rng):
    out = Outcome()
    for i, x in enumerate(ctx.points):
        X, Y, Z = rng.normal(size=(3, ctx.geom.dim))
        a = dfm.riemann_tilde_closed_form(ctx.dg, x, X, Y, Z, ctx.base_cd(i))
        b = ctx.tilde_cd(i).R(X, Y, Z)
        out.add(np.max(np.abs(a - b)) / max(float(np.max(np.abs(b))), 1e-12))
    return out


def _c_riemann_symmetries(ctx, rng):
    return Outcome([max(symmetry_residuals(ctx.tilde_cd(i)).values()) for i in range(len(ctx.points))])


def _c_ricci_two_routes(ctx, rng):
    out = Outcome()
    for i in range(len(ctx.points)):
        cd = ctx.tilde_cd(i)
        out.add(_rel(cd.ricci, cd.ricci_frame_trace()))
    return out


DIRECTIONS_PER_POINT = 5


def _c_holo_formula(ctx, rng):
    out = Outcome()
    for i, x in enumerate(ctx.points):
        G = ctx.base_cd(i).metric
        for _ in range(DIRECTIONS_PER_POINT):
            X = _random_unit(G, rng)
            a = dfm.holomorphic_sectional_tilde_closed_form(ctx.dg, x, X, ctx.base_cd(i))
            b = dfm.holomorphic_sectional_tilde_numeric(ctx.dg, x, X, ctx.tilde_cd(i))
            out.add(abs(a - b))
    return out


def _c_holo_constant(ctx, rng):
    out = Outcome()
    for i, x in enumerate(ctx.points):
        G = ctx.base_cd(i).metric
        for _ in range(DIRECTIONS_PER_POINT):
            X = _random_unit(G, rng)
            a = dfm.holomorphic_sectional_tilde_closed_form(ctx.dg, x, X, ctx.base_cd(i))
            b = dfm.holomorphic_sectional_tilde_numeric(ctx.dg, x, X, ctx.tilde_cd(i))
            out.add(max(abs(a + 4.0), abs(b + 4.0)))
    return out


def decay_rows(ctx, rng, directions: int = DIRECTIONS_PER_POINT):
    """(point index, direction, DecayResult) with the first direction at each point orthogonal to xi, Jxi."""
    rows = []
    for i, x in enumerate(ctx.points):
        p = dfm.point_data(ctx.dg, x)
        for k in range(directions):
            if k == 0 and ctx.geom.n_complex > 1 and p.norm2 > 0:
                X = _orth_to_xi_jxi(p, rng)
            else:
                X = _random_unit(p.G, rng)
            rows.append((i, X, dfm.decay_bounds(ctx.dg, x, X, base_cd=ctx.base_cd(i), tilde_cd=ctx.tilde_cd(i))))
    return rows


def _c_decay(ctx, rng):
    out = Outcome()
    n_orth = 0
    for _, _, r in decay_rows(ctx, rng):
        out.add(max(0.0, -r.margin))
        n_orth += r.bound_orthogonal is not None
    out.notes.append(f"orthogonal-case bound evaluated at {n_orth} pairs")
    return out


def _c_decay_equality(ctx, rng):
    out = Outcome()
    for _, _, r in decay_rows(ctx, rng):
        out.add(abs(r.margin))
    return out


def _c_einstein(ctx, rng):
    out = Outcome()
    lam = -2.0 * (ctx.geom.n_complex + 1)
    for i in range(len(ctx.points)):
        base = ctx.base_cd(i)
        if np.linalg.norm(base.ricci) > dfm.RICCI_FLAT_TOL:
            raise ValueError("base geometry is not Ricci-flat")
        cd = ctx.tilde_cd(i)
        Rt = cd.ricci_frame_trace()
        out.add(np.linalg.norm(Rt - lam * cd.metric) / np.linalg.norm(cd.metric))
    return out


def _c_ricci_formula(ctx, rng):
    out = Outcome()
    term_abs: dict = {}
    for i, x in enumerate(ctx.points):
        X, Y = rng.normal(size=(2, ctx.geom.dim))
        br = dfm.ricci_tilde_closed_form(ctx.dg, x, X, Y, ctx.base_cd(i))
        oracle = float(X @ ctx.tilde_cd(i).ricci_frame_trace() @ Y)
        out.add(abs(br.total - oracle) / max(1.0, abs(oracle)))
        for k, v in br.terms.items():
            term_abs[k] = term_abs.get(k, 0.0) + abs(v) / len(ctx.points)
    out.details["mean_abs_term"] = term_abs
    return out


def _c_xi_not_cc_tilde(ctx, rng):
    out = Outcome()
    for x in ctx.points:
        out.add(dfm.xi_not_closed_conformal_tilde(ctx.dg, x))
    out.notes.append(f"min residual {min(out.residuals):.6g}")
    return out


def corrupted_xi_geometry(geom: GeometrySpec) -> GeometrySpec:
    """Same metric and J with ``xi + exp(x_0) d_0``, which is not closed conformal."""
    from dataclasses import replace

    from .jet import exp

    def xi(y):
        v = list(geom.xi(y))
        v[0] = v[0] + exp(y[0])
        return v

    return replace(geom, xi=xi, name=geom.name + "+corrupted_xi")


def _c_corrupted_dtheta(ctx, rng):
    bad = corrupted_xi_geometry(ctx.geom)
    out = Outcome([dfm.dtheta_Jxi_identity_residual(bad, x) for x in ctx.points])
    out.notes.append(f"min residual {min(out.residuals):.6g}")
    return out


def _c_warped_not_kahler(ctx, rng):
    out = Outcome([kahler_residual(ctx.geom, x) for x in ctx.points])
    out.notes.append(f"min residual {min(out.residuals):.6g}")
    return out


# -- lengths ------------------------------------------------------------------------

LENGTH_RADII = (0.5, 0.9, 0.99)


def _c_length_growth(ctx, rng):
    out = Outcome()
    s = math.sqrt(ctx.geom.c)
    u = rng.normal(size=ctx.geom.dim)
    for r in LENGTH_RADII:
        L = dfm.curve_length_tilde(ctx.dg, dfm.radial_segment(u, 0.0, r * s), 0.0, 1.0)
        out.add(abs(L - math.atanh(r)))
    out.notes.append("radii are fractions of sqrt(c); reference artanh(r / sqrt(c))")
    return out


def _c_length_lower_bound(ctx, rng):
    out = Outcome()
    s = math.sqrt(ctx.geom.c)
    u = rng.normal(size=ctx.geom.dim)
    grid = (0.0, 0.3, 0.6, 0.9, 0.99)
    for a in grid:
        for b in grid:
            if b <= a:
                continue
            L = dfm.curve_length_tilde(ctx.dg, dfm.radial_segment(u, a * s, b * s), 0.0, 1.0)
            out.add(max(0.0, dfm.length_lower_bound(ctx.geom.c, a * s, b * s) - L))
    return out


# -- leaves -----------------------------------------------------------------------


def _c_leaf_frames(ctx, rng):
    out = Outcome()
    for x in ctx.points:
        vals = [sm.leaf_frame(ctx.geom, x, "xi_perp", "g").orthogonality_residual()]
        if ctx.dg is not None:
            vals.append(sm.leaf_frame(ctx.dg, x, "xi_perp", "gtilde").orthogonality_residual())
            vals.append(sm.leaf_frame(ctx.dg, x, "xi_Jxi", "gtilde").orthogonality_residual())
        out.add(max(vals))
    return out


def _c_umbilicity(ctx, rng):
    out = Outcome()
    for x in ctx.points:
        leaf = sm.leaf_frame(ctx.geom, x)
        X, Y = _leaf_tangent(leaf, rng), _leaf_tangent(leaf, rng)
        out.add(sm.umbilicity_residual(ctx.geom, x, X, Y))
    return out


def _c_sff_tilde(ctx, rng):
    out = Outcome()
    for x in ctx.points:
        leaf = sm.leaf_frame(ctx.dg, x, "xi_perp", "gtilde")
        X, Y = _leaf_tangent(leaf, rng), _leaf_tangent(leaf, rng)
        a = sm.second_fundamental_form(leaf, X, Y)
        b = sm.second_fundamental_form_tilde_closed_form(ctx.dg, x, X, Y)
        out.add(_rel(a, b))
    return out


def _c_sff_extension_invariance(ctx, rng):
    out = Outcome()
    for x in ctx.points:
        leaf = sm.leaf_frame(ctx.dg, x, "xi_perp", "gtilde")
        X, Y = _leaf_tangent(leaf, rng), _leaf_tangent(leaf, rng)
        out.add(_rel(sm.second_fundamental_form(leaf, X, Y, "extension"), sm.second_fundamental_form(leaf, X, Y, "chart")))
    return out


def _c_mean_curvature_formula(ctx, rng):
    out = Outcome()
    k = ctx.geom.dim - 1
    for x in ctx.points:
        out.add(_rel(sm.mean_curvature_trace(ctx.dg, x), k * sm.mean_curvature_tilde(ctx.dg, x)))
    return out


def _c_mean_curvature_closed_trace(ctx, rng):
    out = Outcome()
    for x in ctx.points:
        out.add(_rel(sm.mean_curvature_trace(ctx.dg, x, "oracle"), sm.mean_curvature_trace(ctx.dg, x, "closed_form")))
    return out


LEAF_POINTS = 4


def _c_mean_curvature_spread(ctx, rng):
    out = Outcome()
    for x in ctx.points:
        pts = np.vstack([x[None, :], sm.leaf_points(ctx.geom, x, LEAF_POINTS, rng)])
        out.add(sm.mean_curvature_spread(ctx.dg, pts))
    return out


def _c_sigma_tilde(ctx, rng):
    return Outcome([sm.totally_geodesic_tilde_residual(ctx.dg, x) for x in ctx.points])


def _c_sigma_mixed_g(ctx, rng):
    out = Outcome()
    for x in ctx.points:
        vals = sm.sigma_second_fundamental_form(ctx.geom, x)
        out.add(float(np.max(np.abs(vals[("xi", "Jxi")]))))
    return out


def _c_killing(ctx, rng):
    return Outcome([max(sm.killing_residuals(ctx.geom, ctx.dg, x)) for x in ctx.points])


def _c_killing_xi(ctx, rng):
    out = Outcome([min(sm.killing_residuals(ctx.geom, ctx.dg, x, V=ctx.geom.xi)) for x in ctx.points])
    out.notes.append(f"min residual {min(out.residuals):.6g}")
    return out


def _c_bracket(ctx, rng):
    return Outcome([float(np.max(np.abs(sm.bracket_xi_Jxi(ctx.geom, x)))) for x in ctx.points])


def _c_gauss(ctx, rng):
    out = Outcome()
    for x in ctx.points:
        chart = ctx.geom.leaf_chart(x)
        r = sm.gauss_two_route_residual(sm.gauss_induced_riemann(ctx.geom.metric, chart))
        if ctx.dg is not None:
            r = max(r, sm.gauss_two_route_residual(sm.gauss_induced_riemann(ctx.dg.gtilde_eval, chart)))
        out.add(r)
    return out


def _c_sasaki(ctx, rng):
    out = Outcome()
    for x in ctx.points:
        out.add(sm.sasaki_identity_residual(ctx.geom, x, rng=rng))
    out.notes.append("leaf metric rescaled by 1/|xi|^2 so that Jxi is a unit Reeb field")
    return out


def _c_sasaki_unrescaled(ctx, rng):
    out = Outcome()
    for x in ctx.points:
        out.add(sm.sasaki_identity_residual(ctx.geom, x, rescale=False, rng=rng))
    out.notes.append(f"min residual {min(out.residuals):.6g}")
    return out


# -- cross chart ----------------------------------------------------------------------


def cross_chart_invariants(cone: GeometrySpec, y, X_cone) -> dict:
    """Scalar invariants at ``y`` on the cone and at the corresponding flat-ball point.

    ``X_cone`` is a direction in cone coordinates; it is pushed forward with the
    Jacobian of the cone-to-Cartesian map.  Returns ``{name: (cone, ball)}``.
    """
    ball = models.build_flat_ball(cone.n_complex, cone.c)
    p, D = models.cone_to_cartesian(y)
    X_ball = D @ np.asarray(X_cone, dtype=float)
    out = {}
    for label, geom, pt, X in (("cone", cone, np.asarray(y, dtype=float), X_cone), ("ball", ball, p, X_ball)):
        dg = dfm.deform(geom)
        bcd = curvature(geom.metric, pt)
        tcd = dg.curvature_tilde(pt)
        pd = dfm.point_data(dg, pt)
        vals = {
            "norm2_xi": pd.norm2,
            "psi": pd.psi,
            "mu": pd.mu,
            "K": holomorphic_sectional(bcd, pd.J, X),
            "K_tilde": holomorphic_sectional(tcd, pd.J, X),
            "ric_xi_hat": dfm.ricci_xi_hat(geom, pt, bcd),
            "mean_curvature_norm": sm.mean_curvature_norm(dg, pt),
            "gtilde_X_X": float(np.asarray(X) @ tcd.metric @ np.asarray(X)),
        }
        ev = np.sort(np.linalg.eigvals(np.linalg.solve(tcd.metric, tcd.ricci_frame_trace())).real)
        for k, e in enumerate(ev):
            vals[f"ricci_tilde_eig_{k}"] = float(e)
        for k, v in vals.items():
            out.setdefault(k, [None, None])[0 if label == "cone" else 1] = v
    return {k: tuple(v) for k, v in out.items()}


def _c_cross_chart(ctx, rng):
    out = Outcome()
    for x in ctx.points:
        X = rng.normal(size=ctx.geom.dim)
        inv = cross_chart_invariants(ctx.geom, x, X)
        out.add(max(abs(a - b) for a, b in inv.values()))
    return out


# -- registry ---------------------------------------------------------------------

K = frozenset({"kahler"})
SPH = frozenset({"sphere_leaves"})
KSPH = frozenset({"kahler", "sphere_leaves"})

CHECKS = (
    Check("base.complex_structure", "identity", "first", 1e-10, "J^2 = -1", _c_complex_structure, frozenset({"J"})),
    Check("base.hermitian", "identity", "first", 1e-10, "g(JX, JY) = g(X, Y)", _c_hermitian, K),
    Check("base.kahler", "identity", "first", 1e-7, "nabla J = 0", _c_kahler, K),
    Check("base.closed_conformal", "identity", "first", 1e-7, "nabla_X xi = psi X", _c_closed_conformal),
    Check("base.psi_value", "identity", "first", 1e-9, "psi = f'(t) (1 on ball and cone)", _c_psi_value),
    Check("base.dtheta_jxi", "identity", "first", 1e-7, "d theta_Jxi = 2 psi omega", _c_dtheta_jxi, K),
    Check("base.ricci_xi_normalization", "identity", "second", 1e-7,
          "Ric(xi^) = Ric(xi, xi) / ((2n - 1)|xi|^2) = -d psi(xi) / |xi|^2", _c_ricci_xi_normalization),
    Check("deform.hermitian_positive", "identity", "first", 1e-10, "g~(JX, JY) = g~(X, Y), g~ > 0", _c_gtilde_hermitian, K),
    Check("deform.mu_lower_bound", "inequality", "first", 0.0, "mu >= 1/c", _c_mu_lower, K),
    Check("deform.kahler_closure", "identity", "first", 1e-7, "d omega~ = 0", _c_kahler_closure, K),
    Check("deform.kahler_form_two_routes", "identity", "first", 1e-10,
          "g~(J., .) = mu omega + mu^2 theta_xi ^ theta_Jxi", _c_kahler_form_two_routes, K),
    Check("deform.dmu_identity", "identity", "first", 1e-9, "d mu = 2 psi mu^2 theta_xi", _c_dmu, K),
    Check("deform.mu_chain_rule", "identity", "first", 1e-9, "d mu = mu^2 d|xi|^2", _c_mu_chain, K),
    Check("deform.gtilde_xi", "identity", "first", 1e-10, "g~(X, xi) = c mu^2 <X, xi>", _c_gtilde_xi, K),
    Check("deform.connection_formula", "identity", "first", 1e-7,
          "nabla~_X Y = nabla_X Y + psi mu (<xi,X>Y + <xi,Y>X + <Jxi,X>JY + <Jxi,Y>JX)", _c_connection, K),
    Check("deform.metric_compatibility", "identity", "first", 1e-7, "nabla~ g~ = 0 for the closed-form connection", _c_compat, K),
    Check("deform.nabla_xi_jxi", "identity", "first", 1e-7, "nabla~_xi Jxi = psi (1 + 2 mu |xi|^2) Jxi", _c_nabla_xi_jxi, K),
    Check("deform.riemann_formula", "identity", "second", 1e-4, "closed-form R~(X, Y)Z vs oracle (relative)", _c_riemann_formula, K),
    Check("deform.riemann_symmetries", "identity", "second", 1e-8, "algebraic symmetries and Bianchi for R~", _c_riemann_symmetries, K),
    Check("deform.ricci_two_routes", "identity", "second", 1e-8, "Ric~ contraction vs orthonormal frame trace", _c_ricci_two_routes, K),
    Check("deform.holomorphic_sectional_formula", "identity", "second", 1e-4,
          "K~(X) closed form in K(X), Ric(xi^), psi, mu vs oracle", _c_holo_formula, K),
    Check("deform.holomorphic_sectional_constant", "identity", "second", 1e-4,
          "K~ = -4 for the flat base with psi = 1", _c_holo_constant, frozenset({"kahler", "flat"})),
    Check("deform.decay_bounds", "inequality", "second", 1e-6,
          "K~(X) <= c K(X) + 2c Ric(xi^) - 4 psi^2 (and c K(X) - 4 psi^2 for X orthogonal to xi, Jxi)", _c_decay, K),
    Check("deform.decay_equality_flat", "identity", "second", 1e-4,
          "K~(X) = c K(X) + 2c Ric(xi^) - 4 psi^2 on the flat base", _c_decay_equality, frozenset({"kahler", "flat"})),
    Check("deform.einstein", "identity", "second", 1e-4, "Ric~ = -2(n + 1) g~ for a Ricci-flat base", _c_einstein,
          frozenset({"kahler", "ricci_flat"})),
    Check("deform.ricci_formula", "report_only", "second", 1e-4, "closed-form Ric~(X, Y) vs oracle, per-term", _c_ricci_formula, K),
    Check("deform.length_growth", "identity", "first", 1e-4, "g~-length of the radial segment = artanh(r / sqrt(c))",
          _c_length_growth, frozenset({"kahler", "ball"})),
    Check("deform.length_lower_bound", "inequality", "first", 1e-9,
          "length(r0 -> r) >= |log(c - r0^2) - log(c - r^2)| / 2", _c_length_lower_bound, frozenset({"kahler", "ball"})),
    Check("leaf.frames", "identity", "first", 1e-10, "leaf tangent and normal bases are orthogonal", _c_leaf_frames),
    Check("leaf.umbilicity_g", "identity", "first", 1e-6, "alpha(X, Y) = -psi <X, Y> xi / |xi|^2", _c_umbilicity),
    Check("leaf.sff_tilde_formula", "identity", "first", 1e-5,
          "alpha~(X, Y) = -psi (<X, Y> + 2 mu <Jxi, X><Jxi, Y>) xi / |xi|^2", _c_sff_tilde, K),
    Check("leaf.sff_extension_invariance", "identity", "first", 1e-7,
          "alpha~ from a tangent extension = alpha~ from the leaf chart", _c_sff_extension_invariance, KSPH),
    Check("leaf.mean_curvature_formula", "identity", "first", 1e-6,
          "(2n - 1) H = -psi (2nc + |xi|^2) / (c mu |xi|^2) xi vs frame trace of alpha~", _c_mean_curvature_formula, K),
    Check("leaf.mean_curvature_closed_trace", "identity", "first", 1e-6,
          "frame trace of oracle alpha~ = frame trace of closed-form alpha~", _c_mean_curvature_closed_trace, K),
    Check("leaf.mean_curvature_spread", "identity", "first", 1e-8, "|H|_g~ constant along a leaf", _c_mean_curvature_spread, KSPH),
    Check("leaf.sigma_totally_geodesic_tilde", "identity", "first", 1e-6,
          "span{xi, Jxi} leaves are totally geodesic for g~", _c_sigma_tilde, K, min_complex_dim=2),
    Check("leaf.sigma_mixed_g", "identity", "first", 1e-6, "alpha_Sigma(xi, Jxi) = 0 for g", _c_sigma_mixed_g, K,
          min_complex_dim=2),
    Check("leaf.killing_jxi", "identity", "first", 1e-6, "Jxi is Killing on the leaf for g and g~", _c_killing, K),
    Check("leaf.bracket_xi_jxi", "identity", "first", 1e-8, "[xi, Jxi] = 0", _c_bracket, K),
    Check("leaf.gauss_equation", "identity", "second", 1e-5, "Gauss equation vs intrinsic curvature of the leaf", _c_gauss, SPH),
    Check("leaf.sasaki_identity", "identity", "second", 1e-5, "R_N(X, Jxi)Y = g_N(Jxi, Y)X - g_N(X, Y)Jxi", _c_sasaki, KSPH),
    Check("chart.cross_chart_invariance", "identity", "second", 1e-5, "scalar invariants agree on ball and cone charts",
          _c_cross_chart, frozenset({"kahler", "cone"})),
    Check("control.xi_not_closed_conformal_tilde", "negative_control", "first", 1e-3,
          "xi is not closed conformal for g~", _c_xi_not_cc_tilde, K, min_complex_dim=2),
    Check("control.corrupted_xi_dtheta_jxi", "negative_control", "first", 1e-3,
          "d theta_Jxi = 2 psi omega fails for a non-conformal field", _c_corrupted_dtheta, K, min_complex_dim=2),
    Check("control.killing_xi", "negative_control", "first", 1e-3, "xi is not Killing on the leaf", _c_killing_xi, K),
    Check("control.sasaki_unrescaled", "negative_control", "second", 1e-3,
          "the identity needs the unit Reeb normalization", _c_sasaki_unrescaled, KSPH, min_complex_dim=2),
    Check("control.warped_not_kahler", "negative_control", "first", 1e-3,
          "warped product with f'' != 0 is not Kähler for the cone J", _c_warped_not_kahler, frozenset({"cone_J"})),
)

CHECK_IDS = tuple(c.id for c in CHECKS)
_BY_ID = {c.id: c for c in CHECKS}


def get_check(check_id: str) -> Check:
    if check_id not in _BY_ID:
        raise KeyError(f"unknown check {check_id!r}; valid ids: {', '.join(CHECK_IDS)}")
    return _BY_ID[check_id]


def model_tags(geom: GeometrySpec) -> frozenset:
    tags = set(geom.tags)
    if geom.J is not None:
        tags.add("J")
    return frozenset(tags)


def skip_reason(check: Check, geom: GeometrySpec) -> Optional[str]:
    missing = check.requires - model_tags(geom)
    if missing:
        return "model lacks: " + ", ".join(sorted(missing))
    if geom.n_complex < check.min_complex_dim:
        return f"needs complex dimension >= {check.min_complex_dim}"
    return None


def make_points(geom: GeometrySpec, n: int, seed: int) -> np.ndarray:
    return sample_points(geom, n, np.random.default_rng(np.random.SeedSequence([seed, 0])))
