"""Leaves of ``<xi>^perp`` and of ``span{xi, Jxi}`` under ``g`` and ``g~``.

Second fundamental forms are computed two ways:

* ``method="extension"``: extend ``Y`` to the tangent field
  ``Y~(p) = Y - (theta_xi(Y) / |xi|^2)(p) xi(p)`` (degree-0 homogeneous on sphere
  leaves) and take the normal part of ``nabla_X Y~``;
* ``method="chart"``: normal part of ``d_a d_b F + Gamma(F_a, F_b)`` for a leaf
  parameterization ``F``.

Both only depend on the tangential values, which the tests assert.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import jet
from .curvature import curvature, lie_derivative_metric
from .deformation import DeformedGeometry, point_data
from .geometry import (
    DegenerateError,
    GeometrySpec,
    TangentVector,
    XI_FLOOR,
    christoffel_from_jets,
    conformal_factor,
    orthonormalize,
)
from .jet import jet_eval
from .models import LeafChart, _householder_to_last

TANGENCY_TOL = 1e-8


@dataclass(frozen=True)
class LeafFrame:
    base: np.ndarray
    tangent_basis: tuple
    normal_basis: tuple
    which: str
    metric_choice: str
    geom: GeometrySpec  # geometry whose metric is the chosen one

    def tangent_matrix(self) -> np.ndarray:
        return np.column_stack([v.comp for v in self.tangent_basis])

    def normal_matrix(self) -> np.ndarray:
        if not self.normal_basis:
            return np.zeros((self.base.shape[0], 0))
        return np.column_stack([v.comp for v in self.normal_basis])

    def metric(self) -> np.ndarray:
        return self.geom.metric_value(self.base)

    def orthogonality_residual(self) -> float:
        if not self.normal_basis:
            return 0.0
        M = self.metric()
        return float(np.max(np.abs(self.tangent_matrix().T @ M @ self.normal_matrix())))


def _resolve(geom_or_dg, metric_choice: str) -> GeometrySpec:
    if metric_choice == "g":
        return geom_or_dg.base if isinstance(geom_or_dg, DeformedGeometry) else geom_or_dg
    if metric_choice == "gtilde":
        if not isinstance(geom_or_dg, DeformedGeometry):
            raise ValueError("metric_choice='gtilde' needs a DeformedGeometry")
        return geom_or_dg.as_geometry()
    raise ValueError("metric_choice must be 'g' or 'gtilde'")


def _xi_nonzero(geom: GeometrySpec, x) -> np.ndarray:
    xi = geom.xi_value(x)
    if np.linalg.norm(xi) < XI_FLOOR:
        raise DegenerateError("xi vanishes at x; no leaf through a singular point")
    return xi


def leaf_frame(geom_or_dg, x, which: str = "xi_perp", metric_choice: str = "g") -> LeafFrame:
    """Tangent and normal bases of the leaf through ``x``.

    ``xi_perp``: the leaf of ``<xi>^perp``; its tangent basis starts with ``Jxi``
    and is orthonormal for the chosen metric, the normal is ``xi`` normalized.
    ``xi_Jxi``: the leaf of ``span{xi, Jxi}``; tangent basis is exactly
    ``(xi, Jxi)``, the normal basis is an orthonormal complement.
    """
    geom = _resolve(geom_or_dg, metric_choice)
    x = geom.check_point(x)
    xi = _xi_nonzero(geom, x)
    M = geom.metric_value(x)
    d = geom.dim
    Jxi = geom.J_value(x) @ xi if geom.J is not None else None
    if which == "xi_perp":
        normal = xi / np.sqrt(xi @ M @ xi)
        cands = ([Jxi] if Jxi is not None else []) + list(np.eye(d))
        basis = []
        for v in cands:
            w = v - (normal @ M @ v) * normal
            for _ in range(2):
                for b in basis:
                    w = w - (b @ M @ w) * b
            nrm = np.sqrt(w @ M @ w)
            if nrm > 1e-8:
                basis.append(w / nrm)
            if len(basis) == d - 1:
                break
        tangent = tuple(TangentVector(x, b) for b in basis)
        normals = (TangentVector(x, normal),)
    elif which == "xi_Jxi":
        if Jxi is None:
            raise ValueError("span{xi, Jxi} needs a complex structure")
        tangent = (TangentVector(x, xi), TangentVector(x, Jxi))
        E = orthonormalize(np.column_stack([xi, Jxi]), M)
        comp = []
        for v in np.eye(d):
            w = v.copy()
            for _ in range(2):
                for b in list(E.T) + comp:
                    w = w - (b @ M @ w) * b
            nrm = np.sqrt(w @ M @ w)
            if nrm > 1e-8:
                comp.append(w / nrm)
            if len(comp) == d - 2:
                break
        normals = tuple(TangentVector(x, b) for b in comp)
    else:
        raise ValueError("which must be 'xi_perp' or 'xi_Jxi'")
    return LeafFrame(x, tangent, normals, which, metric_choice, geom)


def _normal_projector(leaf: LeafFrame) -> np.ndarray:
    """``P`` with ``P V`` the normal part of ``V`` (chosen metric)."""
    M = leaf.metric()
    if leaf.normal_basis:
        N = leaf.normal_matrix()
        return N @ np.linalg.solve(N.T @ M @ N, N.T @ M)
    return np.zeros((M.shape[0], M.shape[0]))


def _check_tangent(leaf: LeafFrame, *vs):
    P = _normal_projector(leaf)
    M = leaf.metric()
    for v in vs:
        nv = P @ v
        scale = max(1.0, np.sqrt(abs(v @ M @ v)))
        if np.sqrt(abs(nv @ M @ nv)) > TANGENCY_TOL * scale:
            raise ValueError("vector is not tangent to the leaf")


def _gamma(metric, x) -> np.ndarray:
    G, dG, _ = jet_eval(metric, x)
    return christoffel_from_jets(G, dG)


def _tangent_extension(geom: GeometrySpec, Y: np.ndarray):
    """``p -> Y - (g(xi, Y) / g(xi, xi)) xi`` as a jet-evaluable field."""

    def field(p):
        M = np.asarray(geom.metric(p), dtype=object)
        xi = np.asarray(geom.xi(p), dtype=object)
        th = M.dot(xi)
        coef = th.dot(Y) / th.dot(xi)
        return [Y[k] - coef * xi[k] for k in range(len(Y))]

    return field


@dataclass(frozen=True)
class ExtensionJets:
    """First jets of the metric and ``xi`` at a point, shared by every ``alpha(X, Y)`` there."""

    M: np.ndarray
    dM: np.ndarray  # [i, j, k] = d_k M_ij
    xi: np.ndarray
    dxi: np.ndarray  # [i, k] = d_k xi^i
    gamma: np.ndarray


def extension_jets(geom: GeometrySpec, x) -> ExtensionJets:
    M, dM, _ = jet_eval(geom.metric, x)
    xi, dxi, _ = jet_eval(geom.xi, x)
    return ExtensionJets(M, dM, xi, dxi, christoffel_from_jets(M, dM))


def _extension_derivative(ej: ExtensionJets, Y: np.ndarray) -> np.ndarray:
    """Jacobian of ``p -> Y - (g(xi, Y) / g(xi, xi)) xi`` by the product rule."""
    th = ej.M @ ej.xi
    n2 = th @ ej.xi
    coef = (th @ Y) / n2
    d_thY = np.einsum("abk,a,b->k", ej.dM, Y, ej.xi) + Y @ ej.M @ ej.dxi
    d_n2 = np.einsum("abk,a,b->k", ej.dM, ej.xi, ej.xi) + 2 * th @ ej.dxi
    dcoef = (d_thY - coef * d_n2) / n2
    return -np.outer(ej.xi, dcoef) - coef * ej.dxi


def second_fundamental_form(
    leaf: LeafFrame,
    X,
    Y,
    method: str = "extension",
    chart: Optional[LeafChart] = None,
    jets: Optional[ExtensionJets] = None,
) -> np.ndarray:
    """Normal-valued ``alpha(X, Y)`` of the ``<xi>^perp`` leaf, under the leaf's metric.

    ``chart`` overrides the model's leaf parameterization for ``method="chart"``;
    it must pass through the leaf's base point at ``chart.u0``.  ``jets`` (from
    ``extension_jets`` at the leaf's base point) switches ``method="extension"``
    to the product-rule derivative of the extension, reusing one jet evaluation.
    """
    if leaf.which != "xi_perp":
        raise ValueError("use sigma_second_fundamental_form for span{xi, Jxi} leaves")
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    _check_tangent(leaf, X, Y)
    geom, x = leaf.geom, leaf.base
    P = _normal_projector(leaf)
    if method == "extension":
        if jets is not None:
            dY = _extension_derivative(jets, Y)
            gam = jets.gamma
        else:
            _, dY, _ = jet_eval(_tangent_extension(geom, Y), x)
            gam = _gamma(geom.metric, x)
        return P @ (dY @ X + np.einsum("kij,i,j->k", gam, X, Y))
    if method == "chart":
        if chart is None:
            if geom.leaf_chart is None:
                raise ValueError(f"{geom.name} has no leaf parameterization")
            chart = geom.leaf_chart(x)
        a = _chart_alpha(geom, x, chart)
        DF = np.array(chart.jacobian(chart.u0), dtype=float)
        cx = _chart_coords(DF, X)
        cy = _chart_coords(DF, Y)
        return np.einsum("kab,a,b->k", a, cx, cy)
    raise ValueError("method must be 'extension' or 'chart'")


def _chart_coords(DF: np.ndarray, V: np.ndarray) -> np.ndarray:
    coef, *_ = np.linalg.lstsq(DF, V, rcond=None)
    if np.max(np.abs(DF @ coef - V)) > TANGENCY_TOL * max(1.0, float(np.max(np.abs(V)))):
        raise ValueError("vector is not tangent to the leaf chart")
    return coef


def chart_normal_projector(M: np.ndarray, DF: np.ndarray) -> np.ndarray:
    """Projector onto the ``M``-orthogonal complement of the columns of ``DF``."""
    _, s, vt = np.linalg.svd(DF.T @ M)
    rank = int(np.sum(s > 1e-12 * s[0]))
    N = vt[rank:].T
    return N @ np.linalg.solve(N.T @ M @ N, N.T @ M)


def _chart_alpha(geom: GeometrySpec, x, chart: Optional[LeafChart] = None, u=None) -> np.ndarray:
    """``alpha[k, a, b]`` in chart coordinates at ``u`` (default: the chart's base point)."""
    if chart is None:
        if geom.leaf_chart is None:
            raise ValueError(f"{geom.name} has no leaf parameterization")
        chart = geom.leaf_chart(x)
    u = chart.u0 if u is None else np.asarray(u, dtype=float)
    F, dF, ddF = jet_eval(chart.point, u)
    M = geom.metric_value(F)
    gam = _gamma(geom.metric, F)
    acc = ddF + np.einsum("kij,ia,jb->kab", gam, dF, dF)
    P = chart_normal_projector(M, dF)
    return np.einsum("kl,lab->kab", P, acc)


def second_fundamental_form_tilde(dg: DeformedGeometry, leaf: LeafFrame, X, Y, method: str = "extension") -> np.ndarray:
    """``alpha~(X, Y)`` from the oracle; ``leaf`` must carry the ``g~`` metric."""
    if leaf.metric_choice != "gtilde":
        leaf = leaf_frame(dg, leaf.base, leaf.which, "gtilde")
    return second_fundamental_form(leaf, X, Y, method)


def second_fundamental_form_g_closed_form(geom: GeometrySpec, x, X, Y) -> np.ndarray:
    """``-psi <X, Y> xi / |xi|^2``."""
    x = geom.check_point(x)
    xi = _xi_nonzero(geom, x)
    G = geom.metric_value(x)
    return -conformal_factor(geom, x) * float(np.asarray(X) @ G @ np.asarray(Y)) * xi / float(xi @ G @ xi)


def second_fundamental_form_tilde_closed_form(dg: DeformedGeometry, x, X, Y) -> np.ndarray:
    """``-psi (<X, Y> + 2 mu <Jxi, X><Jxi, Y>) xi / |xi|^2``."""
    p = point_data(dg, x)
    _xi_nonzero(dg.base, p.x)
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    coef = p.inner(X, Y) + 2 * p.mu * (p.theta_Jxi @ X) * (p.theta_Jxi @ Y)
    return -p.psi * coef * p.xi / p.norm2


def umbilicity_residual(geom: GeometrySpec, x, X, Y, method: str = "extension") -> float:
    """``|alpha(X, Y) + psi <X, Y> xi / |xi|^2|_g`` under the base metric."""
    leaf = leaf_frame(geom, x, "xi_perp", "g")
    r = second_fundamental_form(leaf, X, Y, method) - second_fundamental_form_g_closed_form(geom, leaf.base, X, Y)
    return float(np.sqrt(abs(r @ leaf.metric() @ r)))


def mean_curvature_tilde(dg: DeformedGeometry, x) -> np.ndarray:
    """``H`` from ``(2n - 1) H = -psi (2nc + |xi|^2) / (c mu |xi|^2) xi`` as stated."""
    p = point_data(dg, x)
    _xi_nonzero(dg.base, p.x)
    n, c = dg.n_complex, p.c
    return -p.psi * (2 * n * c + p.norm2) / (c * p.mu * p.norm2) * p.xi / (2 * n - 1)


def mean_curvature_trace(dg: DeformedGeometry, x, source: str = "oracle", method: str = "extension") -> np.ndarray:
    """``sum_a alpha~(e_a, e_a)`` over a ``g~``-orthonormal leaf frame, i.e. ``(2n - 1) H``.

    ``source="oracle"`` traces the numerical second fundamental form,
    ``source="closed_form"`` traces the closed-form ``alpha~``.
    """
    leaf = leaf_frame(dg, x, "xi_perp", "gtilde")
    jets = extension_jets(leaf.geom, leaf.base) if source == "oracle" and method == "extension" else None
    out = np.zeros(dg.dim)
    for e in leaf.tangent_basis:
        if source == "oracle":
            out = out + second_fundamental_form(leaf, e.comp, e.comp, method, jets=jets)
        elif source == "closed_form":
            out = out + second_fundamental_form_tilde_closed_form(dg, leaf.base, e.comp, e.comp)
        else:
            raise ValueError("source must be 'oracle' or 'closed_form'")
    return out


def mean_curvature_norm(dg: DeformedGeometry, x, source: str = "oracle") -> float:
    """``|H|_g~`` with ``H`` from the frame trace (``source="oracle"``) or the stated formula (``"formula"``)."""
    x = dg.check_point(x)
    if source == "formula":
        H = mean_curvature_tilde(dg, x)
    else:
        H = mean_curvature_trace(dg, x, "oracle") / (dg.dim - 1)
    return float(np.sqrt(H @ dg.metric_value(x) @ H))


def leaf_points(geom: GeometrySpec, x, k: int, rng: np.random.Generator, spread: float = 0.5) -> np.ndarray:
    """``k`` points on the leaf of ``<xi>^perp`` through ``x``, via its chart."""
    x = geom.check_point(x)
    if geom.leaf_chart is None:
        raise ValueError(f"{geom.name} has no leaf parameterization")
    chart = geom.leaf_chart(x)
    out = []
    tries = 0
    while len(out) < k:
        tries += 1
        if tries > 1000 * max(k, 1):
            raise RuntimeError("could not sample the leaf inside the domain")
        u = chart.u0 + spread * rng.normal(size=chart.u0.shape)
        p = np.array(chart.point(u), dtype=float)
        if geom.domain(p):
            out.append(p)
    return np.array(out).reshape(k, geom.dim)


def mean_curvature_spread(dg: DeformedGeometry, points) -> float:
    """``max - min`` of the oracle ``|H|_g~`` over points of one leaf."""
    vals = [mean_curvature_norm(dg, p) for p in np.atleast_2d(points)]
    return float(max(vals) - min(vals))


# -- span{xi, Jxi} leaves -------------------------------------------------------


def _xi_and_Jxi_fields(geom: GeometrySpec):
    def xi(p):
        return geom.xi(p)

    def Jxi(p):
        return np.asarray(geom.J(p), dtype=object).dot(np.asarray(geom.xi(p), dtype=object))

    return xi, Jxi


def sigma_second_fundamental_form(geom: GeometrySpec, x) -> dict:
    """Normal parts of ``nabla_U V`` for ``U, V`` in ``{xi, Jxi}`` under ``geom``'s metric."""
    x = geom.check_point(x)
    _xi_nonzero(geom, x)
    leaf = leaf_frame(geom, x, "xi_Jxi", "g")
    P = _normal_projector(leaf)
    gam = _gamma(geom.metric, x)
    fields = dict(zip(("xi", "Jxi"), _xi_and_Jxi_fields(geom)))
    vals = {}
    jets = {k: jet_eval(f, x) for k, f in fields.items()}
    for a in fields:
        for b in fields:
            U = jets[a][0]
            V, dV, _ = jets[b]
            vals[(a, b)] = P @ (dV @ U + np.einsum("kij,i,j->k", gam, U, V))
    return vals


def totally_geodesic_tilde_residual(dg: DeformedGeometry, x) -> Optional[float]:
    """``max |alpha~_Sigma(U, V)|_g~`` over ``U, V`` in ``{xi, Jxi}``; ``None`` when ``n = 1``."""
    if dg.n_complex == 1:
        return None
    geom = dg.as_geometry()
    vals = sigma_second_fundamental_form(geom, x)
    M = dg.metric_value(x)
    return float(max(np.sqrt(abs(v @ M @ v)) for v in vals.values()))


def nabla_tilde_xi_Jxi_residual(dg: DeformedGeometry, x) -> float:
    """``nabla~_xi Jxi`` (oracle Christoffels of ``g~``) against ``psi (1 + 2 mu |xi|^2) Jxi``."""
    p = point_data(dg, x)
    gam = _gamma(dg.gtilde_eval, p.x)
    _, Jxi_f = _xi_and_Jxi_fields(dg.base)
    Jxi, dJxi, _ = jet_eval(Jxi_f, p.x)
    lhs = dJxi @ p.xi + np.einsum("kij,i,j->k", gam, p.xi, Jxi)
    rhs = p.psi * (1 + 2 * p.mu * p.norm2) * p.Jxi
    return float(np.max(np.abs(lhs - rhs)) / max(1.0, float(np.max(np.abs(rhs)))))


def bracket_xi_Jxi(geom: GeometrySpec, x) -> np.ndarray:
    """``[xi, Jxi]^k = xi^j d_j (Jxi)^k - (Jxi)^j d_j xi^k``."""
    x = geom.check_point(x)
    xi_f, Jxi_f = _xi_and_Jxi_fields(geom)
    xi, dxi, _ = jet_eval(xi_f, x)
    Jxi, dJxi, _ = jet_eval(Jxi_f, x)
    return dJxi @ xi - dxi @ Jxi


# -- Killing fields ---------------------------------------------------------------


def killing_residuals(geom: GeometrySpec, dg: DeformedGeometry, x, V=None) -> tuple:
    """Tangential ``L_V`` of the induced ``g`` and ``g~`` on the ``<xi>^perp`` leaf (default ``V = Jxi``).

    ``V`` must be tangent to the leaves, so the ambient Lie derivative restricted
    to leaf-tangent vectors is the Lie derivative of the induced metric.  Passing
    ``V = geom.xi`` gives a negative control (``xi`` is normal, not tangent, and
    ``L_xi g = 2 psi g``).
    """
    x = geom.check_point(x)
    _xi_nonzero(geom, x)
    if V is None:
        V = _xi_and_Jxi_fields(geom)[1]
    out = []
    for metric, choice in ((geom.metric, "g"), (dg.gtilde_eval, "gtilde")):
        E = leaf_frame(dg, x, "xi_perp", choice).tangent_matrix()
        L = lie_derivative_metric(V, metric, x)
        out.append(float(np.max(np.abs(E.T @ L @ E))))
    return tuple(out)


# -- Gauss equation and the Sasaki identity -------------------------------------


@dataclass(frozen=True)
class GaussData:
    u: np.ndarray
    point: np.ndarray
    jacobian: np.ndarray
    induced_metric: np.ndarray
    riemann_low: np.ndarray  # [a, b, c, e] = h(R_N(d_a, d_b) d_c, d_e) via the Gauss equation
    riemann_intrinsic: np.ndarray  # same layout, from the induced metric directly

    def R(self, X, Y, Z, source: str = "gauss") -> np.ndarray:
        """Vector ``R_N(X, Y)Z`` in chart coordinates."""
        Rl = self.riemann_low if source == "gauss" else self.riemann_intrinsic
        return np.linalg.solve(self.induced_metric, np.einsum("abce,a,b,c->e", Rl, X, Y, Z))


def induced_metric_field(metric, chart: LeafChart):
    """``u -> DF(u)^T M(F(u)) DF(u)`` as a jet-evaluable field."""

    def h(u):
        F = np.asarray(chart.point(u), dtype=object)
        DF = np.asarray(chart.jacobian(u), dtype=object)
        M = np.asarray(metric(F), dtype=object)
        return DF.T.dot(M.dot(DF))

    return h


def gauss_induced_riemann(metric, chart: LeafChart, u=None) -> GaussData:
    """Leaf curvature from ambient curvature plus ``alpha`` (Gauss equation) and, independently, intrinsically."""
    u = chart.u0 if u is None else np.asarray(u, dtype=float)
    F, dF, ddF = jet_eval(chart.point, u)
    amb = curvature(metric, F)
    M = amb.metric
    acc = ddF + np.einsum("kij,ia,jb->kab", amb.gamma, dF, dF)
    P = chart_normal_projector(M, dF)
    alpha = np.einsum("kl,lab->kab", P, acc)
    Ramb = np.einsum("ijkl,ia,jb,kc,le->abce", amb.riemann_low, dF, dF, dF, dF)
    aa = np.einsum("kbc,kl,lae->abce", alpha, M, alpha)
    ac = np.einsum("kac,kl,lbe->abce", alpha, M, alpha)
    Rn = Ramb + aa - ac
    intrinsic = curvature(induced_metric_field(metric, chart), u)
    return GaussData(u, F, dF, intrinsic.metric, Rn, intrinsic.riemann_low)


def gauss_two_route_residual(gd: GaussData) -> float:
    scale = max(1.0, float(np.max(np.abs(gd.riemann_intrinsic))))
    return float(np.max(np.abs(gd.riemann_low - gd.riemann_intrinsic))) / scale


def reeb_chart_vector(geom: GeometrySpec, gd: GaussData) -> np.ndarray:
    """``Jxi`` at the chart point, in chart coordinates."""
    Jxi = geom.J_value(gd.point) @ geom.xi_value(gd.point)
    return _chart_coords(gd.jacobian, Jxi)


def sasaki_identity_residual(geom: GeometrySpec, x, X=None, Y=None, rescale: bool = True, rng=None) -> float:
    """``|R_N(X, Jxi)Y - (g_N(Jxi, Y)X - g_N(X, Y)Jxi)|`` on the sphere leaf through ``x``.

    ``X, Y`` are chart-coordinate tangent vectors (random when omitted).  With
    ``rescale`` the leaf metric is divided by ``|xi|^2`` so that ``Jxi`` is a unit
    Reeb field; ``R_N`` as a (1,3) tensor is unchanged by constant rescaling.
    """
    if "sphere_leaves" not in geom.tags:
        raise ValueError("the identity is checked on round-sphere leaves only")
    x = geom.check_point(x)
    xi = _xi_nonzero(geom, x)
    chart = geom.leaf_chart(x)
    gd = gauss_induced_riemann(geom.metric, chart)
    k = gd.induced_metric.shape[0]
    if X is None or Y is None:
        rng = np.random.default_rng(0) if rng is None else rng
        X, Y = rng.normal(size=(2, k))
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    scale = 1.0 / float(xi @ geom.metric_value(x) @ xi) if rescale else 1.0
    h = scale * gd.induced_metric
    T = reeb_chart_vector(geom, gd)
    lhs = gd.R(X, T, Y)
    rhs = (T @ h @ Y) * X - (X @ h @ Y) * T
    r = lhs - rhs
    return float(np.sqrt(abs(r @ h @ r)))


# -- second chart for sphere leaves ---------------------------------------------


def graph_chart(x) -> LeafChart:
    """Sphere through ``x`` as a graph over its tangent plane: ``u -> Q (u, sqrt(r^2 - |u|^2))``."""
    x = np.asarray(x, dtype=float)
    r = float(np.linalg.norm(x))
    if r < 1e-12:
        raise ValueError("no sphere leaf through the origin")
    Q = _householder_to_last(x)
    d = x.shape[0]

    def height(u):
        return jet.sqrt(r * r - sum(ui * ui for ui in u))

    def point(u):
        v = list(u) + [height(u)]
        return [sum(Q[a, b] * v[b] for b in range(d)) for a in range(d)]

    def jacobian(u):
        s = height(u)
        col_last = [-ui / s for ui in u]
        return [[Q[a, j] + Q[a, d - 1] * col_last[j] for j in range(d - 1)] for a in range(d)]

    return LeafChart(point, jacobian, np.zeros(d - 1), r)
