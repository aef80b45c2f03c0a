"""The deformed metric ``g~ = mu g + mu^2 (theta_xi^2 + theta_Jxi^2)`` and its closed forms.

Here ``mu = 1 / (c - |xi|^2)``, ``theta_V = g(V, .)`` and ``psi`` is the conformal
factor of ``xi``.  Every closed form takes base-geometry curvature from the
numerical oracle in :mod:`kahlerdeform.curvature`, so the formulas are exercised
for an arbitrary Kähler base.  ``<.,.>`` in docstrings always means the base
metric ``g``.

``Ric(xi^)`` is the normalized Ricci curvature ``Ric(xi, xi) / ((2n - 1) |xi|^2)``.
For a closed conformal field this equals ``-d psi(xi) / |xi|^2``, see
:func:`ricci_xi_hat_from_psi`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional

import numpy as np

from . import jet
from .curvature import CurvatureData, DENOMINATOR_FLOOR, curvature, holomorphic_sectional, ricci_direction
from .geometry import (
    DegenerateError,
    DomainError,
    GeometrySpec,
    XI_FLOOR,
    christoffel_from_jets,
    conformal_factor,
    one_form_exterior_derivative,
    two_form_exterior_derivative,
)
from .jet import jet_eval


def _obj(a) -> np.ndarray:
    return np.asarray(a, dtype=object)


def _scale(s, A: np.ndarray) -> np.ndarray:
    """``s * A`` elementwise; jets refuse numpy broadcasting on purpose."""
    out = np.empty(A.shape, dtype=object)
    for idx in np.ndindex(A.shape):
        out[idx] = s * A[idx]
    return out


@dataclass(frozen=True)
class DeformedGeometry:
    base: GeometrySpec
    mu_eval: Callable
    gtilde_eval: Callable
    omega_tilde_eval: Callable
    # second route: mu omega + mu^2 theta_xi ^ theta_Jxi
    omega_tilde_forms_eval: Callable

    @property
    def c(self) -> float:
        return self.base.c

    @property
    def dim(self) -> int:
        return self.base.dim

    @property
    def n_complex(self) -> int:
        return self.base.n_complex

    def check_point(self, x) -> np.ndarray:
        x = self.base.check_point(x)
        if float(self.base.xi_value(x) @ self.base.metric_value(x) @ self.base.xi_value(x)) >= self.c:
            raise DomainError("|xi|^2 >= c at the evaluation point")
        return x

    def metric_value(self, x) -> np.ndarray:
        return np.array(self.gtilde_eval(np.asarray(x, dtype=float)), dtype=float)

    def mu_value(self, x) -> float:
        return float(self.mu_eval(np.asarray(x, dtype=float)))

    def as_geometry(self) -> GeometrySpec:
        """``(M, J, g~)`` with the same ``xi`` as a plain :class:`GeometrySpec`."""
        b = self.base
        return GeometrySpec(
            n_complex=b.n_complex,
            c=b.c,
            metric=self.gtilde_eval,
            xi=b.xi,
            J=b.J,
            domain=b.domain,
            sample_box=b.sample_box,
            name=b.name + "~",
            params=b.params,
            tags=b.tags - {"flat", "ricci_flat"},
            leaf_chart=b.leaf_chart,
        )

    def base_curvature(self, x) -> CurvatureData:
        return curvature(self.base.metric, self.check_point(x))

    def curvature_tilde(self, x) -> CurvatureData:
        return curvature(self.gtilde_eval, self.check_point(x))


def _base_fields(geom: GeometrySpec, y):
    G = _obj(geom.metric(y))
    xi = _obj(geom.xi(y))
    J = _obj(geom.J(y))
    th_xi = G.dot(xi)
    Jxi = J.dot(xi)
    th_Jxi = G.dot(Jxi)
    norm2 = xi.dot(th_xi)
    return G, J, th_xi, th_Jxi, norm2


def _mu(c, norm2):
    if jet.value_of(norm2) >= c:
        raise DomainError("|xi|^2 >= c; the deformation is undefined here")
    return 1.0 / (c - norm2)


def deform(geom: GeometrySpec) -> DeformedGeometry:
    """Build ``g~`` and ``omega~`` as jet-evaluable fields."""
    if geom.J is None:
        raise ValueError(f"{geom.name} carries no complex structure; the deformation needs J")
    c = geom.c

    def mu_eval(y):
        _, _, _, _, norm2 = _base_fields(geom, y)
        return _mu(c, norm2)

    def gtilde_eval(y):
        G, _, a, b, norm2 = _base_fields(geom, y)
        mu = _mu(c, norm2)
        mu2 = mu * mu
        return _scale(mu, G) + _scale(mu2, np.outer(a, a) + np.outer(b, b))

    def omega_tilde_eval(y):
        J = _obj(geom.J(y))
        return J.T.dot(_obj(gtilde_eval(y)))

    def omega_tilde_forms_eval(y):
        G, J, a, b, norm2 = _base_fields(geom, y)
        mu = _mu(c, norm2)
        omega = J.T.dot(G)
        return _scale(mu, omega) + _scale(mu * mu, np.outer(a, b) - np.outer(b, a))

    return DeformedGeometry(geom, mu_eval, gtilde_eval, omega_tilde_eval, omega_tilde_forms_eval)


class PointData(NamedTuple):
    """Base-geometry quantities at one point."""

    x: np.ndarray
    G: np.ndarray
    J: np.ndarray
    xi: np.ndarray
    Jxi: np.ndarray
    theta_xi: np.ndarray
    theta_Jxi: np.ndarray
    norm2: float
    mu: float
    psi: float
    c: float

    def inner(self, X, Y) -> float:
        return float(X @ self.G @ Y)

    def gtilde(self) -> np.ndarray:
        return self.mu * self.G + self.mu**2 * (
            np.outer(self.theta_xi, self.theta_xi) + np.outer(self.theta_Jxi, self.theta_Jxi)
        )


def point_data(dg: DeformedGeometry, x) -> PointData:
    x = dg.check_point(x)
    b = dg.base
    G = b.metric_value(x)
    J = b.J_value(x)
    xi = b.xi_value(x)
    Jxi = J @ xi
    norm2 = float(xi @ G @ xi)
    return PointData(
        x, G, J, xi, Jxi, G @ xi, G @ Jxi, norm2, 1.0 / (dg.c - norm2), conformal_factor(b, x), dg.c
    )


def _relative(a, b) -> float:
    """``max |a - b|`` over ``max(1, max |a|, max |b|)``; rounding scales with magnitude."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return float(np.max(np.abs(a - b)) / max(1.0, float(np.max(np.abs(a))), float(np.max(np.abs(b)))))


# -- Kähler form ----------------------------------------------------------------


def kahler_form_tilde(dg: DeformedGeometry, x, route: str = "forms") -> np.ndarray:
    """``omega~ = mu omega + mu^2 theta_xi ^ theta_Jxi`` (``route="forms"``) or ``g~(J., .)`` (``"metric"``)."""
    x = dg.check_point(x)
    if route == "forms":
        f = dg.omega_tilde_forms_eval
    elif route == "metric":
        f = dg.omega_tilde_eval
    else:
        raise ValueError("route must be 'forms' or 'metric'")
    return np.array(f(x), dtype=float)


def kahler_form_two_routes_residual(dg: DeformedGeometry, x) -> float:
    return _relative(kahler_form_tilde(dg, x, "forms"), kahler_form_tilde(dg, x, "metric"))


def kahler_closure_residual(dg: DeformedGeometry, x) -> float:
    """``max |d omega~|`` with ``omega~ = g~(J., .)``."""
    x = dg.check_point(x)
    return float(np.max(np.abs(two_form_exterior_derivative(dg.omega_tilde_eval, x))))


def dmu_identity_residual(dg: DeformedGeometry, x) -> float:
    """``max_i |d_i mu - 2 psi mu^2 (theta_xi)_i|``, relative to ``max(1, |d mu|)``."""
    p = point_data(dg, x)
    _, dmu, _ = jet_eval(dg.mu_eval, p.x)
    return _relative(dmu, 2.0 * p.psi * p.mu**2 * p.theta_xi)


def mu_derivative_residual(dg: DeformedGeometry, x) -> float:
    """Jet derivative of ``mu`` against the chain rule ``d mu = mu^2 d|xi|^2``."""
    x = dg.check_point(x)
    b = dg.base

    def norm2(y):
        _, _, _, _, n2 = _base_fields(b, y)
        return n2

    _, dn, _ = jet_eval(norm2, x)
    mu, dmu, _ = jet_eval(dg.mu_eval, x)
    return _relative(dmu, mu * mu * dn)


def theta_Jxi_field(geom: GeometrySpec) -> Callable:
    def f(y):
        G = _obj(geom.metric(y))
        return G.dot(_obj(geom.J(y)).dot(_obj(geom.xi(y))))

    return f


def dtheta_Jxi_identity_residual(dg, x) -> float:
    """``max |(d theta_Jxi)_ij - 2 psi omega_ij|`` for the base geometry (or a DeformedGeometry's base)."""
    geom = dg.base if isinstance(dg, DeformedGeometry) else dg
    x = geom.check_point(x)
    dth = one_form_exterior_derivative(theta_Jxi_field(geom), x)
    omega = geom.J_value(x).T @ geom.metric_value(x)
    return float(np.max(np.abs(dth - 2.0 * conformal_factor(geom, x) * omega)))


def gtilde_xi_identities_residual(dg: DeformedGeometry, x, X=None) -> float:
    """Residual of ``g~(X, xi) = c mu^2 <X, xi>`` and ``g~(xi, xi) = c mu^2 |xi|^2``."""
    p = point_data(dg, x)
    Gt = p.gtilde()
    X = np.eye(dg.dim) if X is None else np.atleast_2d(np.asarray(X, dtype=float))
    lhs = X @ Gt @ p.xi
    rhs = p.c * p.mu**2 * (X @ p.G @ p.xi)
    r1 = np.max(np.abs(lhs - rhs)) / max(1.0, float(np.max(np.abs(lhs))))
    a = p.xi @ Gt @ p.xi
    b = p.c * p.mu**2 * p.norm2
    r2 = abs(a - b) / max(1.0, abs(a))
    return float(max(r1, r2))


# -- connection -----------------------------------------------------------------


def connection_tilde_closed_form(dg: DeformedGeometry, x) -> np.ndarray:
    """``Gamma~^k_ij = Gamma^k_ij + psi mu (th_xi_i d^k_j + th_xi_j d^k_i + th_Jxi_i J^k_j + th_Jxi_j J^k_i)``."""
    p = point_data(dg, x)
    G, dG, _ = jet_eval(dg.base.metric, p.x)
    gamma = christoffel_from_jets(G, dG)
    d = dg.dim
    eye = np.eye(d)
    corr = (
        np.einsum("i,kj->kij", p.theta_xi, eye)
        + np.einsum("j,ki->kij", p.theta_xi, eye)
        + np.einsum("i,kj->kij", p.theta_Jxi, p.J)
        + np.einsum("j,ki->kij", p.theta_Jxi, p.J)
    )
    return gamma + p.psi * p.mu * corr


def nabla_tilde(dg: DeformedGeometry, x, X, Y, dY=None) -> np.ndarray:
    """``nabla~_X Y`` for a field ``Y`` with ``dY[k, j] = d_j Y^k`` at ``x`` (default: constant components)."""
    p = point_data(dg, x)
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    G, dG, _ = jet_eval(dg.base.metric, p.x)
    gamma = christoffel_from_jets(G, dG)
    out = np.einsum("kij,i,j->k", gamma, X, Y)
    if dY is not None:
        out = out + np.asarray(dY, dtype=float) @ X
    corr = (
        (p.theta_xi @ X) * Y
        + (p.theta_xi @ Y) * X
        + (p.theta_Jxi @ X) * (p.J @ Y)
        + (p.theta_Jxi @ Y) * (p.J @ X)
    )
    return out + p.psi * p.mu * corr


def connection_residual(dg: DeformedGeometry, x) -> float:
    x = dg.check_point(x)
    Gt, dGt, _ = jet_eval(dg.gtilde_eval, x)
    numeric = christoffel_from_jets(Gt, dGt)
    return float(np.max(np.abs(numeric - connection_tilde_closed_form(dg, x))))


def metric_compatibility_residual(dg: DeformedGeometry, x) -> float:
    """``max |d_k g~_ij - g~(nabla~_k d_i, d_j) - g~(d_i, nabla~_k d_j)|`` for the closed-form connection.

    Relative to ``max(1, |d g~|)``.
    """
    x = dg.check_point(x)
    Gt, dGt, _ = jet_eval(dg.gtilde_eval, x)
    gam = connection_tilde_closed_form(dg, x)
    return _relative(dGt, np.einsum("mki,mj->ijk", gam, Gt) + np.einsum("mkj,im->ijk", gam, Gt))


def nabla_tilde_xi_matrix(dg: DeformedGeometry, x) -> np.ndarray:
    """``A[k, j] = (nabla~_{d_j} xi)^k`` with the closed-form connection."""
    x = dg.check_point(x)
    xi, dxi, _ = jet_eval(dg.base.xi, x)
    gam = connection_tilde_closed_form(dg, x)
    return dxi + np.einsum("kji,i->kj", gam, xi)


def closed_conformal_minimax(A: np.ndarray) -> float:
    """``min_phi max_jk |A - phi I|_jk``: the best max-norm fit of ``A`` by a multiple of the identity."""
    off = A - np.diag(np.diag(A))
    diag = np.diag(A)
    return float(max(np.max(np.abs(off)), (np.max(diag) - np.min(diag)) / 2.0))


def xi_not_closed_conformal_tilde(dg: DeformedGeometry, x, connection: str = "tilde") -> float:
    """How far ``xi`` is from closed conformal: ``min_phi max |nabla_X xi - phi X|`` over coordinate ``X``.

    ``connection="base"`` evaluates the same functional with the base connection
    (zero for a closed conformal field).
    """
    from .geometry import covariant_derivative_xi

    x = dg.check_point(x)
    if np.linalg.norm(dg.base.xi_value(x)) < XI_FLOOR:
        raise DegenerateError("xi vanishes at x")
    if connection == "tilde":
        A = nabla_tilde_xi_matrix(dg, x)
    elif connection == "base":
        A = covariant_derivative_xi(dg.base, x)
    else:
        raise ValueError("connection must be 'tilde' or 'base'")
    return closed_conformal_minimax(A)


# -- curvature ------------------------------------------------------------------


def ricci_xi_hat(dg_or_geom, x, cd: Optional[CurvatureData] = None) -> float:
    """``Ric(xi^)`` from the Ricci oracle; 0 where ``xi`` vanishes."""
    geom = dg_or_geom.base if isinstance(dg_or_geom, DeformedGeometry) else dg_or_geom
    x = geom.check_point(x)
    xi = geom.xi_value(x)
    if cd is None:
        cd = curvature(geom.metric, x)
    if np.sqrt(max(cd.inner(xi, xi), 0.0)) < XI_FLOOR:
        return 0.0
    return ricci_direction(cd, xi)


def psi_gradient(geom: GeometrySpec, x, cd: Optional[CurvatureData] = None) -> np.ndarray:
    """``d_m psi`` from second jets of ``xi`` and first derivatives of the Christoffels."""
    x = geom.check_point(x)
    if cd is None:
        cd = curvature(geom.metric, x)
    xi, dxi, ddxi = jet_eval(geom.xi, x)
    # psi = (d_i xi^i + Gamma^i_ik xi^k) / d
    term = (
        np.einsum("iim->m", ddxi)
        + np.einsum("iikm,k->m", cd.gamma_grad, xi)
        + np.einsum("iik,km->m", cd.gamma, dxi)
    )
    return term / geom.dim


def ricci_xi_hat_from_psi(geom: GeometrySpec, x, cd: Optional[CurvatureData] = None) -> float:
    """``-d psi(xi) / |xi|^2``, the operational form of ``Ric(xi^)``."""
    x = geom.check_point(x)
    if cd is None:
        cd = curvature(geom.metric, x)
    xi = geom.xi_value(x)
    n2 = cd.inner(xi, xi)
    if np.sqrt(max(n2, 0.0)) < XI_FLOOR:
        return 0.0
    return float(-psi_gradient(geom, x, cd) @ xi / n2)


def riemann_tilde_closed_form(dg: DeformedGeometry, x, X, Y, Z, base_cd: Optional[CurvatureData] = None) -> np.ndarray:
    """``R~(X, Y)Z`` from the base curvature, ``Ric(xi^)``, ``psi`` and ``mu``."""
    p = point_data(dg, x)
    if base_cd is None:
        base_cd = curvature(dg.base.metric, p.x)
    r = ricci_xi_hat(dg, p.x, base_cd)
    X, Y, Z = (np.asarray(v, dtype=float) for v in (X, Y, Z))
    J = p.J
    ip = p.inner
    JX, JY, JZ = J @ X, J @ Y, J @ Z
    xX, xY, xZ = p.theta_xi @ X, p.theta_xi @ Y, p.theta_xi @ Z
    jX, jY, jZ = p.theta_Jxi @ X, p.theta_Jxi @ Y, p.theta_Jxi @ Z

    ricci_group = (
        xX * xZ * Y + xX * jY * JZ + xX * jZ * JY - xY * xZ * X - xY * jX * JZ - xY * jZ * JX
    )
    psi_group = ip(X, Z) * Y + 2 * ip(JX, Y) * JZ + ip(JX, Z) * JY - ip(Y, Z) * X - ip(JY, Z) * JX
    psi_mu_group = (
        xX * xZ * Y
        - xY * xZ * X
        + xX * jZ * JY
        - xY * jZ * JX
        + jX * jZ * Y
        - jY * jZ * X
        - jX * xZ * JY
        + jY * xZ * JX
        + 2 * xX * jY * JZ
        - 2 * xY * jX * JZ
    )
    psi2 = p.psi**2
    return (
        base_cd.R(X, Y, Z)
        - r * p.mu * ricci_group
        + psi2 * p.mu * psi_group
        + psi2 * p.mu**2 * psi_mu_group
    )


def riemann_tilde_numeric(dg: DeformedGeometry, x, X, Y, Z, tilde_cd: Optional[CurvatureData] = None) -> np.ndarray:
    if tilde_cd is None:
        tilde_cd = dg.curvature_tilde(x)
    return tilde_cd.R(X, Y, Z)


def _unit_g(p: PointData, X) -> np.ndarray:
    X = np.asarray(X, dtype=float)
    n = np.sqrt(max(p.inner(X, X), 0.0))
    if n < DENOMINATOR_FLOOR:
        raise DegenerateError("zero direction")
    return X / n


def holomorphic_sectional_tilde_closed_form(
    dg: DeformedGeometry, x, X, base_cd: Optional[CurvatureData] = None
) -> float:
    """Closed-form ``K~(X)``.

    The formula is stated for ``g``-unit ``X``; other lengths are normalized
    first, which leaves ``K~`` unchanged.
    """
    p = point_data(dg, x)
    if base_cd is None:
        base_cd = curvature(dg.base.metric, p.x)
    X = _unit_g(p, X)
    K = holomorphic_sectional(base_cd, p.J, X)
    r = ricci_xi_hat(dg, p.x, base_cd)
    A = (p.theta_xi @ X) ** 2 + (p.theta_Jxi @ X) ** 2
    gXX = p.mu + p.mu**2 * A
    return float((p.mu * K + p.mu**2 * r * A) / gXX**2 + 2 * p.mu * r * A / gXX - 4 * p.psi**2)


def holomorphic_sectional_tilde_numeric(
    dg: DeformedGeometry, x, X, tilde_cd: Optional[CurvatureData] = None
) -> float:
    if tilde_cd is None:
        tilde_cd = dg.curvature_tilde(x)
    return holomorphic_sectional(tilde_cd, dg.base.J_value(tilde_cd.x), X)


class DecayResult(NamedTuple):
    K: float
    K_tilde: float
    bound_general: float
    bound_orthogonal: Optional[float]
    satisfied: bool
    margin: float


ORTHOGONAL_TOL = 1e-10


def decay_bounds(
    dg: DeformedGeometry,
    x,
    X,
    tol: float = 1e-6,
    base_cd: Optional[CurvatureData] = None,
    tilde_cd: Optional[CurvatureData] = None,
) -> DecayResult:
    """Compare the oracle ``K~(X)`` with ``c K(X) + 2c Ric(xi^) - 4 psi^2`` (and ``c K - 4 psi^2`` when ``X`` is orthogonal to ``xi, Jxi``)."""
    p = point_data(dg, x)
    if base_cd is None:
        base_cd = curvature(dg.base.metric, p.x)
    X = _unit_g(p, X)
    K = holomorphic_sectional(base_cd, p.J, X)
    Kt = holomorphic_sectional_tilde_numeric(dg, p.x, X, tilde_cd)
    r = ricci_xi_hat(dg, p.x, base_cd)
    c = p.c
    general = c * K + 2 * c * r - 4 * p.psi**2
    ortho = None
    if abs(p.theta_xi @ X) < ORTHOGONAL_TOL and abs(p.theta_Jxi @ X) < ORTHOGONAL_TOL:
        ortho = c * K - 4 * p.psi**2
    bound = general if ortho is None else min(general, ortho)
    margin = bound - Kt
    return DecayResult(K, Kt, general, ortho, bool(margin >= -tol), float(margin))


class RicciBreakdown(NamedTuple):
    total: float
    terms: dict


def ricci_tilde_closed_form(
    dg: DeformedGeometry, x, X, Y, base_cd: Optional[CurvatureData] = None
) -> RicciBreakdown:
    """Closed-form ``Ric~(X, Y)`` with each additive group reported separately.

    The factor written ``Ric(xi)`` in the scalar bracket is read as ``Ric(xi^)``.
    """
    p = point_data(dg, x)
    if base_cd is None:
        base_cd = curvature(dg.base.metric, p.x)
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    r = ricci_xi_hat(dg, p.x, base_cd)
    c, mu, n = p.c, p.mu, dg.n_complex
    ip = p.inner
    xi, Jxi = p.xi, p.Jxi
    Ric = base_cd.ricci
    xX, xY = p.theta_xi @ X, p.theta_xi @ Y
    jX, jY = p.theta_Jxi @ X, p.theta_Jxi @ Y
    R = base_cd.R
    terms = {
        "ric": float(X @ Ric @ Y),
        "curv_xi_jxi": -(ip(R(X, xi, xi), Y) + ip(R(X, Jxi, Jxi), Y)) / c,
        "ric_xi_hat": r / c * (xX * xY + p.norm2 * ip(X, Y) + jX * jY + 2 * mu * p.norm2 * (xX * xY + jX * jY)),
        "ric_mixed": mu * xY * float(X @ Ric @ xi) + mu * jY * float(X @ Ric @ Jxi),
        "curv_cross": -mu / c * (ip(R(X, xi, xi), Jxi) * jY + ip(R(X, Jxi, Jxi), xi) * xY),
        "einstein": -2 * (n + 1) * p.psi**2 * mu * (ip(X, Y) + mu * (xX * xY + jX * jY)),
    }
    return RicciBreakdown(float(sum(terms.values())), terms)


def ricci_tilde_numeric(dg: DeformedGeometry, x, tilde_cd: Optional[CurvatureData] = None) -> np.ndarray:
    """Ricci matrix of ``g~`` as a trace over a ``g~``-orthonormal frame."""
    if tilde_cd is None:
        tilde_cd = dg.curvature_tilde(x)
    return tilde_cd.ricci_frame_trace()


RICCI_FLAT_TOL = 1e-8


def einstein_residual(dg: DeformedGeometry, points, ricci_flat_tol: float = RICCI_FLAT_TOL) -> float:
    """``max ||Ric~ + 2(n+1) g~|| / ||g~||`` over ``points``; the base must be Ricci-flat."""
    worst = 0.0
    lam = -2.0 * (dg.n_complex + 1)
    for x in np.atleast_2d(points):
        base_ric = dg.base_curvature(x).ricci
        if np.linalg.norm(base_ric) > ricci_flat_tol:
            raise ValueError("base geometry is not Ricci-flat; the Einstein statement does not apply")
        cd = dg.curvature_tilde(x)
        Rt = cd.ricci_frame_trace()
        worst = max(worst, float(np.linalg.norm(Rt - lam * cd.metric) / np.linalg.norm(cd.metric)))
    return worst


# -- lengths --------------------------------------------------------------------


def _gl_rule(order: int):
    return np.polynomial.legendre.leggauss(order)


def _speed(dg: DeformedGeometry, curve: Callable, s: float) -> float:
    pt, dpt, _ = jet_eval(lambda u: curve(u[0]), [s])
    x = dg.check_point(pt)
    v = dpt[:, 0]
    return float(np.sqrt(max(v @ dg.metric_value(x) @ v, 0.0)))


def curve_length_tilde(
    dg: DeformedGeometry,
    curve: Callable,
    t0: float,
    t1: float,
    order: int = 16,
    tol: float = 1e-8,
    max_depth: int = 40,
) -> float:
    """``g~``-length of ``curve`` on ``[t0, t1]`` by adaptive composite Gauss-Legendre.

    ``curve(s)`` returns coordinates and must accept a jet ``s``.  Raises
    :class:`DomainError` if a quadrature node leaves the domain.
    """
    if t1 == t0:
        return 0.0
    sign = 1.0
    if t1 < t0:
        t0, t1, sign = t1, t0, -1.0
    nodes, weights = _gl_rule(order)

    def panel(a, b):
        mid, half = 0.5 * (a + b), 0.5 * (b - a)
        return half * sum(w * _speed(dg, curve, mid + half * t) for t, w in zip(nodes, weights))

    def adapt(a, b, whole, depth, budget):
        m = 0.5 * (a + b)
        left, right = panel(a, m), panel(m, b)
        if abs(left + right - whole) <= budget or depth >= max_depth:
            return left + right
        return adapt(a, m, left, depth + 1, budget / 2) + adapt(m, b, right, depth + 1, budget / 2)

    return sign * adapt(t0, t1, panel(t0, t1), 0, tol)


def radial_segment(direction, r0: float = 0.0, r1: float = 1.0) -> Callable:
    """``s -> (r0 + s (r1 - r0)) u`` for unit ``u``, ``s`` in [0, 1]."""
    u = np.asarray(direction, dtype=float)
    u = u / np.linalg.norm(u)

    def curve(s):
        r = r0 + s * (r1 - r0)
        return [r * ui for ui in u]

    return curve


def length_lower_bound(c: float, r0: float, r: float, alpha: float = 1.0) -> float:
    """``(1 / 2 alpha) |log(c - r0^2) - log(c - r^2)|``."""
    return abs(np.log(c - r0**2) - np.log(c - r**2)) / (2.0 * alpha)
