"""Coordinate curvature of an arbitrary jet-evaluable metric.

Sign convention: ``R(X, Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z``,
so sectional curvature ``g(R(X, Y)Y, X) / |X ^ Y|^2`` is positive on round
spheres and ``Ric(X, Y) = sum_a g(R(X, e_a)e_a, Y)`` over an orthonormal frame.

Array layouts: ``riemann[l, i, j, k] = R^l_ijk`` with
``R(d_i, d_j)d_k = R^l_ijk d_l``; ``riemann_low[i, j, k, l] = g(R(d_i, d_j)d_k, d_l)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import DegenerateError, Field, XI_FLOOR, christoffel_from_jets
from .jet import jet_eval

CONVENTION = "R(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z; Ric(X,Y) = tr(Z -> R(Z,X)Y)"
CONVENTION_TAG = "R+(XY)Z:nablaX.nablaY-nablaY.nablaX-nabla[X,Y]"
DENOMINATOR_FLOOR = 1e-12


@dataclass(frozen=True)
class CurvatureData:
    x: np.ndarray
    metric: np.ndarray
    metric_inv: np.ndarray
    metric_grad: np.ndarray
    gamma: np.ndarray
    gamma_grad: np.ndarray  # [k, i, j, m] = d_m Gamma^k_ij
    riemann: np.ndarray
    riemann_low: np.ndarray
    ricci: np.ndarray
    convention_tag: str = CONVENTION_TAG

    @property
    def dim(self) -> int:
        return self.metric.shape[0]

    def R(self, X, Y, Z) -> np.ndarray:
        """Vector ``R(X, Y)Z``."""
        return np.einsum("lijk,i,j,k->l", self.riemann, X, Y, Z)

    def R4(self, X, Y, Z, W) -> float:
        return float(np.einsum("ijkl,i,j,k,l->", self.riemann_low, X, Y, Z, W))

    def inner(self, X, Y) -> float:
        return float(X @ self.metric @ Y)

    def ricci_frame_trace(self, frame: np.ndarray | None = None) -> np.ndarray:
        """Ricci matrix as ``sum_a g(R(., e_a)e_a, .)`` over an orthonormal frame (columns)."""
        if frame is None:
            frame = orthonormal_frame(self.metric)
        return np.einsum("ijkl,ja,ka->il", self.riemann_low, frame, frame)


def orthonormal_frame(G: np.ndarray) -> np.ndarray:
    """Columns form a ``G``-orthonormal basis (inverse transpose Cholesky)."""
    L = np.linalg.cholesky(G)
    return np.linalg.inv(L).T


def _check_metric(G: np.ndarray):
    try:
        np.linalg.cholesky(G)
    except np.linalg.LinAlgError as exc:
        raise DegenerateError("metric is not positive definite") from exc


def christoffel(metric: Field, x) -> np.ndarray:
    G, dG, _ = jet_eval(metric, x)
    _check_metric(G)
    return christoffel_from_jets(G, dG)


def curvature_from_jets(x, G: np.ndarray, dG: np.ndarray, ddG: np.ndarray) -> CurvatureData:
    _check_metric(G)
    Ginv = np.linalg.inv(G)
    # low[l, i, j] = Gamma_{l, ij}; dlow[l, i, j, m] = d_m of it
    low = 0.5 * (np.einsum("jli->lij", dG) + np.einsum("ilj->lij", dG) - dG.transpose(2, 0, 1))
    dlow = 0.5 * (
        np.einsum("jlim->lijm", ddG) + np.einsum("iljm->lijm", ddG) - np.einsum("ijlm->lijm", ddG)
    )
    gamma = np.einsum("kl,lij->kij", Ginv, low)
    dGinv = -np.einsum("ka,abm,bl->klm", Ginv, dG, Ginv)
    dgamma = np.einsum("klm,lij->kijm", dGinv, low) + np.einsum("kl,lijm->kijm", Ginv, dlow)
    riemann = (
        np.einsum("ljki->lijk", dgamma)
        - np.einsum("likj->lijk", dgamma)
        + np.einsum("lim,mjk->lijk", gamma, gamma)
        - np.einsum("ljm,mik->lijk", gamma, gamma)
    )
    riemann_low = np.einsum("la,aijk->ijkl", G, riemann)
    ricci = np.einsum("llij->ij", riemann)
    return CurvatureData(
        x=np.asarray(x, dtype=float),
        metric=G,
        metric_inv=Ginv,
        metric_grad=dG,
        gamma=gamma,
        gamma_grad=dgamma,
        riemann=riemann,
        riemann_low=riemann_low,
        ricci=ricci,
    )


def curvature(metric: Field, x) -> CurvatureData:
    """Christoffels, Riemann and Ricci of ``metric`` at ``x`` from exact jets."""
    G, dG, ddG = jet_eval(metric, x)
    return curvature_from_jets(x, G, dG, ddG)


def riemann(metric: Field, x) -> CurvatureData:
    return curvature(metric, x)


def ricci(metric: Field, x) -> np.ndarray:
    return curvature(metric, x).ricci


def symmetry_residuals(cd: CurvatureData) -> dict:
    """Relative residuals of the algebraic Riemann identities and Ricci symmetry."""
    Rl = cd.riemann_low
    scale = max(1.0, float(np.max(np.abs(Rl))))
    bianchi = Rl + np.einsum("jkil->ijkl", Rl) + np.einsum("kijl->ijkl", Rl)
    return {
        "antisym_12": float(np.max(np.abs(Rl + Rl.transpose(1, 0, 2, 3)))) / scale,
        "antisym_34": float(np.max(np.abs(Rl + Rl.transpose(0, 1, 3, 2)))) / scale,
        "pair": float(np.max(np.abs(Rl - Rl.transpose(2, 3, 0, 1)))) / scale,
        "bianchi": float(np.max(np.abs(bianchi))) / scale,
        "ricci_sym": float(np.max(np.abs(cd.ricci - cd.ricci.T))) / scale,
        "gamma_sym": float(np.max(np.abs(cd.gamma - cd.gamma.transpose(0, 2, 1))))
        / max(1.0, float(np.max(np.abs(cd.gamma)))),
    }


def sectional(cd: CurvatureData, X, Y) -> float:
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    den = cd.inner(X, X) * cd.inner(Y, Y) - cd.inner(X, Y) ** 2
    if den < DENOMINATOR_FLOOR:
        raise DegenerateError("degenerate plane")
    return cd.R4(X, Y, Y, X) / den


def holomorphic_sectional(cd: CurvatureData, J: np.ndarray, X) -> float:
    """``K(X) = g(R(X, JX)JX, X) / (g(X,X) g(JX,JX) - g(X,JX)^2)``."""
    X = np.asarray(X, dtype=float)
    if not np.any(X):
        raise DegenerateError("zero direction")
    return sectional(cd, X, J @ X)


def ricci_direction(cd: CurvatureData, V) -> float:
    """``Ric(V^, V^) / (dim - 1)``, i.e. Ricci in the unit direction of V, normalized by dim - 1."""
    V = np.asarray(V, dtype=float)
    nrm2 = cd.inner(V, V)
    if np.sqrt(nrm2) < XI_FLOOR:
        raise DegenerateError("direction has zero norm")
    return float(V @ cd.ricci @ V) / nrm2 / (cd.dim - 1)


def lie_derivative_metric(V: Field, metric: Field, x) -> np.ndarray:
    """``(L_V g)_ij = V^k d_k g_ij + g_kj d_i V^k + g_ik d_j V^k``."""
    G, dG, _ = jet_eval(metric, x)
    v, dv, _ = jet_eval(V, x)  # dv[k, i] = d_i V^k
    return np.einsum("k,ijk->ij", v, dG) + np.einsum("kj,ki->ij", G, dv) + np.einsum("ik,kj->ij", G, dv)
