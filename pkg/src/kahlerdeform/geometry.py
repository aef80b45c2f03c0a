"""Chart-based Hermitian geometry with a distinguished vector field.

A :class:`GeometrySpec` bundles jet-evaluable component functions for the
metric ``g_ij``, the complex structure ``J^i_j`` and a vector field ``xi^i``
on a single chart of real dimension ``2n``.  Component functions receive a
1-d object array of coordinates (floats or :class:`~kahlerdeform.jet.Jet2`)
and return nested sequences of the same.

Index conventions used throughout the package:

* ``dG[i, j, k] = d_k g_ij``
* ``gamma[k, i, j] = Gamma^k_ij`` so that ``nabla_{d_i} d_j = Gamma^k_ij d_k``
* ``J[i, j] = J^i_j``, acting on column vectors.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .jet import jet_eval

Field = Callable[[np.ndarray], object]

XI_FLOOR = 1e-12


class DomainError(ValueError):
    """Point outside the chart domain (including ``|xi|^2 >= c``)."""


class DegenerateError(ValueError):
    """Degenerate input: zero vector, singular metric, collapsed plane."""


@dataclass(frozen=True)
class GeometrySpec:
    n_complex: int
    c: float
    metric: Field
    xi: Field
    domain: Callable[[np.ndarray], bool]
    J: Optional[Field] = None
    sample_box: Optional[np.ndarray] = None
    name: str = "custom"
    params: dict = field(default_factory=dict)
    tags: frozenset = frozenset()
    # x -> LeafChart for the leaf of <xi>^perp through x, when available
    leaf_chart: Optional[Callable] = None

    def __post_init__(self):
        if self.n_complex < 1:
            raise ValueError("complex dimension must be >= 1")
        if not self.c > 0:
            raise ValueError("deformation constant c must be positive")

    @property
    def dim(self) -> int:
        return 2 * self.n_complex

    def check_point(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            raise ValueError(f"expected {self.dim} coordinates, got shape {x.shape}")
        if not self.domain(x):
            raise DomainError(f"point {x.tolist()} outside the domain of {self.name}")
        return x

    def metric_value(self, x) -> np.ndarray:
        return np.array(self.metric(np.asarray(x, dtype=float)), dtype=float)

    def xi_value(self, x) -> np.ndarray:
        return np.array(self.xi(np.asarray(x, dtype=float)), dtype=float)

    def J_value(self, x) -> np.ndarray:
        if self.J is None:
            raise ValueError(f"{self.name} carries no complex structure")
        return np.array(self.J(np.asarray(x, dtype=float)), dtype=float)


@dataclass(frozen=True)
class TangentVector:
    base: np.ndarray
    comp: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "base", np.asarray(self.base, dtype=float))
        object.__setattr__(self, "comp", np.asarray(self.comp, dtype=float))


@dataclass(frozen=True)
class HermitianFrame:
    vectors: tuple  # (e1, Je1, e2, Je2, ...) as TangentVector

    def matrix(self) -> np.ndarray:
        """Frame vectors as columns."""
        return np.column_stack([v.comp for v in self.vectors])


def metric_at(geom: GeometrySpec, x) -> np.ndarray:
    """Metric components at ``x`` as a matrix of jets."""
    from .jet import seed_all

    x = geom.check_point(x)
    return np.asarray(geom.metric(seed_all(x)), dtype=object)


def field_jets(f: Field, x) -> tuple:
    """(value, first, second) derivative arrays of a component field."""
    return jet_eval(f, x)


def _common_base(*vs: TangentVector) -> np.ndarray:
    base = vs[0].base
    for v in vs[1:]:
        if v.base.shape != base.shape or not np.allclose(v.base, base, rtol=0, atol=1e-14):
            raise ValueError("tangent vectors live at different base points")
    return base


def inner(geom: GeometrySpec, X: TangentVector, Y: TangentVector) -> float:
    x = geom.check_point(_common_base(X, Y))
    return float(X.comp @ geom.metric_value(x) @ Y.comp)


def norm_sq(geom: GeometrySpec, X: TangentVector) -> float:
    return inner(geom, X, X)


def theta_xi(geom: GeometrySpec, X: TangentVector) -> float:
    x = geom.check_point(X.base)
    return float(geom.xi_value(x) @ geom.metric_value(x) @ X.comp)


def theta_Jxi(geom: GeometrySpec, X: TangentVector) -> float:
    x = geom.check_point(X.base)
    Jxi = geom.J_value(x) @ geom.xi_value(x)
    return float(Jxi @ geom.metric_value(x) @ X.comp)


def christoffel_from_jets(G: np.ndarray, dG: np.ndarray) -> np.ndarray:
    Ginv = np.linalg.inv(G)
    low = 0.5 * (np.einsum("jli->lij", dG) + np.einsum("ilj->lij", dG) - dG.transpose(2, 0, 1))
    return np.einsum("kl,lij->kij", Ginv, low)


def covariant_derivative_xi(geom: GeometrySpec, x) -> np.ndarray:
    """Matrix ``A[k, j] = (nabla_{d_j} xi)^k``."""
    x = geom.check_point(x)
    G, dG, _ = jet_eval(geom.metric, x)
    xi, dxi, _ = jet_eval(geom.xi, x)
    gamma = christoffel_from_jets(G, dG)
    return dxi + np.einsum("kji,i->kj", gamma, xi)


def conformal_factor(geom: GeometrySpec, x) -> float:
    """``psi = div(xi) / (2n)``."""
    return float(np.trace(covariant_derivative_xi(geom, x)) / geom.dim)


def closed_conformal_residual(geom: GeometrySpec, x, X) -> np.ndarray:
    """``nabla_X xi - psi X`` at ``x``."""
    A = covariant_derivative_xi(geom, x)
    psi = np.trace(A) / geom.dim
    X = np.asarray(X, dtype=float)
    return A @ X - psi * X


def nabla_J(geom: GeometrySpec, x) -> np.ndarray:
    """``out[i, j, k] = (nabla_{d_k} J)^i_j``."""
    x = geom.check_point(x)
    if geom.J is None:
        raise ValueError(f"{geom.name} carries no complex structure")
    G, dG, _ = jet_eval(geom.metric, x)
    J, dJ, _ = jet_eval(geom.J, x)
    gamma = christoffel_from_jets(G, dG)
    return dJ + np.einsum("ikm,mj->ijk", gamma, J) - np.einsum("mkj,im->ijk", gamma, J)


def kahler_residual(geom: GeometrySpec, x) -> float:
    return float(np.max(np.abs(nabla_J(geom, x))))


def complex_structure_residual(geom: GeometrySpec, x) -> float:
    J = geom.J_value(geom.check_point(x))
    return float(np.max(np.abs(J @ J + np.eye(geom.dim))))


def hermitian_residual(geom: GeometrySpec, x) -> float:
    """``max |g(J e_i, J e_j) - g(e_i, e_j)|`` over coordinate vectors."""
    x = geom.check_point(x)
    G = geom.metric_value(x)
    J = geom.J_value(x)
    return float(np.max(np.abs(J.T @ G @ J - G)))


def hermitian_frame_at(geom: GeometrySpec, x, first=None, metric: Optional[Field] = None) -> HermitianFrame:
    """Orthonormal frame ``(e1, Je1, ..., en, Jen)`` built by J-aware Gram-Schmidt.

    ``metric`` overrides the geometry's metric (it must be Hermitian for the
    same J).  When ``first`` is given, ``e1`` is its normalization.
    """
    x = geom.check_point(x)
    G = np.array(metric(x), dtype=float) if metric is not None else geom.metric_value(x)
    J = geom.J_value(x)
    d = geom.dim
    candidates = [np.eye(d)[i] for i in range(d)]
    if first is not None:
        first = np.asarray(first.comp if isinstance(first, TangentVector) else first, dtype=float)
        if np.sqrt(abs(first @ G @ first)) < XI_FLOOR:
            raise DegenerateError("first frame vector has zero norm")
        candidates.insert(0, first)
    basis: list = []
    for v in candidates:
        if len(basis) == d:
            break
        w = v.copy()
        for _ in range(2):
            for b in basis:
                w = w - (b @ G @ w) * b
        nrm = np.sqrt(w @ G @ w)
        if nrm < 1e-8:
            continue
        e = w / nrm
        basis.append(e)
        basis.append(J @ e)
    return HermitianFrame(tuple(TangentVector(x, b) for b in basis))


def orthonormalize(vectors, G: np.ndarray) -> np.ndarray:
    """Gram-Schmidt of the given columns under ``G``; returns columns."""
    out = []
    for v in np.asarray(vectors, dtype=float).T:
        w = v.copy()
        for _ in range(2):
            for b in out:
                w = w - (b @ G @ w) * b
        nrm = np.sqrt(w @ G @ w)
        if nrm < 1e-10:
            raise DegenerateError("linearly dependent vectors")
        out.append(w / nrm)
    return np.column_stack(out)


def two_form_exterior_derivative(form: Field, x, tol: float = 1e-9) -> np.ndarray:
    """``(d omega)_ijk = d_i omega_jk - d_j omega_ik + d_k omega_ij``."""
    W, dW, _ = jet_eval(form, x)
    scale = max(1.0, float(np.max(np.abs(W))))
    if np.max(np.abs(W + W.T)) > tol * scale:
        raise ValueError("form is not antisymmetric")
    # dW[j, k, i] = d_i omega_jk
    return (
        np.einsum("jki->ijk", dW)
        - np.einsum("ikj->ijk", dW)
        + np.einsum("ijk->ijk", dW)
    )


def one_form_exterior_derivative(form: Field, x) -> np.ndarray:
    """``(d theta)_ij = d_i theta_j - d_j theta_i``."""
    _, dT, _ = jet_eval(form, x)
    return dT.T - dT


def sample_points(geom: GeometrySpec, n: int, rng: np.random.Generator, box=None, max_tries: int = 100000):
    """Uniform samples from ``box`` (default: the model's sample box), rejected against the domain."""
    box = geom.sample_box if box is None else box
    if box is None or np.shape(box) != (geom.dim, 2):
        raise ValueError("sampling needs a (dim, 2) coordinate box")
    box = np.asarray(box, dtype=float)
    pts = []
    tries = 0
    while len(pts) < n:
        tries += 1
        if tries > max_tries:
            raise RuntimeError("rejection sampling failed; box misses the domain")
        p = rng.uniform(box[:, 0], box[:, 1])
        if geom.domain(p):
            pts.append(p)
    return np.array(pts).reshape(n, geom.dim)
