"""Built-in geometries.

``flat_ball``
    Euclidean ``C^n`` in interleaved real coordinates ``(x1, y1, ..., xn, yn)``
    with the position field ``xi(p) = p``; the chart is ``|p|^2 < c - margin``.
``cone_round_sphere``
    The cone ``dt^2 + t^2 g_S`` over the unit sphere ``S^{2m-1}`` in
    hyperspherical coordinates ``(t, a_1, ..., a_{2m-1})``, ``xi = t d_t``,
    with J pulled back from ``C^m`` through the map to Cartesian coordinates.
    Polar angles are kept in ``[0.2, pi - 0.2]``.
``warped_generic``
    ``dt^2 + f(t)^2 g_S`` with ``xi = f(t) d_t``.  No complex structure unless
    ``cone_J`` is requested, in which case the cone's J is attached (used as a
    negative control: the result is Kähler only when ``f'' = 0``).

J convention everywhere: ``J d_{x_k} = d_{y_k}``, ``J d_{y_k} = -d_{x_k}``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import jet
from .geometry import GeometrySpec

BALL_MARGIN = 1e-3
POLAR_MARGIN = 0.2


@dataclass(frozen=True)
class LeafChart:
    """Parameterization ``u -> x`` of a leaf with jet-evaluable point and Jacobian."""

    point: object
    jacobian: object
    u0: np.ndarray
    radius: float


@dataclass(frozen=True)
class ModelParams:
    kind: str
    n_complex: int = 2
    c: float = 1.0
    f_spec: tuple = ("affine", 1.0, 0.0)
    domain_box: np.ndarray | None = None
    cone_J: bool = False
    t_range: tuple | None = None
    extra: dict = field(default_factory=dict)


def standard_J(d: int) -> np.ndarray:
    J = np.zeros((d, d))
    for k in range(0, d, 2):
        J[k + 1, k] = 1.0
        J[k, k + 1] = -1.0
    return J


def _householder_to_last(v: np.ndarray) -> np.ndarray:
    """Orthogonal Q with ``Q e_last = v / |v|``."""
    d = v.shape[0]
    u = v / np.linalg.norm(v)
    e = np.zeros(d)
    e[-1] = 1.0
    w = e - u
    nw = np.linalg.norm(w)
    if nw < 1e-14:
        return np.eye(d)
    w = w / nw
    return np.eye(d) - 2.0 * np.outer(w, w)


def radial_projection_chart(x: np.ndarray) -> LeafChart:
    """Central-projection chart of the Euclidean sphere through ``x``; ``u = 0`` maps to ``x``."""
    x = np.asarray(x, dtype=float)
    r = float(np.linalg.norm(x))
    if r < 1e-12:
        raise ValueError("no sphere leaf through the origin")
    Q = _householder_to_last(x)
    d = x.shape[0]

    def lifted(u):
        v = list(u) + [1.0]
        s = jet.sqrt(1.0 + sum(ui * ui for ui in u))
        qv = [sum(Q[a, b] * v[b] for b in range(d) if Q[a, b] != 0.0) for a in range(d)]
        return qv, s

    def point(u):
        qv, s = lifted(u)
        inv = r / s
        return [inv * q for q in qv]

    def jacobian(u):
        qv, s = lifted(u)
        inv = 1.0 / s
        inv3 = inv * inv * inv
        return [[r * (Q[a, j] * inv - qv[a] * u[j] * inv3) for j in range(d - 1)] for a in range(d)]

    return LeafChart(point, jacobian, np.zeros(d - 1), r)


def build_flat_ball(n: int, c: float = 1.0) -> GeometrySpec:
    if n < 1 or not c > 0:
        raise ValueError("flat_ball needs n >= 1 and c > 0")
    d = 2 * n
    eye = np.eye(d)
    J0 = standard_J(d)
    s = math.sqrt(c)

    def metric(x):
        return eye

    def J(x):
        return J0

    def xi(x):
        return list(x)

    def domain(x):
        return float(np.dot(x, x)) < c - BALL_MARGIN

    return GeometrySpec(
        n_complex=n,
        c=c,
        metric=metric,
        J=J,
        xi=xi,
        domain=domain,
        sample_box=np.tile([-s, s], (d, 1)),
        name="flat_ball",
        params={"n": n, "c": c},
        tags=frozenset({"kahler", "flat", "ricci_flat", "ball", "sphere_leaves"}),
        leaf_chart=radial_projection_chart,
    )


# -- hyperspherical machinery ------------------------------------------------


def sphere_point(a) -> list:
    """Unit sphere embedding ``x(a)`` for hyperspherical angles ``a``."""
    k = len(a)
    out = []
    prod = 1.0
    for i in range(k):
        out.append(prod * jet.cos(a[i]))
        prod = prod * jet.sin(a[i])
    out.append(prod)
    return out


def sphere_jacobian(a) -> list:
    """``[i][j] = d x_i / d a_j`` for :func:`sphere_point`."""
    k = len(a)
    s = [jet.sin(ai) for ai in a]
    co = [jet.cos(ai) for ai in a]
    rows = []
    for i in range(k + 1):
        factors = s[:i] + ([co[i]] if i < k else [])
        deriv = [co[l] for l in range(i)] + ([-s[i]] if i < k else [])
        row = []
        for j in range(k):
            if j >= len(factors):
                row.append(0.0)
                continue
            p = deriv[j]
            for l, fac in enumerate(factors):
                if l != j:
                    p = p * fac
            row.append(p)
        rows.append(row)
    return rows


def sphere_metric_diag(a) -> list:
    """Diagonal of the round metric: ``1, sin^2 a1, sin^2 a1 sin^2 a2, ...``."""
    out = [1.0]
    prod = 1.0
    for i in range(len(a) - 1):
        sa = jet.sin(a[i])
        prod = prod * sa * sa
        out.append(prod)
    return out


def cone_cartesian_jacobian(y) -> list:
    """``D Phi`` for ``Phi(t, a) = t x(a)``: rows Cartesian, columns ``(t, a...)``."""
    t, a = y[0], list(y[1:])
    x = sphere_point(a)
    dx = sphere_jacobian(a)
    return [[x[i]] + [t * dx[i][j] for j in range(len(a))] for i in range(len(x))]


def cone_to_cartesian(y) -> tuple:
    """Point and Jacobian of the cone chart's map into ``R^{2m}``."""
    y = np.asarray(y, dtype=float)
    p = y[0] * np.array(sphere_point(list(y[1:])), dtype=float)
    D = np.array(cone_cartesian_jacobian(list(y)), dtype=float)
    return p, D


def cartesian_to_cone(p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    t = float(np.linalg.norm(p))
    k = p.shape[0] - 1
    a = np.empty(k)
    for i in range(k - 1):
        a[i] = math.atan2(float(np.linalg.norm(p[i + 1 :])), p[i])
    a[k - 1] = math.atan2(p[k], p[k - 1])
    return np.concatenate([[t], a])


def _cone_J_field(d: int):
    def J(y):
        t = y[0]
        a = list(y[1:])
        D = cone_cartesian_jacobian(y)
        # rows of J0 D: (J0 D)[2k] = -D[2k+1], (J0 D)[2k+1] = D[2k]
        A = []
        for k in range(0, d, 2):
            A.append([-e for e in D[k + 1]])
            A.append(list(D[k]))
        diag = sphere_metric_diag(a)
        tt = t * t
        ginv = [1.0] + [1.0 / (tt * g) for g in diag]
        out = []
        for i in range(d):
            row = []
            for j in range(d):
                acc = 0.0
                for r in range(d):
                    acc = acc + D[r][i] * A[r][j]
                row.append(ginv[i] * acc)
            out.append(row)
        return out

    return J


def _warped_metric(f):
    def metric(y):
        t = y[0]
        a = list(y[1:])
        ft = f(t)
        f2 = ft * ft
        diag = [1.0] + [f2 * g for g in sphere_metric_diag(a)]
        d = len(diag)
        return [[diag[i] if i == j else 0.0 for j in range(d)] for i in range(d)]

    return metric


def _angles_ok(a) -> bool:
    return all(POLAR_MARGIN <= ai <= math.pi - POLAR_MARGIN for ai in a[:-1]) and -math.pi < a[-1] < math.pi


def _cone_leaf_chart(y):
    y = np.asarray(y, dtype=float)
    t0 = float(y[0])
    d = y.shape[0]

    def point(u):
        return [t0] + list(u)

    def jacobian(u):
        return [[0.0] * (d - 1)] + [[1.0 if i == j else 0.0 for j in range(d - 1)] for i in range(d - 1)]

    return LeafChart(point, jacobian, y[1:].copy(), t0)


def build_cone_round_sphere(m: int = 2, c: float = 1.0, t_range: tuple | None = None) -> GeometrySpec:
    """Cone over the round ``S^{2m-1}`` in hyperspherical coordinates."""
    if m < 2:
        raise ValueError("cone_round_sphere needs a sphere of dimension >= 3 (m >= 2)")
    if not c > 0:
        raise ValueError("c must be positive")
    d = 2 * m
    s = math.sqrt(c)
    t_min, t_max = t_range if t_range is not None else (0.1 * s, 0.97 * s)
    if not 0 < t_min < t_max < s:
        raise ValueError("need 0 < t_min < t_max < sqrt(c)")

    def xi(y):
        return [y[0]] + [0.0] * (d - 1)

    def domain(y):
        return t_min <= y[0] <= t_max and _angles_ok(y[1:])

    box = np.array(
        [[t_min, t_max]]
        + [[POLAR_MARGIN, math.pi - POLAR_MARGIN]] * (d - 2)
        + [[-math.pi + POLAR_MARGIN, math.pi - POLAR_MARGIN]]
    )
    return GeometrySpec(
        n_complex=m,
        c=c,
        metric=_warped_metric(lambda t: t),
        J=_cone_J_field(d),
        xi=xi,
        domain=domain,
        sample_box=box,
        name="cone_round_sphere",
        params={"m": m, "c": c, "t_min": t_min, "t_max": t_max},
        tags=frozenset({"kahler", "flat", "ricci_flat", "cone", "sphere_leaves"}),
        leaf_chart=_cone_leaf_chart,
    )


def warping_function(f_spec):
    """Callable for ``("affine", a, b)`` -> ``a t + b`` or ``("quadratic", a, b, c)`` -> ``a t^2 + b t + c``."""
    kind, *coef = f_spec
    if kind == "affine":
        a, b = coef
        return lambda t: a * t + b
    if kind == "quadratic":
        a, b, c0 = coef
        return lambda t: a * t * t + b * t + c0
    raise ValueError(f"unknown warping function kind {kind!r}")


def _min_on_interval(f_spec, lo, hi) -> float:
    f = warping_function(f_spec)
    cands = [lo, hi]
    if f_spec[0] == "quadratic" and f_spec[1] != 0:
        v = -f_spec[2] / (2 * f_spec[1])
        if lo < v < hi:
            cands.append(v)
    return min(f(t) for t in cands)


def build_warped_generic(
    f_spec=("affine", 2.0, 3.0),
    sphere_dim: int = 3,
    t_range: tuple = (0.5, 1.5),
    c: float = 100.0,
    cone_J: bool = False,
) -> GeometrySpec:
    """``I x_f S^k`` with ``xi = f(t) d_t``."""
    if sphere_dim < 1:
        raise ValueError("sphere dimension must be positive")
    d = sphere_dim + 1
    if d % 2:
        raise ValueError("total dimension must be even; use an odd sphere dimension")
    lo, hi = t_range
    if not lo < hi:
        raise ValueError("empty t interval")
    if _min_on_interval(f_spec, lo, hi) <= 0:
        raise ValueError("warping function must be positive on the interval")
    f = warping_function(f_spec)
    fmax = max(abs(f(lo)), abs(f(hi)))
    if fmax * fmax >= c:
        raise ValueError("|xi|^2 = f^2 must stay below c on the interval")

    def xi(y):
        return [f(y[0])] + [0.0] * (d - 1)

    def domain(y):
        return lo <= y[0] <= hi and _angles_ok(y[1:])

    box = np.array(
        [[lo, hi]]
        + [[POLAR_MARGIN, math.pi - POLAR_MARGIN]] * (d - 2)
        + [[-math.pi + POLAR_MARGIN, math.pi - POLAR_MARGIN]]
    )
    tags = {"warped"}
    if cone_J:
        tags.add("cone_J")
    return GeometrySpec(
        n_complex=d // 2,
        c=c,
        metric=_warped_metric(f),
        J=_cone_J_field(d) if cone_J else None,
        xi=xi,
        domain=domain,
        sample_box=box,
        name="warped_generic",
        params={"f": list(f_spec), "sphere_dim": sphere_dim, "t_min": lo, "t_max": hi, "c": c, "cone_J": cone_J},
        tags=frozenset(tags),
    )


MODELS = ("flat_ball", "cone_round_sphere", "warped_generic")


def parse_f_spec(text: str) -> tuple:
    """``"affine:2,3"`` -> ``("affine", 2.0, 3.0)``; ``"t^2"`` is shorthand for ``quadratic:1,0,0``."""
    text = text.strip()
    if text in ("t^2", "t**2"):
        return ("quadratic", 1.0, 0.0, 0.0)
    if text == "t":
        return ("affine", 1.0, 0.0)
    kind, _, coefs = text.partition(":")
    vals = tuple(float(v) for v in coefs.split(",") if v.strip())
    expected = {"affine": 2, "quadratic": 3}.get(kind)
    if expected is None or len(vals) != expected:
        raise ValueError(f"bad warping function spec {text!r}")
    return (kind,) + vals


DEFAULT_C = {"flat_ball": 1.0, "cone_round_sphere": 1.0, "warped_generic": 100.0}


def _truthy(v) -> bool:
    if isinstance(v, str):
        return v.strip().lower() in ("1", "true", "yes", "on")
    return bool(v)


def build_model(name: str, n: int = 2, c: float | None = None, **params) -> GeometrySpec:
    """Registry entry point used by the CLI.

    ``n`` is the complex dimension (``m`` for the cone, so the sphere is
    ``S^{2n-1}``).  ``c`` defaults per model (see ``DEFAULT_C``).  Extra
    parameters: ``t_min``, ``t_max`` (cone and warped), ``f`` and ``cone_J``
    (warped).
    """
    if name not in MODELS:
        raise ValueError(f"unknown model {name!r}; choose from {', '.join(MODELS)}")
    c = DEFAULT_C[name] if c is None else float(c)
    allowed = {"flat_ball": set(), "cone_round_sphere": {"t_min", "t_max"}, "warped_generic": {"t_min", "t_max", "f", "cone_J"}}
    unknown = set(params) - allowed[name]
    if unknown:
        raise ValueError(f"unknown parameters for {name}: {', '.join(sorted(unknown))}")
    if name == "flat_ball":
        return build_flat_ball(n, c)
    if name == "cone_round_sphere":
        t_range = None
        if "t_min" in params or "t_max" in params:
            s = math.sqrt(c)
            t_range = (float(params.get("t_min", 0.1 * s)), float(params.get("t_max", 0.97 * s)))
        return build_cone_round_sphere(n, c, t_range)
    f_spec = params.get("f", ("affine", 2.0, 3.0))
    if isinstance(f_spec, str):
        f_spec = parse_f_spec(f_spec)
    return build_warped_generic(
        f_spec=f_spec,
        sphere_dim=2 * n - 1,
        t_range=(float(params.get("t_min", 0.5)), float(params.get("t_max", 1.5))),
        c=c,
        cone_J=_truthy(params.get("cone_J", False)),
    )
