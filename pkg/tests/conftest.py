"""Shared fixtures: non-flat Kähler bases used only by the tests, and the acceptance summary."""

from __future__ import annotations

import math

import numpy as np
import pytest

from kahlerdeform import jet
from kahlerdeform.geometry import GeometrySpec
from kahlerdeform.models import standard_J

ACCEPTANCE_LINES: list = []


def surface_of_revolution(kind: str, c: float, t_range: tuple) -> GeometrySpec:
    """``dt^2 + f(t)^2 da^2`` with ``xi = f d_t`` and ``J d_t = d_a / f``; Gaussian curvature ``-f''/f``.

    ``kind``: ``"sinh"`` (K = -1), ``"sin"`` (K = +1) or ``"t2"`` (f = t^2, K = -2/t^2).
    """
    f = {"sinh": lambda t: (jet.exp(t) - jet.exp(-t)) * 0.5, "sin": jet.sin, "t2": lambda t: t * t}[kind]
    lo, hi = t_range

    def metric(y):
        ft = f(y[0])
        return [[1.0, 0.0], [0.0, ft * ft]]

    def xi(y):
        return [f(y[0]), 0.0]

    def J(y):
        ft = f(y[0])
        return [[0.0, -ft], [1.0 / ft, 0.0]]

    def domain(y):
        return lo <= y[0] <= hi and -math.pi < y[1] < math.pi

    return GeometrySpec(
        n_complex=1,
        c=c,
        metric=metric,
        xi=xi,
        J=J,
        domain=domain,
        sample_box=np.array([[lo, hi], [-3.0, 3.0]]),
        name=f"surface_{kind}",
        tags=frozenset({"kahler"}),
    )


def hyperbolic_disc_times_plane(c: float = 2.0) -> GeometrySpec:
    """``(dt^2 + sinh^2 t da^2) + dx^2 + dy^2`` with the parallel field ``xi = d_x`` (psi = 0)."""
    J2 = standard_J(2)

    def sh(t):
        return (jet.exp(t) - jet.exp(-t)) * 0.5

    def metric(y):
        s = sh(y[0])
        return [[1.0, 0.0, 0.0, 0.0], [0.0, s * s, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0], [0.0, 0.0, 0.0, 1.0]]

    def xi(y):
        return [0.0, 0.0, 1.0, 0.0]

    def J(y):
        s = sh(y[0])
        return [
            [0.0, -s, 0.0, 0.0],
            [1.0 / s, 0.0, 0.0, 0.0],
            [0.0, 0.0, J2[0, 0], J2[0, 1]],
            [0.0, 0.0, J2[1, 0], J2[1, 1]],
        ]

    def domain(y):
        return 0.3 <= y[0] <= 2.0 and -math.pi < y[1] < math.pi

    return GeometrySpec(
        n_complex=2,
        c=c,
        metric=metric,
        xi=xi,
        J=J,
        domain=domain,
        sample_box=np.array([[0.3, 2.0], [-3.0, 3.0], [-1.0, 1.0], [-1.0, 1.0]]),
        name="disc_x_plane",
        tags=frozenset({"kahler"}),
    )


NONFLAT = {
    "surface_sinh": lambda: surface_of_revolution("sinh", 4.0, (0.3, 1.3)),
    "surface_sin": lambda: surface_of_revolution("sin", 1.0, (0.3, 1.3)),
    "surface_t2": lambda: surface_of_revolution("t2", 4.0, (0.5, 1.3)),
    "disc_x_plane": hyperbolic_disc_times_plane,
}


@pytest.fixture(params=sorted(NONFLAT))
def nonflat_geom(request):
    return NONFLAT[request.param]()


@pytest.fixture
def record_criterion():
    """Print and keep one line per acceptance criterion; the lines are repeated in the terminal summary."""

    def record(label: str, ok: bool, detail: str = ""):
        line = f"criterion {label}: {'PASS' if ok else 'FAIL'}" + (f"  ({detail})" if detail else "")
        print(line)
        ACCEPTANCE_LINES.append(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
