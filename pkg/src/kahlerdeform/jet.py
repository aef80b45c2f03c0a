"""Second-order forward-mode differentiation.

A :class:`Jet2` carries the value, gradient and Hessian of a scalar field at
one point of a chart.  Field evaluators in this package are written against
the elementary functions exported here (``sqrt``, ``sin``, ...), which accept
plain floats as well as jets, so the same code serves point evaluation and
exact differentiation.

>>> x = seed_all([3.0, 0.0])
>>> (x[0] * x[0]).grad
array([6., 0.])
"""

from __future__ import annotations

import math
from typing import Callable, Sequence

import numpy as np


class Jet2:
    """Truncated second-order Taylor expansion of a scalar."""

    __slots__ = ("value", "grad", "hess")
    # numpy scalars must defer to our reflected operators
    __array_ufunc__ = None

    def __init__(self, value: float, grad: np.ndarray, hess: np.ndarray):
        self.value = float(value)
        self.grad = grad
        self.hess = hess

    @classmethod
    def constant(cls, value: float, dim: int) -> "Jet2":
        return cls(value, np.zeros(dim), np.zeros((dim, dim)))

    @property
    def dim(self) -> int:
        return self.grad.shape[0]

    def __repr__(self):
        return f"Jet2(value={self.value!r}, grad={self.grad!r}, hess={self.hess!r})"

    # Every output Hessian is built from symmetric pieces: a.v*b.h + b.v*a.h and
    # outer(a, b) + outer(b, a) are bitwise symmetric, so no re-symmetrizing.

    def __add__(self, other):
        if isinstance(other, Jet2):
            return Jet2(self.value + other.value, self.grad + other.grad, self.hess + other.hess)
        return Jet2(self.value + other, self.grad, self.hess)

    __radd__ = __add__

    def __neg__(self):
        return Jet2(-self.value, -self.grad, -self.hess)

    def __pos__(self):
        return self

    def __sub__(self, other):
        if isinstance(other, Jet2):
            return Jet2(self.value - other.value, self.grad - other.grad, self.hess - other.hess)
        return Jet2(self.value - other, self.grad, self.hess)

    def __rsub__(self, other):
        return Jet2(other - self.value, -self.grad, -self.hess)

    def __mul__(self, other):
        if isinstance(other, Jet2):
            a, b = self, other
            ab = np.outer(a.grad, b.grad)
            return Jet2(
                a.value * b.value,
                a.value * b.grad + b.value * a.grad,
                a.value * b.hess + b.value * a.hess + (ab + ab.T),
            )
        return Jet2(self.value * other, self.grad * other, self.hess * other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet2):
            return self * reciprocal(other)
        if other == 0:
            raise ZeroDivisionError("jet division by zero")
        return Jet2(self.value / other, self.grad / other, self.hess / other)

    def __rtruediv__(self, other):
        return reciprocal(self) * other

    def __pow__(self, p):
        if isinstance(p, Jet2):
            return exp(p * log(self))
        if p == 2:
            return self * self
        if isinstance(p, int) and p >= 0:
            if p == 0:
                return Jet2.constant(1.0, self.dim)
            out = self
            for _ in range(p - 1):
                out = out * self
            return out
        v = self.value
        if v <= 0 and not float(p).is_integer():
            raise ValueError("fractional power of a non-positive jet")
        if v == 0:
            raise ZeroDivisionError("negative power of a zero jet")
        return _chain(self, v**p, p * v ** (p - 1), p * (p - 1) * v ** (p - 2))


def _chain(a: Jet2, f0: float, f1: float, f2: float) -> Jet2:
    return Jet2(f0, f1 * a.grad, f1 * a.hess + f2 * np.outer(a.grad, a.grad))


def seed_variable(x: Sequence[float], i: int) -> Jet2:
    """Coordinate function ``x_i`` as a jet at the point ``x``."""
    d = len(x)
    if not 0 <= i < d:
        raise IndexError(f"coordinate index {i} out of range for dimension {d}")
    grad = np.zeros(d)
    grad[i] = 1.0
    return Jet2(x[i], grad, np.zeros((d, d)))


def seed_all(x: Sequence[float]) -> np.ndarray:
    """All coordinate functions at ``x``, as an object array of jets."""
    out = np.empty(len(x), dtype=object)
    for i in range(len(x)):
        out[i] = seed_variable(x, i)
    return out


def value_of(a) -> float:
    return a.value if isinstance(a, Jet2) else float(a)


def reciprocal(a):
    if isinstance(a, Jet2):
        v = a.value
        if v == 0:
            raise ZeroDivisionError("reciprocal of a zero jet")
        r = 1.0 / v
        return _chain(a, r, -r * r, 2.0 * r * r * r)
    return 1.0 / a


def sqrt(a):
    if isinstance(a, Jet2):
        v = a.value
        if v <= 0:
            raise ValueError("sqrt of a non-positive jet")
        s = math.sqrt(v)
        return _chain(a, s, 0.5 / s, -0.25 / (s * v))
    if a < 0:
        raise ValueError("sqrt of a negative number")
    return math.sqrt(a)


def exp(a):
    if isinstance(a, Jet2):
        e = math.exp(a.value)
        return _chain(a, e, e, e)
    return math.exp(a)


def log(a):
    if isinstance(a, Jet2):
        v = a.value
        if v <= 0:
            raise ValueError("log of a non-positive jet")
        return _chain(a, math.log(v), 1.0 / v, -1.0 / (v * v))
    return math.log(a)


def sin(a):
    if isinstance(a, Jet2):
        s, c = math.sin(a.value), math.cos(a.value)
        return _chain(a, s, c, -s)
    return math.sin(a)


def cos(a):
    if isinstance(a, Jet2):
        s, c = math.sin(a.value), math.cos(a.value)
        return _chain(a, c, -s, -c)
    return math.cos(a)


def jet_eval(f: Callable, x: Sequence[float]):
    """Evaluate ``f`` on seeded jets at ``x``.

    ``f`` may return a scalar or any (nested) array of scalars/jets.  Returns
    ``(value, grad, hess)`` with shapes ``s``, ``s + (d,)``, ``s + (d, d)``;
    entries that came back as plain numbers get zero derivatives.
    """
    x = np.asarray(x, dtype=float)
    d = x.shape[0]
    out = np.asarray(f(seed_all(x)), dtype=object)
    shape = out.shape
    value = np.zeros(shape)
    grad = np.zeros(shape + (d,))
    hess = np.zeros(shape + (d, d))
    for idx in np.ndindex(shape):
        e = out[idx]
        if isinstance(e, Jet2):
            value[idx] = e.value
            grad[idx] = e.grad
            hess[idx] = e.hess
        else:
            value[idx] = float(e)
    return value, grad, hess


def finite_difference_crosscheck(f: Callable, x: Sequence[float], h: float = 1e-4) -> float:
    """Largest discrepancy between jet derivatives of scalar ``f`` and central differences."""
    if h <= 0:
        raise ValueError("step must be positive")
    x = np.asarray(x, dtype=float)
    d = x.shape[0]
    _, g, H = jet_eval(f, x)

    def fx(p):
        return float(f(p))

    E = np.eye(d) * h
    g_fd = np.array([(fx(x + E[i]) - fx(x - E[i])) / (2 * h) for i in range(d)])
    H_fd = np.empty((d, d))
    for i in range(d):
        for j in range(i, d):
            v = (
                fx(x + E[i] + E[j])
                - fx(x + E[i] - E[j])
                - fx(x - E[i] + E[j])
                + fx(x - E[i] - E[j])
            ) / (4 * h * h)
            H_fd[i, j] = H_fd[j, i] = v
    return float(max(np.max(np.abs(g - g_fd)), np.max(np.abs(H - H_fd))))
