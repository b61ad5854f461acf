"""Lagrange stencil interpolation and periodic cubic splines on a uniform grid."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from advectlab import _kernels
from advectlab.core import X_LEFT, ConfigurationError, Grid1D, NodalField

MAX_DEGREE = 9


def check_degree(degree: int) -> None:
    if not 1 <= degree <= MAX_DEGREE:
        raise ConfigurationError(f"Lagrange degree must be in [1, {MAX_DEGREE}], got {degree}")


@dataclass(frozen=True)
class LagrangeStencil:
    """Grid offsets of a degree-``degree`` stencil, relative to the left point
    of the interval that contains the evaluation point.

    Odd degrees are centred on the interval. Even degrees take the extra point
    on the downstream side: for flow towards +x (``direction=+1``) and an
    evaluation point in [x[i-1], x[i]], the quadratic stencil is
    {i-1, i, i+1}.
    """

    degree: int
    offsets: tuple[int, ...]

    @classmethod
    def centered(cls, degree: int, direction: int = 1) -> LagrangeStencil:
        check_degree(degree)
        first = -((degree - 1) // 2)
        if degree % 2 == 0 and direction < 0:
            first -= 1
        return cls(degree, tuple(range(first, first + degree + 1)))


@lru_cache(maxsize=1024)
def lagrange_weights(offsets: tuple[int, ...], theta: float) -> np.ndarray:
    """Weights of the Lagrange basis at ``theta`` (in units of h from the left point)."""
    w = np.empty(len(offsets))
    for k, ok in enumerate(offsets):
        num = 1.0
        den = 1.0
        for m, om in enumerate(offsets):
            if m != k:
                num *= theta - om
                den *= ok - om
        w[k] = num / den
    w.flags.writeable = False
    return w


def locate(grid: Grid1D, x: float) -> tuple[int, float]:
    """Index of the cell containing ``x`` (periodically) and the fraction into it.

    A point equal to some ``X_LEFT + j*h`` reports ``theta == 0`` even when
    ``(x - X_LEFT) / h`` rounds just below ``j``.
    """
    s = (x - X_LEFT) / grid.h
    nearest = round(s)
    if X_LEFT + nearest * grid.h == x or X_LEFT + (nearest % grid.n) * grid.h == x:
        return nearest % grid.n, 0.0
    j = math.floor(s)
    return j % grid.n, s - j


def lagrange_eval(field: NodalField, degree: int, departure: float, direction: int = 1) -> float:
    check_degree(degree)
    j, theta = locate(field.grid, departure)
    if theta == 0.0:
        return float(field.values[j])
    stencil = LagrangeStencil.centered(degree, direction)
    w = lagrange_weights(stencil.offsets, theta)
    idx = (j + np.array(stencil.offsets)) % field.grid.n
    return float(np.dot(w, field.values[idx]))


@dataclass(frozen=True)
class PeriodicSpline:
    grid: Grid1D
    values: np.ndarray
    second_derivs: np.ndarray

    def piece(self, j, t):
        """Cubic piece on cell ``j`` at fraction ``t`` in [0, 1]; vectorizes over j."""
        n = self.grid.n
        h = self.grid.h
        jp = (j + 1) % n
        s = 1.0 - t
        u = self.values
        m = self.second_derivs
        return s * u[j] + t * u[jp] + (h * h / 6.0) * ((s**3 - s) * m[j] + (t**3 - t) * m[jp])


def spline_build(field: NodalField) -> PeriodicSpline:
    """C2 periodic cubic spline through the nodal values.

    Solves ``M[i-1] + 4 M[i] + M[i+1] = 6 (u[i+1] - 2 u[i] + u[i-1]) / h^2``
    (cyclic) for the nodal second derivatives.
    """
    n = field.grid.n
    if n < 3:
        raise ConfigurationError("periodic spline needs n >= 3")
    u = np.asarray(field.values)
    h = field.grid.h
    rhs = 6.0 * (np.roll(u, -1) - 2.0 * u + np.roll(u, 1)) / (h * h)
    m = _kernels.solve_cyclic_tridiagonal(1.0, 4.0, 1.0, rhs)
    return PeriodicSpline(field.grid, u, m)


def spline_eval(spline: PeriodicSpline, departure: float) -> float:
    j, t = locate(spline.grid, departure)
    if t == 0.0:
        return float(spline.values[j])
    return float(spline.piece(j, t))
