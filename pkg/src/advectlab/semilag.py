"""Semi-Lagrangian advection steps for nodal (Lagrange, spline) and modal (dG) fields.

Each step traces the characteristic back by ``d = v * tau`` and splits it as
``d = s*h + alpha`` with ``s = floor(d/h)`` and ``0 <= alpha < h``. The whole
cell part is an index rotation (exact); only ``alpha`` is interpolated or
projected. Because ``alpha`` is always measured the same way, the departure
point of node ``i`` is ``x[i-s] - alpha`` for either sign of ``v``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial import legendre

from advectlab.core import ModalField, NodalField, gauss_legendre
from advectlab.interp import LagrangeStencil, lagrange_weights, spline_build


@dataclass(frozen=True)
class ShiftDecomposition:
    whole_cells: int
    frac: float


def decompose_shift(v: float, tau: float, h: float) -> ShiftDecomposition:
    """Split ``v * tau`` into whole cells and a remainder in ``[0, h)``.

    Negative ``tau`` is allowed: high-order compositions take backward substeps.
    """
    if h <= 0:
        raise ValueError("h must be positive")
    d = v * tau
    s = math.floor(d / h)
    alpha = d - s * h
    # d/h may round up to an integer while d - s*h is still negative (or vice versa)
    if alpha < 0:
        s -= 1
        alpha = d - s * h
    elif alpha >= h:
        s += 1
        alpha = d - s * h
    if alpha < 0:
        # |d| below half an ulp of h: no representable remainder in [0, h)
        alpha = 0.0
    return ShiftDecomposition(int(s), alpha)


def step_lagrange(field: NodalField, v: float, tau: float, degree: int) -> NodalField:
    shift = decompose_shift(v, tau, field.grid.h)
    u = np.roll(field.values, shift.whole_cells)
    if shift.frac == 0.0:
        return NodalField(field.grid, u)
    # departure x[i] - alpha lies in [x[i-1], x[i]), at theta = 1 - alpha/h from x[i-1]
    stencil = LagrangeStencil.centered(degree, 1 if v >= 0 else -1)
    theta = 1.0 - shift.frac / field.grid.h
    w = lagrange_weights(stencil.offsets, theta)
    new = np.zeros_like(u)
    for wk, ok in zip(w, stencil.offsets):
        new += wk * np.roll(u, 1 - ok)
    return NodalField(field.grid, new)


def step_spline(field: NodalField, v: float, tau: float) -> NodalField:
    shift = decompose_shift(v, tau, field.grid.h)
    rotated = NodalField(field.grid, np.roll(field.values, shift.whole_cells))
    if shift.frac == 0.0:
        return rotated
    spline = spline_build(rotated)
    left = (np.arange(field.grid.n) - 1) % field.grid.n
    new = spline.piece(left, 1.0 - shift.frac / field.grid.h)
    return NodalField(field.grid, new)


@lru_cache(maxsize=256)
def _dg_operators(degree: int, a: float):
    """Evaluation and projection matrices for a dG step with ``alpha = a*h``.

    The new cell is covered by the tail of the upstream cell on [0, a) and by
    the head of its own (rotated) cell on [a, 1), both in units of h. Each
    piece is integrated with ``degree + 1`` Gauss points, exact for the
    degree-2l integrands.
    """
    xq, wq = gauss_legendre(degree + 1)
    scale = 0.5 * (2.0 * np.arange(degree + 1) + 1.0)

    def piece(length, new_start, old_start):
        # fraction-of-cell coordinates of the nodes, new and old cell frames
        t = 0.5 * length * (xq + 1.0)
        evaluate = legendre.legvander(2.0 * (old_start + t) - 1.0, degree)
        project = legendre.legvander(2.0 * (new_start + t) - 1.0, degree).T * (length * wq)
        return evaluate, project * scale[:, None]

    upstream = piece(a, 0.0, 1.0 - a)
    own = piece(1.0 - a, a, 0.0)
    return upstream, own


def step_dg(field: ModalField, v: float, tau: float) -> ModalField:
    shift = decompose_shift(v, tau, field.grid.h)
    c = np.roll(field.coeffs, shift.whole_cells, axis=0)
    if shift.frac == 0.0:
        return ModalField(field.grid, field.degree, c)
    (e_up, p_up), (e_own, p_own) = _dg_operators(field.degree, shift.frac / field.grid.h)
    upstream = np.roll(c, 1, axis=0)
    new = (upstream @ e_up.T) @ p_up.T + (c @ e_own.T) @ p_own.T
    return ModalField(field.grid, field.degree, new)


def total_mass(field) -> float:
    if isinstance(field, ModalField):
        return field.grid.h * float(np.sum(field.coeffs[:, 0]))
    return field.grid.h * float(np.sum(field.values))
