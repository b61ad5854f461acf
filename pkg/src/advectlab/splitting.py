"""Advection with the source term s(x) = (1 + cos pi x) cos 5 pi x.

The source sub-flow ``u_t = s(x)`` is solved exactly; the advection sub-flow
uses any of the four advectors. Strang splitting puts the source on the
outside: half source, full advection, half source.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from advectlab.core import (
    ConfigurationError,
    InitialCondition,
    ModalField,
    NodalField,
    cell_nodes,
    eval_ic,
    gauss_legendre,
    project_values,
    wrap,
)

# Yoshida (1990), solution A: 6th order from a symmetric 2nd-order base method
_YOSHIDA6_A = (-1.17767998417887, 0.235573213359357, 0.784513610477560)


def source(x):
    x = np.asarray(x, dtype=float)
    return (1.0 + np.cos(np.pi * x)) * np.cos(5.0 * np.pi * x)


def source_antiderivative(y):
    # s(y) = cos 5 pi y + cos(6 pi y)/2 + cos(4 pi y)/2
    y = np.asarray(y, dtype=float)
    return (
        np.sin(5.0 * np.pi * y) / (5.0 * np.pi)
        + np.sin(6.0 * np.pi * y) / (12.0 * np.pi)
        + np.sin(4.0 * np.pi * y) / (8.0 * np.pi)
    )


@dataclass(frozen=True)
class CompositionScheme:
    name: str
    weights: tuple[float, ...]

    @classmethod
    def get(cls, name: str) -> CompositionScheme:
        if name == "strang":
            return cls("strang", (1.0,))
        if name == "compose6":
            w1, w2, w3 = _YOSHIDA6_A
            w0 = 1.0 - 2.0 * (w1 + w2 + w3)
            return cls("compose6", (w3, w2, w1, w0, w1, w2, w3))
        raise ConfigurationError(f"scheme: unknown composition {name!r}")


def source_step(state, tau: float):
    """Exact flow of ``u_t = s(x)`` over ``tau``.

    Modal fields are evaluated at ``degree + 1`` Gauss nodes per cell, updated
    there, and projected back.
    """
    if tau == 0.0:
        return state
    if isinstance(state, ModalField):
        npts = state.degree + 1
        xq, _ = gauss_legendre(npts)
        vals = state.evaluate_local(xq) + tau * source(cell_nodes(state.grid, xq))
        return ModalField(state.grid, state.degree, project_values(vals, state.degree, npts))
    return NodalField(state.grid, state.values + tau * source(state.grid.points))


def strang_step(state, v: float, tau: float, advector):
    state = source_step(state, 0.5 * tau)
    state = advector(state, v, tau)
    return source_step(state, 0.5 * tau)


def compose6_step(state, v: float, tau: float, advector):
    for gamma in CompositionScheme.get("compose6").weights:
        state = strang_step(state, v, gamma * tau, advector)
    return state


def composed_step(scheme: str, state, v: float, tau: float, advector):
    if scheme == "strang":
        return strang_step(state, v, tau, advector)
    if scheme == "compose6":
        return compose6_step(state, v, tau, advector)
    raise ConfigurationError(f"scheme: unknown composition {scheme!r}")


def exact_solution_source(ic: InitialCondition, v: float, t: float, x):
    x = np.asarray(x, dtype=float)
    if v == 0.0:
        return eval_ic(ic, x) + t * source(x)
    y = x - v * t
    return eval_ic(ic, wrap(y)) + (source_antiderivative(x) - source_antiderivative(y)) / v


def integrate(state, v: float, final_time: float, steps: int, scheme: str, advector):
    """Run ``steps`` composed steps of size ``final_time / steps``."""
    if steps < 1:
        raise ConfigurationError("steps: must be >= 1")
    tau = final_time / steps
    for _ in range(steps):
        state = composed_step(scheme, state, v, tau, advector)
    return state


def source_error(state, ic: InitialCondition, v: float, t: float) -> float:
    """Max-norm error against :func:`exact_solution_source` (Gauss nodes for dG)."""
    if isinstance(state, ModalField):
        xq, _ = gauss_legendre(state.degree + 2)
        approx = state.evaluate_local(xq)
        exact = exact_solution_source(ic, v, t, cell_nodes(state.grid, xq))
    else:
        approx = state.values
        exact = exact_solution_source(ic, v, t, state.grid.points)
    return float(np.max(np.abs(approx - exact)))


def steps_for(final_time: float, tau: float) -> int:
    """Step count for a requested ``tau``; ``tau`` must divide the final time."""
    steps = round(final_time / tau)
    if steps < 1 or not math.isclose(steps * tau, final_time, rel_tol=1e-9):
        raise ConfigurationError(f"tau: {tau} does not divide the final time {final_time}")
    return steps

