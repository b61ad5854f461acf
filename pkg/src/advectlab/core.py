"""Grid, field containers, initial conditions, exact solutions and norms.

The domain is the periodic interval [-1, 1). A grid with ``n`` points stores
``x_j = -1 + j*h`` for ``j < n`` (no duplicated endpoint), and cell ``i`` is
``[x_i, x_i + h)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from numpy.polynomial import legendre

from advectlab import xprec

X_LEFT = -1.0
LENGTH = 2.0

IC_NAMES = ("runge_cos", "cos4", "convex", "concave", "random_phase")


class ConfigurationError(ValueError):
    """Invalid solver or experiment configuration."""


@dataclass(frozen=True)
class Grid1D:
    n: int
    h: float = field(init=False)

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise ConfigurationError(f"n must be a positive integer, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "h", LENGTH / self.n)

    @property
    def x_left(self) -> float:
        return X_LEFT

    @property
    def length(self) -> float:
        return LENGTH

    @property
    def points(self) -> np.ndarray:
        return X_LEFT + np.arange(self.n) * self.h


def _frozen(a, shape=None) -> np.ndarray:
    arr = np.array(a, dtype=float)
    if shape is not None and arr.shape != shape:
        raise ValueError(f"expected shape {shape}, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("field values must be finite")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class NodalField:
    grid: Grid1D
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _frozen(self.values, (self.grid.n,)))


@dataclass(frozen=True)
class ModalField:
    """Per-cell Legendre coefficients; ``coeffs[i, m]`` multiplies P_m(2 xi/h - 1)."""

    grid: Grid1D
    degree: int
    coeffs: np.ndarray

    def __post_init__(self):
        if self.degree < 0:
            raise ConfigurationError("degree must be >= 0")
        shape = (self.grid.n, self.degree + 1)
        object.__setattr__(self, "coeffs", _frozen(self.coeffs, shape))

    def evaluate_local(self, xi_ref: np.ndarray) -> np.ndarray:
        """Reconstruction at reference coordinates in [-1, 1], shape (n, len(xi_ref))."""
        return self.coeffs @ legendre.legvander(np.asarray(xi_ref, dtype=float), self.degree).T


# --------------------------------------------------------------------------
# initial conditions


def splitmix64(seed: int) -> int:
    """One output of the SplitMix64 generator started from ``seed``."""
    mask = (1 << 64) - 1
    z = (seed + 0x9E3779B97F4A7C15) & mask
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & mask
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & mask
    return z ^ (z >> 31)


def phase_from_seed(seed: int) -> float:
    """Map a 64-bit seed to a phase in [0, 2 pi) via SplitMix64 (top 53 bits)."""
    u = (splitmix64(seed & ((1 << 64) - 1)) >> 11) * 2.0**-53
    return u * 2.0 * math.pi


@dataclass(frozen=True)
class InitialCondition:
    name: str
    phase: float = 0.0
    seed: int | None = None

    def __post_init__(self):
        if self.name not in IC_NAMES:
            raise ConfigurationError(f"unknown initial condition {self.name!r}")

    @classmethod
    def random_phase(cls, seed: int) -> InitialCondition:
        return cls("random_phase", phase_from_seed(seed), seed)


def eval_ic(ic: InitialCondition, x):
    x = np.asarray(x, dtype=float)
    if ic.name == "runge_cos":
        out = 1.0 / (2.0 + np.cos(np.pi * x))
    elif ic.name == "cos4":
        out = np.cos(4.0 * np.pi * x)
    elif ic.name == "convex":
        out = (x - 1.0) * (x + 1.0)
    elif ic.name == "concave":
        out = -((x - 1.0) * (x + 1.0))
    else:
        out = 1.0 / (2.0 + np.cos(np.pi * x + ic.phase))
    return out[()] if out.ndim == 0 else out


def sample_nodal(ic: InitialCondition, grid: Grid1D) -> NodalField:
    return NodalField(grid, eval_ic(ic, grid.points))


@lru_cache(maxsize=None)
def gauss_legendre(npoints: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = legendre.leggauss(npoints)
    x.flags.writeable = False
    w.flags.writeable = False
    return x, w


def cell_nodes(grid: Grid1D, xi_ref: np.ndarray) -> np.ndarray:
    """Physical coordinates of reference nodes in every cell, shape (n, len(xi_ref))."""
    return grid.points[:, None] + 0.5 * grid.h * (np.asarray(xi_ref) + 1.0)[None, :]


def project_values(values_at_nodes: np.ndarray, degree: int, npoints: int) -> np.ndarray:
    """L2-project per-cell samples at ``npoints`` Gauss nodes onto P_0..P_degree."""
    xq, wq = gauss_legendre(npoints)
    vander = legendre.legvander(xq, degree)
    scale = 0.5 * (2.0 * np.arange(degree + 1) + 1.0)
    return (values_at_nodes * wq[None, :]) @ vander * scale[None, :]


def project_modal(ic: InitialCondition, grid: Grid1D, degree: int) -> ModalField:
    if degree < 0:
        raise ConfigurationError("degree must be >= 0")
    xq, _ = gauss_legendre(degree + 2)
    samples = eval_ic(ic, cell_nodes(grid, xq))
    return ModalField(grid, degree, project_values(samples, degree, degree + 2))


# --------------------------------------------------------------------------
# exact solutions and errors


def wrap(x):
    """Map into [-1, 1) by subtracting multiples of the period."""
    y = np.mod(np.asarray(x, dtype=float) - X_LEFT, LENGTH) + X_LEFT
    # np.mod can round up to exactly LENGTH for tiny negative inputs
    y = np.where(y >= X_LEFT + LENGTH, X_LEFT, y)
    return y[()] if y.ndim == 0 else y


def exact_advection(ic: InitialCondition, v: float, t: float, x):
    return eval_ic(ic, wrap(np.asarray(x, dtype=float) - v * t))


def displacement(v: float, tau: float, steps: int) -> xprec.DoubleWord:
    """``steps * v * tau`` reduced modulo the domain length, to double-word accuracy.

    Long runs need this: forming ``x - v*t`` directly for ``t ~ 1e2`` loses
    more digits than the round-off growth being measured.
    """
    return xprec.reduce_turns(steps, v, tau, LENGTH)


def exact_shifted(ic: InitialCondition, shift: xprec.DoubleWord, x):
    x = np.asarray(x, dtype=float)
    return eval_ic(ic, wrap((x - shift.hi) - shift.lo))


def eval_ic_dxx(ic: InitialCondition, x):
    """Second derivative of the initial condition."""
    x = np.asarray(x, dtype=float)
    if ic.name == "cos4":
        return -16.0 * np.pi**2 * np.cos(4.0 * np.pi * x)
    if ic.name == "convex":
        return np.full_like(x, 2.0)
    if ic.name == "concave":
        return np.full_like(x, -2.0)
    arg = np.pi * x + (ic.phase if ic.name == "random_phase" else 0.0)
    c = 2.0 + np.cos(arg)
    return np.pi**2 * np.cos(arg) / c**2 + 2.0 * np.pi**2 * np.sin(arg) ** 2 / c**3


def evaluate_modal(field: ModalField, x) -> np.ndarray:
    """Reconstruction of a modal field at arbitrary (periodically wrapped) points."""
    y = wrap(np.asarray(x, dtype=float))
    s = (y - X_LEFT) / field.grid.h
    cell = np.minimum(np.floor(s).astype(int), field.grid.n - 1)
    ref = 2.0 * (s - cell) - 1.0
    vander = legendre.legvander(ref, field.degree)
    return np.sum(vander * field.coeffs[cell], axis=-1)


def _reference(ic, v, t, x, shift, whole_cells):
    if whole_cells is not None:
        # exact rotation by whole cells: evaluate at the rolled grid positions
        return eval_ic(ic, np.roll(x, whole_cells, axis=0))
    if shift is None:
        return exact_advection(ic, v, t, x)
    return exact_shifted(ic, shift, x)


def linf_error(numeric, ic: InitialCondition, v: float, t: float, *, shift=None,
               whole_cells: int | None = None) -> float:
    """Max-norm error against the advected initial condition.

    Nodal fields are compared at grid points; modal fields at ``degree + 2``
    Gauss nodes per cell. ``shift`` (a double-word displacement) overrides
    ``v * t`` when given; ``whole_cells`` states that the displacement is an
    exact number of cells, so the reference is taken at rotated grid positions.
    """
    if t < 0:
        raise ValueError("t must be non-negative")
    if isinstance(numeric, ModalField):
        xq, _ = gauss_legendre(numeric.degree + 2)
        approx = numeric.evaluate_local(xq)
        exact = _reference(ic, v, t, cell_nodes(numeric.grid, xq), shift, whole_cells)
        return float(np.max(np.abs(approx - exact)))
    exact = _reference(ic, v, t, numeric.grid.points, shift, whole_cells)
    return float(np.max(np.abs(numeric.values - exact)))
