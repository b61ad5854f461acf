"""Uniform access to the four advection methods."""

from __future__ import annotations

from advectlab import interp, semilag, spectral
from advectlab.core import (
    ConfigurationError,
    Grid1D,
    InitialCondition,
    project_modal,
    sample_nodal,
)

METHODS = ("lagrange", "spline", "dg", "fft")
MAX_DG_DEGREE = 9


def validate(method: str, n: int, degree: int = 1, fft_mode: str = "standard") -> None:
    """Raise :class:`ConfigurationError` naming the offending field."""
    if method not in METHODS:
        raise ConfigurationError(f"method: unknown method {method!r}, expected one of {METHODS}")
    if not isinstance(n, int) or n < 1:
        raise ConfigurationError(f"n: must be a positive integer, got {n!r}")
    if method == "fft":
        if not spectral.is_power_of_two(n):
            raise ConfigurationError(f"n must be a power of two for the fft method, got {n}")
        if fft_mode not in spectral.MODES:
            raise ConfigurationError(f"fft-mode: must be one of {spectral.MODES}, got {fft_mode!r}")
    elif method == "spline":
        if n < 3:
            raise ConfigurationError("n: the spline method needs n >= 3")
    elif method == "lagrange":
        if not 1 <= degree <= interp.MAX_DEGREE:
            raise ConfigurationError(f"degree: Lagrange degree must be in [1, {interp.MAX_DEGREE}]")
        if n < degree + 1:
            raise ConfigurationError("n: grid smaller than the Lagrange stencil")
    elif not 0 <= degree <= MAX_DG_DEGREE:
        raise ConfigurationError(f"degree: dG degree must be in [0, {MAX_DG_DEGREE}]")


class Advector:
    """Callable ``advector(state, v, tau) -> state`` for one method."""

    def __init__(self, method: str, degree: int = 1, fft_mode: str = "standard"):
        self.method = method
        self.degree = degree
        self.fft_mode = fft_mode
        self._spectral: dict[tuple[int, float, float], spectral.SpectralAdvector] = {}

    def _fft(self, n, v, tau):
        key = (n, float(v), float(tau))
        adv = self._spectral.get(key)
        if adv is None:
            adv = spectral.SpectralAdvector(spectral.FftPlan(n, self.fft_mode), v, tau)
            self._spectral[key] = adv
        return adv

    def __call__(self, state, v: float, tau: float):
        if self.method == "lagrange":
            return semilag.step_lagrange(state, v, tau, self.degree)
        if self.method == "spline":
            return semilag.step_spline(state, v, tau)
        if self.method == "dg":
            return semilag.step_dg(state, v, tau)
        return self._fft(state.grid.n, v, tau).step(state)

    def advance(self, state, v: float, tau: float, steps: int):
        if steps <= 0:
            return state
        if self.method == "fft":
            adv = self._fft(state.grid.n, v, tau)
            return type(state)(state.grid, adv.advance(state.values, steps))
        for _ in range(steps):
            state = self(state, v, tau)
        return state


def initial_state(method: str, ic: InitialCondition, grid: Grid1D, degree: int = 1):
    if method == "dg":
        return project_modal(ic, grid, degree)
    return sample_nodal(ic, grid)
