"""Radix-2 Cooley-Tukey FFT with selectable butterfly arithmetic, and spectral advection.

Two arithmetic modes are supported:

``standard``
    twiddle and phase factors are rounded to binary64 once, when the tables
    are built; butterflies and phase multiplications use plain complex
    arithmetic.
``extended``
    the factors are kept as double-words, and every twiddle or phase
    multiplication is evaluated in double-word arithmetic and rounded once
    per component. Signals stay binary64.

Both modes build their factors from double-word angle reduction, so the
butterfly arithmetic is the only difference between them.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from advectlab import _kernels, xprec
from advectlab.core import LENGTH, ConfigurationError, Grid1D, NodalField
from advectlab.semilag import decompose_shift

MODES = ("standard", "extended")


def is_power_of_two(n: int) -> bool:
    return n >= 2 and (n & (n - 1)) == 0


def _check_mode(mode: str) -> None:
    if mode not in MODES:
        raise ConfigurationError(f"fft mode must be one of {MODES}, got {mode!r}")


@dataclass(frozen=True)
class FactorTable:
    """Complex factors stored as four arrays: re/im, each as hi/lo words."""

    re_hi: np.ndarray
    re_lo: np.ndarray
    im_hi: np.ndarray
    im_lo: np.ndarray

    @classmethod
    def from_dw(cls, factors: list[xprec.DWComplex], mode: str) -> FactorTable:
        arr = np.array([[w.re.hi, w.re.lo, w.im.hi, w.im.lo] for w in factors], dtype=float)
        arr = arr.reshape(-1, 4)
        if mode == "standard":
            arr[:, 1] = 0.0
            arr[:, 3] = 0.0
        cols = [np.ascontiguousarray(arr[:, c]) for c in range(4)]
        for c in cols:
            c.flags.writeable = False
        return cls(*cols)

    def as_complex(self) -> np.ndarray:
        return self.re_hi + 1j * self.im_hi

    def as_dw(self) -> list[xprec.DWComplex]:
        return [
            xprec.DWComplex(xprec.DoubleWord(a, b), xprec.DoubleWord(c, d))
            for a, b, c, d in zip(self.re_hi, self.re_lo, self.im_hi, self.im_lo)
        ]

    def arrays(self):
        return self.re_hi, self.re_lo, self.im_hi, self.im_lo


@lru_cache(maxsize=None)
def _twiddles(n: int, mode: str) -> FactorTable:
    factors = [xprec.dw_expi(xprec.dw_reduce_angle(j, 1.0, 1.0, float(n))) for j in range(n // 2)]
    return FactorTable.from_dw(factors, mode)


@dataclass(frozen=True)
class FftPlan:
    n: int
    mode: str = "standard"

    def __post_init__(self):
        if not is_power_of_two(self.n):
            raise ConfigurationError(f"n must be a power of two, got {self.n}")
        _check_mode(self.mode)

    @property
    def twiddles(self) -> FactorTable:
        return _twiddles(self.n, self.mode)

    @property
    def extended(self) -> bool:
        return self.mode == "extended"


def _transform(plan: FftPlan, signal, sign: float) -> np.ndarray:
    z = np.asarray(signal, dtype=complex)
    if z.shape != (plan.n,):
        raise ValueError(f"signal length {z.shape} does not match plan size {plan.n}")
    re = np.ascontiguousarray(z.real, dtype=float)
    im = np.ascontiguousarray(z.imag, dtype=float)
    _kernels.fft_inplace(re, im, *plan.twiddles.arrays(), sign, plan.extended)
    return re + 1j * im


def fft_forward(plan: FftPlan, signal) -> np.ndarray:
    """Unnormalized forward DFT, ``X_k = sum_j x_j exp(-2 pi i j k / n)``."""
    return _transform(plan, signal, 1.0)


def fft_inverse(plan: FftPlan, spectrum) -> np.ndarray:
    """Inverse DFT including the 1/n scaling."""
    return _transform(plan, spectrum, -1.0) / plan.n


def wavenumber_index(n: int) -> np.ndarray:
    """Signed integer wavenumber per FFT index (``j - n`` above n/2)."""
    j = np.arange(n)
    return np.where(j <= n // 2, j, j - n)


@lru_cache(maxsize=256)
def _phase_table(n: int, v: float, tau: float, length: float, mode: str) -> FactorTable:
    factors = []
    for k in wavenumber_index(n):
        theta = xprec.dw_reduce_angle(int(k), v, tau, length)
        w = xprec.dw_expi(theta)
        if k == n // 2:
            # Nyquist: keep the spectrum conjugate-symmetric with a real factor
            w = xprec.DWComplex(w.re, xprec.DoubleWord(0.0, 0.0))
        factors.append(w)
    return FactorTable.from_dw(factors, mode)


def phase_factors(n: int, v: float, tau: float, L: float = LENGTH, mode: str = "standard"):
    """Per-index advection factors ``exp(-i (2 pi k / L) v tau)``.

    Standard mode returns a complex array; extended mode a list of
    :class:`~advectlab.xprec.DWComplex`.
    """
    if not is_power_of_two(n):
        raise ConfigurationError(f"n must be a power of two, got {n}")
    _check_mode(mode)
    table = _phase_table(n, float(v), float(tau), float(L), mode)
    return table.as_complex() if mode == "standard" else table.as_dw()


class SpectralAdvector:
    """Spectral advection by a fixed displacement ``v * tau`` per step.

    A displacement that is a whole number of cells in working precision is
    applied as an exact rotation, like the semi-Lagrangian steps do.
    """

    def __init__(self, plan: FftPlan, v: float, tau: float, length: float = LENGTH):
        self.plan = plan
        self.v = float(v)
        self.tau = float(tau)
        shift = decompose_shift(self.v, self.tau, float(length) / plan.n)
        self.whole_cells = shift.whole_cells if shift.frac == 0.0 else None
        self.phases = None
        if self.whole_cells is None:
            self.phases = _phase_table(plan.n, self.v, self.tau, float(length), plan.mode)

    def advance(self, values: np.ndarray, steps: int) -> np.ndarray:
        out = np.array(values, dtype=float)
        if out.shape != (self.plan.n,):
            raise ValueError("field size does not match the plan")
        if self.whole_cells is not None:
            return np.roll(out, self.whole_cells * int(steps))
        _kernels.advect_fft_steps(
            out, int(steps), *self.plan.twiddles.arrays(), *self.phases.arrays(), self.plan.extended
        )
        return out

    def step(self, field: NodalField) -> NodalField:
        if field.grid.n != self.plan.n:
            raise ConfigurationError("field grid does not match the FFT plan")
        return NodalField(field.grid, self.advance(field.values, 1))


def step_fft(field: NodalField, plan: FftPlan, v: float, tau: float) -> NodalField:
    return SpectralAdvector(plan, v, tau, field.grid.length).step(field)


def spectral_plan_for(grid: Grid1D, mode: str) -> FftPlan:
    return FftPlan(grid.n, mode)
