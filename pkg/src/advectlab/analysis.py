"""Averaged one-step errors, error-series recording and log-log slope fits.

Double averages
---------------
For a cell ``[x_i, x_i + h]`` and a step ``tau`` uniformly distributed in
``[0, h]`` (with ``v = 1``), the cell average of a one-step result, averaged
again over ``tau``, is a fixed linear combination of nodal values:

* exact advection of the piecewise-linear interpolant: ``(1, 4, 1)/6``
* one linear Lagrange step: ``(1, 2, 1)/4``

The double-averaged error (scheme minus exact) is ``(1, -2, 1)/12`` for
linear and ``(1, 2, -12, 14, -5)/144`` for quadratic Lagrange. The quadratic
stencil reads ``u[i-2..i+2]``; the reconstruction on ``[x_j, x_j+1]`` passes
through ``x_{j-1}, x_j, x_{j+1}`` and the quadratic step for a departure in
``[x_{k-1}, x_k]`` uses ``x_{k-1}, x_k, x_{k+1}``.

:func:`brute_force_avg` evaluates the same double integrals by tensor
Gauss-Legendre quadrature, independently of the closed forms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import legendre

from advectlab import semilag
from advectlab.core import (
    ConfigurationError,
    Grid1D,
    InitialCondition,
    ModalField,
    cell_nodes,
    displacement,
    eval_ic,
    eval_ic_dxx,
    evaluate_modal,
    gauss_legendre,
    linf_error,
    wrap,
)
from advectlab.methods import Advector, initial_state, validate


class AnalysisError(RuntimeError):
    """Raised when an analysis cannot be carried out (e.g. too little data)."""


# --------------------------------------------------------------------------
# closed forms


def avg_exact(u) -> float:
    um, u0, up = u
    return (um + 4.0 * u0 + up) / 6.0


def avg_lagrange1(u) -> float:
    um, u0, up = u
    return (um + 2.0 * u0 + up) / 4.0


def davg_error(u, degree: int) -> float:
    u = tuple(u)
    if degree == 1:
        if len(u) != 3:
            raise ValueError("degree 1 needs a stencil of 3 values")
        return (u[0] - 2.0 * u[1] + u[2]) / 12.0
    if degree == 2:
        if len(u) != 5:
            raise ValueError("degree 2 needs a stencil of 5 values")
        return (u[0] + 2.0 * u[1] - 12.0 * u[2] + 14.0 * u[3] - 5.0 * u[4]) / 144.0
    raise ValueError(f"no closed form for degree {degree}")


# --------------------------------------------------------------------------
# brute-force double averages (h = 1, x_i = 0; the averages are scale free)


def _lagrange_poly(values, nodes, x):
    """Lagrange polynomial through (nodes, values), evaluated at x (broadcasts)."""
    out = 0.0
    for a, va in zip(nodes, values):
        basis = 1.0
        for b in nodes:
            if b != a:
                basis = basis * (x - b) / (a - b)
        out = out + va * basis
    return out


def _piecewise(u, first, x):
    """Piecewise polynomial through nodal data ``u`` indexed from ``first``.

    Linear data (3 values) is interpolated on each cell from its end points;
    quadratic data (5 values) on cell j through nodes j-1, j, j+1.
    """
    cell = np.floor(x)
    offsets = (0, 1) if len(u) == 3 else (-1, 0, 1)
    u = np.asarray(u)
    vals = [u[(cell + o - first).astype(int)] for o in offsets]
    return _lagrange_poly(vals, offsets, x - cell)


def _tensor_rule(npts):
    x, w = legendre.leggauss(npts)
    return 0.5 * (x + 1.0), 0.5 * w


def _exact_nodal(u, npts):
    t, wt = _tensor_rule(npts)
    s, ws = _tensor_rule(npts)
    first = -(len(u) // 2)
    total = 0.0
    for tau, w_tau in zip(t, wt):
        # the integrand has a kink at xi = tau: split the xi integral there
        xa = tau * s
        xb = tau + (1.0 - tau) * s
        ia = tau * np.sum(ws * _piecewise(u, first, xa - tau))
        ib = (1.0 - tau) * np.sum(ws * _piecewise(u, first, xb - tau))
        total += w_tau * (ia + ib)
    return total


def _lagrange_step_values(u, first, degree, tau, nodes):
    """One Lagrange step of size tau at integer nodes ``nodes``."""
    out = []
    for k in nodes:
        if degree == 1:
            st = (k - 1, k)
        else:
            st = (k - 1, k, k + 1)
        vals = [u[j - first] for j in st]
        out.append(_lagrange_poly(vals, st, k - tau))
    return out


def _scheme_nodal(u, degree, npts):
    t, wt = _tensor_rule(npts)
    s, ws = _tensor_rule(npts)
    first = -(len(u) // 2)
    total = 0.0
    for tau, w_tau in zip(t, wt):
        if degree == 1:
            ext = (0, 1)
        else:
            ext = (-1, 0, 1)
        new = _lagrange_step_values(u, first, degree, tau, ext)
        total += w_tau * np.sum(ws * _lagrange_poly(new, ext, s))
    return total


def _modal_eval(c, x):
    """Two-cell modal data (cells -1 and 0, h = 1) evaluated at x in [-1, 1)."""
    cell = np.where(x < 0.0, 0, 1)
    local = 2.0 * (x - np.floor(x)) - 1.0
    vander = legendre.legvander(local, c.shape[1] - 1)
    return np.sum(vander * c[cell], axis=-1)


def _exact_modal(c, npts):
    t, wt = _tensor_rule(npts)
    s, ws = _tensor_rule(npts)
    total = 0.0
    for tau, w_tau in zip(t, wt):
        ia = tau * np.sum(ws * _modal_eval(c, tau * s - tau))
        ib = (1.0 - tau) * np.sum(ws * _modal_eval(c, tau + (1.0 - tau) * s - tau))
        total += w_tau * (ia + ib)
    return total


def _scheme_modal(c, npts):
    degree = c.shape[1] - 1
    grid = Grid1D(2)
    t, wt = _tensor_rule(npts)
    total = 0.0
    for tau, w_tau in zip(t, wt):
        # dG step on a 2-cell periodic grid; h = 1 there, so scale tau by h
        new = semilag.step_dg(ModalField(grid, degree, c), 1.0, tau * grid.h)
        total += w_tau * new.coeffs[1, 0]
    return total


BRUTE_FORCE_SCHEMES = ("exact", "lagrange1", "lagrange2", "dg")


def brute_force_avg(scheme: str, u, quad_points: int = 64) -> float:
    """Double average over xi and tau in [0, h] of a one-step result on cell i.

    ``u`` is a nodal stencil centred on ``i`` (3 values for linear, 5 for
    quadratic reconstruction), or for ``dg`` (and ``exact`` on modal data) an
    array of shape (2, l+1) holding the coefficients of cells i-1 and i.
    """
    if quad_points < 32:
        raise ValueError("quad_points must be >= 32")
    if scheme not in BRUTE_FORCE_SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}")
    arr = np.asarray(u, dtype=float)
    if scheme == "dg" or (scheme == "exact" and arr.ndim == 2):
        if arr.ndim != 2 or arr.shape[0] != 2:
            raise ValueError("modal data must have shape (2, degree + 1)")
        return float(_scheme_modal(arr, quad_points) if scheme == "dg" else _exact_modal(arr, quad_points))
    if scheme == "exact":
        if len(arr) not in (3, 5):
            raise ValueError("exact needs a stencil of 3 or 5 values")
        return float(_exact_nodal(arr, quad_points))
    degree = 1 if scheme == "lagrange1" else 2
    if len(arr) != 2 * degree + 1:
        raise ValueError(f"{scheme} needs a stencil of {2 * degree + 1} values")
    return float(_scheme_nodal(arr, degree, quad_points))


# --------------------------------------------------------------------------
# error series


@dataclass(frozen=True)
class RunConfig:
    method: str
    n: int
    degree: int = 1
    v: float = 1.0
    tau: float = 0.0
    steps: int = 0
    ic: InitialCondition = field(default_factory=lambda: InitialCondition("runge_cos"))
    fft_mode: str = "standard"

    def validate(self) -> None:
        validate(self.method, self.n, self.degree, self.fft_mode)
        if not math.isfinite(self.v):
            raise ConfigurationError("v: must be finite")
        if not math.isfinite(self.tau):
            raise ConfigurationError("tau: must be finite")
        if self.steps < 0:
            raise ConfigurationError("steps: must be >= 0")

    def metadata(self) -> dict:
        meta = {
            "method": self.method,
            "n": self.n,
            "degree": self.degree if self.method in ("lagrange", "dg") else "",
            "v": repr(float(self.v)),
            "tau": repr(float(self.tau)),
            "steps": self.steps,
            "ic": self.ic.name,
            "phase": repr(float(self.ic.phase)),
            "mode": self.fft_mode if self.method == "fft" else "",
        }
        if self.ic.seed is not None:
            meta["seed"] = self.ic.seed
        return meta


@dataclass
class ErrorSeries:
    records: list[tuple[int, float]] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def append(self, step: int, error: float) -> None:
        if self.records and step <= self.records[-1][0]:
            raise ValueError("steps must be strictly increasing")
        if not (math.isfinite(error) and error >= 0.0):
            raise ValueError(f"error must be finite and non-negative, got {error}")
        self.records.append((int(step), float(error)))

    @property
    def steps(self) -> np.ndarray:
        return np.array([r[0] for r in self.records], dtype=int)

    @property
    def errors(self) -> np.ndarray:
        return np.array([r[1] for r in self.records], dtype=float)

    def at(self, step: int) -> float:
        for s, e in self.records:
            if s == step:
                return e
        raise KeyError(step)


def geometric_schedule(max_steps: int, per_decade: int = 20) -> list[int]:
    """Distinct values of ceil(10**(j/per_decade)) not exceeding ``max_steps``."""
    out: list[int] = []
    j = 0
    while True:
        s = math.ceil(10.0 ** (j / per_decade))
        if s > max_steps:
            return out
        if not out or s > out[-1]:
            out.append(s)
        j += 1


def _check_schedule(schedule) -> list[int]:
    sched = [int(s) for s in schedule]
    if any(b <= a for a, b in zip(sched, sched[1:])) or (sched and sched[0] < 0):
        raise ConfigurationError("schedule: steps must be non-negative and strictly increasing")
    return sched


def record_series(config: RunConfig, schedule=None) -> ErrorSeries:
    """Run ``config`` and record the max-norm error at the scheduled steps."""
    config.validate()
    sched = geometric_schedule(config.steps) if schedule is None else _check_schedule(schedule)
    series = ErrorSeries(metadata=config.metadata())
    grid = Grid1D(config.n)
    advector = Advector(config.method, config.degree, config.fft_mode)
    state = initial_state(config.method, config.ic, grid, config.degree)
    per_step = semilag.decompose_shift(config.v, config.tau, grid.h)
    done = 0
    for step in sched:
        state = advector.advance(state, config.v, config.tau, step - done)
        done = step
        series.append(step, step_error(state, config, step, per_step))
    return series


def step_error(state, config: RunConfig, step: int, per_step=None) -> float:
    grid = state.grid
    if per_step is None:
        per_step = semilag.decompose_shift(config.v, config.tau, grid.h)
    if per_step.frac == 0.0:
        return linf_error(state, config.ic, config.v, 0.0, whole_cells=per_step.whole_cells * step)
    return linf_error(state, config.ic, config.v, 0.0, shift=displacement(config.v, config.tau, step))


def fit_slope(series: ErrorSeries, step_min: int, step_max: int) -> float:
    """Least-squares slope of log10(error) against log10(step) on a window."""
    window = [(s, e) for s, e in series.records if step_min <= s <= step_max]
    if len(window) < 5:
        raise AnalysisError(
            f"slope window [{step_min}, {step_max}] holds {len(window)} records, need >= 5"
        )
    steps = np.array([w[0] for w in window], dtype=float)
    errs = np.array([w[1] for w in window])
    if np.any(steps <= 0) or np.any(errs <= 0):
        raise AnalysisError("slope fit needs positive steps and errors")
    return float(np.polyfit(np.log10(steps), np.log10(errs), 1)[0])


def loglog_order(sizes, errors) -> float:
    """Convergence order: minus the log-log slope of error against size."""
    return -float(np.polyfit(np.log(np.asarray(sizes, float)), np.log(np.asarray(errors, float)), 1)[0])


# --------------------------------------------------------------------------
# pointwise error and one-step sign structure


@dataclass
class PointwiseResult:
    x: np.ndarray
    numeric: np.ndarray
    exact: np.ndarray
    error: np.ndarray
    cell: np.ndarray
    correlation: float
    sign_change_fraction: float


def pointwise_error(config: RunConfig, samples_per_cell: int = 8) -> PointwiseResult:
    """Error after ``config.steps`` steps, with the initial representation
    error removed.

    The reference is the initial representation (nodal samples, or the dG
    projection) advected exactly. Nodal methods are sampled at grid points,
    dG at ``samples_per_cell`` evenly spaced interior points per cell.
    """
    config.validate()
    grid = Grid1D(config.n)
    advector = Advector(config.method, config.degree, config.fft_mode)
    initial = initial_state(config.method, config.ic, grid, config.degree)
    state = advector.advance(initial, config.v, config.tau, config.steps)
    shift = displacement(config.v, config.tau, config.steps)
    if isinstance(state, ModalField):
        frac = (np.arange(samples_per_cell) + 0.5) / samples_per_cell
        x = cell_nodes(grid, 2.0 * frac - 1.0)
        numeric = evaluate_modal(state, x)
        exact = evaluate_modal(initial, wrap((x - shift.hi) - shift.lo))
        cell = np.repeat(np.arange(grid.n), samples_per_cell)
        x, numeric, exact = x.ravel(), numeric.ravel(), exact.ravel()
    else:
        x = grid.points
        numeric = np.asarray(state.values)
        exact = eval_ic(config.ic, wrap((x - shift.hi) - shift.lo))
        cell = np.arange(grid.n)
    error = numeric - exact
    curvature = eval_ic_dxx(config.ic, wrap((x - shift.hi) - shift.lo))
    corr = float(np.corrcoef(error, curvature)[0, 1]) if np.std(error) > 0 else 0.0
    return PointwiseResult(x, numeric, exact, error, cell, corr, sign_change_fraction(error, cell))


def sign_change_fraction(error: np.ndarray, cell: np.ndarray) -> float:
    """Fraction of cells whose sampled error takes both signs."""
    cells = np.unique(cell)
    changed = 0
    for c in cells:
        e = error[cell == c]
        if np.any(e > 0) and np.any(e < 0):
            changed += 1
    return changed / len(cells)


def one_step_errors(method: str, ic: InitialCondition, n: int, tau: float, degree: int = 1,
                    samples_per_cell: int = 8, v: float = 1.0):
    """Errors of one step against the exactly advected initial representation.

    Returns ``(cell_average_errors, pointwise_errors)``: per-cell averaged
    errors, and per cell the errors at ``samples_per_cell`` evenly spaced
    interior points. The nodal representation is the piecewise-linear
    interpolant, so ``lagrange`` means the degree-1 scheme here.
    """
    if method not in ("lagrange", "dg"):
        raise ConfigurationError("method: one-step errors are defined for lagrange and dg")
    if method == "lagrange":
        degree = 1
    validate(method, n, degree)
    grid = Grid1D(n)
    initial = initial_state(method, ic, grid, degree)
    after = Advector(method, degree)(initial, v, tau)
    kink = semilag.decompose_shift(v, tau, grid.h).frac / grid.h
    frac = (np.arange(samples_per_cell) + 0.5) / samples_per_cell
    pts = cell_nodes(grid, 2.0 * frac - 1.0)

    if method == "dg":
        def new_fn(x):
            return evaluate_modal(after, x)

        def old_fn(x):
            return evaluate_modal(initial, x - v * tau)
    else:
        new_vals = np.asarray(after.values)
        old_vals = np.asarray(initial.values)

        def new_fn(x):
            return _linear_interp(grid, new_vals, x)

        def old_fn(x):
            return _linear_interp(grid, old_vals, x - v * tau)

    npts = degree + 2
    avg_err = _cell_average(grid, new_fn, kink, npts) - _cell_average(grid, old_fn, kink, npts)
    return avg_err, new_fn(pts) - old_fn(pts)


def _linear_interp(grid: Grid1D, values: np.ndarray, x):
    s = (wrap(x) + 1.0) / grid.h
    j = np.minimum(np.floor(s).astype(int), grid.n - 1)
    t = s - j
    return (1.0 - t) * values[j] + t * values[(j + 1) % grid.n]


def _cell_average(grid: Grid1D, fn, kink: float, npts: int) -> np.ndarray:
    """Per-cell averages of ``fn``, which is polynomial on [0, kink) and
    [kink, 1) of every cell (fractions of h); Gauss rules on both pieces."""
    xq, wq = gauss_legendre(npts)
    total = np.zeros(grid.n)
    for a, b in ((0.0, kink), (kink, 1.0)):
        if b <= a:
            continue
        local = a + (b - a) * 0.5 * (xq + 1.0)
        x = grid.points[:, None] + grid.h * local[None, :]
        total += (b - a) * 0.5 * np.sum(fn(x) * wq[None, :], axis=1)
    return total
