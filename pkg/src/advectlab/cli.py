"""Command-line experiment runner.

Every command writes a CSV report: ``# key=value`` metadata lines, one
header line, then rows of numbers with 17 significant digits. Output is a
pure function of the arguments, so identical invocations give identical
bytes.

Exit codes: 0 success, 2 configuration error, 3 analysis error.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from advectlab import analysis, splitting
from advectlab.core import ConfigurationError, Grid1D, InitialCondition
from advectlab.methods import METHODS, Advector, initial_state, validate
from advectlab.spectral import MODES

EXIT_CONFIG = 2
EXIT_ANALYSIS = 3


def fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.16e}"


def render_csv(metadata: dict, header: list[str], rows) -> str:
    lines = [f"# {k}={v}" for k, v in metadata.items()]
    lines.append(",".join(header))
    lines.extend(",".join(fmt(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


def write_report(text: str, out: str | None) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", newline="\n") as fh:
            fh.write(text)


def write_gnuplot(out: str, xcol: int, ycol: int, logscale: str = "xy") -> None:
    script = (
        "set datafile separator ','\n"
        f"set logscale {logscale}\n"
        f"plot '{Path(out).name}' using {xcol}:{ycol} skip 1 with linespoints title '{Path(out).stem}'\n"
    )
    Path(out).with_suffix(".gp").write_text(script)


def default_tau(n: int) -> float:
    """A step whose fractional cell offset never hits 0 or h exactly."""
    return (2.0 / n) * (math.sqrt(2.0) - 1.0)


def make_ic(name: str, seed: int | None) -> InitialCondition:
    if name == "random_phase":
        if seed is None:
            raise ConfigurationError("phase-seed: required for the random_phase initial condition")
        return InitialCondition.random_phase(seed)
    return InitialCondition(name, seed=seed)


def parse_schedule(text: str, steps: int):
    if text == "geometric":
        return analysis.geometric_schedule(steps)
    if text == "all":
        return list(range(1, steps + 1))
    try:
        return [int(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise ConfigurationError(f"schedule: expected geometric, all or a list of integers, got {text!r}")


def run_config(args) -> analysis.RunConfig:
    tau = default_tau(args.n) if args.tau is None else args.tau
    cfg = analysis.RunConfig(
        method=args.method,
        n=args.n,
        degree=args.degree,
        v=args.v,
        tau=tau,
        steps=args.steps,
        ic=make_ic(args.ic, args.phase_seed),
        fft_mode=args.fft_mode,
    )
    cfg.validate()
    return cfg


# --------------------------------------------------------------------------
# commands


def cmd_propagate(args) -> str:
    cfg = run_config(args)
    schedule = parse_schedule(args.schedule, cfg.steps)
    series = analysis.record_series(cfg, schedule)
    meta = dict(series.metadata, schedule=args.schedule if "," not in args.schedule else "explicit")
    return render_csv(meta, ["step", "error_linf"], series.records)


def avg_error_rows(degree: int, stencils):
    rows = []
    for k, u in enumerate(stencils):
        closed = analysis.davg_error(u, degree)
        scheme = "lagrange1" if degree == 1 else "lagrange2"
        brute = analysis.brute_force_avg(scheme, u) - analysis.brute_force_avg("exact", u)
        rows.append((k, closed, brute, abs(closed - brute)))
    return rows


def cmd_avg_error(args) -> str:
    if args.degree not in (1, 2):
        raise ConfigurationError("degree: avg-error supports degree 1 or 2")
    if args.trials < 1:
        raise ConfigurationError("trials: must be >= 1")
    rng = np.random.default_rng(args.seed)
    stencils = rng.uniform(-1.0, 1.0, size=(args.trials, 2 * args.degree + 1))
    rows = avg_error_rows(args.degree, stencils)
    meta = {"command": "avg-error", "degree": args.degree, "trials": args.trials, "seed": args.seed}
    text = render_csv(meta, ["trial", "closed_form", "brute_force", "abs_diff"], rows)
    return text + f"# max_abs_diff={fmt(max(r[3] for r in rows))}\n"


def split_rows(scheme, method, n, degree, v, steps_list, final_time, fft_mode, ic):
    validate(method, n, degree, fft_mode)
    splitting.CompositionScheme.get(scheme)
    grid = Grid1D(n)
    advector = Advector(method, degree, fft_mode)
    rows = []
    for steps in steps_list:
        state = initial_state(method, ic, grid, degree)
        state = splitting.integrate(state, v, final_time, steps, scheme, advector)
        rows.append((steps, final_time / steps, splitting.source_error(state, ic, v, final_time)))
    return rows


def cmd_split(args) -> str:
    if args.steps_list:
        steps_list = [int(s) for s in args.steps_list.split(",")]
    elif args.tau_list:
        steps_list = [splitting.steps_for(args.final_time, float(t)) for t in args.tau_list.split(",")]
    else:
        raise ConfigurationError("tau: give --tau (comma list) or --steps-list")
    ic = make_ic(args.ic, args.phase_seed)
    rows = split_rows(args.scheme, args.method, args.n, args.degree, args.v, steps_list,
                      args.final_time, args.fft_mode, ic)
    meta = {
        "command": "split",
        "scheme": args.scheme,
        "method": args.method,
        "n": args.n,
        "degree": args.degree if args.method in ("lagrange", "dg") else "",
        "v": repr(float(args.v)),
        "final_time": repr(float(args.final_time)),
        "ic": ic.name,
        "mode": args.fft_mode if args.method == "fft" else "",
    }
    return render_csv(meta, ["steps", "tau", "error_linf"], rows)


def cmd_pointwise(args) -> str:
    cfg = run_config(args)
    res = analysis.pointwise_error(cfg)
    meta = dict(cfg.metadata(), correlation_dxx=fmt(res.correlation),
                sign_change_fraction=fmt(res.sign_change_fraction))
    rows = zip(res.x, res.numeric, res.exact, res.error)
    return render_csv(meta, ["x", "numeric", "exact", "error"], rows)


def cmd_onestep(args) -> str:
    ic = make_ic(args.ic, args.phase_seed)
    h = 2.0 / args.n
    rows = []
    for k in range(1, args.tau_samples + 1):
        tau = h * k / (args.tau_samples + 1)
        avg, pts = analysis.one_step_errors(args.method, ic, args.n, tau, args.degree)
        cell = args.cell % args.n
        for j, e in enumerate(pts[cell]):
            rows.append((tau, j, avg[cell], e))
    meta = {"command": "onestep", "method": args.method, "n": args.n, "degree": args.degree,
            "ic": ic.name, "cell": args.cell % args.n}
    return render_csv(meta, ["tau", "sample", "cell_avg_error", "error"], rows)


def read_series(path: str) -> analysis.ErrorSeries:
    series = analysis.ErrorSeries()
    with open(path) as fh:
        lines = [ln.strip() for ln in fh if ln.strip() and not ln.startswith("#")]
    for ln in lines[1:]:
        step, err = ln.split(",")[:2]
        series.append(int(step), float(err))
    return series


def cmd_slope(args) -> str:
    series = read_series(args.csv)
    slope = analysis.fit_slope(series, args.window_min, args.window_max)
    meta = {"command": "slope", "source": Path(args.csv).name,
            "window_min": args.window_min, "window_max": args.window_max}
    return render_csv(meta, ["slope"], [(slope,)])


# --------------------------------------------------------------------------
# argument parsing


def _add_run_args(p, steps_default=1000):
    p.add_argument("--method", choices=METHODS, default="lagrange")
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--degree", type=int, default=1)
    p.add_argument("--v", type=float, default=1.0)
    p.add_argument("--tau", type=float, default=None, help="default h*(sqrt(2)-1)")
    p.add_argument("--steps", type=int, default=steps_default)
    p.add_argument("--ic", default="runge_cos")
    p.add_argument("--phase-seed", type=int, default=None)
    p.add_argument("--fft-mode", choices=MODES, default="standard")
    p.add_argument("--out", default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="advectlab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("propagate", help="error as a function of the number of steps")
    _add_run_args(p)
    p.add_argument("--schedule", default="geometric", help="geometric, all, or a comma list")
    p.add_argument("--gnuplot", action="store_true")
    p.set_defaults(func=cmd_propagate, plot=(1, 2))

    p = sub.add_parser("avg-error", help="closed-form vs brute-force double averages")
    p.add_argument("--degree", type=int, default=1)
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_avg_error)

    p = sub.add_parser("split", help="advection with source: splitting error at the final time")
    p.add_argument("--scheme", choices=("strang", "compose6"), default="strang")
    p.add_argument("--method", choices=METHODS, default="dg")
    p.add_argument("--n", type=int, default=200)
    p.add_argument("--degree", type=int, default=3)
    p.add_argument("--v", type=float, default=1.0)
    p.add_argument("--tau", dest="tau_list", default=None, help="comma list of step sizes")
    p.add_argument("--steps-list", default=None, help="comma list of step counts")
    p.add_argument("--final-time", type=float, default=1.8)
    p.add_argument("--ic", default="runge_cos")
    p.add_argument("--phase-seed", type=int, default=None)
    p.add_argument("--fft-mode", choices=MODES, default="standard")
    p.add_argument("--out", default=None)
    p.add_argument("--gnuplot", action="store_true")
    p.set_defaults(func=cmd_split, plot=(1, 3))

    p = sub.add_parser("pointwise", help="pointwise error after a run")
    _add_run_args(p, steps_default=10000)
    p.set_defaults(func=cmd_pointwise)

    p = sub.add_parser("onestep", help="one-step errors against tau (convex/concave study)")
    p.add_argument("--method", choices=("lagrange", "dg"), default="lagrange")
    p.add_argument("--n", type=int, default=100)
    p.add_argument("--degree", type=int, default=1)
    p.add_argument("--ic", default="convex")
    p.add_argument("--phase-seed", type=int, default=None)
    p.add_argument("--tau-samples", type=int, default=50)
    p.add_argument("--cell", type=int, default=25)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_onestep)

    p = sub.add_parser("slope", help="fit a log-log slope to a propagate CSV")
    p.add_argument("csv")
    p.add_argument("--window-min", type=int, default=100)
    p.add_argument("--window-max", type=int, default=10000)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_slope)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        text = args.func(args)
    except ConfigurationError as exc:
        print(f"advectlab: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except analysis.AnalysisError as exc:
        print(f"advectlab: analysis error: {exc}", file=sys.stderr)
        return EXIT_ANALYSIS
    write_report(text, args.out)
    if getattr(args, "gnuplot", False) and args.out and args.out != "-":
        write_gnuplot(args.out, *args.plot)
    return 0


if __name__ == "__main__":
    sys.exit(main())
