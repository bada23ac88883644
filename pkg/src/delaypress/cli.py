"""Command-line interface: every analysis as a subcommand emitting CSV.

Exit codes: 0 ok, 2 parameter, 3 bracketing, 4 no blow-up, 5 data.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import io
import math
import sys
from pathlib import Path

import numpy as np

from delaypress import blowup, calibration, controller, dde, threshold
from delaypress.errors import BracketError, DataError, DelayPressError

EXIT_OK = 0
EXIT_PARAM = 2
EXIT_BRACKET = 3
EXIT_NO_BLOWUP = 4
EXIT_DATA = 5


class UsageError(DelayPressError):
    """Bad or missing command-line values."""


class NoBlowup(DelayPressError):
    pass


def fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return f"{float(value):.12g}"


def parse_beta_grid(text: str) -> list[float]:
    """``"4:100:20log"``, ``"1:10:10lin"`` or a comma list ``"2,5,10"``."""
    text = text.strip()
    try:
        if ":" in text:
            lo, hi, count_spec = text.split(":")
            lo, hi = float(lo), float(hi)
            if count_spec.endswith("log"):
                return [float(b) for b in threshold.log_spaced_betas(lo, hi, int(count_spec[:-3]))]
            count = int(count_spec[:-3]) if count_spec.endswith("lin") else int(count_spec)
            return [float(b) for b in np.linspace(lo, hi, count)]
        return [float(b) for b in text.split(",") if b.strip()]
    except ValueError as exc:
        raise UsageError(f"cannot parse beta grid {text!r}: {exc}") from None


def read_config(path: str) -> dict:
    """``key=value`` lines; ``#`` starts a comment."""
    values = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        values[key.lstrip("-").replace("-", "_")] = value
    return values


@contextlib.contextmanager
def _open_output(path):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def write_rows(args, header, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, delimiter="\t" if args.format == "tsv" else ",", lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    with _open_output(args.output) as fh:
        fh.write(buf.getvalue())


def _require(args, *names):
    missing = [n for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError("missing required option(s): " + ", ".join("--" + n.replace("_", "-") for n in missing))


def cmd_simulate(args) -> int:
    _require(args, "beta", "w0")
    params = dde.BetaControlParams(args.beta, args.w0, args.steps_per_delay)
    traj = dde.integrate_nondim(params, args.horizon)
    write_rows(args, ["t", "u"], zip(traj.times, traj.values))
    return EXIT_OK


def cmd_threshold(args) -> int:
    if (args.beta is None) == (args.beta_grid is None):
        raise UsageError("give exactly one of --beta or --beta-grid")
    if not 0 < args.tol < 1:
        raise UsageError(f"--tol must lie in (0, 1), got {args.tol}")
    betas = [args.beta] if args.beta is not None else parse_beta_grid(args.beta_grid)
    results = threshold.sweep_thresholds(betas, args.tol, args.horizon, args.steps_per_delay, args.workers)
    rows = [(r.beta, r.g, r.bracket_lo, r.bracket_hi, r.iterations)
            for r in results if isinstance(r, threshold.ThresholdEstimate)]
    write_rows(args, ["beta", "g", "lo", "hi", "iterations"], rows)
    failures = [r for r in results if isinstance(r, BracketError)]
    for err in failures:
        print(f"error: {err}", file=sys.stderr)
    return EXIT_BRACKET if failures else EXIT_OK


def read_points(path) -> list[tuple[float, float]]:
    try:
        with open(path, newline="") as fh:
            reader = csv.DictReader(fh)
            if reader.fieldnames is None or not {"beta", "g"} <= set(reader.fieldnames):
                raise UsageError(f"{path}: expected header with columns beta,g")
            return [(float(r["beta"]), float(r["g"])) for r in reader]
    except (ValueError, TypeError) as exc:
        raise UsageError(f"{path}: malformed row: {exc}") from None
    except OSError as exc:
        raise UsageError(str(exc)) from None


def cmd_fit(args) -> int:
    if (args.input is None) == (args.beta_grid is None):
        raise UsageError("give exactly one of --input or --beta-grid")
    if args.input is not None:
        points = read_points(args.input)
    else:
        betas = parse_beta_grid(args.beta_grid)
        results = threshold.sweep_thresholds(betas, args.tol, args.horizon, args.steps_per_delay, args.workers)
        failures = [r for r in results if isinstance(r, BracketError)]
        if failures:
            for err in failures:
                print(f"error: {err}", file=sys.stderr)
            return EXIT_BRACKET
        points = [(r.beta, r.g) for r in results]
    beta_max = math.inf if args.beta_max is None else args.beta_max
    points = [(b, g) for b, g in points if args.beta_min <= b <= beta_max]
    fit = threshold.fit_power_law(points)
    write_rows(args, ["a", "p", "rms_residual", "beta_min", "beta_max"],
               [(fit.a, fit.p, fit.rms_residual, *fit.beta_range)])
    return EXIT_OK


PRESS_HEADER = ["ell", "problem", "beta", "v0", "ell1", "t_within_1", "t_within_01",
                "stall_gap", "ratio_1", "ratio_01"]


def cmd_press(args) -> int:
    _require(args, "ell", "tau", "vmax", "dt")
    betas = parse_beta_grid(args.beta_list)
    # validates ell, tau, vmax, dt < tau before any threshold work
    controller.PressParams(args.ell, args.tau, args.vmax, 1.0, args.dt, 0.5)
    for b in betas:
        if b < 1:
            raise UsageError(f"beta must be >= 1, got {b}")
    N = args.threshold_steps
    if N is None:
        N = controller.PressParams(args.ell, args.tau, args.vmax, 1.0, args.dt, 0.5).delay_steps
    thresholds = {}
    for b in [1.0, *betas]:
        thresholds[b] = controller.threshold_for_press(b, N, args.threshold_tol, args.threshold_horizon)
    rows = controller.press_table(args.ell, args.tau, args.vmax, args.dt, betas, args.problem,
                                  thresholds, args.horizon)
    write_rows(args, PRESS_HEADER, [
        (r.ell, r.problem, r.beta, r.v0, r.ell1, r.times.t_within_1, r.times.t_within_01,
         r.times.stop_gap, r.ratio_1, r.ratio_01)
        for r in rows
    ])
    return EXIT_OK


def cmd_blowup(args) -> int:
    _require(args, "beta", "w0")
    params = dde.BetaControlParams(args.beta, args.w0, args.steps_per_delay)
    params.require_control_regime()
    traj = dde.integrate_nondim(params, args.horizon, stop_at_crossing=True)
    if dde.crossing_time(traj) is None:
        raise NoBlowup(f"no crossing within horizon {args.horizon:g}: z grows without finite-time blow-up")
    report = blowup.estimate_blowup(traj, params)
    write_rows(args, ["t_star", "c_est", "c_theory", "rel_err", "fit_rms"],
               [(report.t_star, report.c_est, report.c_theory, report.rel_err, report.fit_rms)])
    return EXIT_OK


def read_series(path, valid_from) -> calibration.VelocitySeries:
    try:
        with open(path, newline="") as fh:
            rows = [r for r in csv.reader(fh) if r]
    except OSError as exc:
        raise UsageError(str(exc)) from None
    if rows and not _is_number(rows[0][0]):
        rows = rows[1:]
    if any(len(r) != 2 for r in rows):
        raise UsageError(f"{path}: expected two columns (time, velocity)")
    try:
        data = np.array(rows, dtype=float)
    except ValueError:
        raise UsageError(f"{path}: non-numeric value") from None
    if len(data) < 2:
        raise DataError(f"{path}: need at least two samples")
    t = data[:, 0]
    steps = np.diff(t)
    dt = float(steps.mean())
    if dt <= 0 or np.max(np.abs(steps - dt)) > 1e-6 * dt:
        raise UsageError(f"{path}: time column must be uniformly spaced and increasing")
    vf = -math.inf if valid_from is None else valid_from
    return calibration.VelocitySeries(float(t[0]), dt, data[:, 1], vf)


def _is_number(s) -> bool:
    try:
        float(s)
    except ValueError:
        return False
    return True


def cmd_calibrate(args) -> int:
    _require(args, "commanded", "measured", "max_lag")
    commanded = read_series(args.commanded, args.valid_from)
    measured = read_series(args.measured, args.valid_from)
    if abs(commanded.dt - measured.dt) > 1e-9 * commanded.dt:
        raise UsageError("commanded and measured series have different sampling intervals")
    est = calibration.estimate_delay(commanded, measured, args.max_lag)
    write_rows(args, ["tau", "score"], [(est.tau, est.score)])
    return EXIT_OK


def _common(p):
    p.add_argument("--output", "-o", default=None, help="output file (default: stdout)")
    p.add_argument("--format", choices=("csv", "tsv"), default="csv")
    p.add_argument("--config", default=None, help="key=value file supplying any option")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="delaypress", description="Delayed press control analyses.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="integrate the nondimensional model, rows (t, u)")
    p.add_argument("--beta", type=float)
    p.add_argument("--w0", type=float)
    p.add_argument("--steps-per-delay", type=int, default=dde.DEFAULT_STEPS_PER_DELAY)
    p.add_argument("--horizon", type=float, default=10.0)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("threshold", help="bisection estimate of g(beta)")
    p.add_argument("--beta", type=float)
    p.add_argument("--beta-grid")
    p.add_argument("--tol", type=float, default=threshold.DEFAULT_TOL)
    p.add_argument("--horizon", type=float, default=threshold.DEFAULT_HORIZON)
    p.add_argument("--steps-per-delay", type=int, default=threshold.DEFAULT_STEPS_PER_DELAY)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_threshold)

    p = sub.add_parser("fit", help="power-law fit 1 - g = a * beta^-p")
    p.add_argument("--input")
    p.add_argument("--beta-grid")
    p.add_argument("--beta-min", type=float, default=threshold.DEFAULT_FIT_BETA_MIN)
    p.add_argument("--beta-max", type=float)
    p.add_argument("--tol", type=float, default=threshold.DEFAULT_TOL)
    p.add_argument("--horizon", type=float, default=threshold.DEFAULT_HORIZON)
    p.add_argument("--steps-per-delay", type=int, default=threshold.DEFAULT_STEPS_PER_DELAY)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("press", help="press-time table for the capped controller")
    p.add_argument("--ell", type=float)
    p.add_argument("--tau", type=float)
    p.add_argument("--vmax", type=float)
    p.add_argument("--dt", type=float)
    p.add_argument("--beta-list", default="2,5,10,50")
    p.add_argument("--problem", choices=("1", "2", "both"), default="both")
    p.add_argument("--horizon", type=float)
    p.add_argument("--threshold-steps", type=int,
                   help="grid for computing G (default: floor(tau/dt), the press grid)")
    p.add_argument("--threshold-tol", type=float, default=threshold.DEFAULT_TOL)
    p.add_argument("--threshold-horizon", type=float, default=threshold.DEFAULT_HORIZON)
    p.set_defaults(func=cmd_press)

    p = sub.add_parser("blowup", help="blow-up time and rate constant of z = 1/(1-u)")
    p.add_argument("--beta", type=float)
    p.add_argument("--w0", type=float)
    p.add_argument("--steps-per-delay", type=int, default=4000)
    p.add_argument("--horizon", type=float, default=200.0)
    p.set_defaults(func=cmd_blowup)

    p = sub.add_parser("calibrate", help="estimate the delay from two velocity series")
    p.add_argument("--commanded")
    p.add_argument("--measured")
    p.add_argument("--max-lag", type=float)
    p.add_argument("--valid-from", type=float)
    p.set_defaults(func=cmd_calibrate)

    for p in sub.choices.values():
        _common(p)
    parser.subcommands = sub.choices
    return parser


def parse_args(argv=None) -> argparse.Namespace:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        cfg = read_config(args.config)
        sub = parser.subcommands[args.command]
        known = {a.dest for a in sub._actions}
        unknown = sorted(set(cfg) - known - {"config"})
        if unknown:
            raise UsageError(f"unknown key(s) in {args.config}: {', '.join(unknown)}")
        cfg.pop("config", None)
        # string defaults go through each option's type conversion on re-parse
        sub.set_defaults(**cfg)
        args = parser.parse_args(argv)
    return args


def main(argv=None) -> int:
    try:
        args = parse_args(argv)
        return args.func(args)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_PARAM
    except BracketError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BRACKET
    except NoBlowup as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_BLOWUP
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (DelayPressError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARAM


if __name__ == "__main__":
    sys.exit(main())
