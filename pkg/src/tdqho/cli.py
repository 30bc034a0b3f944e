"""Command-line front end.

Subcommands map one-to-one onto the library layers: ``validate`` and
``static-diag`` wrap the model checks, ``evolve`` runs the analytic
pipeline, ``oracle`` runs the Fock-basis propagator, ``compare`` joins the
two (or the exact and rotating-wave closed forms), and ``sweep`` scans one
scalar parameter concurrently.

All numeric output is CSV with 17-significant-digit formatting, so
re-running an identical configuration reproduces files byte for byte.
Exit codes: 0 success, 2 configuration error, 3 validity error,
4 comparison failure, 5 unreliable oracle run.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import oracle as oracle_mod
from . import pipeline, staticdiag
from .errors import (ConfigError, DomainError, IntegrationError,
                     SingularityError, ValidityError)
from .model import (MomentState, QuadraticParams, coherent_moments,
                    ground_moments, validate)
from .scenarios import (CKSpec, DrivenSpec, driven_moments_exact,
                        driven_moments_rwa)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_VALIDITY = 3
EXIT_COMPARISON = 4
EXIT_UNRELIABLE = 5

MOMENT_COLUMNS = ("t", "mean_x", "mean_p", "sigma_x", "sigma_p", "cov_xp",
                  "uncertainty_product", "A", "B", "D", "E", "rho", "Phi",
                  "beta_x", "beta_p", "global_phase")
COMPARE_SERIES = ("mean_x", "mean_p", "var_x", "var_p", "cov_xp")


def _fmt(x):
    return "%.17g" % x


def write_csv(path, columns, rows):
    with open(path, "w") as fh:
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(v) for v in row) + "\n")


# -- config assembly ---------------------------------------------------------


@dataclass(frozen=True)
class RunConfig:
    params: QuadraticParams
    initial: MomentState
    initial_kind: str          # "ground" | "coherent" | "moments"
    coherent_amplitude: complex
    samples: int
    oracle_n: int
    oracle_dt: float           # absolute step; None picks 1e-3 reference periods
    threshold: float
    out_dir: Path
    scenario: object           # DrivenSpec | CKSpec | None


def _parse_initial(text, params):
    m0 = params.m.value(0.0)
    w0 = params.omega.value(0.0)
    if not (m0 > 0.0 and w0 > 0.0):
        raise ValidityError(
            f"m(0) = {m0:.6g} and omega(0) = {w0:.6g} must both be positive",
            t=0.0, constraint="m > 0, omega > 0")
    if text == "ground":
        return ground_moments(m0, w0, params.hbar), "ground", 0j
    if text.startswith("coherent:"):
        try:
            amp = complex(text[len("coherent:"):])
        except ValueError:
            raise ConfigError(f"bad coherent amplitude in {text!r}") from None
        return coherent_moments(amp, m0, w0, params.hbar), "coherent", amp
    if text.startswith("moments:"):
        parts = text[len("moments:"):].split(",")
        if len(parts) != 5:
            raise ConfigError("moments initial state needs x,p,var_x,var_p,cov_xp")
        try:
            x, p, vx, vp, cv = (float(s) for s in parts)
        except ValueError:
            raise ConfigError(f"bad number in {text!r}") from None
        try:
            state = MomentState(0.0, x, p, vx, vp, cv).check(params.hbar)
        except ValidityError as exc:
            raise ConfigError(f"initial moments are unphysical: {exc}") from None
        return state, "moments", 0j
    raise ConfigError(f"unknown initial state {text!r}; "
                      "use ground, coherent:<amplitude>, or moments:<5 numbers>")


def _build_scenario(args):
    if args.scenario == "driven":
        omega_d = args.omega * 1.0 if args.omega_d is None else args.omega_d
        return DrivenSpec(m=args.m, omega=args.omega, drive_strength=args.strength,
                          drive_frequency=omega_d, hbar=args.hbar,
                          horizon=args.horizon)
    if args.scenario == "ck":
        gamma = -args.omega / 4.0 if args.gamma is None else args.gamma
        return CKSpec(m=args.m, omega=args.omega, gamma=gamma, hbar=args.hbar,
                      horizon=args.horizon)
    raise ConfigError(f"unknown scenario {args.scenario!r}; use driven or ck")


def build_run_config(args):
    if (args.config is None) == (args.scenario is None):
        raise ConfigError("exactly one of --config and --scenario is required")
    scenario = None
    if args.config is not None:
        try:
            text = Path(args.config).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config: {exc}") from None
        params = QuadraticParams.from_json(text)
        if args.horizon is not None:
            params = params.with_horizon(args.horizon)
    else:
        scenario = _build_scenario(args)
        params = scenario.to_params()
    initial, kind, amp = _parse_initial(args.initial, params)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    return RunConfig(params=params, initial=initial, initial_kind=kind,
                     coherent_amplitude=amp, samples=args.samples,
                     oracle_n=args.oracle_n, oracle_dt=args.oracle_dt,
                     threshold=args.threshold, out_dir=out_dir,
                     scenario=scenario)


# -- run helpers -------------------------------------------------------------


def _pipeline_rows(config):
    sol = pipeline.solve(config.params, n_samples=config.samples)
    mt = sol.moments(config.initial)
    c = sol.coeffs
    phase = sol.global_phase()
    rows = np.column_stack([
        sol.grid, mt.mean_x, mt.mean_p, np.sqrt(mt.var_x), np.sqrt(mt.var_p),
        mt.cov_xp, mt.var_x * mt.var_p, c.A, c.B, c.D, c.E,
        sol.ermakov.rho, sol.ermakov.Phi, c.beta_x_t, c.beta_p_t, phase])
    return sol, mt, rows


def _oracle_initial(config, ops):
    if config.initial_kind == "ground":
        return oracle_mod.ground_state(ops)
    if config.initial_kind == "coherent":
        return oracle_mod.coherent_state(ops, config.coherent_amplitude)
    raise ConfigError("the oracle can only prepare ground or coherent initial "
                      "states; explicit moments have no unique state vector")


def _oracle_run(config):
    params = config.params
    ops = oracle_mod.build_operators(config.oracle_n, params.m.value(0.0),
                                     params.omega.value(0.0), params.hbar)
    psi0 = _oracle_initial(config, ops)
    grid = np.linspace(0.0, params.horizon, config.samples)
    return oracle_mod.propagate_state(psi0, params, grid, ops, dt=config.oracle_dt)


def _oracle_rows(run):
    mt = run.moments
    nan = np.full_like(run.times, np.nan)
    return np.column_stack([
        run.times, mt.mean_x, mt.mean_p, np.sqrt(mt.var_x), np.sqrt(mt.var_p),
        mt.cov_xp, mt.var_x * mt.var_p,
        nan, nan, nan, nan, nan, nan, nan, nan, nan,
        run.norms, run.top_populations])


# -- comparison --------------------------------------------------------------


@dataclass(frozen=True)
class SeriesReport:
    name: str
    max_abs_err: float
    max_rel_err: float
    t_at_max: float
    passed: bool


@dataclass(frozen=True)
class ComparisonReport:
    series: tuple
    threshold: float
    reliable: bool

    @property
    def passed(self):
        return all(s.passed for s in self.series)

    def lines(self):
        out = []
        for s in self.series:
            verdict = "PASS" if s.passed else "FAIL"
            out.append(f"{s.name}: max_abs={s.max_abs_err:.3e} "
                       f"max_rel={s.max_rel_err:.3e} at t={s.t_at_max:.6g} {verdict}")
        overall = "PASS" if self.passed else "FAIL"
        if not self.reliable:
            overall += " (UNRELIABLE: truncation alarm)"
        out.append(f"overall: {overall} (threshold {self.threshold:g})")
        return out

    def to_json(self):
        return json.dumps({
            "threshold": self.threshold,
            "reliable": self.reliable,
            "passed": self.passed,
            "series": [{"name": s.name, "max_abs_err": s.max_abs_err,
                        "max_rel_err": s.max_rel_err, "t_at_max": s.t_at_max,
                        "passed": s.passed} for s in self.series],
        }, indent=2)


def compare_series(times, ref, other, threshold, reliable=True):
    """Pointwise comparison with a floor tied to the quantum scales.

    Each series s gets denom_t = |ref_t| + 0.01*max(amplitude_s, floor_s)
    where floor_s is built from the reference standard deviations, so
    identically-zero series (means of an undriven symmetric state) do not
    divide noise by noise.
    """
    sx = math.sqrt(max(float(np.max(ref["var_x"])), 0.0))
    sp = math.sqrt(max(float(np.max(ref["var_p"])), 0.0))
    floors = {"mean_x": sx, "mean_p": sp, "var_x": sx * sx, "var_p": sp * sp,
              "cov_xp": sx * sp}
    reports = []
    for name in COMPARE_SERIES:
        a, b = np.asarray(ref[name]), np.asarray(other[name])
        amp = max(float(np.max(np.abs(a))), float(np.max(np.abs(b))))
        scale = max(amp, floors[name])
        denom = np.abs(a) + 0.01 * scale if scale > 0.0 else np.ones_like(a)
        rel = np.abs(a - b) / denom
        i = int(np.argmax(rel))
        reports.append(SeriesReport(
            name=name, max_abs_err=float(np.abs(a - b).max()),
            max_rel_err=float(rel[i]), t_at_max=float(times[i]),
            passed=bool(rel[i] <= threshold)))
    return ComparisonReport(series=tuple(reports), threshold=threshold,
                            reliable=reliable)


def _trajectory_dict(mt):
    return {"mean_x": mt.mean_x, "mean_p": mt.mean_p, "var_x": mt.var_x,
            "var_p": mt.var_p, "cov_xp": mt.cov_xp}


# -- subcommands -------------------------------------------------------------


def cmd_validate(args):
    config = build_run_config(args)
    report = validate(config.params)
    if report.ok:
        print(f"ok: all validity constraints hold on a {report.grid_points}-point grid")
        return EXIT_OK
    for constraint, t, value in report.failures:
        print(f"violated: {constraint} at t={t:.6g} (value {value:.6e})")
    return EXIT_VALIDITY


def cmd_static_diag(args):
    if args.config is None:
        raise ConfigError("static-diag requires --config with static parameters")
    try:
        obj = json.loads(Path(args.config).read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from None
    params = staticdiag.StaticParams.from_dict(obj)
    branch = staticdiag.diag_branch_theta_p_zero if args.branch == "theta-p-zero" \
        else staticdiag.diag_branch_theta_x_zero
    print(branch(params).to_json())
    return EXIT_OK


def cmd_evolve(args):
    config = build_run_config(args)
    sol, mt, rows = _pipeline_rows(config)
    out = config.out_dir / "moments.csv"
    write_csv(out, MOMENT_COLUMNS, rows)
    print(f"wrote {out} ({len(rows)} rows)")
    if args.density > 0:
        sx_max = math.sqrt(float(np.max(mt.var_x)))
        lo = float(np.min(mt.mean_x)) - 5.0 * sx_max
        hi = float(np.max(mt.mean_x)) + 5.0 * sx_max
        xs = np.linspace(lo, hi, args.density)
        dens_rows = []
        for i, t in enumerate(sol.grid):
            vals = pipeline.gaussian_density(mt.state(i), xs)
            dens_rows.extend((t, x, v) for x, v in zip(xs, vals))
        dens_out = config.out_dir / "density.csv"
        write_csv(dens_out, ("t", "x", "value"), dens_rows)
        print(f"wrote {dens_out} ({len(dens_rows)} rows)")
    return EXIT_OK


def cmd_oracle(args):
    config = build_run_config(args)
    run = _oracle_run(config)
    out = config.out_dir / "oracle.csv"
    write_csv(out, MOMENT_COLUMNS + ("norm", "top_population"), _oracle_rows(run))
    print(f"wrote {out} ({len(run.times)} rows); "
          f"max top-decile population {run.max_top_population:.3e}")
    if not run.reliable:
        print("warning: truncation alarm, run is unreliable; increase --oracle-n")
        return EXIT_UNRELIABLE
    return EXIT_OK


def cmd_compare(args):
    config = build_run_config(args)
    if args.rwa:
        if not isinstance(config.scenario, DrivenSpec):
            raise ConfigError("--rwa comparison needs --scenario driven")
        if config.initial_kind == "moments":
            raise ConfigError("--rwa comparison needs a ground or coherent start")
        times = np.linspace(0.0, config.params.horizon, config.samples)
        ref = driven_moments_exact(config.scenario, config.initial, times)
        other = driven_moments_rwa(config.scenario, config.coherent_amplitude, times)
        reliable = True
        label = "rwa"
    else:
        sol, mt, _ = _pipeline_rows(config)
        run = _oracle_run(config)
        times = sol.grid
        ref, other = mt, run.moments
        reliable = run.reliable
        label = "oracle"
    report = compare_series(times, _trajectory_dict(ref), _trajectory_dict(other),
                            config.threshold, reliable)
    columns = ["t"]
    data = [times]
    for name in COMPARE_SERIES:
        columns += [f"{name}_ref", f"{name}_{label}"]
        data += [_trajectory_dict(ref)[name], _trajectory_dict(other)[name]]
    out = config.out_dir / "compare.csv"
    write_csv(out, columns, np.column_stack(data))
    (config.out_dir / "report.json").write_text(report.to_json() + "\n")
    for line in report.lines():
        print(line)
    print(f"wrote {out}")
    if not report.reliable:
        return EXIT_UNRELIABLE
    return EXIT_OK if report.passed else EXIT_COMPARISON


def _sweep_point(args, name, value):
    sub = argparse.Namespace(**vars(args))
    setattr(sub, name.replace("-", "_"), value)
    try:
        config = build_run_config(sub)
        sol, mt, _ = _pipeline_rows(config)
        unc = mt.var_x * mt.var_p
        return (value, "ok", float(np.abs(mt.mean_x).max()),
                float(np.abs(mt.mean_p).max()), float(unc.min()), float(unc.max()))
    except (ConfigError, DomainError, ValidityError, SingularityError,
            IntegrationError) as exc:
        return (value, f"error: {type(exc).__name__}", math.nan, math.nan,
                math.nan, math.nan)


def cmd_sweep(args):
    if args.sweep is None:
        raise ConfigError("sweep requires --sweep param:lo:hi:count")
    if args.scenario is None:
        raise ConfigError("sweep works on scenario presets; pass --scenario")
    parts = args.sweep.split(":")
    if len(parts) != 4:
        raise ConfigError("--sweep must look like param:lo:hi:count")
    name, lo, hi, count = parts[0], parts[1], parts[2], parts[3]
    allowed = {"omega-d", "strength", "gamma", "horizon", "m", "omega"}
    if name not in allowed:
        raise ConfigError(f"sweep parameter must be one of {sorted(allowed)}")
    try:
        lo, hi, count = float(lo), float(hi), int(count)
    except ValueError:
        raise ConfigError("sweep bounds must be numbers and count an integer") from None
    if count < 1:
        raise ConfigError("sweep count must be at least 1")
    values = np.linspace(lo, hi, count)
    with ThreadPoolExecutor(max_workers=min(count, 8)) as pool:
        results = list(pool.map(lambda v: _sweep_point(args, name, float(v)), values))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "sweep.csv"
    with open(path, "w") as fh:
        fh.write(f"{name},status,max_abs_mean_x,max_abs_mean_p,"
                 "min_uncertainty,max_uncertainty\n")
        for value, status, *rest in results:
            fh.write(",".join([_fmt(value), status] + [_fmt(v) for v in rest]) + "\n")
    n_ok = sum(1 for r in results if r[1] == "ok")
    print(f"wrote {path} ({n_ok}/{count} points ok)")
    return EXIT_OK


# -- entry point -------------------------------------------------------------


def build_parser():
    parser = argparse.ArgumentParser(
        prog="tdqho",
        description="Quadratic time-dependent oscillator: analytic moment "
                    "propagation with a Fock-basis cross-check.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in (("validate", cmd_validate), ("static-diag", cmd_static_diag),
                     ("evolve", cmd_evolve), ("oracle", cmd_oracle),
                     ("compare", cmd_compare), ("sweep", cmd_sweep)):
        p = sub.add_parser(name)
        p.set_defaults(fn=fn)
        p.add_argument("--config", default=None, help="model parameters JSON")
        p.add_argument("--scenario", default=None, choices=("driven", "ck"))
        p.add_argument("--m", type=float, default=1.0)
        p.add_argument("--omega", type=float, default=1.0)
        p.add_argument("--omega-d", type=float, default=None,
                       help="drive frequency (driven preset; default resonant)")
        p.add_argument("--strength", type=float, default=0.1,
                       help="drive strength (driven preset)")
        p.add_argument("--gamma", type=float, default=None,
                       help="mass-scaling rate (ck preset; default -omega/4)")
        p.add_argument("--hbar", type=float, default=1.0)
        p.add_argument("--horizon", type=float, default=None)
        p.add_argument("--samples", type=int, default=2000)
        p.add_argument("--initial", default="ground",
                       help="ground | coherent:<amp> | moments:x,p,vx,vp,cv")
        p.add_argument("--out", default=".")
        p.add_argument("--density", type=int, default=0,
                       help="also write density.csv with this many x points")
        p.add_argument("--oracle-n", type=int, default=64)
        p.add_argument("--oracle-dt", type=float, default=None,
                       help="Magnus step (absolute time units)")
        p.add_argument("--threshold", type=float, default=1e-4)
        p.add_argument("--rwa", action="store_true",
                       help="compare: exact vs rotating-wave instead of oracle")
        p.add_argument("--branch", default="theta-p-zero",
                       choices=("theta-p-zero", "theta-x-zero"))
        p.add_argument("--sweep", default=None, help="param:lo:hi:count")
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DomainError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ValidityError, SingularityError, IntegrationError) as exc:
        print(f"validity error: {exc}", file=sys.stderr)
        return EXIT_VALIDITY


if __name__ == "__main__":
    sys.exit(main())
