"""Command-line entry point: ``regime-predprey {validate,classify,simulate,sweep,moments}``.

Every flag can be preset through an environment variable named
``RSPP_<FLAG>`` (upper case, dashes as underscores), e.g. ``RSPP_DT=5e-4``.
Exit codes: 0 success, 2 validation/usage, 3 I/O, 4 numerical/simulation.
"""
from __future__ import annotations

import argparse
import os
import re
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np
import yaml
from scipy import stats

from . import __version__
from .ctmc import GeneratorMatrix, stationary_law
from .ergodics import ensemble_moment, lyapunov_slope
from .errors import (ConditionViolated, ScenarioError, SimulationError, SolverFailure)
from .files import load_scenario, write_report, write_rows_csv
from .integrator import GridSpec, simulate_auxiliary, simulate_bundle
from .model import COEFFICIENTS, Scenario, parameter_extremes, validate_scenario
from .thresholds import (Settings, classify, finite_moment_bound, moment_bound,
                         threshold_T1, threshold_T2)

ENV_PREFIX = "RSPP_"
EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_NUMERIC = 0, 2, 3, 4


class CliError(Exception):
    def __init__(self, message, code):
        super().__init__(message)
        self.code = code


@dataclass(frozen=True)
class RunConfig:
    scenario: str
    command: str
    horizon: float = 1e4
    dt: float = 1e-3
    burn_in_fraction: float = 0.1
    batches: int = 20
    replicas: int = 32
    base_seed: int = 0
    record_stride: int = 1000
    out: str = "out"
    workers: int = 1
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if not (self.dt > 0 and self.horizon > 0):
            raise CliError("dt and horizon must be positive", EXIT_USAGE)
        if not 0 <= self.burn_in_fraction < 1:
            raise CliError("burn-in fraction must lie in [0, 1)", EXIT_USAGE)
        if self.replicas < 1 or self.batches < 2 or self.record_stride < 1:
            raise CliError("replicas >= 1, batches >= 2, record-stride >= 1 required",
                           EXIT_USAGE)

    @property
    def settings(self) -> Settings:
        return Settings(horizon=self.horizon, dt=self.dt,
                        burn_in_fraction=self.burn_in_fraction, batches=self.batches,
                        replicas=self.replicas, seed=self.base_seed,
                        record_stride=self.record_stride)

    def echo(self) -> dict:
        d = asdict(self)
        d.pop("workers")
        return d


# -- helpers -------------------------------------------------------------------

def _load(cfg: RunConfig) -> Scenario:
    path = Path(cfg.scenario)
    if not path.is_file():
        raise CliError(f"scenario file not found: {path}", EXIT_IO)
    try:
        s = load_scenario(path)
    except (yaml.YAMLError, KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ScenarioError):
            raise CliError(str(exc), EXIT_USAGE) from exc
        raise CliError(f"cannot parse {path}: {exc}", EXIT_IO) from exc
    try:
        return validate_scenario(s)
    except ScenarioError as exc:
        raise CliError(f"invalid scenario: {exc}", EXIT_USAGE) from exc


def _outdir(cfg: RunConfig) -> Path:
    out = Path(cfg.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise CliError(f"cannot create output directory {out}: {exc}", EXIT_IO) from exc
    return out


def _map(cfg: RunConfig, fn, items):
    if cfg.workers > 1:
        with ThreadPoolExecutor(cfg.workers) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def _provenance(cfg: RunConfig, s: Scenario, seeds) -> dict:
    return {"config": cfg.echo(), "scenario_data": s.to_dict(),
            "seeds": [list(x) for x in seeds], "version": __version__}


_PARAM_RE = re.compile(r"^regimes\[(\d+)\]\.(\w+)$")
_GEN_RE = re.compile(r"^generator\[(\d+)\]\[(\d+)\]$")


def apply_parameter(s: Scenario, path: str, value: float) -> Scenario:
    """Set ``regimes[k].name`` or ``generator[i][j]`` (1-based), or ``x0``/``y0``/``rho``.

    Changing an off-diagonal rate re-balances that row's diagonal.
    """
    m = _PARAM_RE.match(path)
    if m:
        k, name = int(m.group(1)), m.group(2)
        if not 1 <= k <= s.n_regimes or name not in COEFFICIENTS:
            raise CliError(f"bad parameter path {path!r}", EXIT_USAGE)
        return s.with_coefficient(k - 1, name, value)
    m = _GEN_RE.match(path)
    if m:
        i, j = int(m.group(1)) - 1, int(m.group(2)) - 1
        n = s.n_regimes
        if not (0 <= i < n and 0 <= j < n) or i == j:
            raise CliError(f"bad generator path {path!r} (off-diagonal, 1-based)", EXIT_USAGE)
        q = s.generator.q.copy()
        q[i, j] = value
        q[i, i] = 0.0
        q[i, i] = -q[i].sum()
        return replace(s, generator=GeneratorMatrix(q))
    if path in ("x0", "y0", "rho"):
        return replace(s, **{path: float(value)})
    raise CliError(f"unknown parameter path {path!r}", EXIT_USAGE)


def _report_text(rep: dict) -> str:
    lines = [f"outcome: {rep['outcome']}",
             f"T1 = {rep['T1']:.10g}", f"T2 = {rep['T2']:.10g}",
             "mu = (" + ", ".join(f"{m:.10g}" for m in rep["mu"]) + ")"]
    for key in ("lambda", "lambda_bar"):
        est = rep.get(key)
        if est is not None:
            tag = " [lower-bound-guaranteed]" if est["lower_bound_only"] else ""
            lines.append(f"{key} = {est['value']:.6g} +/- {est['half_width']:.3g}{tag}")
    if "lambda_bar_minus_lambda" in rep:
        c = rep["lambda_bar_minus_lambda"]
        lines.append(f"lambda_bar - lambda = {c['value']:.6g} "
                     f"(combined half-width {c['combined_half_width']:.3g})")
    lines += [f"note: {d}" for d in rep["diagnostics"]]
    return "\n".join(lines) + "\n"


def _classify_dict(s: Scenario, cfg: RunConfig) -> dict:
    try:
        rep = classify(s, cfg.settings).to_dict()
    except SimulationError as exc:
        raise CliError(f"simulation failed: {exc}", EXIT_NUMERIC) from exc
    if rep["lambda"] is not None and rep["lambda_bar"] is not None:
        rep["lambda_bar_minus_lambda"] = {
            "value": rep["lambda_bar"]["value"] - rep["lambda"]["value"],
            "combined_half_width": rep["lambda_bar"]["half_width"]
            + rep["lambda"]["half_width"],
        }
    return rep


# -- commands ------------------------------------------------------------------

def cmd_validate(cfg: RunConfig) -> int:
    s = _load(cfg)
    try:
        mu = stationary_law(s.generator).mu
    except SolverFailure as exc:
        raise CliError(str(exc), EXIT_NUMERIC) from exc
    ex = parameter_extremes(s)
    print(f"scenario OK: {s.n_regimes} regime(s)")
    print("mu = (" + ", ".join(f"{m:.10g}" for m in mu) + ")")
    print(f"T1 = {threshold_T1(s, mu):.10g}   T2 = {threshold_T2(s, mu):.10g}")
    print(f"{'coef':>6} {'min':>12} {'max':>12}")
    for k in COEFFICIENTS:
        print(f"{k:>6} {ex.hat[k]:12.6g} {ex.check[k]:12.6g}")
    return EXIT_OK


def cmd_classify(cfg: RunConfig) -> int:
    s = _load(cfg)
    out = _outdir(cfg)
    rep = _classify_dict(s, cfg)
    doc = {"report": rep, **_provenance(cfg, s, [(cfg.base_seed, 0)])}
    write_report(doc, out / "report.json")
    text = _report_text(rep)
    (out / "report.txt").write_text(text)
    print(text, end="")
    return EXIT_OK


def _replica_interval(values) -> dict:
    v = np.asarray(values, dtype=float)
    mean = float(v.mean())
    hw = float(stats.t.ppf(0.975, v.size - 1) * v.std(ddof=1) / np.sqrt(v.size)) if v.size > 1 else float("nan")
    return {"mean": mean, "half_width": hw, "low": mean - hw, "high": mean + hw}


def cmd_simulate(cfg: RunConfig) -> int:
    s = _load(cfg)
    out = _outdir(cfg)
    grid = GridSpec(cfg.dt, cfg.horizon, cfg.record_stride)
    window = (cfg.burn_in_fraction * cfg.horizon, grid.n_steps * grid.dt)

    def one(r):
        b = simulate_bundle(s, grid, cfg.base_seed, path_id=r)
        b.to_csv(out / f"path_{r:03d}.csv")
        sx = lyapunov_slope(b.times, b.logX, window, cfg.batches)
        sy = lyapunov_slope(b.times, b.logY, window, cfg.batches)
        viol = int(np.sum(b.logX > b.logPhi) + np.sum(b.logY > b.logPsi))
        nonfinite = int(np.sum(~np.isfinite(np.stack([b.logX, b.logY, b.logPhi, b.logPsi]))))
        return {"replica": r, "slope_logX": sx.to_dict(), "slope_logY": sy.to_dict(),
                "domination_violations": viol, "nonfinite": nonfinite,
                "final": {"logX": float(b.logX[-1]), "logY": float(b.logY[-1]),
                          "logPhi": float(b.logPhi[-1]), "logPsi": float(b.logPsi[-1]),
                          "regime": int(b.regime[-1]) + 1}}

    try:
        rows = _map(cfg, one, range(cfg.replicas))
    except SimulationError as exc:
        raise CliError(f"simulation failed: {exc}", EXIT_NUMERIC) from exc
    summary = {
        "replicas": rows,
        "slope_logX": _replica_interval([r["slope_logX"]["slope"] for r in rows]),
        "slope_logY": _replica_interval([r["slope_logY"]["slope"] for r in rows]),
        "domination_violations": sum(r["domination_violations"] for r in rows),
        "window": list(window),
    }
    seeds = [(cfg.base_seed, r) for r in range(cfg.replicas)]
    write_report({"summary": summary, **_provenance(cfg, s, seeds)}, out / "summary.json")
    sx, sy = summary["slope_logX"], summary["slope_logY"]
    print(f"slope(logX) = {sx['mean']:.5g} +/- {sx['half_width']:.3g}")
    print(f"slope(logY) = {sy['mean']:.5g} +/- {sy['half_width']:.3g}")
    print(f"domination violations: {summary['domination_violations']}")
    return EXIT_OK


def cmd_sweep(cfg: RunConfig, param: str, values) -> int:
    if not values:
        raise CliError("sweep needs a non-empty --values grid", EXIT_USAGE)
    s = _load(cfg)
    out = _outdir(cfg)
    variants = []
    for v in values:
        sv = apply_parameter(s, param, v)
        try:
            variants.append(validate_scenario(sv))
        except ScenarioError as exc:
            raise CliError(f"{param}={v}: {exc}", EXIT_USAGE) from exc
    reports = _map(cfg, lambda sv: _classify_dict(sv, cfg), variants)
    rows = []
    for v, rep in zip(values, reports):
        lam = rep["lambda"]["value"] if rep["lambda"] else None
        lbar = rep["lambda_bar"]["value"] if rep["lambda_bar"] else None
        rows.append([float(v), rep["T1"], rep["T2"], lam, lbar, rep["outcome"]])
    write_rows_csv(["value", "T1", "T2", "lambda", "lambda_bar", "outcome"], rows,
                   out / "sweep.csv")
    doc = {"param": param, "values": [float(v) for v in values], "reports": reports,
           **_provenance(cfg, s, [(cfg.base_seed, 0)])}
    write_report(doc, out / "sweep.json")
    for row in rows:
        print(f"{row[0]:>12.6g}  {row[-1]}")
    return EXIT_OK


def moment_rows(s: Scenario, which: str, p: float, times, cfg: RunConfig) -> dict:
    """Ensemble moments of phi or psi against the finite-time and large-time bounds."""
    tmax = max(times)
    stride = max(1, int(round(1.0 / cfg.dt)))
    stride = min(stride, int(round(tmax / cfg.dt)))
    grid = GridSpec(cfg.dt, tmax, stride)
    paths = _map(cfg, lambda r: simulate_auxiliary(s, which, grid, cfg.base_seed, r),
                 range(cfg.replicas))
    logs = np.stack([pth.log_values for pth in paths])
    try:
        asym = moment_bound(s, which, p)
        condition = None
    except ConditionViolated as exc:
        asym, condition = None, f"large-time bound precondition fails: {exc}"
    rows = []
    for t in times:
        k = int(np.argmin(np.abs(paths[0].times - t)))
        est, se = ensemble_moment(logs[:, k], p)
        fin = finite_moment_bound(s, which, p, float(paths[0].times[k]))
        ok = est <= fin + 3 * se
        if t == tmax and asym is not None:
            ok = ok and est <= asym + 3 * se
        rows.append({"t": float(paths[0].times[k]), "estimate": est, "stderr": se,
                     "finite_bound": fin, "asymptotic_bound": asym, "pass": bool(ok)})
    return {"process": which, "p": p, "rows": rows, "condition_failure": condition}


def cmd_moments(cfg: RunConfig, p: float, times) -> int:
    s = _load(cfg)
    out = _outdir(cfg)
    if not times or min(times) <= 0:
        raise CliError("moment ladder times must be positive", EXIT_USAGE)
    try:
        results = [moment_rows(s, w, p, times, cfg) for w in ("phi", "psi")]
    except SimulationError as exc:
        raise CliError(f"simulation failed: {exc}", EXIT_NUMERIC) from exc
    except ValueError as exc:
        raise CliError(str(exc), EXIT_USAGE) from exc
    seeds = [(cfg.base_seed, r) for r in range(cfg.replicas)]
    write_report({"moments": results, **_provenance(cfg, s, seeds)}, out / "moments.json")
    for res in results:
        print(f"{res['process']} (p={p}):")
        if res["condition_failure"]:
            print(f"  {res['condition_failure']}")
        for r in res["rows"]:
            asym = "n/a" if r["asymptotic_bound"] is None else f"{r['asymptotic_bound']:.4g}"
            print(f"  t={r['t']:<8g} E={r['estimate']:.4g} se={r['stderr']:.2g} "
                  f"finite={r['finite_bound']:.4g} asym={asym} "
                  f"{'pass' if r['pass'] else 'FAIL'}")
    return EXIT_OK


# -- argument parsing ----------------------------------------------------------

def _env(name, default, cast=str):
    raw = os.environ.get(ENV_PREFIX + name.upper().replace("-", "_"))
    return default if raw is None else cast(raw)


def _floats(text: str):
    return [float(v) for v in text.replace(",", " ").split()]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scenario", default=_env("scenario", None),
                        required=_env("scenario", None) is None)
    common.add_argument("--horizon", type=float, default=_env("horizon", 1e4, float))
    common.add_argument("--dt", type=float, default=_env("dt", 1e-3, float))
    common.add_argument("--burn-in", type=float, default=_env("burn-in", 0.1, float),
                        help="burn-in as a fraction of the horizon")
    common.add_argument("--batches", type=int, default=_env("batches", 20, int))
    common.add_argument("--replicas", type=int, default=_env("replicas", 32, int))
    common.add_argument("--seed", type=int, default=_env("seed", 0, int))
    common.add_argument("--record-stride", type=int, default=_env("record-stride", 1000, int))
    common.add_argument("--out", default=_env("out", "out"))
    common.add_argument("--workers", type=int, default=_env("workers", 1, int))

    parser = argparse.ArgumentParser(prog="regime-predprey", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("validate", parents=[common], help="check a scenario file")
    sub.add_parser("classify", parents=[common], help="thresholds and outcome")
    sub.add_parser("simulate", parents=[common], help="coupled paths and growth slopes")
    sw = sub.add_parser("sweep", parents=[common], help="classify across a parameter grid")
    sw.add_argument("--param", default=_env("param", None), required=_env("param", None) is None)
    sw.add_argument("--values", default=_env("values", ""),
                    help="comma or space separated grid")
    mo = sub.add_parser("moments", parents=[common], help="check moment bounds")
    mo.add_argument("--p", type=float, default=_env("p", 2.0, float))
    mo.add_argument("--times", default=_env("times", "10,50,100"))
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = RunConfig(scenario=args.scenario, command=args.command, horizon=args.horizon,
                        dt=args.dt, burn_in_fraction=args.burn_in, batches=args.batches,
                        replicas=args.replicas, base_seed=args.seed,
                        record_stride=args.record_stride, out=args.out, workers=args.workers)
        if args.command == "validate":
            return cmd_validate(cfg)
        if args.command == "classify":
            return cmd_classify(cfg)
        if args.command == "simulate":
            return cmd_simulate(cfg)
        if args.command == "sweep":
            values = _floats(args.values)
            cfg = replace(cfg, extra={"param": args.param, "values": values})
            return cmd_sweep(cfg, args.param, values)
        p, times = args.p, _floats(args.times)
        cfg = replace(cfg, extra={"p": p, "times": times})
        return cmd_moments(cfg, p, times)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.code
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
