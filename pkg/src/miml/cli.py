"""Command-line interface: ``miml simulate | reproduce | estimate | bias``.

Exit codes: 0 success, 2 usage or configuration error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .bias import bias_sigma2_y
from .errors import ConfigError, MimlError, UndefinedBias
from .harness import ExperimentConfig, SummaryTable, run_experiment
from .imputation import ImputationConfig, run_mi
from .inference import ML_METHODS, ml_interval, pdmi_interval
from .ml import ESTIMANDS, estimate_ml, information_report
from .population import Dataset, Pattern, PopulationSpec
from .reproduce import TABLES, render_text, reproduce

EXIT_OK, EXIT_USAGE, EXIT_IO = 0, 2, 3
SEED_ENV = "MIML_SEED"


class UsageError(Exception):
    pass


def fmt(v) -> str:
    """17 significant digits so every cell round-trips exactly."""
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format(float(v), ".17g")


def _seed(arg, fallback=None) -> int:
    if arg is not None:
        return arg
    env = os.environ.get(SEED_ENV)
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"{SEED_ENV} must be an integer, got {env!r}") from None
    return 0 if fallback is None else fallback


def summary_csv(summary: SummaryTable) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["section", "label", "statistic", *ESTIMANDS])
    for section, label, stat, values in summary.rows():
        w.writerow([section, label, stat, *(fmt(int(v)) if stat == "rank" else fmt(v) for v in values)])
    return buf.getvalue()


def summary_text(summary: SummaryTable) -> str:
    lines = [f"{'':<28}{'':<12}" + "".join(f"{e:>11}" for e in ESTIMANDS)]
    for _, label, stat, values in summary.rows():
        cells = "".join(f"{v:>11.4g}" if stat != "rank" else f"{int(v):>11d}" for v in values)
        lines.append(f"{label:<28}{stat:<12}{cells}")
    lines.append(f"replications={summary.replications} regenerated={summary.regenerations}")
    return "\n".join(lines) + "\n"


def _write_outputs(out_dir: Path, files: dict[str, str], manifest: dict) -> None:
    """Write all files into ``out_dir``; nothing is left behind on failure."""
    out_dir.mkdir(parents=True, exist_ok=True)
    manifest = dict(manifest, outputs=[str(out_dir / name) for name in files] + [str(out_dir / "manifest.json")])
    files = dict(files, **{"manifest.json": json.dumps(manifest, indent=2, sort_keys=True) + "\n"})
    staged = []
    try:
        for name, text in files.items():
            fd, tmp = tempfile.mkstemp(dir=out_dir, prefix=f".{name}.")
            with os.fdopen(fd, "w", newline="") as fh:
                fh.write(text)
            staged.append((tmp, out_dir / name))
        for tmp, final in staged:
            os.replace(tmp, final)
    finally:
        for tmp, _ in staged:
            if os.path.exists(tmp):
                os.unlink(tmp)


def _manifest(command: str, config, seed: int, started: str, regenerations: int) -> dict:
    return {
        "command": command,
        "config": config,
        "seed": seed,
        "version": __version__,
        "started": started,
        "finished": datetime.now(timezone.utc).isoformat(),
        "regenerations": regenerations,
    }


def _now() -> str:
    return datetime.now(timezone.utc).isoformat()


def _emit(text: str, out=None):
    (out or sys.stdout).write(text)


def cmd_simulate(args) -> int:
    started = _now()
    try:
        raw = json.loads(Path(args.config).read_text())
    except FileNotFoundError:
        raise UsageError(f"config file not found: {args.config}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"config is not valid JSON: {exc}") from None
    if not isinstance(raw, dict):
        raise UsageError("config must be a JSON object")
    if args.reps is not None:
        raw["replications"] = args.reps
    raw["seed"] = _seed(args.seed, raw.get("seed"))
    config = ExperimentConfig.from_dict(raw)
    summary = run_experiment(config, args.workers)
    csv_text, text = summary_csv(summary), summary_text(summary)
    if args.out:
        manifest = _manifest("simulate", config.to_dict(), config.seed, started, summary.regenerations)
        _write_outputs(Path(args.out), {"summary.csv": csv_text, "summary.txt": text}, manifest)
    _emit(csv_text if args.format == "csv" else text)
    return EXIT_OK


def reproduction_csv(rep) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["table", "row", "n", "pattern", "estimand", "statistic", "value", "published"])
    for key, n, pattern, estimand, stat, ours, published in rep.comparisons():
        w.writerow([rep.table, key, n, pattern, estimand, stat, fmt(ours), published])
    return buf.getvalue()


def cmd_reproduce(args) -> int:
    started = _now()
    if args.reps is not None and args.reps < 100:
        raise UsageError("--reps must be at least 100")
    seed = _seed(args.seed)
    rep = reproduce(args.table, args.reps, seed, args.workers)
    csv_text, text = reproduction_csv(rep), render_text(rep)
    if args.out:
        configs = {f"{n}-{p}": s.config.to_dict() for (n, p), s in rep.results.items()}
        regen = sum(s.regenerations for s in rep.results.values())
        manifest = _manifest(f"reproduce {args.table}", configs, seed, started, regen)
        _write_outputs(Path(args.out), {f"{args.table}.csv": csv_text, f"{args.table}.txt": text}, manifest)
    _emit(csv_text if args.format == "csv" else text)
    return EXIT_OK


def read_xy_csv(path: str) -> Dataset:
    """Read a two-column ``x,y`` file; an empty y cell marks a missing value."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or [h.strip().lower() for h in rows[0]] != ["x", "y"]:
        raise UsageError("the CSV header must be exactly 'x,y'")
    xs, ys = [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != 2:
            raise UsageError(f"line {lineno}: expected 2 fields, got {len(row)}")
        x, y = (c.strip() for c in row)
        if x == "":
            raise UsageError(f"line {lineno}: x is missing; only Y may be missing")
        xs.append(_number(x, lineno))
        ys.append(math.nan if y == "" else _number(y, lineno))
    if not xs:
        raise UsageError("the CSV has no data rows")
    return Dataset(np.array(xs), np.array(ys))


def _number(text: str, lineno: int) -> float:
    try:
        v = float(text)
    except ValueError:
        raise UsageError(f"line {lineno}: {text!r} is not a number") from None
    if not math.isfinite(v):
        raise UsageError(f"line {lineno}: {text!r} is not a finite number (leave the cell empty for missing)")
    return v


def cmd_estimate(args) -> int:
    try:
        dataset = read_xy_csv(args.csv)
    except FileNotFoundError:
        raise UsageError(f"file not found: {args.csv}") from None
    except OSError as exc:
        raise UsageError(f"cannot read {args.csv}: {exc}") from None
    bounded = not args.unbounded
    rows = []
    if args.method == "ml":
        _, est = estimate_ml(dataset)
        report = information_report(dataset)
        methods = args.ci or ["normal", "tstar", "t"]
        for name in ESTIMANDS:
            for m in methods:
                ci = ml_interval(dataset, name, m, bounded, args.level)
                rows.append((name, est.as_dict()[name], report.se_obs[name], report.gamma[name], m, ci))
    else:
        cfg = ImputationConfig(args.method.upper(), args.D, args.nu_prior)
        mi = run_mi(dataset, cfg, np.random.default_rng(_seed(args.seed)))
        for name in ESTIMANDS:
            cell = mi[name]
            ci = pdmi_interval(mi, dataset.n, name, bounded, args.level) if cfg.D >= 2 else None
            rows.append((name, cell["point"], math.sqrt(cell["t_var"]) if cfg.D >= 2 else math.nan, cell["gamma"], "t", ci))
    if args.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["estimand", "estimate", "se", "gamma", "ci_method", "df", "lower", "upper"])
        for name, point, se, gamma, m, ci in rows:
            df = "" if ci is None or ci.df_used is None else fmt(ci.df_used)
            lo, hi = ("", "") if ci is None else (fmt(ci.lower), fmt(ci.upper))
            w.writerow([name, fmt(point), fmt(se), fmt(gamma), m, df, lo, hi])
        _emit(buf.getvalue())
    else:
        print(f"n={dataset.n} complete cases={dataset.n0} method={args.method.upper()}")
        print(f"{'estimand':<10}{'estimate':>12}{'se':>12}{'gamma':>8}  {'ci':<7}{'df':>9}{'lower':>12}{'upper':>12}")
        for name, point, se, gamma, m, ci in rows:
            df = "-" if ci is None or ci.df_used is None else f"{ci.df_used:.3f}"
            lo, hi = ("-", "-") if ci is None else (f"{ci.lower:.5g}", f"{ci.upper:.5g}")
            print(f"{name:<10}{point:>12.5g}{se:>12.5g}{gamma:>8.3f}  {m:<7}{df:>9}{lo:>12}{hi:>12}")
    return EXIT_OK


def cmd_bias(args) -> int:
    try:
        spec = PopulationSpec(args.rho, args.p, Pattern(args.pattern.upper()))
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    method = args.method.upper()
    try:
        r = bias_sigma2_y(spec, args.n, method, args.nu_prior, args.exact_pd_factor)
    except UndefinedBias as exc:
        print(f"method={method} n={args.n} pattern={spec.pattern.value} nu_prior={args.nu_prior}")
        print(f"resid_term: undefined ({exc})")
        print("total: undefined")
        return EXIT_OK
    if args.format == "csv":
        print("method,n,pattern,rho,p,nu_prior,quad_term,resid_term,total")
        print(",".join([method, str(args.n), spec.pattern.value, fmt(args.rho), fmt(args.p), str(r.nu_prior), fmt(r.quad_term), fmt(r.resid_term), fmt(r.total)]))
    else:
        print(f"method={method} n={args.n} pattern={spec.pattern.value} rho={args.rho} p={args.p} nu_prior={r.nu_prior}")
        print(f"quad_term:  {r.quad_term:.6g}")
        print(f"resid_term: {r.resid_term:.6g}")
        print(f"total:      {r.total:.6g}")
    return EXIT_OK


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="miml", description="ML versus multiple imputation for bivariate normal data with Y missing.")
    p.add_argument("--version", action="version", version=f"miml {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, seed=True):
        if seed:
            sp.add_argument("--seed", type=int, help=f"random seed (falls back to ${SEED_ENV}, then the config, then 0)")
        sp.add_argument("--workers", type=int, default=1, help="worker processes")
        sp.add_argument("--format", choices=("csv", "text"), default="text")
        sp.add_argument("--out", help="directory for CSV, text and manifest output")

    s = sub.add_parser("simulate", help="run an experiment from a JSON config")
    s.add_argument("--config", required=True)
    s.add_argument("--reps", type=int)
    common(s)
    s.set_defaults(func=cmd_simulate)

    r = sub.add_parser("reproduce", help="rerun a published table")
    r.add_argument("table", choices=TABLES)
    r.add_argument("--reps", type=int, help="replications per row (default: the table's preset)")
    common(r)
    r.set_defaults(func=cmd_reproduce)

    e = sub.add_parser("estimate", help="estimate from an x,y CSV (empty y = missing)")
    e.add_argument("csv")
    e.add_argument("--method", choices=("ml", "mlmi", "pdmi"), default="ml")
    e.add_argument("--ci", action="append", choices=ML_METHODS, help="ML interval method (repeatable)")
    e.add_argument("--unbounded", action="store_true", help="use raw df instead of max(3, df)")
    e.add_argument("--level", type=float, default=0.95)
    e.add_argument("--D", type=int, default=5, help="imputations")
    e.add_argument("--nu-prior", type=int, default=0)
    e.add_argument("--seed", type=int)
    e.add_argument("--format", choices=("csv", "text"), default="text")
    e.set_defaults(func=cmd_estimate)

    b = sub.add_parser("bias", help="asymptotic bias of the single-imputation variance of Y")
    b.add_argument("--n", type=int, required=True)
    b.add_argument("--pattern", default="MXN")
    b.add_argument("--rho", type=float, default=0.5)
    b.add_argument("--p", type=float, default=0.5)
    b.add_argument("--method", choices=("mlsi", "pdsi", "MLSI", "PDSI"), default="mlsi")
    b.add_argument("--nu-prior", type=int, default=0)
    b.add_argument("--exact-pd-factor", action="store_true")
    b.add_argument("--format", choices=("csv", "text"), default="text")
    b.set_defaults(func=cmd_bias)
    return p


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    except (UsageError, ConfigError, MimlError, ValueError) as exc:
        print(f"miml: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"miml: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
