"""Command-line front end.

Every subcommand prints a table, as CSV (default) or JSON, and records a run
manifest with the resolved parameters so that ``hypershadow replay`` can
regenerate the same bytes later.

CSV headers, one fixed header per subcommand::

    shadow exact        n,r,single_fraction,union_fraction,bound,reason
    shadow mc           n,r,trials,hits,p_hat,ci_low,ci_high,ci_level,standard_error,seed
    shadow table        n,z,r,trials,hits,p_hat,ci_low,ci_high,predicted_alpha
    threshold           n,z,r,predicted_alpha
    limits              kind,n,trials,seed,check,probability,empirical,expected,gap,tolerance,passed
    concentration slab  n,eps,lo,hi,exact,normal_approx,abs_diff,approximated
    concentration cap   n,theta,mass
    concentration pmf   n,k,cosine,pmf
    steele              n,inner_radius,escapes_cube

Exit codes: 0 success, 2 usage or domain error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import os
import sys
from datetime import datetime, timezone
from typing import Any, Sequence

from . import __version__, asymptotics, capgeom, concentration, mc
from .errors import ConvergenceError, DomainError
from .specfun import std_normal_cdf

__all__ = ["HEADERS", "TRIALS_ENV", "build_parser", "main", "render", "run"]

log = logging.getLogger(__name__)

TRIALS_ENV = "HYPERSHADOW_DEFAULT_TRIALS"

DEFAULT_TRIALS = {"shadow mc": 1_000_000, "shadow table": 100_000, "limits": 200_000}

HEADERS: dict[str, tuple[str, ...]] = {
    "shadow exact": ("n", "r", "single_fraction", "union_fraction", "bound", "reason"),
    "shadow mc": ("n", "r", "trials", "hits", "p_hat", "ci_low", "ci_high", "ci_level",
                  "standard_error", "seed"),
    "shadow table": ("n", "z", "r", "trials", "hits", "p_hat", "ci_low", "ci_high",
                     "predicted_alpha"),
    "threshold": ("n", "z", "r", "predicted_alpha"),
    "limits": ("kind", "n", "trials", "seed", "check", "probability", "empirical", "expected",
               "gap", "tolerance", "passed"),
    "concentration slab": ("n", "eps", "lo", "hi", "exact", "normal_approx", "abs_diff",
                           "approximated"),
    "concentration cap": ("n", "theta", "mass"),
    "concentration pmf": ("n", "k", "cosine", "pmf"),
    "steele": ("n", "inner_radius", "escapes_cube"),
}

# Options that only steer where and how output is written.
_IO_KEYS = {"format", "output", "manifest", "command", "handler"}

Row = dict[str, Any]


class UsageError(Exception):
    pass


# ---------------------------------------------------------------- commands


def _shadow_exact(a: argparse.Namespace) -> list[Row]:
    rows = []
    for n in a.n:
        for r in a.r:
            single = capgeom.single_shadow_fraction(n, r)
            reasons = []
            union = None
            if r <= 1.0:
                union = capgeom.disjoint_union_fraction(n, r)
            else:
                reasons.append("union omitted: shadows overlap for r > 1")
            bound = None
            if n >= 3:
                bound = 0.5 * capgeom.beta_tail_bound(n, min(1.0, r * r / n))
            else:
                reasons.append("bound needs n >= 3")
            rows.append({"n": n, "r": r, "single_fraction": single, "union_fraction": union,
                         "bound": bound, "reason": "; ".join(reasons)})
    return rows


def _shadow_mc(a: argparse.Namespace) -> list[Row]:
    est = mc.estimate_alpha(a.n, a.r, a.trials, seed=a.seed, ci_level=a.ci, workers=a.workers)
    return [{"n": est.n, "r": est.r, "trials": est.trials, "hits": est.hits, "p_hat": est.p_hat,
             "ci_low": est.ci_low, "ci_high": est.ci_high, "ci_level": est.ci_level,
             "standard_error": est.standard_error, "seed": est.seed}]


def _shadow_table(a: argparse.Namespace) -> list[Row]:
    table = mc.alpha_convergence_table(a.n, a.z, a.trials, seed=a.seed, ci_level=a.ci,
                                       workers=a.workers)
    return [{"n": row.n, "z": row.z, "r": row.r, "trials": row.estimate.trials,
             "hits": row.estimate.hits, "p_hat": row.estimate.p_hat,
             "ci_low": row.estimate.ci_low, "ci_high": row.estimate.ci_high,
             "predicted_alpha": row.predicted} for row in table]


def _threshold(a: argparse.Namespace) -> list[Row]:
    z = a.z if a.z is not None else asymptotics.target_probability_offset(a.target)
    predicted = std_normal_cdf(z)
    if not a.n:
        return [{"n": None, "z": z, "r": None, "predicted_alpha": predicted}]
    return [{"n": n, "z": z, "r": asymptotics.threshold_radius(n, z), "predicted_alpha": predicted}
            for n in a.n]


def _limits(a: argparse.Namespace) -> list[Row]:
    kinds = mc.KINDS if a.kind == "all" else (a.kind,)
    samples = mc.sample_limit_statistics(kinds, a.n, a.trials, seed=a.seed, workers=a.workers)
    # tolerances are given on the sqrt(n) scale; raw cos(theta) values are not rescaled
    rows = []
    for kind in kinds:
        sample = samples[kind]
        law = mc.law_for(kind, a.n)
        scale = 1.0 / math.sqrt(a.n) if kind == "cos_theta" else 1.0
        tol_var = a.tol_var if a.tol_var is not None else (0.05 if kind == "ratio_centered" else 0.08)
        mom = mc.moment_check(sample, law, a.tol_mean * scale, tol_var)
        qr = mc.quantile_check(sample, law, a.quantiles, a.quantile_tol * scale)
        base = {"kind": kind, "n": a.n, "trials": a.trials, "seed": a.seed}
        rows.append({**base, "check": "mean", "probability": None, "empirical": mom.mean,
                     "expected": mom.law_mean, "gap": abs(mom.mean - mom.law_mean),
                     "tolerance": mom.tol_mean, "passed": mom.mean_ok})
        rows.append({**base, "check": "variance", "probability": None, "empirical": mom.variance,
                     "expected": mom.law_variance,
                     "gap": abs(mom.variance_ratio - 1.0) if mom.var_ok is not None else None,
                     "tolerance": mom.tol_var, "passed": mom.var_ok})
        for p, emp, exp, gap in zip(qr.probabilities, qr.empirical, qr.expected, qr.gaps):
            rows.append({**base, "check": "quantile", "probability": p, "empirical": emp,
                         "expected": exp, "gap": gap, "tolerance": qr.tol,
                         "passed": gap <= qr.tol})
    return rows


def _slab(a: argparse.Namespace) -> list[Row]:
    rows = []
    for eps in a.eps:
        s = concentration.slab_probability(a.n, eps)
        rows.append({"n": s.n, "eps": s.eps, "lo": s.lo, "hi": s.hi, "exact": s.exact,
                     "normal_approx": s.normal_approx, "abs_diff": abs(s.exact - s.normal_approx),
                     "approximated": s.approximated})
    return rows


def _cap(a: argparse.Namespace) -> list[Row]:
    return [{"n": a.n, "theta": t, "mass": concentration.cap_mass(a.n, t)} for t in a.theta]


def _pmf(a: argparse.Namespace) -> list[Row]:
    pmf = concentration.latitude_pmf_all(a.n)
    return [{"n": a.n, "k": k, "cosine": concentration.latitude_cosine(a.n, k), "pmf": float(p)}
            for k, p in enumerate(pmf)]


def _steele(a: argparse.Namespace) -> list[Row]:
    ns = a.n if a.n else range(a.n_min, a.n_max + 1)
    if not ns:
        raise DomainError(f"empty dimension range {a.n_min}..{a.n_max}")
    rows = []
    for n in ns:
        radius, escapes = capgeom.steele_inner_radius(n)
        rows.append({"n": n, "inner_radius": radius, "escapes_cube": escapes})
    return rows


# ---------------------------------------------------------------- parser


def _u64(text: str) -> int:
    value = int(text, 0)
    if not 0 <= value < 1 << 64:
        raise argparse.ArgumentTypeError(f"{text!r} is not an unsigned 64-bit integer")
    return value


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return value


def _output_flags() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("output")
    g.add_argument("--format", choices=("csv", "json"), default="csv")
    g.add_argument("--output", "-o", metavar="PATH", help="write the table here instead of stdout")
    g.add_argument("--manifest", metavar="PATH",
                   help="write the run manifest here (default: OUTPUT.manifest.json when --output is set)")
    return p


def _mc_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--trials", type=_positive_int, default=None,
                   help=f"number of simulated lines (default from ${TRIALS_ENV} or built in)")
    p.add_argument("--seed", type=_u64, default=mc.DEFAULT_SEED)
    p.add_argument("--workers", type=_positive_int, default=1)


def build_parser() -> argparse.ArgumentParser:
    io_flags = _output_flags()
    parser = argparse.ArgumentParser(
        prog="hypershadow",
        description="Shadows of balls at hypercube vertices: exact values, simulation and limits.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="group", required=True, metavar="COMMAND")

    shadow = sub.add_parser("shadow", help="shadow fractions, exact or simulated")
    shadow_sub = shadow.add_subparsers(dest="sub", required=True, metavar="MODE")

    p = shadow_sub.add_parser("exact", parents=[io_flags], help="exact cap and union fractions")
    p.add_argument("--n", type=int, nargs="+", required=True)
    p.add_argument("--r", type=float, nargs="+", required=True)
    p.set_defaults(command="shadow exact", handler=_shadow_exact)

    p = shadow_sub.add_parser("mc", parents=[io_flags], help="Monte Carlo blocked fraction")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--r", type=float, required=True)
    _mc_flags(p)
    p.add_argument("--ci", type=float, default=0.95, help="confidence level of the Wilson interval")
    p.set_defaults(command="shadow mc", handler=_shadow_mc)

    p = shadow_sub.add_parser("table", parents=[io_flags],
                              help="simulated blocked fraction at threshold radii next to Phi(z)")
    p.add_argument("--n", type=int, nargs="+", required=True)
    p.add_argument("--z", type=float, nargs="+", default=[-1.0, 0.0, 1.0])
    _mc_flags(p)
    p.add_argument("--ci", type=float, default=0.95)
    p.set_defaults(command="shadow table", handler=_shadow_table)

    p = sub.add_parser("threshold", parents=[io_flags], help="critical radius for an offset or target")
    p.add_argument("--n", type=int, nargs="*", default=[])
    which = p.add_mutually_exclusive_group(required=True)
    which.add_argument("--z", type=float)
    which.add_argument("--target", type=float, help="limiting blocked fraction in (0, 1)")
    p.set_defaults(command="threshold", handler=_threshold)

    p = sub.add_parser("limits", parents=[io_flags],
                       help="moment and quantile checks of the limit laws")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--kind", choices=("all",) + mc.KINDS, default="all")
    _mc_flags(p)
    p.add_argument("--tol-mean", type=float, default=0.01,
                   help="mean tolerance on the sqrt(n) scale")
    p.add_argument("--tol-var", type=float, default=None,
                   help="relative variance tolerance (default 0.05 for ratio_centered, else 0.08)")
    p.add_argument("--quantiles", type=float, nargs="+", default=[0.025, 0.25, 0.5, 0.75, 0.975])
    p.add_argument("--quantile-tol", type=float, default=0.02,
                   help="quantile gap tolerance on the sqrt(n) scale")
    p.set_defaults(command="limits", handler=_limits)

    conc = sub.add_parser("concentration", help="latitudes of hypercube vertices")
    conc_sub = conc.add_subparsers(dest="sub", required=True, metavar="QUANTITY")
    p = conc_sub.add_parser("slab", parents=[io_flags], help="mass within eps*n of the equator")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--eps", type=float, nargs="+", required=True)
    p.set_defaults(command="concentration slab", handler=_slab)
    p = conc_sub.add_parser("cap", parents=[io_flags], help="mass within an angle of the pole")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--theta", type=float, nargs="+", required=True)
    p.set_defaults(command="concentration cap", handler=_cap)
    p = conc_sub.add_parser("pmf", parents=[io_flags], help="latitude distribution")
    p.add_argument("--n", type=int, required=True)
    p.set_defaults(command="concentration pmf", handler=_pmf)

    p = sub.add_parser("steele", parents=[io_flags],
                       help="inner sphere between unit balls at the cube vertices")
    p.add_argument("--n", type=int, nargs="*", default=[], help="explicit dimensions")
    p.add_argument("--n-min", type=int, default=2)
    p.add_argument("--n-max", type=int, default=12)
    p.set_defaults(command="steele", handler=_steele)

    p = sub.add_parser("replay", help="re-run a recorded manifest")
    p.add_argument("source", metavar="MANIFEST",
                   help="a manifest file or a JSON output embedding one")
    p.add_argument("--output", "-o", metavar="PATH")
    p.set_defaults(command="replay", handler=None)
    return parser


# ---------------------------------------------------------------- output


def _timestamp() -> str:
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    if epoch:
        moment = datetime.fromtimestamp(int(epoch), tz=timezone.utc)
    else:
        moment = datetime.now(timezone.utc).replace(microsecond=0)
    return moment.strftime("%Y-%m-%dT%H:%M:%SZ")


def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def render(command: str, rows: Sequence[Row], manifest: dict, fmt: str) -> str:
    """Serialize ``rows`` as CSV or as a JSON document with the manifest."""
    header = HEADERS[command]
    if fmt == "json":
        doc = {"manifest": manifest, "rows": [{k: row[k] for k in header} for row in rows]}
        return json.dumps(doc, indent=2, allow_nan=False) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(row[k]) for k in header])
    return buf.getvalue()


def _write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _resolve_trials(args: argparse.Namespace) -> None:
    if not hasattr(args, "trials") or args.trials is not None:
        return
    env = os.environ.get(TRIALS_ENV)
    if env:
        try:
            args.trials = int(env)
        except ValueError:
            raise UsageError(f"{TRIALS_ENV} must be an integer, got {env!r}") from None
        if args.trials < 1:
            raise UsageError(f"{TRIALS_ENV} must be positive, got {env!r}")
    else:
        args.trials = DEFAULT_TRIALS[args.command]


def _parameters(args: argparse.Namespace) -> dict:
    return {k: v for k, v in sorted(vars(args).items())
            if k not in _IO_KEYS and k not in ("group", "sub")}


def run(args: argparse.Namespace, timestamp: str | None = None) -> tuple[str, dict]:
    """Execute a parsed command; returns the rendered table and its manifest."""
    _resolve_trials(args)
    rows = args.handler(args)
    params = _parameters(args)
    manifest = {
        "command": args.command,
        "parameters": params,
        "seed": params.get("seed"),
        "tool_version": __version__,
        "timestamp": timestamp or _timestamp(),
        "format": args.format,
    }
    return render(args.command, rows, manifest, args.format), manifest


def _argv_from_manifest(manifest: dict) -> list[str]:
    try:
        command = manifest["command"]
        params = manifest["parameters"]
    except (KeyError, TypeError):
        raise UsageError("manifest lacks 'command' or 'parameters'") from None
    if command not in HEADERS:
        raise UsageError(f"manifest names unknown command {command!r}")
    argv = command.split()
    for key, value in params.items():
        if value is None:
            continue
        flag = "--" + key.replace("_", "-")
        if isinstance(value, list):
            if value:
                argv.append(flag)
                argv.extend(repr(v) for v in value)
        else:
            argv.extend([flag, repr(value) if isinstance(value, float) else str(value)])
    argv.extend(["--format", manifest.get("format", "csv")])
    return argv


def _replay(parser: argparse.ArgumentParser, args: argparse.Namespace) -> tuple[str, dict]:
    try:
        with open(args.source, encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot read manifest {args.source!r}: {exc}") from None
    manifest = doc.get("manifest", doc) if isinstance(doc, dict) else None
    if not isinstance(manifest, dict):
        raise UsageError("manifest must be a JSON object")
    if manifest.get("tool_version") != __version__:
        log.warning("manifest was written by version %s, this is %s",
                    manifest.get("tool_version"), __version__)
    inner = parser.parse_args(_argv_from_manifest(manifest))
    return run(inner, timestamp=manifest.get("timestamp"))


def main(argv: Sequence[str] | None = None) -> int:
    logging.basicConfig(level=logging.WARNING, format="hypershadow: %(levelname)s: %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0) if not isinstance(exc.code, str) else 2
    try:
        if args.command == "replay":
            text, manifest = _replay(parser, args)
            manifest_path = None
        else:
            text, manifest = run(args)
            manifest_path = args.manifest
            if manifest_path is None and args.output not in (None, "-"):
                manifest_path = args.output + ".manifest.json"
        _write(args.output, text)
        if manifest_path:
            _write(manifest_path, json.dumps(manifest, indent=2) + "\n")
    except (DomainError, UsageError) as exc:
        print(f"hypershadow: error: {exc}", file=sys.stderr)
        return 2
    except (ConvergenceError, OverflowError) as exc:
        print(f"hypershadow: numerical failure: {exc}", file=sys.stderr)
        return 3
    return 0

