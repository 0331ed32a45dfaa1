"""Command-line entry point: ``survext <command> [options]``.

Exit codes: 0 success, 2 usage error, 3 data error, 4 numerical failure.
Primary output goes to ``--out`` (a file, or a directory for
``analyze-lifetimes``) or to stdout.  It never depends on ``--threads``.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import io
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from survext import __version__, images, lifetimes, measures, uniformity
from survext.distributions import GOMPERTZ_PARAMETERIZATION, RNG_ALGORITHM, DistributionSpec, make_model
from survext.empirical import ESTIMATORS, TIE_POLICY, estimate, read_sample, simulate, summarize
from survext.errors import FileError, InvalidParameter, ParseError, SurvextError, UsageError

SEED_ENV = "SURVEXT_SEED"
DEFAULT_SEED = 0
# keys never written to reports; they must not change primary output
_UNECHOED = {"threads", "out", "format", "config", "command", "handler"}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _conventions() -> dict:
    return {
        "survival_convention": {name: conv.value for name, (conv, _, _) in ESTIMATORS.items()},
        "tie_policy": TIE_POLICY,
        "gompertz_parameterization": GOMPERTZ_PARAMETERIZATION,
        "cramer_von_mises": uniformity.CM_NOTE,
        "rng": RNG_ALGORITHM,
    }


def _metadata(args) -> dict:
    cfg = {k: v for k, v in sorted(vars(args).items()) if k not in _UNECHOED}
    meta = {"tool": "survext", "version": __version__, "command": args.command,
            "config": _jsonable(cfg), "conventions": _conventions()}
    if "seed" in cfg:
        meta["seed"] = cfg["seed"]
    return meta


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return None if math.isnan(v) else v
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (Path, DistributionSpec)):
        return str(obj)
    return obj


def _num(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def _comment(meta) -> str:
    return "".join(f"# {line}\n" for line in json.dumps(meta, sort_keys=True, indent=1).splitlines())


def _csv(rows, columns, meta) -> str:
    buf = io.StringIO()
    buf.write(_comment(meta))
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_num(r.get(c, "")) for c in columns])
    return buf.getvalue()


def _json(payload, meta) -> str:
    return json.dumps({"metadata": meta, **_jsonable(payload)}, indent=2, sort_keys=True) + "\n"


def _emit(args, text: str):
    if args.out:
        try:
            Path(args.out).parent.mkdir(parents=True, exist_ok=True)
            Path(args.out).write_text(text, encoding="utf-8")
        except OSError as exc:
            raise FileError(f"cannot write {args.out}: {exc}") from exc
    else:
        sys.stdout.write(text)


def _render(args, rows, columns, payload=None):
    meta = _metadata(args)
    if args.format == "json":
        _emit(args, _json(payload if payload is not None else {"rows": rows}, meta))
    else:
        _emit(args, _csv(rows, columns, meta))


def _floats(text, what) -> list[float]:
    if isinstance(text, (int, float)):
        return [float(text)]
    try:
        return [float(v) for v in str(text).split(",") if v.strip()]
    except ValueError:
        raise ParseError(f"{what}: expected comma-separated numbers, got {text!r}") from None


def _ints(text, what) -> list[int]:
    vals = _floats(text, what)
    if any(v != int(v) or v < 1 for v in vals):
        raise ParseError(f"{what}: expected positive integers, got {text!r}")
    return [int(v) for v in vals]


def _names(text) -> list[str]:
    return [v.strip() for v in str(text).split(",") if v.strip()]


def _spec(text) -> DistributionSpec:
    return text if isinstance(text, DistributionSpec) else DistributionSpec.parse(text)


def _specs(values) -> list[DistributionSpec]:
    """``--alt`` may be repeated; a config file may separate specs with ';'."""
    out = []
    for v in values or []:
        out.extend(_spec(s) for s in str(v).split(";") if s.strip())
    return out


def _statistics(text) -> list[str]:
    stats = _names(text)
    if not stats:
        raise ParseError("no statistic given")
    for s in stats:
        if s not in uniformity.STATISTICS:
            raise ParseError(f"unknown statistic {s!r}; choose from {', '.join(uniformity.STATISTICS)}")
    return stats


def _quadrature(args) -> measures.QuadratureConfig:
    return measures.QuadratureConfig(args.rtol, args.atol, args.limit, args.tail_cutoff)


# --- commands -----------------------------------------------------------------------------

def cmd_measure(args):
    name = measures.canonical_measure(args.name)
    F = _spec(args.f).model()
    G = _spec(args.g).model() if args.g else None
    rep = measures.evaluate(name, F, G, args.t, _quadrature(args))
    row = {"measure": rep.name, "f": str(args.f), "g": str(args.g or ""), "t": "" if args.t is None else args.t,
           "value": rep.value}
    _render(args, [row], ["measure", "f", "g", "t", "value"], {"result": rep.to_dict()})


def cmd_estimate(args):
    name = measures.canonical_measure(args.name)
    if name not in ESTIMATORS:
        raise InvalidParameter(f"no plug-in estimator for {name}; choose from {', '.join(ESTIMATORS)}")
    conv, needs_t, two = ESTIMATORS[name]
    if needs_t and args.t is None:
        raise InvalidParameter(f"{name} needs --t")
    if args.x:
        x = read_sample(args.x)
        y = read_sample(args.y) if args.y else None
        if two and y is None:
            raise InvalidParameter(f"{name} needs --y")
        value = estimate(name, x, y, args.t)
        row = {"measure": name, "source": "files", "n": len(x), "estimate": value, "convention": conv.value}
        _render(args, [row], ["measure", "source", "n", "estimate", "convention"], {"result": row})
        return
    if not args.f or args.n is None:
        raise InvalidParameter("give either --x [--y] files or --f [--g] specs with --n")
    f = _spec(args.f)
    g = _spec(args.g) if args.g else None
    if two and g is None:
        raise InvalidParameter(f"{name} needs --g")
    truth = None
    try:
        truth = measures.evaluate(name, f.model(), g.model() if g else None, args.t, _quadrature(args)).value
    except SurvextError:
        pass
    rows = []
    for n in _ints(args.n, "--n"):
        vals = simulate(name, f, g, n, args.reps, args.seed, args.t, threads=args.threads)
        rows.append({"measure": name, "n": n, **summarize(vals, truth), "seed": args.seed,
                     "convention": conv.value})
    cols = ["measure", "n", "mean", "std_error", "truth", "bias", "mse", "replications", "undefined", "seed",
            "convention"]
    _render(args, rows, cols)


def _tables(args, stats, sizes, alphas):
    if getattr(args, "table", None):
        try:
            loaded = {t.statistic_name: t for t in uniformity.CriticalValueTable.load(args.table)}
        except OSError as exc:
            raise FileError(f"cannot read {args.table}: {exc}") from exc
        except (ValueError, KeyError) as exc:
            raise ParseError(f"{args.table}: not a critical-value table ({exc})") from exc
        return loaded
    return uniformity.critical_value_tables(stats, sizes, alphas, args.crit_reps, args.seed,
                                            window_m=args.window, threads=args.threads)


def cmd_critical_values(args):
    stats = _statistics(args.stat)
    tabs = uniformity.critical_value_tables(stats, _ints(args.n, "--n"), _floats(args.alpha, "--alpha"),
                                            args.reps, args.seed, window_m=args.window, threads=args.threads)
    rows = [r for s in stats for r in tabs[s].rows()]
    _render(args, rows, ["statistic", "n", "alpha", "value", "replications", "seed"],
            {"tables": [tabs[s].to_dict() for s in stats]})


def cmd_power(args):
    stats = _statistics(args.stat)
    alts = _specs(args.alt)
    if not alts:
        raise InvalidParameter("give at least one --alt")
    cfg = uniformity.PowerStudyConfig(alts, _ints(args.n, "--n"), _floats(args.alpha, "--alpha"), args.reps,
                                      args.seed, tuple(stats), args.window, args.crit_reps)
    tabs = _tables(args, stats, cfg.sample_sizes, cfg.alphas)
    res = uniformity.power_study(cfg, tabs, threads=args.threads)
    rows = [{"statistic": r.statistic, "alternative": r.alternative, "n": r.n, "alpha": r.alpha,
             "power": r.power, "std_error": r.std_error, "replications": r.replications, "seed": r.seed}
            for r in res]
    _render(args, rows, ["statistic", "alternative", "n", "alpha", "power", "std_error", "replications", "seed"])


def cmd_test(args):
    stats = _statistics(args.stat)
    x = read_sample(args.input).values
    alphas = _floats(args.alpha, "--alpha")
    tabs = _tables(args, stats, [x.size], alphas)
    rows = []
    for s in stats:
        if s not in tabs:
            raise InvalidParameter(f"critical-value table has no {s} entries")
        for a in alphas:
            r = uniformity.run_test(x, s, a, tabs[s], rescale=args.rescale, window_m=args.window)
            rows.append({"statistic": r.statistic_name, "n": r.n, "alpha": r.alpha, "value": r.value,
                         "critical_value": r.critical_value, "tail": r.tail, "reject": r.reject})
    _render(args, rows, ["statistic", "n", "alpha", "value", "critical_value", "tail", "reject"])


def _read_images(path, width, height):
    p = Path(path)
    if p.is_dir():
        files = sorted(q for q in p.glob("*/*.pgm"))
        if not files:
            raise FileError(f"{path}: no <label>/*.pgm files")
        return [images.read_pgm(q, q.parent.name) for q in files]
    return images.read_images_csv(path, width, height)


def cmd_classify_images(args):
    pair = _names(args.pair)
    if len(pair) != 2 or pair[0] == pair[1]:
        raise ParseError("--pair needs two distinct labels, e.g. --pair 1,2")
    train = _read_images(args.train, args.width, args.height)
    test = _read_images(args.test, args.width, args.height)
    sizes = _ints(args.sizes, "--sizes") if args.sizes else None
    rep = images.evaluate_protocol(train, test, args.anchor, pair, args.seed, sizes=sizes,
                                   anchor_mode=args.anchor_mode)
    rows = [{**r, "n": r["n"][0]} for r in rep["classification"]]
    cols = ["n", "N", f"correct_{pair[0]}", f"correct_{pair[1]}", "accuracy", "ties"]
    _render(args, rows, cols, {"report": rep})


def cmd_analyze_lifetimes(args):
    ds = lifetimes.ingest(args.input, args.group_col, args.lifetime_col)
    times = _floats(args.t, "--t") if args.t else []
    mats = []
    if args.static or not times:
        mats.append(lifetimes.divergence_matrix(ds, "SSJ"))
    mats.extend(lifetimes.divergence_matrix(ds, "SSJ_t", t) for t in times)
    meta = _metadata(args)
    meta["dropped_rows"] = ds.dropped
    meta["records"] = len(ds)
    rep = lifetimes.divergence_report(mats)
    csv_text = _comment(meta) + rep["csv"]
    json_text = _json(lifetimes.report_dict(mats), meta)
    if args.out:
        out = Path(args.out)
        try:
            out.mkdir(parents=True, exist_ok=True)
            (out / "divergence.csv").write_text(csv_text, encoding="utf-8")
            (out / "divergence.json").write_text(json_text, encoding="utf-8")
        except OSError as exc:
            raise FileError(f"cannot write to {out}: {exc}") from exc
    else:
        sys.stdout.write(json_text if args.format == "json" else csv_text)


def cmd_report(args):
    if args.matrices:
        try:
            data = json.loads(Path(args.matrices).read_text(encoding="utf-8"))
            mats = lifetimes.matrices_from_dict(data)
        except OSError as exc:
            raise FileError(f"cannot read {args.matrices}: {exc}") from exc
        except (ValueError, KeyError, TypeError) as exc:
            raise ParseError(f"{args.matrices}: not a divergence report ({exc})") from exc
        meta = _metadata(args)
        if args.format == "json":
            _emit(args, _json(lifetimes.report_dict(mats), meta))
        else:
            _emit(args, _comment(meta) + lifetimes.report_csv(mats))
        return
    # exponential curves: J(f|g) and SJ(F|G) against lambda_2
    lo, hi, num = _floats(args.lambda2, "--lambda2")
    if num < 2 or num != int(num) or not 0 < lo < hi:
        raise ParseError("--lambda2 takes start,stop,count with 0 < start < stop and count >= 2")
    q = _quadrature(args)
    F = make_model(f"exp:rate={args.lambda1!r}")
    rows = []
    for lam2 in np.linspace(lo, hi, int(num)):
        G = make_model(f"exp:rate={float(lam2)!r}")
        rows.append({"lambda1": args.lambda1, "lambda2": float(lam2),
                     "J_fg": measures.extropy_divergence_density(F, G, q), "SJ": measures.sed(F, G, q)})
    _render(args, rows, ["lambda1", "lambda2", "J_fg", "SJ"])


# --- parser -----------------------------------------------------------------------------------

def _seed(text) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"seed must be an integer, got {text!r}") from None
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return v


def _positive_int(text) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("expected a positive integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="key = value file merged under the command-line flags")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--out", help="output file (directory for analyze-lifetimes)")
    common.add_argument("--threads", type=_positive_int, default=None, help="worker cap; never affects output")

    seeded = _Parser(add_help=False)
    env_seed = os.environ.get(SEED_ENV)
    seeded.add_argument("--seed", type=_seed, default=env_seed if env_seed is not None else DEFAULT_SEED,
                        help=f"64-bit seed (default ${SEED_ENV} or {DEFAULT_SEED})")

    quad = _Parser(add_help=False)
    d = measures.DEFAULT_QUADRATURE
    quad.add_argument("--rtol", type=float, default=d.relative_tolerance)
    quad.add_argument("--atol", type=float, default=d.absolute_tolerance)
    quad.add_argument("--limit", type=_positive_int, default=d.max_subdivisions)
    quad.add_argument("--tail-cutoff", type=float, default=d.tail_cutoff_probability)

    mc = _Parser(add_help=False)
    mc.add_argument("--stat", default="Tn", help="comma-separated statistics: " + ",".join(uniformity.STATISTICS))
    mc.add_argument("--window", type=_positive_int, default=None, help="window size m for TB/TU")

    p = _Parser(prog="survext", description="Survival extropy measures, estimators and tests.")
    p.add_argument("--version", action="version", version=f"survext {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("measure", parents=[common, quad], help="evaluate a measure for analytic models")
    s.add_argument("--f", required=True, type=_spec)
    s.add_argument("--g", type=_spec)
    s.add_argument("--name", required=True)
    s.add_argument("--t", type=float)
    s.set_defaults(handler=cmd_measure)

    s = sub.add_parser("estimate", parents=[common, seeded, quad], help="plug-in estimate from files or simulation")
    s.add_argument("--x", help="first sample file")
    s.add_argument("--y", help="second sample file")
    s.add_argument("--f", type=_spec)
    s.add_argument("--g", type=_spec)
    s.add_argument("--n", help="sample size(s), comma-separated")
    s.add_argument("--reps", type=_positive_int, default=10_000)
    s.add_argument("--name", required=True)
    s.add_argument("--t", type=float)
    s.set_defaults(handler=cmd_estimate)

    s = sub.add_parser("critical-values", parents=[common, seeded, mc], help="Monte Carlo critical values")
    s.add_argument("--n", required=True)
    s.add_argument("--alpha", default="0.01,0.05")
    s.add_argument("--reps", type=_positive_int, default=1_000_000)
    s.set_defaults(handler=cmd_critical_values)

    s = sub.add_parser("power", parents=[common, seeded, mc], help="power study")
    s.add_argument("--alt", action="append", help="alternative spec; repeat for several")
    s.add_argument("--n", required=True)
    s.add_argument("--alpha", default="0.01,0.05")
    s.add_argument("--reps", type=_positive_int, default=10_000)
    s.add_argument("--crit-reps", type=_positive_int, default=100_000)
    s.add_argument("--table", help="critical-value JSON from critical-values --format json")
    s.set_defaults(handler=cmd_power)

    s = sub.add_parser("test", parents=[common, seeded, mc], help="test a sample for uniformity")
    s.add_argument("--input", required=True)
    s.add_argument("--alpha", default="0.05")
    s.add_argument("--table", help="critical-value JSON from critical-values --format json")
    s.add_argument("--crit-reps", type=_positive_int, default=100_000)
    s.add_argument("--rescale", action="store_true", help="rescale data by 2*mean before competitor statistics")
    s.set_defaults(handler=cmd_test)

    s = sub.add_parser("classify-images", parents=[common, seeded], help="pairwise image classification")
    s.add_argument("--train", required=True)
    s.add_argument("--test", required=True)
    s.add_argument("--anchor", required=True)
    s.add_argument("--pair", required=True)
    s.add_argument("--anchor-mode", choices=("mean", "single"), default="mean")
    s.add_argument("--sizes", help="comma-separated pair counts per class")
    s.add_argument("--width", type=_positive_int, default=28)
    s.add_argument("--height", type=_positive_int, default=28)
    s.set_defaults(handler=cmd_classify_images)

    s = sub.add_parser("analyze-lifetimes", parents=[common], help="group divergence matrices")
    s.add_argument("--input", required=True)
    s.add_argument("--group-col", required=True)
    s.add_argument("--lifetime-col", required=True)
    s.add_argument("--t", default=",".join(f"{v:g}" for v in lifetimes.DEFAULT_TIMES))
    s.add_argument("--static", action="store_true", help="also emit the static matrix")
    s.set_defaults(handler=cmd_analyze_lifetimes)

    s = sub.add_parser("report", parents=[common, quad], help="plot-ready curves or re-rendered matrices")
    s.add_argument("--matrices", help="divergence JSON to re-render")
    s.add_argument("--lambda1", type=float, default=1.0)
    s.add_argument("--lambda2", default="0.1,5,50", help="start,stop,count")
    s.set_defaults(handler=cmd_report)
    return p


def _read_config(path) -> dict:
    cp = configparser.ConfigParser(interpolation=None)
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise FileError(f"cannot read config {path}: {exc}") from exc
    try:
        cp.read_string("[run]\n" + text)
    except configparser.Error as exc:
        raise ParseError(f"config {path}: {exc}") from exc
    return {k.replace("-", "_"): v.strip().strip('"') for k, v in cp["run"].items()}


def _prescan(argv) -> tuple:
    """Subcommand name and ``--config`` value, found before full parsing."""
    command = config = None
    it = iter(argv)
    for tok in it:
        if tok == "--config":
            config = next(it, None)
        elif tok.startswith("--config="):
            config = tok.split("=", 1)[1]
        elif command is None and not tok.startswith("-"):
            command = tok
    return command, config


def parse_args(argv=None) -> argparse.Namespace:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    command, config = _prescan(argv)
    choices = parser._subparsers._group_actions[0].choices
    if config and command in choices:
        values = _read_config(config)
        sub = choices[command]
        known = {a.dest for a in sub._actions}
        unknown = sorted(set(values) - known)
        if unknown:
            raise ParseError(f"config {config}: unknown keys {unknown}")
        for a in sub._actions:
            if a.dest not in values:
                continue
            a.required = False
            if isinstance(a, argparse._AppendAction):
                values[a.dest] = [v.strip() for v in values[a.dest].split(";") if v.strip()]
            elif a.nargs == 0:
                flag = values[a.dest].lower()
                if flag not in ("true", "false", "1", "0", "yes", "no"):
                    raise ParseError(f"config {config}: {a.dest} must be true or false")
                values[a.dest] = flag in ("true", "1", "yes")
        sub.set_defaults(**values)  # flags given on the command line still win
    return parser.parse_args(argv)


def main(argv=None) -> int:
    try:
        args = parse_args(argv)
        args.handler(args)
    except SurvextError as exc:
        print(f"survext: error: {exc}", file=sys.stderr)
        return exc.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
