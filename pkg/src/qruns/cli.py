"""Command line interface.

Subcommands: pmf, moments, simulate, mle, mcstudy, verify. Output goes to
stdout as JSON (an envelope with tool metadata plus rows) or CSV (the same
rows, header first). Both formats carry identical numeric values; floats are
serialized by repr, the shortest round-trip form.

Exit codes: 0 success, 1 usage error, 2 domain error (bad parameter values),
3 numerical failure (a pmf failed its internal sanity checks), 4
verification failure (a formula disagreed with the enumeration oracle).

Reruns with the same flags and seed are byte-identical; the JSON envelope
only includes a wall-clock timestamp when --timestamp is passed, and CSV
output never has one.
"""

from __future__ import annotations

import argparse
import datetime
import json
import math
import os
import sys
from pathlib import Path

from . import __version__
from .dist import NormalizationError, RunSpec, pmf_full
from .infer import fit_sample, read_sample_file
from .meanvar import mean_closed, variance_closed
from .moments import central_moments_and_shape, factorial_moments
from .oracle import enumerate_runs
from .qcalculus import ModelParams
from .sim import SeededRng, generate_sequences, sample_run_counts, sequence_to_string
from . import mc as mc_mod

__all__ = ["main"]

_USAGE_EXIT = 1
_DOMAIN_EXIT = 2
_NUMERIC_EXIT = 3
_VERIFY_EXIT = 4


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors by default; 2 is taken by domain errors
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(_USAGE_EXIT, f"{self.prog}: error: {message}\n")


def _fmt_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        return repr(value)
    return str(value)


def _emit(args, command: str, fields, rows, seed=None) -> None:
    if args.format == "csv":
        out = [",".join(fields)]
        for row in rows:
            out.append(",".join(_fmt_cell(row[f]) for f in fields))
        sys.stdout.write("\n".join(out) + "\n")
        return
    stamp = None
    if getattr(args, "timestamp", False):
        stamp = datetime.datetime.now(datetime.timezone.utc).isoformat()
    envelope = {
        "tool": "qruns",
        "version": __version__,
        "command": command,
        "seed": seed,
        "timestamp": stamp,
        "fields": list(fields),
        "rows": rows,
    }
    sys.stdout.write(json.dumps(envelope, indent=2, allow_nan=True) + "\n")


def _threads(args) -> int:
    if args.threads is not None:
        return args.threads
    env = os.environ.get("QRUNS_THREADS", "").strip()
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ValueError(f"QRUNS_THREADS must be an integer, got {env!r}") from None
    return 1


def _float_list(text: str) -> list[float]:
    return [float(tok) for tok in text.split(",") if tok.strip()]


def _int_list(text: str) -> list[int]:
    return [int(tok) for tok in text.split(",") if tok.strip()]


# ---------------------------------------------------------------------------
# subcommand handlers


_PMF_METHODS = ("exact", "recursive", "corollary", "classical")


def cmd_pmf(args) -> int:
    spec = RunSpec(args.n, args.k)
    params = ModelParams(args.theta, args.q)
    if args.method == "all":
        vectors = {m: pmf_full(spec, params, m).probs for m in ("exact", "recursive", "corollary")}
        fields = ["x", "exact", "recursive", "corollary", "spread"]
        rows = []
        worst = 0.0
        for x in range(spec.support_max + 1):
            vals = [vectors[m][x] for m in ("exact", "recursive", "corollary")]
            spread = max(vals) - min(vals)
            worst = max(worst, spread)
            rows.append(
                {
                    "x": x,
                    "exact": vectors["exact"][x],
                    "recursive": vectors["recursive"][x],
                    "corollary": vectors["corollary"][x],
                    "spread": spread,
                }
            )
        if args.x is not None:
            rows = [r for r in rows if r["x"] == args.x]
        print(f"max pairwise deviation across methods: {worst!r}", file=sys.stderr)
    else:
        vector = pmf_full(spec, params, args.method).probs
        fields = ["x", "p"]
        rows = [{"x": x, "p": p} for x, p in enumerate(vector)]
        if args.x is not None:
            rows = [r for r in rows if r["x"] == args.x]
    _emit(args, "pmf", fields, rows)
    return 0


def cmd_moments(args) -> int:
    spec = RunSpec(args.n, args.k)
    params = ModelParams(args.theta, args.q)
    order = args.order
    rho = factorial_moments(spec, params, order)
    mset = central_moments_and_shape(spec, params, order)
    pmf = pmf_full(spec, params, "exact")
    closed_mean = mean_closed(spec, params)
    closed_var = variance_closed(spec, params)
    pmf_mean = pmf.mean()
    pmf_var = pmf.variance()

    fields = ["statistic", "order", "value", "deviation"]
    rows = []
    for r in range(order + 1):
        rows.append({"statistic": "factorial", "order": r, "value": rho[r], "deviation": None})
    for r in range(order + 1):
        rows.append({"statistic": "raw", "order": r, "value": mset.raw[r], "deviation": None})
    for r in range(order + 1):
        rows.append({"statistic": "central", "order": r, "value": mset.central[r], "deviation": None})
    rows.append({"statistic": "skewness", "order": None, "value": mset.skewness, "deviation": None})
    rows.append({"statistic": "kurtosis", "order": None, "value": mset.kurtosis, "deviation": None})
    mean_routes = (mset.raw[1], closed_mean, pmf_mean)
    var_routes = (mset.central[2], closed_var, pmf_var)
    rows.append(
        {
            "statistic": "mean",
            "order": None,
            "value": mset.raw[1],
            "deviation": max(mean_routes) - min(mean_routes),
        }
    )
    rows.append(
        {
            "statistic": "variance",
            "order": None,
            "value": mset.central[2],
            "deviation": max(var_routes) - min(var_routes),
        }
    )
    _emit(args, "moments", fields, rows)
    return 0


def cmd_simulate(args) -> int:
    spec = RunSpec(args.n, args.k)
    params = ModelParams(args.theta, args.q)
    rng = SeededRng(args.seed)
    if args.emit == "counts":
        counts = sample_run_counts(args.draws, spec, params, rng)
        fields = ["draw", "count"]
        rows = [{"draw": i, "count": int(c)} for i, c in enumerate(counts)]
    else:
        bits = generate_sequences(args.draws, args.n, params, rng)
        fields = ["draw", "sequence"]
        rows = [{"draw": i, "sequence": sequence_to_string(row)} for i, row in enumerate(bits)]
    _emit(args, "simulate", fields, rows, seed=args.seed)
    return 0


def cmd_mle(args) -> int:
    sample = read_sample_file(args.input)
    res = fit_sample(sample, args.alpha)
    tokens = []
    if res.mle_at_edge:
        tokens.append("mle_edge")
    if res.interval.lower_at_edge:
        tokens.append("ci_lower_edge")
    if res.interval.upper_at_edge:
        tokens.append("ci_upper_edge")
    if res.pmf_underflow:
        tokens.append("pmf_underflow")
    fields = [
        "n", "k", "q", "num_sequences", "theta_hat",
        "ci_lower", "ci_upper", "level", "log_likelihood", "flags",
    ]
    rows = [
        {
            "n": sample.spec.n,
            "k": sample.spec.k,
            "q": sample.q,
            "num_sequences": len(sample.counts),
            "theta_hat": res.theta_hat,
            "ci_lower": res.interval.lower,
            "ci_upper": res.interval.upper,
            "level": res.interval.level,
            "log_likelihood": res.log_likelihood,
            "flags": "+".join(tokens),
        }
    ]
    _emit(args, "mle", fields, rows)
    return 0


def cmd_mcstudy(args) -> int:
    if args.config is not None:
        raw = json.loads(Path(args.config).read_text(encoding="utf-8"))
        config = mc_mod.StudyConfig(
            qs=tuple(raw["qs"]),
            ns=tuple(raw["ns"]),
            ks=tuple(raw["ks"]),
            thetas=tuple(raw["thetas"]),
            sample_sizes=tuple(raw["sample_sizes"]),
            replications=int(raw.get("replications", args.m)),
            alpha=float(raw.get("alpha", args.alpha)),
            seed=int(raw.get("seed", args.seed)),
        )
    elif args.paper_grid:
        config = mc_mod.paper_grid_config(replications=args.m, alpha=args.alpha, seed=args.seed)
    else:
        missing = [
            flag
            for flag, value in (
                ("--q", args.q), ("--n", args.n), ("--k", args.k),
                ("--theta0", args.theta0), ("--N", args.N),
            )
            if value is None
        ]
        if missing:
            raise ValueError(
                "mcstudy needs --paper-grid, --config, or a full flag grid; missing "
                + " ".join(missing)
            )
        config = mc_mod.StudyConfig(
            qs=tuple(args.q),
            ns=tuple(args.n),
            ks=tuple(args.k),
            thetas=tuple(args.theta0),
            sample_sizes=tuple(args.N),
            replications=args.m,
            alpha=args.alpha,
            seed=args.seed,
        )
    result = mc_mod.run_study(config, threads=_threads(args))
    rows = mc_mod.report_rows(result)
    if args.out_dir is not None:
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "report.csv", "w", encoding="utf-8") as fh:
            mc_mod.write_report_csv(fh, result)
        with open(out / "replicates.csv", "w", encoding="utf-8") as fh:
            mc_mod.write_replicates_csv(fh, result)
        for family in mc_mod.LONG_FAMILIES:
            with open(out / f"long_{family}.csv", "w", encoding="utf-8") as fh:
                mc_mod.write_long_csv(fh, result, family)
    _emit(args, "mcstudy", list(mc_mod.REPORT_FIELDS), rows, seed=config.seed)
    failures = sum(c.failures for c in result.cells)
    if failures:
        print(f"warning: {failures} replicate fits failed and were excluded", file=sys.stderr)
    return 0


def cmd_verify(args) -> int:
    spec = RunSpec(args.n, args.k)
    params = ModelParams(args.theta, args.q)
    truth = enumerate_runs(spec, params)
    tol = args.tol
    checks = []

    for method in ("exact", "recursive", "corollary"):
        probs = pmf_full(spec, params, method).probs
        dev = max(abs(a - b) for a, b in zip(probs, truth.pmf))
        checks.append((f"pmf_{method}", dev))
    checks.append(("total_probability", abs(truth.total_probability - 1.0)))
    checks.append(("mean_closed", abs(mean_closed(spec, params) - truth.mean())))
    checks.append(("variance_closed", abs(variance_closed(spec, params) - truth.variance())))

    fields = ["check", "max_abs_deviation", "tol", "status"]
    rows = []
    worst = 0.0
    failed = False
    for name, dev in checks:
        ok = dev <= tol
        failed = failed or not ok
        worst = max(worst, dev)
        rows.append(
            {"check": name, "max_abs_deviation": dev, "tol": tol, "status": "ok" if ok else "FAIL"}
        )
    _emit(args, "verify", fields, rows)
    print(f"max deviation: {worst!r} (tolerance {tol!r})", file=sys.stderr)
    return _VERIFY_EXIT if failed else 0


# ---------------------------------------------------------------------------
# parser


def _build_parser() -> _Parser:
    parser = _Parser(prog="qruns", description="Exact-length success-run distribution toolkit")
    parser.add_argument("--version", action="version", version=f"qruns {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    common = _Parser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument(
        "--timestamp",
        action="store_true",
        help="include a wall-clock timestamp in the JSON envelope (off by default so reruns are byte-identical)",
    )

    p = sub.add_parser("pmf", parents=[common], help="probability mass function")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--theta", type=float, required=True)
    p.add_argument("--q", type=float, default=1.0)
    p.add_argument("--method", choices=_PMF_METHODS + ("all",), default="exact")
    p.add_argument("--x", type=int, default=None, help="restrict output to one support point")
    p.set_defaults(handler=cmd_pmf)

    p = sub.add_parser("moments", parents=[common], help="moments and shape factors")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--theta", type=float, required=True)
    p.add_argument("--q", type=float, default=1.0)
    p.add_argument("--order", type=int, default=4)
    p.set_defaults(handler=cmd_moments)

    p = sub.add_parser("simulate", parents=[common], help="draw sequences or run counts")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--theta", type=float, required=True)
    p.add_argument("--q", type=float, default=1.0)
    p.add_argument("--draws", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--emit", choices=("counts", "sequences"), default="counts")
    p.set_defaults(handler=cmd_simulate)

    p = sub.add_parser("mle", parents=[common], help="fit theta from a sample file")
    p.add_argument("--input", required=True, help="sample file: header 'n k q', one count per line")
    p.add_argument("--alpha", type=float, default=0.05)
    p.set_defaults(handler=cmd_mle)

    p = sub.add_parser("mcstudy", parents=[common], help="Monte Carlo study of the estimator")
    p.add_argument("--paper-grid", action="store_true", help="use the standard 608-cell benchmark grid")
    p.add_argument("--config", default=None, help="JSON file with qs/ns/ks/thetas/sample_sizes")
    p.add_argument("--q", type=_float_list, default=None, help="comma-separated decay rates")
    p.add_argument("--n", type=_int_list, default=None, help="comma-separated trial counts")
    p.add_argument("--k", type=_int_list, default=None, help="comma-separated run lengths")
    p.add_argument("--theta0", type=_float_list, default=None, help="comma-separated true thetas")
    p.add_argument("--N", type=_int_list, default=None, help="comma-separated sample sizes")
    p.add_argument("--m", type=int, default=200, help="replicates per cell")
    p.add_argument("--alpha", type=float, default=0.05)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=int, default=None, help="worker processes (default: QRUNS_THREADS or 1)")
    p.add_argument("--out-dir", default=None, help="also write report/replicates/long-format CSV files here")
    p.set_defaults(handler=cmd_mcstudy)

    p = sub.add_parser("verify", parents=[common], help="check the formulas against full enumeration")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--theta", type=float, required=True)
    p.add_argument("--q", type=float, default=1.0)
    p.add_argument("--tol", type=float, default=1e-9)
    p.set_defaults(handler=cmd_verify)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except NormalizationError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return _NUMERIC_EXIT
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _DOMAIN_EXIT


if __name__ == "__main__":
    sys.exit(main())
