"""Monte Carlo study of the estimator: bias, spread, coverage, width.

A study is a grid of cells (q, n, k, theta0, N); each cell runs M
replicates, and each replicate simulates N sequences, fits theta, and
records the likelihood-ratio interval. Replicate r of cell c always uses
the RNG substream (c, r), so results are identical no matter how work is
scheduled across processes, and any failed fit is excluded from the cell
aggregates but kept (with its error token) in the raw records.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .dist import RunSpec
from .infer import Sample, fit_sample
from .qcalculus import ModelParams
from .sim import SeededRng, sample_run_counts

__all__ = [
    "CellSummary",
    "McCell",
    "ReplicateRecord",
    "StudyConfig",
    "StudyResult",
    "long_format_rows",
    "paper_grid_config",
    "run_study",
    "se_rmse_ratio",
    "write_long_csv",
    "write_replicates_csv",
    "write_report_csv",
]

REPORT_FIELDS = ("q", "n", "k", "theta0", "N", "M", "bias", "se", "rmse", "cp", "mw", "boundary_rate")
REPLICATE_FIELDS = ("cell_id", "replicate", "theta_hat", "ci_lower", "ci_upper", "flags")
LONG_FIELDS = ("family", "q", "n", "k", "N", "M", "theta0", "value")
LONG_FAMILIES = ("se_rmse", "cp", "mw")


@dataclass(frozen=True)
class StudyConfig:
    """Grid plus protocol knobs; the cell order is the documented product
    order: q, then n, then k, then theta0, then N."""

    qs: tuple[float, ...]
    ns: tuple[int, ...]
    ks: tuple[int, ...]
    thetas: tuple[float, ...]
    sample_sizes: tuple[int, ...]
    replications: int = 200
    alpha: float = 0.05
    seed: int = 0

    def __post_init__(self) -> None:
        for name in ("qs", "ns", "ks", "thetas", "sample_sizes"):
            value = tuple(getattr(self, name))
            if not value:
                raise ValueError(f"{name} must be nonempty")
            object.__setattr__(self, name, value)
        for q in self.qs:
            if not 0.0 < q <= 1.0:
                raise ValueError(f"q must lie in (0, 1], got {q!r}")
        for th in self.thetas:
            if not 0.0 <= th <= 1.0:
                raise ValueError(f"theta0 must lie in [0, 1], got {th!r}")
        for n in self.ns:
            if n < 1:
                raise ValueError(f"n must be positive, got {n!r}")
        for k in self.ks:
            if k < 1:
                raise ValueError(f"k must be positive, got {k!r}")
        for size in self.sample_sizes:
            if size < 1:
                raise ValueError(f"sample size must be positive, got {size!r}")
        # the grid is a full product, so every (n, k) pair must admit a run
        if max(self.ks) > min(self.ns):
            raise ValueError(
                f"k={max(self.ks)} exceeds n={min(self.ns)}: that cell could never observe a run"
            )
        if self.replications < 2:
            raise ValueError(f"replications must be >= 2, got {self.replications!r}")
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha!r}")


def paper_grid_config(replications: int = 200, alpha: float = 0.05, seed: int = 0) -> StudyConfig:
    """The standard benchmark grid: 608 cells of (q, n, k, theta0, N)."""
    return StudyConfig(
        qs=(0.6, 0.8),
        ns=(11, 15, 20, 25),
        ks=(3, 5),
        thetas=tuple(round(0.05 * i, 2) for i in range(1, 20)),
        sample_sizes=(100, 1000),
        replications=replications,
        alpha=alpha,
        seed=seed,
    )


@dataclass(frozen=True)
class McCell:
    cell_id: int
    q: float
    n: int
    k: int
    theta0: float
    sample_size: int


def iter_cells(config: StudyConfig) -> list[McCell]:
    cells = []
    cid = 0
    for q in config.qs:
        for n in config.ns:
            for k in config.ks:
                for th in config.thetas:
                    for size in config.sample_sizes:
                        cells.append(McCell(cid, q, n, k, th, size))
                        cid += 1
    return cells


@dataclass(frozen=True)
class ReplicateRecord:
    cell_id: int
    replicate: int
    theta_hat: float  # nan on failure
    ci_lower: float
    ci_upper: float
    flags: str  # "+"-joined tokens, empty when clean

    @property
    def failed(self) -> bool:
        return self.flags.startswith("error:")


@dataclass(frozen=True)
class CellSummary:
    cell_id: int
    q: float
    n: int
    k: int
    theta0: float
    sample_size: int
    replications: int  # successful replicates entering the aggregates
    bias: float
    se: float
    rmse: float
    cp: float
    mw: float
    boundary_rate: float
    failures: int = 0


@dataclass(frozen=True)
class StudyResult:
    config: StudyConfig
    cells: tuple[CellSummary, ...]
    replicates: tuple[ReplicateRecord, ...] = field(repr=False)


def _run_replicate(args) -> ReplicateRecord:
    cell, replicate, seed, alpha = args
    rng = SeededRng(seed, (cell.cell_id, replicate))
    spec = RunSpec(cell.n, cell.k)
    params = ModelParams(cell.theta0, cell.q)
    try:
        counts = sample_run_counts(cell.sample_size, spec, params, rng)
        sample = Sample(spec=spec, q=cell.q, counts=tuple(int(c) for c in counts))
        res = fit_sample(sample, alpha)
    except Exception as exc:  # recorded, not silently dropped
        return ReplicateRecord(
            cell_id=cell.cell_id,
            replicate=replicate,
            theta_hat=float("nan"),
            ci_lower=float("nan"),
            ci_upper=float("nan"),
            flags=f"error:{type(exc).__name__}",
        )
    tokens = []
    if res.mle_at_edge:
        tokens.append("mle_edge")
    if res.interval.lower_at_edge:
        tokens.append("ci_lower_edge")
    if res.interval.upper_at_edge:
        tokens.append("ci_upper_edge")
    if res.pmf_underflow:
        tokens.append("pmf_underflow")
    return ReplicateRecord(
        cell_id=cell.cell_id,
        replicate=replicate,
        theta_hat=res.theta_hat,
        ci_lower=res.interval.lower,
        ci_upper=res.interval.upper,
        flags="+".join(tokens),
    )


def _summarize(cell: McCell, records: list[ReplicateRecord], m_total: int) -> CellSummary:
    good = [r for r in records if not r.failed]
    failures = len(records) - len(good)
    m = len(good)
    if m == 0:
        nan = float("nan")
        return CellSummary(
            cell_id=cell.cell_id, q=cell.q, n=cell.n, k=cell.k, theta0=cell.theta0,
            sample_size=cell.sample_size, replications=0, bias=nan, se=nan,
            rmse=nan, cp=nan, mw=nan, boundary_rate=nan, failures=failures,
        )
    hats = [r.theta_hat for r in good]
    mean_hat = math.fsum(hats) / m
    bias = mean_hat - cell.theta0
    se = math.sqrt(math.fsum((h - mean_hat) ** 2 for h in hats) / m)
    rmse = math.sqrt(math.fsum((h - cell.theta0) ** 2 for h in hats) / m)
    cp = math.fsum(1.0 for r in good if r.ci_lower <= cell.theta0 <= r.ci_upper) / m
    mw = math.fsum(r.ci_upper - r.ci_lower for r in good) / m
    boundary = math.fsum(1.0 for r in good if r.flags and not r.failed) / m
    return CellSummary(
        cell_id=cell.cell_id, q=cell.q, n=cell.n, k=cell.k, theta0=cell.theta0,
        sample_size=cell.sample_size, replications=m, bias=bias, se=se,
        rmse=rmse, cp=cp, mw=mw, boundary_rate=boundary, failures=failures,
    )


def run_study(config: StudyConfig, threads: int = 1) -> StudyResult:
    """Run the full grid; results do not depend on the thread count."""
    cells = iter_cells(config)
    tasks = [
        (cell, rep, config.seed, config.alpha)
        for cell in cells
        for rep in range(config.replications)
    ]
    if threads <= 1:
        records = [_run_replicate(t) for t in tasks]
    else:
        # map preserves task order, so scheduling cannot reorder results
        chunk = max(1, len(tasks) // (threads * 8))
        with ProcessPoolExecutor(max_workers=threads) as pool:
            records = list(pool.map(_run_replicate, tasks, chunksize=chunk))
    summaries = []
    m = config.replications
    for idx, cell in enumerate(cells):
        summaries.append(_summarize(cell, records[idx * m : (idx + 1) * m], m))
    return StudyResult(config=config, cells=tuple(summaries), replicates=tuple(records))


def se_rmse_ratio(cell: CellSummary) -> float | None:
    """SE/RMSE for one cell; None when RMSE is zero (ratio undefined)."""
    if not cell.rmse > 0.0:
        return None
    return cell.se / cell.rmse


# ---------------------------------------------------------------------------
# serialization (no timestamps anywhere: reruns must be byte-identical)


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        if math.isnan(value):
            return "nan"
        return repr(value)
    return str(value)


def report_rows(result: StudyResult) -> list[dict]:
    return [
        {
            "q": c.q, "n": c.n, "k": c.k, "theta0": c.theta0,
            "N": c.sample_size, "M": c.replications, "bias": c.bias,
            "se": c.se, "rmse": c.rmse, "cp": c.cp, "mw": c.mw,
            "boundary_rate": c.boundary_rate,
        }
        for c in result.cells
    ]


def write_report_csv(fh, result: StudyResult) -> None:
    fh.write(",".join(REPORT_FIELDS) + "\n")
    for row in report_rows(result):
        fh.write(",".join(_fmt(row[f]) for f in REPORT_FIELDS) + "\n")


def write_replicates_csv(fh, result: StudyResult) -> None:
    fh.write(",".join(REPLICATE_FIELDS) + "\n")
    for r in result.replicates:
        fh.write(
            ",".join(
                _fmt(v)
                for v in (r.cell_id, r.replicate, r.theta_hat, r.ci_lower, r.ci_upper, r.flags)
            )
            + "\n"
        )


def long_format_rows(result: StudyResult, family: str) -> list[dict]:
    """Plot-ready long rows for one family: se_rmse, cp, or mw."""
    if family not in LONG_FAMILIES:
        raise ValueError(f"unknown family {family!r}; expected one of {LONG_FAMILIES}")
    rows = []
    for c in result.cells:
        if family == "se_rmse":
            value = se_rmse_ratio(c)
        elif family == "cp":
            value = c.cp
        else:
            value = c.mw
        rows.append(
            {
                "family": family, "q": c.q, "n": c.n, "k": c.k,
                "N": c.sample_size, "M": c.replications, "theta0": c.theta0,
                "value": value,
            }
        )
    return rows


def write_long_csv(fh, result: StudyResult, family: str) -> None:
    fh.write(",".join(LONG_FIELDS) + "\n")
    for row in long_format_rows(result, family):
        fh.write(",".join(_fmt(row[f]) for f in LONG_FIELDS) + "\n")
