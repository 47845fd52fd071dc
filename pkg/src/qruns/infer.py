"""Likelihood inference for theta with q treated as known.

The log-likelihood of grouped counts uses the exact pmf through a cached
per-(n, k, q) table, so optimizer probes and dense grids cost O(n * support)
each. The maximizer is a bounded Brent search (golden section plus parabolic
steps) run from three starts; the confidence interval inverts the likelihood
ratio test by bisection on each side of the maximum.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

from .dist import ExactPmfTable, RunSpec
from .qcalculus import validate_q

__all__ = [
    "ConfidenceInterval",
    "FitResult",
    "Sample",
    "THETA_DOMAIN",
    "chi2_quantile_1df",
    "fit_sample",
    "log_likelihood",
    "lr_interval",
    "mle",
    "read_sample_file",
    "write_sample_file",
]

# open-interval clip of the theta domain; the true boundary values 0 and 1
# give degenerate likelihoods, so the optimizer works inside [EPS, 1-EPS]
THETA_DOMAIN = (1e-9, 1.0 - 1e-9)
_BRACKET_TOL = 1e-8
_EDGE_TOL = 2e-8
_PMF_FLOOR = 1e-300
_GOLDEN = 0.5 * (3.0 - math.sqrt(5.0))

# tables keyed by (n, k, q); reads and writes are atomic under the GIL and
# workers in separate processes each grow their own copy
_TABLE_CACHE: dict[tuple[int, int, float], ExactPmfTable] = {}


def _pmf_table(spec: RunSpec, q: float) -> ExactPmfTable:
    key = (spec.n, spec.k, q)
    table = _TABLE_CACHE.get(key)
    if table is None:
        table = ExactPmfTable(spec, q)
        _TABLE_CACHE[key] = table
    return table


@dataclass(frozen=True)
class Sample:
    """Observed run counts from sequences sharing one (n, k) design and one q."""

    spec: RunSpec
    q: float
    counts: tuple[int, ...]

    def __post_init__(self) -> None:
        validate_q(self.q)
        if len(self.counts) == 0:
            raise ValueError("sample needs at least one count")
        top = self.spec.support_max
        clean = []
        for c in self.counts:
            ci = int(c)
            if ci != c or not 0 <= ci <= top:
                raise ValueError(
                    f"count {c!r} outside the support 0..{top} for n={self.spec.n}, k={self.spec.k}"
                )
            clean.append(ci)
        object.__setattr__(self, "counts", tuple(clean))
        object.__setattr__(self, "q", float(self.q))

    def grouped(self) -> dict[int, int]:
        return dict(Counter(self.counts))


@dataclass(frozen=True)
class ConfidenceInterval:
    lower: float
    upper: float
    level: float
    lower_at_edge: bool = False
    upper_at_edge: bool = False

    @property
    def boundary_flags(self) -> tuple[bool, bool]:
        return (self.lower_at_edge, self.upper_at_edge)

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def covers(self, value: float) -> bool:
        return self.lower <= value <= self.upper


@dataclass(frozen=True)
class FitResult:
    theta_hat: float
    interval: ConfidenceInterval
    log_likelihood: float
    mle_at_edge: bool
    pmf_underflow: bool


def _log_likelihood_grouped(
    theta: float, groups: dict[int, int], table: ExactPmfTable
) -> tuple[float, bool]:
    """(log-likelihood, underflow flag); -inf when a count has probability 0."""
    probs = table.vector(theta)
    total = 0.0
    underflow = False
    for x, mult in groups.items():
        p = probs[x]
        if p <= 0.0:
            return float("-inf"), underflow
        if p < _PMF_FLOOR:
            p = _PMF_FLOOR
            underflow = True
        total += mult * math.log(p)
    # probabilities never exceed 1, but a pmf entry can round to just above
    # it and leave the sum at +2e-13; clamping keeps degenerate flat samples
    # from resolving to a noise-picked interior point instead of the edge
    return min(total, 0.0), underflow


def log_likelihood(theta: float, sample: Sample) -> float:
    """Sum of log pmf over the sample at this theta (grouped internally)."""
    if math.isnan(theta) or not 0.0 <= theta <= 1.0:
        raise ValueError(f"theta must lie in [0, 1], got {theta!r}")
    table = _pmf_table(sample.spec, sample.q)
    value, _ = _log_likelihood_grouped(theta, sample.grouped(), table)
    return value


def _brent_max(fn, lo: float, hi: float, probe: float) -> tuple[float, float]:
    """Maximize fn on [lo, hi] starting from probe; stop at bracket width 1e-8.

    Classic bounded Brent on -fn: golden-section fallback with a parabolic
    step whenever the last points support one.
    """
    x = w = v = min(max(probe, lo), hi)
    fx = fw = fv = fn(x)
    d = e = 0.0
    a, b = lo, hi
    for _ in range(200):
        m = 0.5 * (a + b)
        tol = _BRACKET_TOL * 0.5
        if b - a < _BRACKET_TOL:
            break
        use_golden = True
        if abs(e) > tol:
            # parabola through (x, fx), (w, fw), (v, fv); maximize
            r = (x - w) * (fx - fv)
            s = (x - v) * (fx - fw)
            p = (x - v) * s - (x - w) * r
            s2 = 2.0 * (s - r)
            if s2 > 0.0:
                p = -p
            s2 = abs(s2)
            e_old = e
            e = d
            if abs(p) < abs(0.5 * s2 * e_old) and s2 * (a - x) < p < s2 * (b - x):
                d = p / s2
                u = x + d
                if u - a < 2 * tol or b - u < 2 * tol:
                    d = tol if x < m else -tol
                use_golden = False
        if use_golden:
            e = (b if x < m else a) - x
            d = _GOLDEN * e
        u = x + (d if abs(d) >= tol else (tol if d > 0 else -tol))
        fu = fn(u)
        if fu > fx or (fu == fx and u < x):
            if u < x:
                b = x
            else:
                a = x
            v, fv, w, fw, x, fx = w, fw, x, fx, u, fu
        else:
            if u < x:
                a = u
            else:
                b = u
            if fu > fw or w == x:
                v, fv, w, fw = w, fw, u, fu
            elif fu > fv or v == x or v == w:
                v, fv = u, fu
    return x, fx


# the log-likelihood of run counts is often bimodal: a zero-heavy sample is
# explained both by rare successes (small theta) and by runs overshooting k
# (large theta), so a hill climb from any fixed probe can settle on the
# wrong mode. Every fit therefore starts from a coarse scan of the whole
# domain and only then polishes locally.
_SCAN_GRID = (
    (THETA_DOMAIN[0],)
    + tuple((i + 1) / 200 for i in range(199))
    + (THETA_DOMAIN[1],)
)


def _objective_for(sample: Sample):
    table = _pmf_table(sample.spec, sample.q)
    groups = sample.grouped()

    def objective(th: float) -> float:
        return _log_likelihood_grouped(th, groups, table)[0]

    return objective, groups, table


def _climb(objective, values: list[float]) -> tuple[float, float]:
    """Polish the best two separated scan maxima; return (theta, value)."""
    last = len(_SCAN_GRID) - 1
    peaks = [
        i
        for i in range(last + 1)
        if (i == 0 or values[i] >= values[i - 1])
        and (i == last or values[i] >= values[i + 1])
    ]
    peaks.sort(key=lambda i: (-values[i], i))
    chosen = peaks[:1]
    for i in peaks[1:]:
        if abs(i - chosen[0]) > 1:  # a genuinely different basin
            chosen.append(i)
            break
    best_x, best_f = _SCAN_GRID[chosen[0]], values[chosen[0]]
    for i in chosen:
        a = _SCAN_GRID[max(i - 1, 0)]
        b = _SCAN_GRID[min(i + 1, last)]
        x, fx = _brent_max(objective, a, b, _SCAN_GRID[i])
        # ties break toward the smaller theta so reruns are order-stable
        if fx > best_f or (fx == best_f and x < best_x):
            best_x, best_f = x, fx
    # a monotone or locally flat likelihood can tie its maximum at a domain
    # edge; the lower-theta tie rule then prefers the edge point itself
    if values[last] > best_f:
        best_x, best_f = _SCAN_GRID[last], values[last]
    if values[0] >= best_f:
        best_x, best_f = _SCAN_GRID[0], values[0]
    return best_x, best_f


def _maximize(sample: Sample) -> tuple[float, float, bool]:
    """(theta_hat, max log-likelihood, underflow seen at the optimum)."""
    objective, groups, table = _objective_for(sample)
    values = [objective(t) for t in _SCAN_GRID]
    best_x, best_f = _climb(objective, values)
    _, underflow = _log_likelihood_grouped(best_x, groups, table)
    return best_x, best_f, underflow


def mle(sample: Sample) -> float:
    """Maximum-likelihood theta on the clipped domain [1e-9, 1 - 1e-9]."""
    return _maximize(sample)[0]


def chi2_quantile_1df(p: float) -> float:
    """Quantile of the chi-square distribution with 1 degree of freedom.

    The 1-df CDF is erf(sqrt(x/2)), monotone in x, so plain bisection to an
    absolute tolerance of 1e-10 suffices.
    """
    if math.isnan(p) or not 0.0 < p < 1.0:
        raise ValueError(f"p must lie in (0, 1), got {p!r}")
    lo, hi = 0.0, 1.0
    while math.erf(math.sqrt(hi / 2.0)) < p:
        hi *= 2.0
    while hi - lo > 1e-10:
        mid = 0.5 * (lo + hi)
        if math.erf(math.sqrt(mid / 2.0)) < p:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def lr_interval(
    sample: Sample,
    alpha: float = 0.05,
    theta_hat: float | None = None,
    _scan: list[float] | None = None,
) -> ConfidenceInterval:
    """Likelihood-ratio confidence interval for theta at level 1 - alpha.

    A multimodal likelihood can make the level set a union of intervals;
    the reported interval is its hull. Each side bisects (to 1e-8) between
    the outermost point found inside the set and its outward scan
    neighbor. Components narrower than the scan spacing are recovered by
    polishing scan-local maxima that sit outside the set; a mode so narrow
    it leaves no imprint on any scan point can still be missed. A side
    whose domain edge is itself inside collapses there and is flagged.
    """
    if math.isnan(alpha) or not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha!r}")
    objective, groups, table = _objective_for(sample)
    if _scan is None:
        _scan = [objective(t) for t in _SCAN_GRID]
    if theta_hat is None:
        theta_hat, l_max = _climb(objective, _scan)
    else:
        l_max = objective(theta_hat)
    crit = chi2_quantile_1df(1.0 - alpha)

    def deficit(th: float) -> float:
        # positive outside the interval, negative inside
        return 2.0 * (l_max - objective(th)) - crit

    def solve(inside: float, outside: float) -> float:
        a, b = outside, inside  # deficit(a) > 0 >= deficit(b)
        while abs(b - a) > 1e-8:
            mid = 0.5 * (a + b)
            if deficit(mid) > 0.0:
                a = mid
            else:
                b = mid
        return 0.5 * (a + b)

    deficits = [2.0 * (l_max - v) - crit for v in _scan]
    inside = [t for t, d in zip(_SCAN_GRID, deficits) if d <= 0.0]
    # a narrow second mode can clear the threshold strictly between scan
    # points, leaving every scan value outside the set; polish each
    # scan-local maximum that sits outside and admit its peak if it clears
    last = len(_SCAN_GRID) - 1
    for i, d in enumerate(deficits):
        if d <= 0.0:
            continue
        if (i == 0 or _scan[i] >= _scan[i - 1]) and (
            i == last or _scan[i] >= _scan[i + 1]
        ):
            x, fx = _brent_max(
                objective,
                _SCAN_GRID[max(i - 1, 0)],
                _SCAN_GRID[min(i + 1, last)],
                _SCAN_GRID[i],
            )
            if 2.0 * (l_max - fx) - crit <= 0.0:
                inside.append(x)
    g_low = min(inside, default=theta_hat)
    g_low = min(g_low, theta_hat)
    if g_low <= _SCAN_GRID[0]:
        lower, lower_edge = _SCAN_GRID[0], True
    else:
        outward = max(t for t in _SCAN_GRID if t < g_low)
        lower, lower_edge = solve(g_low, outward), False
    g_high = max(inside, default=theta_hat)
    g_high = max(g_high, theta_hat)
    if g_high >= _SCAN_GRID[-1]:
        upper, upper_edge = _SCAN_GRID[-1], True
    else:
        outward = min(t for t in _SCAN_GRID if t > g_high)
        upper, upper_edge = solve(g_high, outward), False
    return ConfidenceInterval(
        lower=lower,
        upper=upper,
        level=1.0 - alpha,
        lower_at_edge=lower_edge,
        upper_at_edge=upper_edge,
    )


def fit_sample(sample: Sample, alpha: float = 0.05) -> FitResult:
    """MLE plus LR interval in one pass (the scan and MLE are reused)."""
    objective, groups, table = _objective_for(sample)
    scan = [objective(t) for t in _SCAN_GRID]
    theta_hat, l_max = _climb(objective, scan)
    _, underflow = _log_likelihood_grouped(theta_hat, groups, table)
    interval = lr_interval(sample, alpha, theta_hat=theta_hat, _scan=scan)
    lo, hi = THETA_DOMAIN
    at_edge = theta_hat - lo <= _EDGE_TOL or hi - theta_hat <= _EDGE_TOL
    return FitResult(
        theta_hat=theta_hat,
        interval=interval,
        log_likelihood=l_max,
        mle_at_edge=at_edge,
        pmf_underflow=underflow,
    )


# ---------------------------------------------------------------------------
# sample files: header "n k q", then one count per line


def read_sample_file(path) -> Sample:
    """Parse a sample file strictly: malformed headers or lines are errors."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    body = [ln.strip() for ln in lines]
    body = [ln for ln in body if ln]
    if not body:
        raise ValueError(f"{path}: empty sample file")
    head = body[0].split()
    if len(head) != 3:
        raise ValueError(f"{path}: header must be 'n k q', got {body[0]!r}")
    try:
        n, k, q = int(head[0]), int(head[1]), float(head[2])
    except ValueError as exc:
        raise ValueError(f"{path}: bad header {body[0]!r}: {exc}") from None
    counts = []
    for idx, ln in enumerate(body[1:], start=2):
        fields = ln.split()
        if len(fields) != 1:
            raise ValueError(f"{path}:{idx}: expected one count per line, got {ln!r}")
        try:
            counts.append(int(fields[0]))
        except ValueError:
            raise ValueError(f"{path}:{idx}: not an integer count: {ln!r}") from None
    return Sample(spec=RunSpec(n, k), q=q, counts=tuple(counts))


def write_sample_file(path, sample: Sample) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{sample.spec.n} {sample.spec.k} {sample.q!r}\n")
        for c in sample.counts:
            fh.write(f"{c}\n")
