"""Monte Carlo engine with a confidence-interval stopping rule.

Iteration ``i`` draws every factor's base amount from its own stream
``make_stream(seed, i)``, builds the cash flows and records one output value.
Iterations are generated in fixed-size chunks; workers only ever compute whole
chunks, and statistics are folded in iteration order, so the result does not
depend on the number of workers.

The run stops at the first batch boundary at or past ``min_iterations`` where
the confidence interval on the mean is narrow enough:

    z * sd / sqrt(n) <= tolerance * |mean|

with ``z`` the two-sided normal quantile for the configured confidence.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from typing import Callable, Optional

import numpy as np
from scipy import stats

from .cashflow import build_cashflow_batch, discounted_total
from .distributions import sample_many
from .factors import Scenario, validate_scenario
from .rng import make_streams

__all__ = [
    "OUTPUT_METRICS",
    "SimulationConfig",
    "RunningStats",
    "Histogram",
    "SummaryStats",
    "SimulationResult",
    "check_convergence",
    "histogram",
    "summarize",
    "run_until_converged",
    "run_simulation",
]

OUTPUT_METRICS = ("total_net_benefit", "npv")

# Iterations per unit of work.  Fixed so that array shapes, and therefore
# floating point results, never depend on the worker count.
CHUNK = 1024

PERCENTILES = (5, 25, 50, 75, 95)

# Freedman-Diaconis explodes when a few outliers sit far from a tight core.
MAX_BINS = 10_000


@dataclass(frozen=True)
class SimulationConfig:
    tolerance: float = 0.01
    confidence: float = 0.95
    batch_size: int = 100
    min_iterations: int = 300
    max_iterations: int = 100_000
    master_seed: int = 42
    output_metric: str = "total_net_benefit"

    def __post_init__(self) -> None:
        if not 0 < self.tolerance < 1:
            raise ValueError(f"tolerance must be in (0, 1), got {self.tolerance}")
        if not 0.5 < self.confidence < 1:
            raise ValueError(f"confidence must be in (0.5, 1), got {self.confidence}")
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size}")
        if not 1 <= self.min_iterations <= self.max_iterations:
            raise ValueError(
                f"need 1 <= min_iterations <= max_iterations, got {self.min_iterations}, {self.max_iterations}"
            )
        if self.output_metric not in OUTPUT_METRICS:
            raise ValueError(f"output_metric must be one of {OUTPUT_METRICS}, got {self.output_metric!r}")

    @property
    def z(self) -> float:
        return float(stats.norm.ppf(0.5 + self.confidence / 2.0))


@dataclass
class RunningStats:
    """Count, mean, sum of squared deviations and range of a sample.

    Supports one-at-a-time updates (Welford) and pairwise merging (Chan et
    al.).  Merging is deterministic for a fixed merge order.
    """

    n: int = 0
    mean: float = 0.0
    m2: float = 0.0
    min: float = math.inf
    max: float = -math.inf

    def push(self, x: float) -> None:
        self.n += 1
        delta = x - self.mean
        self.mean += delta / self.n
        self.m2 += delta * (x - self.mean)
        self.min = min(self.min, x)
        self.max = max(self.max, x)

    @classmethod
    def from_array(cls, values) -> "RunningStats":
        x = np.asarray(values, dtype=float)
        if x.size == 0:
            return cls()
        shift = float(x[0])
        dev = x - shift
        mean = shift + math.fsum(dev) / x.size
        m2 = math.fsum((x - mean) ** 2)
        return cls(n=int(x.size), mean=mean, m2=m2, min=float(x.min()), max=float(x.max()))

    def merge(self, other: "RunningStats") -> "RunningStats":
        if other.n == 0:
            return replace(self)
        if self.n == 0:
            return replace(other)
        n = self.n + other.n
        delta = other.mean - self.mean
        if delta == 0.0:
            mean = self.mean
        else:
            mean = self.mean + delta * other.n / n
        m2 = self.m2 + other.m2 + delta * delta * self.n * other.n / n
        return RunningStats(n=n, mean=mean, m2=m2, min=min(self.min, other.min), max=max(self.max, other.max))

    @property
    def variance(self) -> float:
        return self.m2 / (self.n - 1) if self.n >= 2 else 0.0

    @property
    def sd(self) -> float:
        return math.sqrt(self.variance)


def check_convergence(running: RunningStats, cfg: SimulationConfig) -> bool:
    """True when the confidence half-width on the mean is within tolerance."""
    if running.n < 2:
        return False
    half_width = cfg.z * running.sd / math.sqrt(running.n)
    if half_width == 0.0:
        return True
    return half_width <= cfg.tolerance * abs(running.mean)


@dataclass(frozen=True)
class Histogram:
    edges: np.ndarray
    counts: np.ndarray

    @property
    def bins(self) -> list[tuple[float, float, int]]:
        return [(float(lo), float(hi), int(c)) for lo, hi, c in zip(self.edges[:-1], self.edges[1:], self.counts)]


def _fd_bin_count(x: np.ndarray) -> int:
    span = float(x.max() - x.min())
    if span == 0.0:
        return 1
    q75, q25 = np.percentile(x, [75, 25])
    iqr = q75 - q25
    if iqr <= 0:
        return 50
    width = 2.0 * iqr * x.size ** (-1.0 / 3.0)
    if width <= 0 or span / width >= MAX_BINS:
        return MAX_BINS
    return max(1, math.ceil(span / width))


def histogram(samples, rule: str = "fd") -> Histogram:
    """Equal-width bins spanning [min, max].

    ``rule="fd"`` picks the bin count by Freedman-Diaconis, falling back to 50
    bins when the interquartile range is zero and capping at ``MAX_BINS``; an
    integer fixes the count.
    A sample with no spread gets one degenerate bin ``[v, v]``.
    """
    x = np.asarray(samples, dtype=float).ravel()
    if x.size == 0:
        raise ValueError("histogram needs at least one sample")
    lo, hi = float(x.min()), float(x.max())
    if lo == hi:
        return Histogram(edges=np.array([lo, hi]), counts=np.array([x.size]))
    if rule == "fd":
        k = _fd_bin_count(x)
    elif isinstance(rule, (int, np.integer)) and rule >= 1:
        k = int(rule)
    else:
        raise ValueError(f"unknown binning rule {rule!r}")
    counts, edges = np.histogram(x, bins=k, range=(lo, hi))
    return Histogram(edges=edges, counts=counts)


@dataclass(frozen=True)
class SummaryStats:
    n: int
    mean: float
    sd: float
    mode: float
    percentiles: dict
    min: float
    max: float
    histogram: Histogram
    prob_positive: float
    converged: Optional[bool] = None

    def as_dict(self) -> dict:
        return {
            "n": self.n,
            "mean": self.mean,
            "sd": self.sd,
            "mode": self.mode,
            "percentiles": {f"p{k}": v for k, v in self.percentiles.items()},
            "min": self.min,
            "max": self.max,
            "prob_positive": self.prob_positive,
            "converged": self.converged,
            "histogram": [{"bin_low": lo, "bin_high": hi, "count": c} for lo, hi, c in self.histogram.bins],
        }


def summarize(samples) -> SummaryStats:
    """Descriptive statistics of an output sample.

    The sd uses the n-1 denominator; percentiles interpolate linearly between
    order statistics; the mode is the midpoint of the fullest histogram bin.

    >>> s = summarize([1.0, 2.0, 3.0])
    >>> s.mean, s.sd, s.percentiles[50]
    (2.0, 1.0, 2.0)
    """
    x = np.asarray(samples, dtype=float).ravel()
    if x.size == 0:
        raise ValueError("summarize needs at least one sample")
    running = RunningStats.from_array(x)
    pct = np.maximum.accumulate(np.percentile(x, PERCENTILES))
    hist = histogram(x)
    k = int(np.argmax(hist.counts))
    mode = 0.5 * (float(hist.edges[k]) + float(hist.edges[k + 1]))
    return SummaryStats(
        n=running.n,
        mean=running.mean,
        sd=running.sd,
        mode=mode,
        percentiles={p: float(v) for p, v in zip(PERCENTILES, pct)},
        min=running.min,
        max=running.max,
        histogram=hist,
        prob_positive=float(np.count_nonzero(x > 0)) / x.size,
    )


@dataclass(frozen=True)
class SimulationResult:
    summary: SummaryStats
    outputs: np.ndarray
    config: SimulationConfig
    iterations: int
    converged: bool
    inputs: Optional[dict] = field(default=None)

    def config_dict(self) -> dict:
        return asdict(self.config)


# draw(start, stop) -> (outputs (n,), inputs (n, F) or None)
DrawFn = Callable[[int, int], tuple]


def run_until_converged(draw: DrawFn, cfg: SimulationConfig, workers: int = 1):
    """Drive ``draw`` batch by batch until the stopping rule fires.

    Returns ``(outputs, inputs, running, converged)`` truncated to the
    iteration count at which the run stopped.
    """
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    produced_out: list[np.ndarray] = []
    produced_in: list = []
    produced = 0
    running = RunningStats()
    n = 0
    converged = False
    outputs = np.empty(0)

    pool = ThreadPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        while True:
            boundary = min(n + cfg.batch_size, cfg.max_iterations)
            if produced < boundary:
                starts = range(produced, min(produced + workers * CHUNK, cfg.max_iterations), CHUNK)
                spans = [(a, min(a + CHUNK, cfg.max_iterations)) for a in starts]
                results = pool.map(lambda ab: draw(*ab), spans) if pool else map(lambda ab: draw(*ab), spans)
                for out, inp in results:
                    produced_out.append(out)
                    produced_in.append(inp)
                produced = spans[-1][1]
                outputs = np.concatenate(produced_out)
                produced_out = [outputs]
            running = running.merge(RunningStats.from_array(outputs[n:boundary]))
            n = boundary
            if n >= cfg.min_iterations and check_convergence(running, cfg):
                converged = True
                break
            if n >= cfg.max_iterations:
                break
    finally:
        if pool is not None:
            pool.shutdown()

    inputs = None
    if produced_in and produced_in[0] is not None:
        inputs = np.concatenate(produced_in)[:n]
    return outputs[:n], inputs, running, converged


def scenario_draw(s: Scenario, cfg: SimulationConfig, keep_inputs: bool = False) -> DrawFn:
    """Build the per-chunk draw function for a scenario."""
    rate = s.discount_rate if cfg.output_metric == "npv" else 0.0

    def draw(start: int, stop: int):
        streams = make_streams(cfg.master_seed, start, stop)
        bases = np.empty((stop - start, len(s.factors)))
        for j, f in enumerate(s.factors):
            bases[:, j] = sample_many(f.value, streams)
        inflow, outflow = build_cashflow_batch(s, bases)
        out = discounted_total(inflow - outflow, rate)
        return out, (bases if keep_inputs else None)

    return draw


def run_simulation(
    s: Scenario, cfg: SimulationConfig = SimulationConfig(), workers: int = 1, keep_inputs: bool = False
) -> SimulationResult:
    """Monte Carlo distribution of the configured output metric.

    Set ``keep_inputs`` to retain each factor's draws (needed for rank
    correlation).  Hitting ``max_iterations`` is not an error; the result is
    returned with ``converged=False``.
    """
    problems = validate_scenario(s)
    if problems:
        raise ValueError("invalid scenario: " + "; ".join(map(str, problems)))
    outputs, inputs, _, converged = run_until_converged(scenario_draw(s, cfg, keep_inputs), cfg, workers)
    summary = replace(summarize(outputs), converged=converged)
    by_factor = None
    if inputs is not None:
        by_factor = {f.id: inputs[:, j] for j, f in enumerate(s.factors)}
    return SimulationResult(
        summary=summary,
        outputs=outputs,
        config=cfg,
        iterations=len(outputs),
        converged=converged,
        inputs=by_factor,
    )
