"""One-at-a-time tornado analysis and Spearman rank correlations."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Optional

import numpy as np
from scipy.stats import rankdata

from .cashflow import build_cashflow_batch, discounted_total
from .distributions import quantile
from .factors import Scenario, expected_value

__all__ = ["TornadoEntry", "CorrelationEntry", "one_at_a_time", "rank_correlation", "evaluate_metric"]

LOW_QUANTILE = 0.05
HIGH_QUANTILE = 0.95


@dataclass(frozen=True)
class TornadoEntry:
    factor_id: str
    low_input: float
    high_input: float
    low_output: float
    high_output: float

    @property
    def swing(self) -> float:
        return abs(self.high_output - self.low_output)


@dataclass(frozen=True)
class CorrelationEntry:
    factor_id: str
    spearman_rho: float


def evaluate_metric(s: Scenario, bases: np.ndarray, metric: str = "total_net_benefit", rate: Optional[float] = None):
    """Metric value for each row of an ``(n, F)`` base-amount matrix."""
    if metric == "total_net_benefit":
        rate = 0.0
    elif metric == "npv":
        rate = s.discount_rate if rate is None else rate
    else:
        raise ValueError(f"unknown metric {metric!r}")
    inflow, outflow = build_cashflow_batch(s, bases)
    return discounted_total(inflow - outflow, rate)


def one_at_a_time(
    s: Scenario,
    metric: str = "total_net_benefit",
    rate: Optional[float] = None,
    low: float = LOW_QUANTILE,
    high: float = HIGH_QUANTILE,
) -> list[TornadoEntry]:
    """Swing of the metric as each factor moves between two quantiles.

    All other factors sit at their analytic means.  Entries come back sorted by
    descending swing (ties keep scenario order).
    """
    baseline = np.array([expected_value(f.value) for f in s.factors])
    nf = len(s.factors)
    lows = np.array([quantile(f.value, low) for f in s.factors])
    highs = np.array([quantile(f.value, high) for f in s.factors])
    # Row 2j varies factor j to its low quantile, row 2j+1 to its high one.
    grid = np.tile(baseline, (2 * nf, 1))
    grid[2 * np.arange(nf), np.arange(nf)] = lows
    grid[2 * np.arange(nf) + 1, np.arange(nf)] = highs
    values = evaluate_metric(s, grid, metric, rate)
    entries = [
        TornadoEntry(f.id, float(lows[j]), float(highs[j]), float(values[2 * j]), float(values[2 * j + 1]))
        for j, f in enumerate(s.factors)
    ]
    order = sorted(range(nf), key=lambda j: -entries[j].swing)
    return [entries[j] for j in order]


def _spearman(x: np.ndarray, y_ranks: np.ndarray) -> float:
    rx = rankdata(x)
    rx = rx - rx.mean()
    ry = y_ranks - y_ranks.mean()
    denom = np.sqrt(np.dot(rx, rx) * np.dot(ry, ry))
    if denom == 0.0:
        return 0.0
    return float(np.clip(np.dot(rx, ry) / denom, -1.0, 1.0))


def rank_correlation(input_samples: Mapping[str, np.ndarray], output_samples) -> list[CorrelationEntry]:
    """Spearman rho between each factor's draws and the output.

    Ties get average ranks.  A constant input (a point value) has no ranking
    information and is reported with rho 0.  Sorted by descending ``|rho|``.
    """
    y = np.asarray(output_samples, dtype=float)
    if y.ndim != 1 or y.size < 3:
        raise ValueError(f"need at least 3 output samples, got {y.size}")
    y_ranks = rankdata(y)
    entries = []
    for factor_id, draws in input_samples.items():
        x = np.asarray(draws, dtype=float)
        if x.shape != y.shape:
            raise ValueError(f"{factor_id}: {x.size} input samples vs {y.size} outputs")
        entries.append(CorrelationEntry(factor_id, _spearman(x, y_ranks)))
    return sorted(entries, key=lambda e: -abs(e.spearman_rho))
