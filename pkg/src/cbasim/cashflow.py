"""Per-period cash flows and the financial metrics derived from them.

Flows occur at integer period ends.  Period 0 carries initial amounts only;
ongoing amounts start in period 1.  Everything is computed in full precision;
rounding is left to display code.

The batch helpers work on a ``(n, F)`` matrix of factor base amounts so the
Monte Carlo engine and the deterministic path share the exact same arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping, Optional, Union

import numpy as np

from .factors import Factor, FactorKind, GrowthModel, Scenario, Timing, expected_value

__all__ = [
    "CashFlowSchedule",
    "FinancialMetrics",
    "expand_factor",
    "period_multipliers",
    "build_cashflow",
    "build_cashflow_batch",
    "npv",
    "payback_period",
    "metrics",
]

Resolver = Union[Callable[[Factor], float], Mapping[str, float], None]


def period_multipliers(
    timing: Timing, growth: GrowthModel, horizon: int, profile: Optional[tuple[float, ...]] = None
) -> np.ndarray:
    """Series of one unit of base amount over periods 0..H."""
    if horizon < 1:
        raise ValueError(f"horizon must be >= 1, got {horizon}")
    out = np.zeros(horizon + 1)
    if timing is Timing.INITIAL:
        out[0] = 1.0
    elif profile is not None:
        p = np.asarray(profile, dtype=float)
        out[1:] = p / p[0]
    else:
        out[1:] = (1.0 + growth.annual_rate) ** np.arange(horizon)
    return out


def expand_factor(
    base: float, timing: Timing, growth: GrowthModel, horizon: int, profile: Optional[tuple[float, ...]] = None
) -> np.ndarray:
    """Spread a base amount over periods 0..H.

    Initial amounts land in period 0 and never grow.  Ongoing amounts start at
    ``base`` in period 1 and compound by the growth rate each year after.

    >>> expand_factor(100, Timing.ONGOING, GrowthModel(0.0), 3).tolist()
    [0.0, 100.0, 100.0, 100.0]
    """
    if base < 0:
        raise ValueError(f"base amount must be >= 0, got {base}")
    return base * period_multipliers(timing, growth, horizon, profile)


@dataclass(frozen=True)
class CashFlowSchedule:
    """Inflow (benefits) and outflow (costs) per period, plus derived rows.

    ``rows`` keeps each factor's own series, keyed by factor id, for
    table-style display.
    """

    inflow: np.ndarray
    outflow: np.ndarray
    rows: Optional[dict] = None

    @property
    def horizon(self) -> int:
        return len(self.inflow) - 1

    @property
    def net(self) -> np.ndarray:
        return self.inflow - self.outflow

    @property
    def cumulative(self) -> np.ndarray:
        return np.cumsum(self.net)


def _resolve(factor: Factor, resolver: Resolver) -> float:
    if resolver is None:
        return expected_value(factor.value)
    if callable(resolver):
        return float(resolver(factor))
    return float(resolver[factor.id])


def build_cashflow_batch(s: Scenario, bases: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Inflow and outflow, each ``(n, H+1)``, for ``n`` rows of factor bases.

    Column ``j`` of ``bases`` belongs to ``s.factors[j]``.  Factors are summed
    in scenario order, so row ``i`` is bit-identical to the deterministic
    schedule built from the same bases.
    """
    bases = np.atleast_2d(np.asarray(bases, dtype=float))
    n, nf = bases.shape
    if nf != len(s.factors):
        raise ValueError(f"expected {len(s.factors)} factor columns, got {nf}")
    h = s.horizon_years
    inflow = np.zeros((n, h + 1))
    outflow = np.zeros((n, h + 1))
    for j, f in enumerate(s.factors):
        series = bases[:, j, None] * period_multipliers(f.timing, f.growth, h, f.profile)
        if f.kind is FactorKind.BENEFIT:
            inflow += series
        else:
            outflow += series
    return inflow, outflow


def build_cashflow(s: Scenario, resolver: Resolver = None) -> CashFlowSchedule:
    """Schedule for one realization of every factor's base amount.

    ``resolver`` maps a factor to its base amount: a callable, a mapping from
    factor id, or ``None`` for analytic expected values.
    """
    bases = np.array([_resolve(f, resolver) for f in s.factors], dtype=float)
    if np.any(bases < 0):
        bad = [f.id for f, b in zip(s.factors, bases) if b < 0]
        raise ValueError(f"negative base amounts for {', '.join(bad)}")
    inflow, outflow = build_cashflow_batch(s, bases[None, :])
    h = s.horizon_years
    rows = {f.id: b * period_multipliers(f.timing, f.growth, h, f.profile) for f, b in zip(s.factors, bases)}
    return CashFlowSchedule(inflow=inflow[0], outflow=outflow[0], rows=rows)


def discounted_total(net: np.ndarray, rate: float) -> np.ndarray:
    """Discounted sum over the last axis, accumulated period by period.

    At ``rate == 0`` the accumulation order matches ``np.cumsum`` exactly, so
    the result equals the final cumulative flow bit for bit.
    """
    if rate <= -1:
        raise ValueError(f"discount rate must be > -1, got {rate}")
    net = np.asarray(net, dtype=float)
    total = np.zeros(net.shape[:-1])
    for t in range(net.shape[-1]):
        term = net[..., t] if rate == 0 else net[..., t] / (1.0 + rate) ** t
        total = total + term
    return total


def npv(schedule: Union[CashFlowSchedule, np.ndarray], rate: float) -> float:
    """Net present value of the net flows at ``rate`` per period."""
    net = schedule.net if isinstance(schedule, CashFlowSchedule) else np.asarray(schedule, dtype=float)
    return float(discounted_total(net, rate))


def payback_period(schedule: Union[CashFlowSchedule, np.ndarray]) -> Optional[float]:
    """First time the cumulative net flow reaches zero, interpolated linearly
    within the crossing period.  ``None`` if it never does."""
    net = schedule.net if isinstance(schedule, CashFlowSchedule) else np.asarray(schedule, dtype=float)
    cum = np.cumsum(net)
    if cum[0] >= 0:
        return 0.0
    hits = np.flatnonzero(cum >= 0)
    if hits.size == 0:
        return None
    t = int(hits[0])
    return (t - 1) + float(-cum[t - 1] / net[t])


@dataclass(frozen=True)
class FinancialMetrics:
    npv: float
    total_net_benefit: float
    payback_years: Optional[float]
    bcr: Optional[float]
    total_costs: float
    total_benefits: float
    total_initial_costs: float
    total_ongoing_costs: float
    discount_rate: float

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def metrics(schedule: CashFlowSchedule, rate: float) -> FinancialMetrics:
    """All headline metrics for one schedule.

    ``bcr`` is ``None`` when there are no costs.
    """
    total_costs = float(np.sum(schedule.outflow))
    total_benefits = float(np.sum(schedule.inflow))
    return FinancialMetrics(
        npv=npv(schedule, rate),
        total_net_benefit=float(schedule.cumulative[-1]),
        payback_years=payback_period(schedule),
        bcr=total_benefits / total_costs if total_costs > 0 else None,
        total_costs=total_costs,
        total_benefits=total_benefits,
        total_initial_costs=float(schedule.outflow[0]),
        total_ongoing_costs=float(np.sum(schedule.outflow[1:])),
        discount_rate=rate,
    )
