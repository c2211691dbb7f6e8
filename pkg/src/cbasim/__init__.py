"""Seedable Monte Carlo cost-benefit analysis.

Factors (costs and benefits with uncertain values) expand into multi-year cash
flows; the engine reports NPV, payback, benefit-cost ratio and total net
benefit, and simulates the distribution of the chosen output until the
confidence interval on its mean is tight enough.
"""

from .cashflow import (
    CashFlowSchedule,
    FinancialMetrics,
    build_cashflow,
    expand_factor,
    metrics,
    npv,
    payback_period,
)
from .distributions import (
    Gamma,
    Normal,
    Point,
    Triangular,
    Uniform,
    analytic_moments,
    fit_from_range,
    quantile,
    sample,
    sample_many,
)
from .expr import format_value_expr, parse_value_expr
from .factors import (
    BenefitCategory,
    CostCategory,
    Factor,
    FactorKind,
    GrowthModel,
    Scenario,
    Tangibility,
    Timing,
    expected_value,
    validate_factor,
    validate_scenario,
)
from .reports import write_reports
from .rng import RngStream, make_stream, make_streams
from .scenario_io import dump_scenario, load_scenario, save_scenario
from .sensitivity import one_at_a_time, rank_correlation
from .simulation import (
    RunningStats,
    SimulationConfig,
    SimulationResult,
    SummaryStats,
    check_convergence,
    histogram,
    run_simulation,
    summarize,
)

__version__ = "0.1.0"
