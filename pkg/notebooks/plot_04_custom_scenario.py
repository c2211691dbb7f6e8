"""
Writing a scenario by hand
==========================

A small scenario built in Python, saved as YAML and loaded back.
"""

import tempfile
from pathlib import Path

from cbasim import (
    BenefitCategory,
    CostCategory,
    Factor,
    FactorKind,
    GrowthModel,
    Scenario,
    Tangibility,
    Timing,
    build_cashflow,
    metrics,
    parse_value_expr,
    run_simulation,
)
from cbasim.scenario_io import dump_scenario, load_scenario, save_scenario

factors = (
    Factor("headsets", "Headsets", FactorKind.COST, CostCategory.TECHNOLOGY, Timing.INITIAL,
           parse_value_expr("triangular(min=4000, mode=5000, max=8000)"), GrowthModel(0.0)),
    Factor("licences", "Licences", FactorKind.COST, CostCategory.TECHNOLOGY, Timing.ONGOING,
           parse_value_expr("normal(min=1500, max=2500)"), GrowthModel(0.03)),
    Factor("rework", "Less rework", FactorKind.BENEFIT, BenefitCategory.CONSTRUCTION, Timing.ONGOING,
           parse_value_expr("gamma(min=2000, max=12000)"), GrowthModel(0.05), tangibility=Tangibility.TANGIBLE),
)
scenario = Scenario("pilot", factors, horizon_years=3, discount_rate=0.07)
print(dump_scenario(scenario))

path = save_scenario(scenario, Path(tempfile.mkdtemp()) / "pilot.yaml")
loaded, cfg = load_scenario(path)
assert loaded == scenario

m = metrics(build_cashflow(loaded), loaded.discount_rate)
print(f"expected npv {m.npv:,.0f}, bcr {m.bcr:.2f}")

r = run_simulation(loaded, cfg)
print(f"simulated net benefit {r.summary.mean:,.0f} +- {r.summary.sd:,.0f} over {r.iterations} runs")
print(f"chance of losing money: {1 - r.summary.prob_positive:.1%}")
