"""
Deterministic cash-flow tables
==============================

Expected-value tables for the VR adoption case, with NPV, benefit-cost ratio
and payback period.
"""

from cbasim import build_cashflow, load_scenario, metrics
from cbasim.reports import render_cashflow_table

scenario, _ = load_scenario("paper_point")
schedule = build_cashflow(scenario)
print(render_cashflow_table(scenario, schedule))

# Undiscounted net benefit and NPV at the scenario's 5% rate.
m = metrics(schedule, scenario.discount_rate)
print(f"total net benefit {m.total_net_benefit:,.0f}")
print(f"npv               {m.npv:,.0f}")
print(f"bcr               {m.bcr:.3f}")
print(f"payback           {m.payback_years:.2f} years")

# NPV as a function of the discount rate.
for r in (0.0, 0.03, 0.05, 0.08, 0.12):
    print(f"r = {r:.2f}: {metrics(schedule, r).npv:>12,.0f}")
