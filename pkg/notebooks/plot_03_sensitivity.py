"""
Which inputs matter
===================

One-at-a-time tornado between each factor's 5th and 95th percentile, and
Spearman rank correlation between sampled inputs and the output.
"""

from cbasim import load_scenario, one_at_a_time, rank_correlation, run_simulation
from cbasim.reports import render_tornado_table

scenario, cfg = load_scenario("paper_stochastic")

print(render_tornado_table(one_at_a_time(scenario), limit=10))
print()

result = run_simulation(scenario, cfg, keep_inputs=True)
for entry in rank_correlation(result.inputs, result.outputs)[:10]:
    print(f"{entry.factor_id:<28}{entry.spearman_rho:+.3f}")
