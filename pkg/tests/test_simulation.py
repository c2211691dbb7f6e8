import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cbasim.cashflow import build_cashflow, metrics
from cbasim.factors import FactorKind, Timing
from cbasim.scenario_io import load_scenario
from cbasim.simulation import (
    RunningStats,
    SimulationConfig,
    MAX_BINS,
    check_convergence,
    histogram,
    run_simulation,
    run_until_converged,
    summarize,
)

CASE_MEAN, CASE_SD = 1_086_770.0, 312_136.0


def stats_of(n, mean=CASE_MEAN, sd=CASE_SD):
    return RunningStats(n=n, mean=mean, m2=sd * sd * (n - 1))


class TestConvergence:
    def test_converged_at_3200(self):
        # 1.95996 * 312136 / sqrt(3200) = 10815 <= 0.01 * 1086770
        assert check_convergence(stats_of(3200), SimulationConfig())

    def test_not_converged_at_1000(self):
        # 1.95996 * 312136 / sqrt(1000) = 19346 > 10868
        assert not check_convergence(stats_of(1000), SimulationConfig())

    def test_zero_spread_converges(self):
        assert check_convergence(stats_of(2, sd=0.0), SimulationConfig())

    def test_zero_mean_with_spread_never_converges(self):
        assert not check_convergence(stats_of(10**9, mean=0.0, sd=1.0), SimulationConfig())

    def test_needs_two_samples(self):
        assert not check_convergence(RunningStats(n=1, mean=5.0), SimulationConfig())

    def test_z_value(self):
        assert SimulationConfig().z == pytest.approx(1.959964, abs=1e-6)


class TestRunningStats:
    def test_push_from_array_and_merge_agree_with_numpy(self):
        x = np.random.default_rng(0).normal(5e5, 3e4, 2_001)
        pushed = RunningStats()
        for v in x:
            pushed.push(float(v))
        merged = RunningStats.from_array(x[:700]).merge(RunningStats.from_array(x[700:]))
        for s in (pushed, merged, RunningStats.from_array(x)):
            assert s.n == x.size
            assert s.mean == pytest.approx(x.mean(), rel=1e-12)
            assert s.variance == pytest.approx(x.var(ddof=1), rel=1e-9)
            assert (s.min, s.max) == (x.min(), x.max())

    def test_merge_with_empty(self):
        s = RunningStats.from_array([1.0, 2.0])
        assert s.merge(RunningStats()) == s
        assert RunningStats().merge(s) == s


class TestSummarize:
    def test_small(self):
        s = summarize([1.0, 2.0, 3.0])
        assert (s.mean, s.sd, s.percentiles[50]) == (2.0, 1.0, 2.0)
        assert s.n == 3 and s.prob_positive == 1.0

    def test_constant(self):
        s = summarize([7.5] * 10)
        assert s.mode == 7.5 and s.sd == 0.0
        assert s.histogram.counts.tolist() == [10]

    def test_standard_normal(self):
        x = np.random.default_rng(12345).standard_normal(1_000_000)
        s = summarize(x)
        assert abs(s.mean) < 0.005
        assert s.sd == pytest.approx(1.0, rel=0.01)
        assert abs(s.percentiles[50]) < 0.005
        assert s.percentiles[95] == pytest.approx(1.6449, abs=0.01)
        assert abs(s.mode) < 0.1

    def test_prob_positive(self):
        assert summarize([-1.0, 0.0, 2.0, 3.0]).prob_positive == 0.5

    def test_empty(self):
        with pytest.raises(ValueError):
            summarize([])


class TestHistogram:
    def test_single_sample(self):
        h = histogram([3.0])
        assert h.counts.tolist() == [1] and h.edges.tolist() == [3.0, 3.0]

    def test_grid(self):
        h = histogram(np.arange(100.0))
        assert h.counts.sum() == 100
        # FD: IQR 49.5, width 2*49.5/100**(1/3) = 21.33 -> ceil(99/21.33) = 5 bins
        assert len(h.counts) == 5

    def test_iqr_zero_falls_back_to_fifty_bins(self):
        x = np.array([0.0] * 90 + [1.0] * 10)
        assert len(histogram(x).counts) == 50

    def test_bimodal_mode_from_heavier_component(self):
        rng = np.random.default_rng(1)
        x = np.concatenate([rng.normal(0, 1, 7_000), rng.normal(10, 1, 3_000)])
        assert abs(summarize(x).mode) < 0.5

    def test_fixed_bin_count(self):
        assert len(histogram(np.arange(10.0), rule=4).counts) == 4
        with pytest.raises(ValueError):
            histogram(np.arange(10.0), rule="sturges")


@given(st.lists(st.floats(-1e9, 1e9, allow_nan=False), min_size=1, max_size=300))
def test_percentiles_monotone_and_histogram_mass(xs):
    s = summarize(xs)
    p = [s.percentiles[k] for k in (5, 25, 50, 75, 95)]
    assert p == sorted(p)
    assert s.min <= p[0] and p[-1] <= s.max
    assert s.histogram.counts.sum() == len(xs)


class TestConfig:
    @pytest.mark.parametrize(
        "kw",
        [dict(tolerance=0), dict(tolerance=1), dict(confidence=0.5), dict(confidence=1.0), dict(batch_size=0),
         dict(min_iterations=10, max_iterations=5), dict(output_metric="irr")],
    )
    def test_invalid(self, kw):
        with pytest.raises(ValueError):
            SimulationConfig(**kw)


@pytest.fixture(scope="module")
def stochastic():
    return load_scenario("paper_stochastic")


def analytic_total_net_benefit(s):
    """Expected total net benefit by hand: mean x (1, or sum of growth factors)."""
    total = 0.0
    for f in s.factors:
        if f.timing is Timing.INITIAL:
            weight = 1.0
        else:
            weight = sum((1 + f.growth.annual_rate) ** k for k in range(s.horizon_years))
        sign = 1 if f.kind is FactorKind.BENEFIT else -1
        total += sign * f.value.mean * weight
    return total


class TestRunSimulation:
    def test_point_scenario_is_degenerate(self):
        s, cfg = load_scenario("paper_point")
        r = run_simulation(s, cfg)
        assert r.summary.sd == 0
        assert r.summary.mean == metrics(build_cashflow(s), s.discount_rate).total_net_benefit
        assert r.converged and r.iterations == cfg.min_iterations
        assert r.summary.n == r.iterations

    def test_stochastic_mean_near_analytic(self, stochastic):
        s, cfg = stochastic
        expected = analytic_total_net_benefit(s)
        assert expected == pytest.approx(metrics(build_cashflow(s), 0.0).total_net_benefit)
        r = run_simulation(s, cfg)
        assert r.converged
        assert r.summary.mean == pytest.approx(expected, rel=0.02)

    def test_converged_result_satisfies_rule(self, stochastic):
        s, cfg = stochastic
        r = run_simulation(s, replace(cfg, master_seed=7))
        half = cfg.z * r.summary.sd / math.sqrt(r.summary.n)
        assert half <= cfg.tolerance * abs(r.summary.mean) * (1 + 1e-12)
        assert r.iterations % cfg.batch_size == 0

    def test_max_iterations_not_converged(self, stochastic):
        s, cfg = stochastic
        cfg = replace(cfg, tolerance=1e-6, min_iterations=10, max_iterations=250, batch_size=100)
        r = run_simulation(s, cfg)
        assert not r.converged and r.iterations == 250 and r.summary.converged is False

    def test_worker_count_does_not_matter(self, stochastic):
        s, cfg = stochastic
        cfg = replace(cfg, min_iterations=5_000)
        a = run_simulation(s, cfg, workers=1)
        b = run_simulation(s, cfg, workers=4)
        np.testing.assert_array_equal(a.outputs, b.outputs)
        assert a.summary.as_dict() == b.summary.as_dict()

    def test_iteration_uses_its_own_stream(self, stochastic):
        s, cfg = stochastic
        r = run_simulation(s, replace(cfg, min_iterations=2_000), keep_inputs=True)
        r2 = run_simulation(s, replace(cfg, min_iterations=3_000), keep_inputs=True)
        np.testing.assert_array_equal(r.outputs, r2.outputs[: r.iterations])
        assert set(r.inputs) == {f.id for f in s.factors}
        assert all(len(v) == r.iterations for v in r.inputs.values())

    def test_npv_metric(self, stochastic):
        s, cfg = stochastic
        r = run_simulation(s, replace(cfg, output_metric="npv"))
        expected = metrics(build_cashflow(s), s.discount_rate).npv
        assert r.summary.mean == pytest.approx(expected, rel=0.02)

    def test_invalid_scenario_rejected(self, stochastic):
        s, cfg = stochastic
        with pytest.raises(ValueError):
            run_simulation(replace(s, horizon_years=0), cfg)


def test_run_until_converged_with_custom_stream():
    rng = np.random.default_rng(0)
    data = rng.normal(100.0, 1.0, 100_000)
    out, inputs, running, converged = run_until_converged(
        lambda a, b: (data[a:b], None), SimulationConfig(min_iterations=10, batch_size=10)
    )
    assert converged and inputs is None
    assert len(out) == 10 and running.n == 10


def test_tiny_iqr_bin_count_is_capped():
    h = histogram([0.0, 0.0, 0.0, 1.0, 4e-220])
    assert len(h.counts) == MAX_BINS and h.counts.sum() == 5
