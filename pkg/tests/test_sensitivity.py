from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cbasim.distributions import Gamma, Normal, Point, Triangular, Uniform, fit_from_range, quantile
from cbasim.factors import BenefitCategory, CostCategory, Factor, FactorKind, GrowthModel, Scenario, Tangibility, Timing
from cbasim.scenario_io import load_scenario
from cbasim.sensitivity import evaluate_metric, one_at_a_time, rank_correlation
from cbasim.simulation import run_simulation


def benefit(fid, value, timing=Timing.ONGOING, growth=0.05):
    return Factor(fid, fid, FactorKind.BENEFIT, BenefitCategory.DESIGN, timing, value, GrowthModel(growth),
                  tangibility=Tangibility.TANGIBLE)


def cost(fid, value, timing=Timing.ONGOING, growth=0.05):
    return Factor(fid, fid, FactorKind.COST, CostCategory.COMPANY, timing, value, GrowthModel(growth))


GROWTH_SUM = sum(1.05**k for k in range(5))  # 5.52563...


class TestTornado:
    def test_point_factor_has_no_swing(self):
        s = Scenario("s", (benefit("b", Point(100)), cost("c", Uniform(1, 3))))
        entries = {e.factor_id: e for e in one_at_a_time(s)}
        assert entries["b"].swing == 0

    def test_uniform_benefit_closed_form(self):
        s = Scenario("s", (benefit("b", fit_from_range("uniform", 10_000, 100_000)),))
        full = one_at_a_time(s, low=0.0, high=1.0)[0]
        assert 90_000 * GROWTH_SUM == pytest.approx(497_307, abs=0.5)
        assert full.swing == pytest.approx(90_000 * GROWTH_SUM, rel=1e-12)
        p5_p95 = one_at_a_time(s)[0]
        assert p5_p95.swing == pytest.approx(0.9 * 90_000 * GROWTH_SUM, rel=1e-12)

    def test_cost_increase_lowers_output(self):
        s, _ = load_scenario("paper_stochastic")
        for e in one_at_a_time(s):
            f = s.factor(e.factor_id)
            if e.swing == 0:
                continue
            if f.kind is FactorKind.COST:
                assert e.high_output < e.low_output
            else:
                assert e.high_output > e.low_output

    def test_sorted_by_swing(self):
        s, _ = load_scenario("paper_stochastic")
        swings = [e.swing for e in one_at_a_time(s)]
        assert swings == sorted(swings, reverse=True)

    def test_npv_metric_is_discounted(self):
        s = Scenario("s", (benefit("b", Uniform(0, 10), growth=0.0),), horizon_years=2, discount_rate=0.1)
        e = one_at_a_time(s, metric="npv", low=0.0, high=1.0)[0]
        assert e.swing == pytest.approx(10 / 1.1 + 10 / 1.21)

    def test_unknown_metric(self):
        s = Scenario("s", (benefit("b", Point(1)),))
        with pytest.raises(ValueError):
            one_at_a_time(s, metric="irr")


class TestRankCorrelation:
    def test_identity_and_negation(self):
        x = np.random.default_rng(0).gamma(2.0, size=500)
        res = {e.factor_id: e.spearman_rho for e in rank_correlation({"up": x, "down": -x}, x)}
        assert res["up"] == pytest.approx(1.0)
        assert res["down"] == pytest.approx(-1.0)

    def test_monotone_nonlinear(self):
        x = np.linspace(0.1, 5, 200)
        assert rank_correlation({"x": x}, np.exp(3 * x))[0].spearman_rho == pytest.approx(1.0)

    def test_ties_use_average_ranks(self):
        from scipy.stats import spearmanr

        x = np.array([1, 2, 2, 3, 3, 3, 4.0])
        y = np.array([2, 1, 4, 3, 6, 5, 7.0])
        assert rank_correlation({"x": x}, y)[0].spearman_rho == pytest.approx(spearmanr(x, y).statistic)

    def test_independent_inputs(self):
        rng = np.random.default_rng(5)
        rho = rank_correlation({"x": rng.random(100_000)}, rng.random(100_000))[0].spearman_rho
        assert abs(rho) < 0.02

    def test_constant_input(self):
        assert rank_correlation({"c": np.ones(10)}, np.arange(10.0))[0].spearman_rho == 0.0

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            rank_correlation({"x": np.arange(4.0)}, np.arange(5.0))
        with pytest.raises(ValueError):
            rank_correlation({"x": np.arange(2.0)}, np.arange(2.0))

    def test_on_simulation(self):
        s, cfg = load_scenario("paper_stochastic")
        r = run_simulation(s, cfg, keep_inputs=True)
        rho = {e.factor_id: e.spearman_rho for e in rank_correlation(r.inputs, r.outputs)}
        assert rho["hardware"] == 0.0
        assert rho["client_engagement"] > 0.3
        assert rho["procurement_staff"] < -0.3


# --- properties --------------------------------------------------------------

positive = st.floats(1.0, 1e5)


@st.composite
def values(draw):
    family = draw(st.sampled_from(["point", "uniform", "normal", "gamma", "triangular"]))
    a = draw(positive)
    w = draw(positive)
    if family == "point":
        return Point(a)
    if family == "uniform":
        return Uniform(a, a + w)
    if family == "triangular":
        return Triangular(a, a + w * draw(st.floats(0, 1)), a + w)
    return fit_from_range(family, a, a + w)


@st.composite
def scenarios(draw):
    n = draw(st.integers(1, 6))
    fs = []
    for i in range(n):
        maker = draw(st.sampled_from([benefit, cost]))
        fs.append(maker(f"f{i}", draw(values()), draw(st.sampled_from(Timing)), draw(st.floats(-0.3, 0.3))))
    return Scenario("r", tuple(fs), horizon_years=draw(st.integers(1, 6)), discount_rate=draw(st.floats(0, 0.2)))


def swings(s, metric="total_net_benefit"):
    return {e.factor_id: e.swing for e in one_at_a_time(s, metric)}


@settings(max_examples=100, deadline=None)
@given(scenarios(), st.sampled_from(["total_net_benefit", "npv"]))
def test_swing_additivity(s, metric):
    # Joint swing: every factor at the quantile that raises the output vs.
    # every factor at the one that lowers it.
    lo = np.array([quantile(f.value, 0.05) for f in s.factors])
    hi = np.array([quantile(f.value, 0.95) for f in s.factors])
    benefit_mask = np.array([f.kind is FactorKind.BENEFIT for f in s.factors])
    best = np.where(benefit_mask, hi, lo)
    worst = np.where(benefit_mask, lo, hi)
    joint = evaluate_metric(s, np.vstack([best, worst]), metric)
    total = sum(swings(s, metric).values())
    assert joint[0] - joint[1] == pytest.approx(total, rel=1e-9, abs=1e-6)


@settings(max_examples=100, deadline=None)
@given(scenarios(), st.floats(0.01, 100.0))
def test_swing_scale_invariance(s, k):
    def scale(v):
        if isinstance(v, Point):
            return Point(v.value * k)
        if isinstance(v, Uniform):
            return Uniform(v.low * k, v.high * k)
        if isinstance(v, Triangular):
            return Triangular(v.low * k, v.mode * k, v.high * k)
        if isinstance(v, Gamma):
            return Gamma(v.shape, v.scale * k)
        return Normal(v.mu * k, v.sigma * k)

    scaled = replace(s, factors=tuple(replace(f, value=scale(f.value)) for f in s.factors))
    base, big = swings(s), swings(scaled)
    biggest = max(base.values())
    for fid in base:
        assert big[fid] == pytest.approx(k * base[fid], rel=1e-7, abs=1e-9 * k * max(biggest, 1.0))


@settings(max_examples=100, deadline=None)
@given(scenarios(), st.data())
def test_swing_invariant_to_other_factors(s, data):
    j = data.draw(st.integers(0, len(s.factors) - 1))
    shifted = tuple(
        f if i == j else replace(f, value=Point(data.draw(st.floats(0, 1e6)))) for i, f in enumerate(s.factors)
    )
    target = s.factors[j].id
    before = swings(s)[target]
    after = swings(replace(s, factors=shifted))[target]
    assert after == pytest.approx(before, rel=1e-7, abs=1e-6)


@settings(max_examples=100, deadline=None)
@given(st.integers(3, 200), st.floats(0.01, 100.0), st.integers(0, 2**32 - 1))
def test_spearman_scale_invariance(n, k, seed):
    rng = np.random.default_rng(seed)
    x = rng.gamma(3.0, size=n)
    y = x + rng.normal(0, 1, n)
    a = rank_correlation({"x": x}, y)[0].spearman_rho
    b = rank_correlation({"x": x * k}, y * k)[0].spearman_rho
    assert a == pytest.approx(b, abs=1e-12)
