"""Tests for the analysis runners and the parameter-locked presets."""

import numpy as np
import pytest

from impatience.ce import HyperbolicBundle
from impatience.discount import (
    Exponential,
    GeneralizedHyperbolic,
    SlowWeibull,
    ZeroSpeedHyperbolic,
)
from impatience.grids import TimeGrid
from impatience.mixtures import mix
from impatience.scenarios import (
    ScenarioResult,
    figure1,
    figure2,
    figure3,
    household,
    run_analyze,
    run_ce,
    run_compare,
    run_mix,
)
from impatience.tabular import parse_csv


# ---------------------------------------------------------------------------
# generic runners
# ---------------------------------------------------------------------------

def test_analyze_hyperbolic_is_strictly_di():
    res = run_analyze(GeneralizedHyperbolic(alpha=0.3, h=0.1))
    assert res.summary["verdict"] == "StrictlyDI"
    assert res.summary["present_biased"] is True
    lo, hi = res.summary["index_range"]
    assert 0.0 < lo < hi
    assert "analyze.csv" in res.files


def test_analyze_exponential_is_constant_impatience():
    res = run_analyze(Exponential(rho=0.04))
    assert res.summary["verdict"] == "ConstantImpatience"
    assert res.summary["present_biased"] is False
    lo, hi = res.summary["index_range"]
    assert abs(lo) <= 1e-12 and abs(hi) <= 1e-12


def test_analyze_csv_layout():
    res = run_analyze(GeneralizedHyperbolic(alpha=0.3, h=0.1))
    metadata, names, cols = parse_csv(res.files["analyze.csv"])
    assert names == ["t", "D", "r", "impatience_rate", "index"]
    assert any("grid:" in line for line in metadata)
    t, D, r, ir, idx = cols
    # index column repeats the closed form h/(1+ht) for this family
    assert np.allclose(idx, 0.1 / (1.0 + 0.1 * t), rtol=1e-10)
    assert np.allclose(ir - r, idx, rtol=1e-9, atol=1e-12)


def test_analyze_fd_mode_close_to_analytic():
    spec = GeneralizedHyperbolic(alpha=0.3, h=0.1)
    grid = TimeGrid.logspace(0.1, 50.0, 50)
    res_a = run_analyze(spec, grid=grid)
    # 1e-4 balances truncation against roundoff for the second difference;
    # measured worst-case index error on this grid is 8.9e-5
    res_f = run_analyze(spec, grid=grid, fd_step=1e-4)
    _, _, cols_a = parse_csv(res_a.files["analyze.csv"])
    _, _, cols_f = parse_csv(res_f.files["analyze.csv"])
    assert np.allclose(cols_a[2], cols_f[2], rtol=1e-8)  # r
    assert np.allclose(cols_a[4], cols_f[4], rtol=5e-4)  # index (two FD layers)


def test_compare_ranks_hyperbolics_by_h():
    res = run_compare(
        GeneralizedHyperbolic(alpha=0.5, h=0.2),
        GeneralizedHyperbolic(alpha=0.5, h=0.05),
    )
    assert res.summary["index_comparison"]["relation"] == "StrictlyMoreDI"
    assert res.summary["convex_transform"]["relation"] in (
        "StrictlyMoreDI",
        "MoreDI",
    )
    metadata, names, cols = parse_csv(res.files["compare.csv"])
    assert names == ["t", "I_1", "I_2", "difference"]
    assert np.all(cols[3] > 0.0)


def test_compare_records_transform_failure_instead_of_raising():
    # a tabulated spec restricted to a short window cannot be inverted far
    # beyond its table, but run_compare should still return the index route
    from impatience.discount import TabulatedSpec

    t = np.linspace(0.0, 2.0, 30)
    tab = TabulatedSpec(times=t, values=np.exp(-0.05 * t))
    res = run_compare(tab, Exponential(rho=0.05), grid=TimeGrid.linear(0.1, 1.9, 205))
    assert "relation" in res.summary["index_comparison"]
    assert isinstance(res.summary["convex_transform"], dict)


def test_mix_exponential_chain_theorem_holds():
    m = mix([Exponential(rho=0.02), Exponential(rho=0.05)])
    res = run_mix(m)
    assert res.summary["verdict"] == "StrictlyDI"
    assert res.summary["decomposition_max_gap"] <= 1e-10
    assert res.summary["min_bound_violation"] <= 1e-9
    assert res.summary["theorem"]["holds"] is True


def test_mix_crossing_components_not_comparable():
    m = mix([(ZeroSpeedHyperbolic(h=0.1), 0.5), (SlowWeibull(alpha=0.12), 0.5)])
    res = run_mix(m, grid=TimeGrid.logspace(0.05, 60.0, 200))
    assert res.summary["theorem"].get("applicable") is False
    assert res.summary["min_bound_violation"] <= 1e-9
    _, names, _ = parse_csv(res.files["mix.csv"])
    assert names[:5] == ["t", "I_direct", "I_decomposed", "Q", "N"]


def test_ce_runner_reports_harmonic_limit():
    bundle = HyperbolicBundle([(0.01, 1 / 3), (0.02, 1 / 3), (0.03, 1 / 3)])
    res = run_ce(bundle)
    assert res.summary["monotone"] is True
    assert res.summary["limit"] == pytest.approx(9.0 / 550.0, rel=1e-14)
    assert res.summary["asymptotic_constant"] > 0.0
    assert res.summary["h_first"] > res.summary["h_last"]
    _, names, _ = parse_csv(res.files["ce.csv"])
    assert names == ["t", "h_t", "H", "arithmetic_mean"]


# ---------------------------------------------------------------------------
# figure presets
# ---------------------------------------------------------------------------

def test_figure1_crossing_at_ten():
    res = figure1()
    crossings = res.summary["component_crossings"]
    assert len(crossings) == 1
    assert crossings[0] == pytest.approx(10.0, abs=1e-6)


def test_figure1_mixture_between_components_and_above_min():
    res = figure1()
    assert res.summary["mixture_below_I1_somewhere"] is True
    assert res.summary["mixture_below_I2_somewhere"] is True
    assert res.summary["min_bound_violation"] <= 1e-9
    _, names, cols = parse_csv(res.files["figure1.csv"])
    assert names == ["t", "I_D1", "I_D2", "I_mixture"]
    t, i1, i2, imix = cols
    assert np.all(imix >= np.minimum(i1, i2) - 1e-9)


def test_figure2_endpoints_and_monotonicity():
    res = figure2()
    assert res.summary["r_at_0"] == 0.02
    assert res.summary["r_at_end"] == 0.01
    assert res.summary["nonincreasing"] is True
    assert res.summary["strictly_decreasing_while_resolvable"] is True
    assert res.summary["flat_tail_points"] > 0


def test_figure2_csv_reference_columns():
    res = figure2()
    _, names, cols = parse_csv(res.files["figure2.csv"])
    assert names == ["t", "r_t", "r_min", "r_mean"]
    t, r, rmin, rmean = cols
    assert np.all(rmin == 0.01)
    assert np.all(rmean == 0.02)
    assert np.all(r >= rmin)
    assert np.all(r <= rmean)


def test_figure3_limit_and_gap():
    res = figure3()
    assert res.summary["limit"] == pytest.approx(9.0 / 550.0, rel=1e-14)
    assert res.summary["monotone"] is True
    assert res.summary["relative_gap_at_end"] <= 1e-3
    assert res.summary["arithmetic_mean"] == pytest.approx(0.02, abs=1e-15)
    _, names, cols = parse_csv(res.files["figure3.csv"])
    assert names == ["t", "h_t", "H", "arithmetic_mean"]
    # the trajectory is sandwiched between its two limits
    assert np.all(cols[1] > cols[2])
    assert np.all(cols[1] < cols[3])


def test_household_period0_and_flip():
    res = household()
    assert res.summary["period0"] == {"earlier": 20.0, "later": 19.5}
    assert res.summary["choice_at_0"] == "earlier"
    assert res.summary["flip_at"] == 1
    assert res.summary["flips"] == 1
    assert res.summary["later_wins_for_all_t_geq_1"] is True


def test_household_csv_choice_column():
    res = household(horizon=50)
    _, names, cols = parse_csv(res.files["household.csv"])
    assert names == ["t", "aggregate_earlier", "aggregate_later", "later_preferred"]
    prefer = cols[3]
    assert prefer[0] == 0.0
    assert np.all(prefer[1:] == 1.0)
    assert len(prefer) == 51


def test_scenario_result_to_dict():
    res = household(horizon=3)
    d = res.to_dict()
    assert set(d) == {"summary", "files"}
    assert "household.csv" in d["files"]


def test_presets_are_deterministic():
    for fn in (figure1, figure2, figure3, household):
        a, b = fn(), fn()
        assert a.files == b.files
        assert a.summary == b.summary
