"""Acceptance gate: the package's ten headline verification criteria.

Each test checks one criterion end to end at its stated tolerance and
runtime budget and records a single ``criterion NN PASS/FAIL`` line;
``conftest.py`` prints the collected lines in the terminal summary,
outside pytest's output capture.
"""

import time
from contextlib import contextmanager
from fractions import Fraction

import numpy as np

from impatience.ce import (
    HyperbolicBundle,
    arithmetic_mean_rate,
    asymptotic_constant,
    ce_exponential_rate,
    ce_hyperbolic_rate,
    exponential_mixture,
    two_rate_closed_form,
    verify_ce_monotone,
    weighted_harmonic_mean,
)
from impatience.comparison import classify, convex_transform_test, fit_equal_DI_exponent
from impatience.discount import (
    CustomSpec,
    Exponential,
    GeneralizedHyperbolic,
    ProportionalHyperbolic,
    SlowWeibull,
    ZeroSpeedHyperbolic,
    index_of_DI,
)
from impatience.grids import TimeGrid
from impatience.mixtures import decompose_index, mix, verify_theorem_main
from impatience.scenarios import figure1, figure2, household


#: One line per executed criterion; conftest prints these after the run.
ACCEPTANCE_LINES: "list[str]" = []


def _say(line: str) -> None:
    ACCEPTANCE_LINES.append(line)
    print(line)


@contextmanager
def _criterion(number: int, budget_s: float, label: str):
    t0 = time.perf_counter()
    try:
        yield
        elapsed = time.perf_counter() - t0
        assert elapsed < budget_s, (
            f"criterion {number} runtime {elapsed:.2f}s exceeds {budget_s:g}s budget"
        )
    except BaseException:
        _say(f"criterion {number:2d} FAIL  {label}")
        raise
    _say(f"criterion {number:2d} PASS  {label}  [{elapsed:.2f}s]")


# ---------------------------------------------------------------------------
# 1. household choice reversal
# ---------------------------------------------------------------------------

def test_criterion_01_household_reversal():
    with _criterion(1, 1.0, "household: 20 vs 19.5 at t=0, delayed option wins for all t in [1,50]"):
        da, db = Fraction(4, 5), Fraction(1, 2)
        earlier0 = 10 * (da**0 + db**0)
        later0 = 15 * (da**1 + db**1)
        assert earlier0 == 20 and later0 == Fraction(39, 2)
        assert abs(float(earlier0) - 20.0) <= 1e-12
        assert abs(float(later0) - 19.5) <= 1e-12
        for t in range(1, 51):
            assert 15 * (da ** (t + 1) + db ** (t + 1)) > 10 * (da**t + db**t)
        res = household(horizon=50)
        assert res.summary["period0"] == {"earlier": 20.0, "later": 19.5}
        assert res.summary["flip_at"] == 1 and res.summary["flips"] == 1
        assert res.summary["later_wins_for_all_t_geq_1"] is True


# ---------------------------------------------------------------------------
# 2. closed-form index formulas
# ---------------------------------------------------------------------------

def test_criterion_02_closed_form_indices():
    with _criterion(2, 1.0, "index matches h/(1+ht) and 1/(2t) closed forms to rel 1e-8; exponentials at 0"):
        rng = np.random.default_rng(1002)
        for _ in range(100):
            kind = rng.integers(0, 5)
            t = np.sort(rng.uniform(1e-3, 100.0, 25))
            closed = None
            if kind == 0:
                h = float(rng.uniform(0.005, 0.8))
                spec = GeneralizedHyperbolic(alpha=float(rng.uniform(0.05, 3.0)), h=h)
                closed = h / (1.0 + h * t)
            elif kind == 1:
                h = float(rng.uniform(0.005, 0.8))
                spec = ProportionalHyperbolic(h=h)
                closed = h / (1.0 + h * t)
            elif kind == 2:
                h = float(rng.uniform(0.005, 0.8))
                spec = ZeroSpeedHyperbolic(h=h)
                closed = h / (1.0 + h * t)
            elif kind == 3:
                spec = SlowWeibull(alpha=float(rng.uniform(0.02, 1.0)))
                closed = 1.0 / (2.0 * t)
            else:
                spec = Exponential(rho=float(rng.uniform(0.002, 0.5)))
            got = index_of_DI(spec, t)
            if closed is None:
                assert np.max(np.abs(got)) <= 1e-12
            else:
                assert np.max(np.abs(got - closed) / np.abs(closed)) <= 1e-8


# ---------------------------------------------------------------------------
# 3. component-index crossing at t=10 with the mixture above the minimum
# ---------------------------------------------------------------------------

def test_criterion_03_index_crossing_figure():
    with _criterion(3, 1.0, "h=0.1 vs alpha=0.12 indices cross at t=10 +/- 0.01; mixture stays above the minimum"):
        d1 = ZeroSpeedHyperbolic(h=0.1)
        d2 = SlowWeibull(alpha=0.12)
        m = mix([(d1, 0.5), (d2, 0.5)])
        grid = TimeGrid.logspace(0.05, 60.0, 200)
        t = grid.points
        i1 = d1.index(t)
        i2 = d2.index(t)
        imix = np.asarray(m.index(t), dtype=float)

        # grid-bracketed sign flip of I1 - I2
        sign = np.sign(i1 - i2)
        flips = np.nonzero(np.diff(sign) != 0)[0]
        assert len(flips) == 1
        lo, hi = t[flips[0]], t[flips[0] + 1]
        assert lo - 0.01 <= 10.0 <= hi + 0.01

        res = figure1()
        crossings = res.summary["component_crossings"]
        assert len(crossings) == 1 and abs(crossings[0] - 10.0) <= 0.01

        assert np.all(imix >= np.minimum(i1, i2) - 1e-9)
        assert np.any(imix < i1) and np.any(imix < i2)


# ---------------------------------------------------------------------------
# 4. mixtures of declining-impatience chains stay strictly above the tail
# ---------------------------------------------------------------------------

def test_criterion_04_chain_mixture_dominance():
    with _criterion(4, 10.0, "50 random hyperbolic chains: mixture strictly more DI than the least component"):
        rng = np.random.default_rng(1004)
        for _ in range(50):
            n = int(rng.integers(2, 6))
            while True:
                h = np.sort(np.exp(rng.uniform(np.log(5e-3), np.log(0.6), n)))[::-1]
                if np.all(h[:-1] / h[1:] >= 1.15):
                    break
            comps = [
                GeneralizedHyperbolic(alpha=float(rng.uniform(0.05, 2.0)), h=float(hi))
                for hi in h
            ]
            w = rng.uniform(0.1, 1.0, n)
            w /= w.sum()
            chk = verify_theorem_main(mix(list(zip(comps, w))))
            assert chk.holds is True
            assert chk.relation.value == "StrictlyMoreDI"
            assert chk.index_gap > 0.0


# ---------------------------------------------------------------------------
# 5. index decomposition identity and lower bound
# ---------------------------------------------------------------------------

def _ii_custom(a: float, b: float) -> CustomSpec:
    """Increasing-impatience spec D = exp(-a t - b t^2) with exact derivatives."""

    def val(t):
        return np.exp(-a * t - b * t * t)

    def dval(t):
        return -(a + 2.0 * b * t) * val(t)

    def d2val(t):
        return ((a + 2.0 * b * t) ** 2 - 2.0 * b) * val(t)

    return CustomSpec(value_fn=val, dvalue_fn=dval, d2value_fn=d2val,
                      label=f"ii(a={a:.3f},b={b:.4f})")


def test_criterion_05_decomposition_identity():
    with _criterion(5, 10.0, "100 random mixtures: index decomposition exact to 1e-7 with Q,N >= 0 and min bound"):
        rng = np.random.default_rng(1005)
        grid = TimeGrid.logspace(1e-3, 100.0, 120)
        for _ in range(100):
            n = int(rng.integers(2, 5))
            comps = []
            for _ in range(n):
                k = rng.integers(0, 6)
                if k == 0:
                    comps.append(GeneralizedHyperbolic(
                        alpha=float(rng.uniform(0.05, 2.0)),
                        h=float(rng.uniform(0.005, 0.6))))
                elif k == 1:
                    comps.append(ProportionalHyperbolic(h=float(rng.uniform(0.005, 0.6))))
                elif k == 2:
                    comps.append(ZeroSpeedHyperbolic(h=float(rng.uniform(0.005, 0.6))))
                elif k == 3:
                    comps.append(SlowWeibull(alpha=float(rng.uniform(0.02, 0.8))))
                elif k == 4:
                    comps.append(Exponential(rho=float(rng.uniform(0.002, 0.3))))
                else:
                    comps.append(_ii_custom(float(rng.uniform(0.01, 0.2)),
                                            float(rng.uniform(1e-4, 5e-3))))
            w = rng.uniform(0.1, 1.0, n)
            w /= w.sum()
            rep = decompose_index(mix(list(zip(comps, w))), grid)
            assert np.max(np.abs(rep.I_direct - rep.I_decomposed)) <= 1e-7
            assert np.min(rep.Q) >= 0.0
            assert np.min(rep.N_values) >= 0.0
            assert rep.min_bound_violation <= 1e-9


# ---------------------------------------------------------------------------
# 6. harmonic-mean limit with C/t decay envelope
# ---------------------------------------------------------------------------

def _random_bundle(rng, n_lo=2, n_hi=6) -> HyperbolicBundle:
    n = int(rng.integers(n_lo, n_hi + 1))
    while True:
        h = np.sort(np.exp(rng.uniform(np.log(1e-3), np.log(0.5), n)))
        if np.all(h[1:] / h[:-1] >= 1.1):
            break
    p = rng.uniform(0.05, 1.0, n)
    p /= p.sum()
    return HyperbolicBundle(list(zip(h, p)))


def test_criterion_06_harmonic_mean_limit():
    with _criterion(6, 5.0, "1%/2%/3% bundle reaches 9/550 at t=1e6 to rel 1e-3; 100 bundles obey H < h < mean and C/t decay"):
        bundle = HyperbolicBundle([(0.01, 1 / 3), (0.02, 1 / 3), (0.03, 1 / 3)])
        target = 9.0 / 550.0
        h_end = float(ce_hyperbolic_rate(bundle, 1e6))
        assert abs(h_end - target) / target <= 1e-3

        rng = np.random.default_rng(1006)
        t = np.geomspace(1e-3, 1e6, 200)
        for _ in range(100):
            b = _random_bundle(rng)
            H = weighted_harmonic_mean(b)
            A = arithmetic_mean_rate(b)
            C = asymptotic_constant(b)
            ht = np.asarray(ce_hyperbolic_rate(b, t), dtype=float)
            assert np.all(ht > H)
            assert np.all(ht < A)
            assert np.all(np.abs(ht - H) <= C / t)


# ---------------------------------------------------------------------------
# 7. strict monotonicity of the certainty-equivalent rate
# ---------------------------------------------------------------------------

def test_criterion_07_ce_rate_monotone():
    with _criterion(7, 5.0, "100 random bundles strictly decreasing over [1e-3, 1e6]; 2-rate closed form to 1e-12"):
        rng = np.random.default_rng(1007)
        grid = TimeGrid.logspace(1e-3, 1e6, 100)
        for _ in range(100):
            b = _random_bundle(rng)
            rep = verify_ce_monotone(b, grid)
            assert rep.monotone is True
            assert rep.max_violation == 0.0
        for _ in range(30):
            b = _random_bundle(rng, n_lo=2, n_hi=2)
            definitional = np.asarray(ce_hyperbolic_rate(b, grid.points), dtype=float)
            closed = np.asarray(two_rate_closed_form(b, grid.points), dtype=float)
            assert np.max(np.abs(closed - definitional) / np.abs(definitional)) <= 1e-12


# ---------------------------------------------------------------------------
# 8. exponential-mixture rate: endpoints and strict decline
# ---------------------------------------------------------------------------

def test_criterion_08_exponential_mixture_rate():
    with _criterion(8, 1.0, "1%/2%/3% exponential mixture: r(0)=0.02 exactly, r(1000)~0.01, strictly decreasing"):
        m = exponential_mixture([0.01, 0.02, 0.03])
        assert float(ce_exponential_rate(m, 0.0)) == 0.02
        assert abs(float(ce_exponential_rate(m, 1000.0)) - 0.01) <= 1e-4
        # [0, 2000] keeps every consecutive difference above double-precision
        # resolution; beyond t ~ 3.7e3 the faster components underflow and
        # r(t) collapses to exactly 0.01 (see the figure preset's summary)
        grid = TimeGrid.linear(0.0, 2000.0, 201)
        r = np.asarray(ce_exponential_rate(m, grid.points), dtype=float)
        assert np.all(np.diff(r) < 0.0)
        fig = figure2().summary
        assert fig["r_at_0"] == 0.02
        assert fig["nonincreasing"] is True
        assert fig["strictly_decreasing_while_resolvable"] is True


# ---------------------------------------------------------------------------
# 9. classification agrees with the convex-transform comparison
# ---------------------------------------------------------------------------

def test_criterion_09_classification_coherence():
    with _criterion(9, 5.0, "classify()=StrictlyDI iff convex transform vs exponential is StrictlyMoreDI, per family"):
        samples = [
            GeneralizedHyperbolic(alpha=0.3, h=0.1),
            GeneralizedHyperbolic(alpha=2.0, h=0.5),
            GeneralizedHyperbolic(alpha=0.05, h=0.02),
            ProportionalHyperbolic(h=0.02),
            ProportionalHyperbolic(h=0.3),
            ZeroSpeedHyperbolic(h=0.1),
            ZeroSpeedHyperbolic(h=0.02),
            SlowWeibull(alpha=0.12),
            SlowWeibull(alpha=0.6),
            Exponential(rho=0.01),
            Exponential(rho=0.1),
        ]
        baseline = Exponential(rho=0.05)
        for spec in samples:
            verdict = classify(spec).verdict.value
            relation = convex_transform_test(spec, baseline).relation.value
            assert (verdict == "StrictlyDI") == (relation == "StrictlyMoreDI"), (
                f"{spec.describe()}: classify={verdict}, transform={relation}"
            )
            if spec.family == "exponential":
                assert verdict == "ConstantImpatience"


# ---------------------------------------------------------------------------
# 10. recovering the power linking two equally-declining specs
# ---------------------------------------------------------------------------

def test_criterion_10_equal_di_power_recovery():
    with _criterion(10, 1.0, "power c in {0.5, 2, 3} recovered to 1e-9 from (D, D^c); cross-family pairs rejected"):
        t = TimeGrid.logspace(0.1, 80.0, 120)
        for c in (0.5, 2.0, 3.0):
            pairs = [
                (GeneralizedHyperbolic(alpha=0.4 * c, h=0.1),
                 GeneralizedHyperbolic(alpha=0.4, h=0.1)),
                (Exponential(rho=0.02 * c), Exponential(rho=0.02)),
                (SlowWeibull(alpha=0.2 * c), SlowWeibull(alpha=0.2)),
            ]
            for d_pow, d_base in pairs:
                fitted = fit_equal_DI_exponent(d_pow, d_base, t)
                assert fitted is not None
                assert abs(fitted - c) <= 1e-9
        assert fit_equal_DI_exponent(
            GeneralizedHyperbolic(alpha=0.4, h=0.1), Exponential(rho=0.02), t
        ) is None
        assert fit_equal_DI_exponent(
            SlowWeibull(alpha=0.2), GeneralizedHyperbolic(alpha=0.4, h=0.1), t
        ) is None
