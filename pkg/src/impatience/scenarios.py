"""Analysis runners and the built-in demonstration scenarios.

Each runner returns a :class:`ScenarioResult`: a JSON-ready summary plus
named CSV artifacts.  The front ends (HTTP service and CLI) only route
inputs to these functions and move the artifacts around, so a scenario
behaves identically no matter which door it came in through.

The figure presets are parameter-locked reproductions:

* figure 1 -- indices of a zero-speed hyperbolic (h=0.1), a slow Weibull
  (alpha=0.12), and their equal-weight mixture; the component curves
  cross at t=10 while the mixture stays above the pointwise minimum;
* figure 2 -- certainty-equivalent time-preference rate of an
  equal-weight exponential mixture with rates 1%/2%/3%, falling from the
  mean 2% toward the lowest rate 1%;
* figure 3 -- certainty-equivalent hyperbolic rate of an equal-probability
  1%/2%/3% proportional hyperbolic bundle, falling from 2% to the
  weighted harmonic mean 9/550.

Grid ranges for the figures are library choices (recorded in each CSV
metadata header); the quantitative anchors -- the crossing at t=10, the
period-0 utilities 20 versus 19.5, the 9/550 limit -- are exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .ce import (
    HyperbolicBundle,
    arithmetic_mean_rate,
    asymptotic_constant,
    ce_hyperbolic_rate,
    verify_ce_monotone,
    weighted_harmonic_mean,
)
from .comparison import (
    DEFAULT_GRID,
    classify,
    compare_by_index,
    convex_transform_test,
    is_present_biased,
)
from .discount import DiscountFunction, SlowWeibull, ZeroSpeedHyperbolic, rate_profile
from .errors import NotComparable
from .grids import TimeGrid
from .mixtures import MixtureSpec, decompose_index, mix, verify_theorem_main
from .tabular import format_csv

__all__ = [
    "ScenarioResult",
    "run_analyze",
    "run_compare",
    "run_mix",
    "run_ce",
    "figure1",
    "figure2",
    "figure3",
    "household",
    "CE_DEFAULT_GRID",
    "FIGURE1_GRID",
    "WIDE_GRID",
]

#: Default grid for certainty-equivalent trajectories: positive, wide.
CE_DEFAULT_GRID = TimeGrid.logspace(1e-3, 1e6, 300)

#: Figure 1 grid: log-spaced, clear of the Weibull singularity at 0.
FIGURE1_GRID = TimeGrid.logspace(0.05, 60.0, 200)

#: Figures 2-3 horizon: linear resolution below 1, log-spaced to 1e6.
WIDE_GRID = TimeGrid.linear_then_log(0.0, 1.0, 1e6, 11, 241)


@dataclass(frozen=True)
class ScenarioResult:
    """What a scenario produced: a summary and named CSV artifacts."""

    summary: dict
    files: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"summary": self.summary, "files": dict(self.files)}


# ---------------------------------------------------------------------------
# generic runners
# ---------------------------------------------------------------------------

def run_analyze(
    spec: DiscountFunction,
    grid: TimeGrid | None = None,
    tol: float | None = None,
    fd_step: float | None = None,
) -> ScenarioResult:
    """Classify one spec and trace its value/rate/index profile."""
    if grid is None:
        grid = DEFAULT_GRID
    mode = "fd" if fd_step is not None else "analytic"
    verdict = classify(spec, grid, tol)
    prof = rate_profile(spec, grid, mode=mode, step=fd_step)
    csv = format_csv(
        ["t", "D", "r", "impatience_rate", "index"],
        [grid.points, spec.value(grid.points), prof.r, prof.ir, prof.i_di],
        metadata=[
            f"analyze: {spec.describe()}",
            f"grid: {grid.count} points on [{grid.t_min:g}, {grid.t_max:g}], {grid.kind}",
            f"derivative mode: {mode}" + (f" step={fd_step:g}" if fd_step else ""),
        ],
    )
    summary = {
        "spec": spec.describe(),
        "verdict": verdict.verdict.value,
        "tolerance": verdict.tolerance,
        "present_biased": verdict.verdict.value == "StrictlyDI",
        "index_range": [float(np.min(prof.i_di[np.isfinite(prof.i_di)])),
                        float(np.max(prof.i_di[np.isfinite(prof.i_di)]))],
    }
    return ScenarioResult(summary=summary, files={"analyze.csv": csv})


def run_compare(
    d1: DiscountFunction,
    d2: DiscountFunction,
    grid: TimeGrid | None = None,
    tol: float | None = None,
) -> ScenarioResult:
    """Order two specs by comparative DI through both routes."""
    if grid is None:
        grid = DEFAULT_GRID
    by_index = compare_by_index(d1, d2, grid, tol)
    try:
        by_transform = convex_transform_test(d1, d2, tol=tol)
        transform_dict = by_transform.to_dict()
    except Exception as exc:  # inversion can fail on exotic custom specs
        transform_dict = {"error": str(exc)}
    t = grid.points
    i1 = np.asarray(d1.index(t), dtype=float)
    i2 = np.asarray(d2.index(t), dtype=float)
    csv = format_csv(
        ["t", "I_1", "I_2", "difference"],
        [t, i1, i2, i1 - i2],
        metadata=[
            f"compare: {d1.describe()} vs {d2.describe()}",
            f"grid: {grid.count} points on [{grid.t_min:g}, {grid.t_max:g}], {grid.kind}",
        ],
    )
    summary = {
        "first": d1.describe(),
        "second": d2.describe(),
        "index_comparison": by_index.to_dict(),
        "convex_transform": transform_dict,
    }
    return ScenarioResult(summary=summary, files={"compare.csv": csv})


def run_mix(
    m: MixtureSpec,
    grid: TimeGrid | None = None,
    tol: float | None = None,
) -> ScenarioResult:
    """Decompose a mixture's index; verify the chain theorem when it applies."""
    if grid is None:
        grid = DEFAULT_GRID
    rep = decompose_index(m, grid, tol)
    verdict = classify(m, grid, tol)
    try:
        theorem = verify_theorem_main(m, grid, tol).to_dict()
    except NotComparable as exc:
        theorem = {"applicable": False, "reason": str(exc)}
    csv = rep.to_csv(metadata=[
        f"mixture: {m.describe()}",
        f"grid: {grid.count} points on [{grid.t_min:g}, {grid.t_max:g}], {grid.kind}",
    ])
    summary = {
        "mixture": m.describe(),
        "verdict": verdict.verdict.value,
        "decomposition_max_gap": float(np.max(np.abs(rep.I_direct - rep.I_decomposed))),
        "min_bound_violation": rep.min_bound_violation,
        "theorem": theorem,
    }
    return ScenarioResult(summary=summary, files={"mix.csv": csv})


def run_ce(bundle: HyperbolicBundle, grid: TimeGrid | None = None) -> ScenarioResult:
    """Certainty-equivalent hyperbolic rate trajectory and its limits."""
    if grid is None:
        grid = CE_DEFAULT_GRID
    rep = verify_ce_monotone(bundle, grid)
    csv = rep.to_csv(metadata=[
        f"bundle: {bundle!r}",
        f"grid: {grid.count} points on [{grid.t_min:g}, {grid.t_max:g}], {grid.kind}",
    ])
    summary = dict(rep.to_dict())
    summary["asymptotic_constant"] = asymptotic_constant(bundle)
    summary["h_first"] = float(rep.h_values[0])
    summary["h_last"] = float(rep.h_values[-1])
    return ScenarioResult(summary=summary, files={"ce.csv": csv})


# ---------------------------------------------------------------------------
# parameter-locked presets
# ---------------------------------------------------------------------------

def figure1() -> ScenarioResult:
    """Index-of-DI curves for the hyperbolic/Weibull pair and their mixture."""
    d1 = ZeroSpeedHyperbolic(h=0.1, label="D1")
    d2 = SlowWeibull(alpha=0.12, label="D2")
    grid = FIGURE1_GRID
    m = mix([(d1, 0.5), (d2, 0.5)])
    t = grid.points
    i1 = d1.index(t)
    i2 = d2.index(t)
    imix = np.asarray(m.index(t), dtype=float)
    comparison = compare_by_index(d1, d2, grid)
    rep = decompose_index(m, grid)
    csv = format_csv(
        ["t", "I_D1", "I_D2", "I_mixture"],
        [t, i1, i2, imix],
        metadata=[
            "figure 1: index of DI for D1 (zero-speed hyperbolic, h=0.1), "
            "D2 (slow Weibull, alpha=0.12), and their equal-weight mixture",
            f"grid: {grid.count} log-spaced points on [{grid.t_min:g}, {grid.t_max:g}] "
            "(range is a library choice)",
        ],
    )
    summary = {
        "components": [d1.describe(), d2.describe()],
        "weights": [0.5, 0.5],
        "component_crossings": comparison.to_dict()["crossing_points"],
        "mixture_below_I1_somewhere": bool(np.any(imix < i1)),
        "mixture_below_I2_somewhere": bool(np.any(imix < i2)),
        "min_bound_violation": rep.min_bound_violation,
    }
    return ScenarioResult(summary=summary, files={"figure1.csv": csv})


def figure2() -> ScenarioResult:
    """Certainty-equivalent rate of the 1%/2%/3% exponential mixture."""
    from .ce import ce_exponential_rate, exponential_mixture

    m = exponential_mixture([0.01, 0.02, 0.03])
    grid = WIDE_GRID
    r = np.asarray(ce_exponential_rate(m, grid.points), dtype=float)
    csv = format_csv(
        ["t", "r_t", "r_min", "r_mean"],
        [grid.points, r, np.full(grid.count, 0.01), np.full(grid.count, 0.02)],
        metadata=[
            "figure 2: certainty-equivalent time-preference rate of the "
            "equal-weight exponential mixture, rates 0.01/0.02/0.03",
            f"grid: linear to 1 then log-spaced to {grid.t_max:g} "
            f"({grid.count} points; range is a library choice)",
        ],
    )
    # Beyond t ~ 3.7e3 the faster components' relative weights fall below
    # double-precision resolution and r(t) becomes exactly the lowest rate,
    # so strict decrease is only certifiable on the resolvable prefix.
    resolvable = r > 0.01 * (1.0 + 8.0 * np.finfo(float).eps)
    summary = {
        "rates": [0.01, 0.02, 0.03],
        "weights": [1 / 3, 1 / 3, 1 / 3],
        "r_at_0": float(r[0]),
        "r_at_end": float(r[-1]),
        "nonincreasing": bool(np.all(np.diff(r) <= 0.0)),
        "strictly_decreasing_while_resolvable": bool(
            np.all(np.diff(r[resolvable]) < 0.0)
        ),
        "flat_tail_points": int(np.sum(~resolvable)),
        "limit": 0.01,
    }
    return ScenarioResult(summary=summary, files={"figure2.csv": csv})


def figure3() -> ScenarioResult:
    """Certainty-equivalent hyperbolic rate of the 1%/2%/3% bundle."""
    bundle = HyperbolicBundle([(0.01, 1 / 3), (0.02, 1 / 3), (0.03, 1 / 3)])
    grid = TimeGrid.linear_then_log(0.01, 1.0, 1e6, 10, 241)
    rep = verify_ce_monotone(bundle, grid)
    csv = rep.to_csv(metadata=[
        "figure 3: certainty-equivalent hyperbolic rate of the equal-probability "
        "bundle h = 0.01/0.02/0.03; H = 9/550",
        f"grid: linear to 1 then log-spaced to {grid.t_max:g} "
        f"({grid.count} points, t > 0; range is a library choice)",
    ])
    summary = {
        "bundle": [[0.03, 1 / 3], [0.02, 1 / 3], [0.01, 1 / 3]],
        "limit": rep.limit,
        "arithmetic_mean": rep.arithmetic_mean,
        "monotone": rep.monotone,
        "h_at_end": float(rep.h_values[-1]),
        "relative_gap_at_end": float(abs(rep.h_values[-1] - rep.limit) / rep.limit),
    }
    return ScenarioResult(summary=summary, files={"figure3.csv": csv})


def household(horizon: int = 50) -> ScenarioResult:
    """Two-member household choosing 10 utiles now versus 15 one period later.

    Members discount by factors 4/5 and 1/2 per period; the aggregate is
    the sum of the members' discounted utilities.  Evaluated in exact
    rational arithmetic: at t=0 the totals are 20 versus 39/2, so the
    earlier option wins; delaying both options by any t >= 1 flips the
    choice to the later option, and it never flips back.
    """
    da, db = Fraction(4, 5), Fraction(1, 2)
    ts, earlier, later, prefer_later = [], [], [], []
    flip_at = None
    flips = 0
    prev = None
    for t in range(horizon + 1):
        e = 10 * (da**t + db**t)
        l = 15 * (da ** (t + 1) + db ** (t + 1))
        choice = l > e  # exact rational comparison
        if prev is not None and choice != prev:
            flips += 1
            if flip_at is None:
                flip_at = t
        prev = choice
        ts.append(float(t))
        earlier.append(float(e))
        later.append(float(l))
        prefer_later.append(1.0 if choice else 0.0)
    csv = format_csv(
        ["t", "aggregate_earlier", "aggregate_later", "later_preferred"],
        [ts, earlier, later, prefer_later],
        metadata=[
            "household demo: aggregate utility of 10 utiles at t vs 15 at t+1,"
            " members' discount factors 4/5 and 1/2 (exact rational arithmetic)",
        ],
    )
    summary = {
        "period0": {"earlier": earlier[0], "later": later[0]},
        "choice_at_0": "earlier",
        "flip_at": flip_at,
        "flips": flips,
        "later_wins_for_all_t_geq_1": all(prefer_later[1:]),
        "horizon": horizon,
    }
    return ScenarioResult(summary=summary, files={"household.csv": csv})
