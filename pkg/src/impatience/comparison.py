"""Classification of impatience patterns and comparative-DI ordering.

A discount function exhibits decreasing impatience (DI) exactly when
ln D is convex, increasing impatience (II) when it is concave, and
constant impatience (the exponential case) when it is linear.  The
numeric predicate is the sign pattern of second divided differences of
ln D along a grid.

Two functions are ordered by comparative DI through either of two
routes:

* ``compare_by_index`` -- pointwise comparison of the index of DI,
  -rate'/rate, with crossing points refined by root bracketing;
* ``convex_transform_test`` -- convexity of the transform
  phi(z) = ln D1(D2^{-1}(e^z)) on z <= 0, with D2 inverted
  numerically.

Strictness ("the equality set contains no non-trivial interval") is
approximated by a run-length rule: a verdict is strict when no more
than ``MAX_FLAT_RUN`` consecutive grid points are flat at the working
tolerance, certified only on grids of at least ``MIN_STRICT_GRID``
points.  Longer flat stretches are treated as genuine tangency and
downgrade the verdict to its weak form.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .discount import DiscountFunction, Exponential
from .errors import (
    DegenerateInput,
    DomainError,
    GridTooCoarse,
    InversionFailure,
)
from .grids import TimeGrid

__all__ = [
    "DIVerdict",
    "DIRelation",
    "DIClassification",
    "ComparisonVerdict",
    "classify",
    "is_present_biased",
    "compare_by_index",
    "convex_transform_test",
    "fit_equal_DI_exponent",
    "invert_discount",
    "z_grid_from_time_grid",
    "default_tolerance",
    "MAX_FLAT_RUN",
    "MIN_STRICT_GRID",
    "DEFAULT_GRID",
]

#: Longest run of flat (within-tolerance) interior points that still counts
#: as a measure-zero equality set rather than a tangency interval.
MAX_FLAT_RUN = 3

#: Minimum grid size on which strict verdicts are certified.
MIN_STRICT_GRID = 200

#: Shared default analysis grid: log-spaced, wide enough for both the
#: near-zero transient and the asymptotic regime.
DEFAULT_GRID = TimeGrid.logspace(1e-3, 100.0, 400)

_ANALYTIC_TOL = 1e-9
_CUSTOM_TOL = 1e-5


class DIVerdict(str, enum.Enum):
    STRICTLY_DI = "StrictlyDI"
    DI = "DI"
    CONSTANT_IMPATIENCE = "ConstantImpatience"
    II = "II"
    STRICTLY_II = "StrictlyII"
    INDETERMINATE = "Indeterminate"


class DIRelation(str, enum.Enum):
    STRICTLY_MORE_DI = "StrictlyMoreDI"
    MORE_DI = "MoreDI"
    EQUALLY_DI = "EquallyDI"
    STRICTLY_LESS_DI = "StrictlyLessDI"
    LESS_DI = "LessDI"
    INCOMPARABLE = "Incomparable"


def default_tolerance(*specs: DiscountFunction) -> float:
    """1e-9 when every spec has closed-form derivatives, 1e-5 otherwise."""
    if any(s.family == "custom" for s in specs):
        return _CUSTOM_TOL
    return _ANALYTIC_TOL


@dataclass(frozen=True)
class DIClassification:
    verdict: DIVerdict
    evidence: list  # (t, sign of second divided difference of ln D) pairs
    tolerance: float

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "tolerance": self.tolerance,
            "evidence": [[t, s] for t, s in self.evidence],
        }


@dataclass(frozen=True)
class ComparisonVerdict:
    relation: DIRelation
    crossing_points: list = field(default_factory=list)
    exponent: float | None = None  # fitted c for EquallyDI
    method: str = "IndexComparison"

    def to_dict(self) -> dict:
        return {
            "relation": self.relation.value,
            "crossing_points": sorted(self.crossing_points),
            "exponent": self.exponent,
            "method": self.method,
        }

    def flipped(self) -> "ComparisonVerdict":
        """The same comparison seen from the other operand."""
        swap = {
            DIRelation.STRICTLY_MORE_DI: DIRelation.STRICTLY_LESS_DI,
            DIRelation.STRICTLY_LESS_DI: DIRelation.STRICTLY_MORE_DI,
            DIRelation.MORE_DI: DIRelation.LESS_DI,
            DIRelation.LESS_DI: DIRelation.MORE_DI,
        }
        rel = swap.get(self.relation, self.relation)
        exp = self.exponent
        if rel is DIRelation.EQUALLY_DI and exp:
            exp = 1.0 / exp
        return ComparisonVerdict(rel, list(self.crossing_points), exp, self.method)


# ---------------------------------------------------------------------------
# curvature machinery
# ---------------------------------------------------------------------------

def _curvature_signs(x: np.ndarray, y: np.ndarray, tol: float):
    """Signs of second divided differences of y over x.

    Returns (interior x, signs in {-1, 0, +1}); the zero band scales with
    the local slopes so the test is invariant to rescaling y.
    """
    if x.size < 3:
        raise GridTooCoarse("curvature needs at least 3 grid points")
    dx = np.diff(x)
    slopes = np.diff(y) / dx
    curv = 2.0 * (slopes[1:] - slopes[:-1]) / (x[2:] - x[:-2])
    thresh = tol * np.maximum(1.0, np.maximum(np.abs(slopes[1:]), np.abs(slopes[:-1])))
    # Roundoff floor: y values carry a few ulps of error, which divided
    # differences amplify by 1/(dx_L * dx_R); below this the sign of the
    # curvature estimate is meaningless regardless of the tolerance.
    eps = np.finfo(float).eps
    floor = 32.0 * eps * np.maximum(1.0, np.abs(y[1:-1])) / (dx[1:] * dx[:-1])
    thresh = np.maximum(thresh, floor)
    signs = np.zeros(curv.shape, dtype=int)
    signs[curv > thresh] = 1
    signs[curv < -thresh] = -1
    return x[1:-1], signs


def _longest_interior_zero_run(signs: np.ndarray) -> int:
    """Longest flat run strictly between definite-sign points.

    Leading and trailing flat stretches are ignored: there the signal has
    decayed below the noise floor (an exponential-mixture index tail, for
    instance), which says nothing about a tangency interval.  Only a flat
    run bracketed by definite signs is evidence of genuine touching.
    """
    definite = np.nonzero(signs != 0)[0]
    if definite.size == 0:
        return len(signs)
    inner = signs[definite[0]: definite[-1] + 1]
    longest = run = 0
    for s in inner:
        run = run + 1 if s == 0 else 0
        longest = max(longest, run)
    return longest


def _shape_verdict(signs: np.ndarray, certify_strict: bool) -> DIVerdict:
    has_pos = bool(np.any(signs > 0))
    has_neg = bool(np.any(signs < 0))
    if has_pos and has_neg:
        return DIVerdict.INDETERMINATE
    if not has_pos and not has_neg:
        return DIVerdict.CONSTANT_IMPATIENCE
    strict = certify_strict and _longest_interior_zero_run(signs) <= MAX_FLAT_RUN
    if has_pos:
        return DIVerdict.STRICTLY_DI if strict else DIVerdict.DI
    return DIVerdict.STRICTLY_II if strict else DIVerdict.II


def classify(
    spec: DiscountFunction,
    grid: TimeGrid | None = None,
    tol: float | None = None,
) -> DIClassification:
    """Verdict on the impatience pattern of a single discount function.

    Second divided differences of ln D decide the shape; when the spec
    carries derivatives, the sign of the index of DI on the interior
    points is cross-checked and a contradiction demotes the verdict to
    Indeterminate.
    """
    if grid is None:
        grid = DEFAULT_GRID
    if tol is None:
        tol = default_tolerance(spec)
    t = grid.points
    y = spec.log_value(t)
    interior, signs = _curvature_signs(t, y, tol)
    verdict = _shape_verdict(signs, certify_strict=grid.count >= MIN_STRICT_GRID)

    verdict = _cross_check_with_index(spec, interior, verdict, tol)
    evidence = list(zip(interior.tolist(), signs.tolist()))
    return DIClassification(verdict=verdict, evidence=evidence, tolerance=tol)


def _cross_check_with_index(spec, interior, verdict, tol) -> DIVerdict:
    """Demote curvature verdicts contradicted by the sign of -rate'/rate."""
    if verdict is DIVerdict.INDETERMINATE:
        return verdict
    pts = interior[interior > 0.0] if spec.singular_at_zero else interior
    if pts.size == 0:
        return verdict
    try:
        idx = np.asarray(spec.index(pts), dtype=float)
    except Exception:
        return verdict  # no usable derivative route; curvature stands
    band = tol * np.maximum(1.0, np.abs(idx).max())
    if verdict in (DIVerdict.STRICTLY_DI, DIVerdict.DI) and idx.min() < -band:
        return DIVerdict.INDETERMINATE
    if verdict in (DIVerdict.STRICTLY_II, DIVerdict.II) and idx.max() > band:
        return DIVerdict.INDETERMINATE
    if verdict is DIVerdict.CONSTANT_IMPATIENCE and np.abs(idx).max() > max(band, 1e-6):
        return DIVerdict.INDETERMINATE
    return verdict


def is_present_biased(
    spec: DiscountFunction,
    grid: TimeGrid | None = None,
    tol: float | None = None,
) -> bool:
    """True exactly when the spec classifies StrictlyDI."""
    return classify(spec, grid, tol).verdict is DIVerdict.STRICTLY_DI


# ---------------------------------------------------------------------------
# inversion
# ---------------------------------------------------------------------------

def invert_discount(
    spec: DiscountFunction,
    target: float,
    tol: float = 1e-12,
    max_iter: int = 200,
) -> float:
    """t with D(t) = target, for target in (0, 1].

    Bisection in log space on [0, T] with T doubled until bracketed
    (strict decrease of D guarantees this when the target is reachable),
    interval tolerance ``tol * max(1, t)``, then a Newton polish using
    the rate to pull the root to machine precision.
    """
    if not (0.0 < target <= 1.0):
        raise InversionFailure(f"discount values lie in (0,1], got {target}")
    z = math.log(target)
    if z == 0.0:
        return 0.0
    hi_cap = getattr(spec, "t_hi", math.inf)
    lo, hi = 0.0, min(1.0, hi_cap)
    grow = 0
    while spec.log_value(hi) > z:
        if hi >= hi_cap:
            raise InversionFailure(
                f"target {target} below the range of {spec.describe()} on its domain"
            )
        lo, hi = hi, min(2.0 * hi, hi_cap)
        grow += 1
        if grow > max_iter:
            raise InversionFailure(f"could not bracket target {target}")
    for _ in range(max_iter):
        if hi - lo <= tol * max(1.0, hi):
            break
        mid = 0.5 * (lo + hi)
        if spec.log_value(mid) > z:
            lo = mid
        else:
            hi = mid
    t = 0.5 * (lo + hi)
    # Newton polish on g(t) - z = 0 with g = ln D, g' = -rate: since g is
    # decreasing, g(t) > z means t is short of the root.
    for _ in range(2):
        if t <= 0.0:
            break
        try:
            r = spec.rate(t)
        except Exception:
            break
        if not np.isfinite(r) or r <= 0.0:
            break
        t_new = t + (spec.log_value(t) - z) / r
        if not np.isfinite(t_new) or t_new < 0.0 or t_new > hi_cap:
            break
        t = t_new
    return float(t)


# ---------------------------------------------------------------------------
# comparative DI
# ---------------------------------------------------------------------------

def fit_equal_DI_exponent(
    d1: DiscountFunction,
    d2: DiscountFunction,
    grid: TimeGrid | None = None,
    tol: float | None = None,
) -> float | None:
    """Fit c > 0 with D1 = D2^c; None when no such power fits.

    c is the median of ln D1 / ln D2 over the grid; acceptance requires
    |ln D1 - c ln D2| <= tol * |ln D2| at every point.
    """
    if grid is None:
        grid = DEFAULT_GRID
    if tol is None:
        tol = default_tolerance(d1, d2)
    t = grid.points
    if np.any(t <= 0.0):
        raise DegenerateInput("equal-DI fitting needs t > 0 (ln D2 must not vanish)")
    l1 = np.asarray(d1.log_value(t), dtype=float)
    l2 = np.asarray(d2.log_value(t), dtype=float)
    c = float(np.median(l1 / l2))
    if not math.isfinite(c) or c <= 0.0:
        return None
    if np.all(np.abs(l1 - c * l2) <= tol * np.abs(l2)):
        return c
    return None


def _definite_sign_array(diff: np.ndarray, scale: np.ndarray, tol: float) -> np.ndarray:
    thresh = tol * np.maximum(1.0, scale)
    signs = np.zeros(diff.shape, dtype=int)
    signs[diff > thresh] = 1
    signs[diff < -thresh] = -1
    return signs


def _refine_crossings(f, t: np.ndarray, signs: np.ndarray) -> list:
    """Root-refine each definite sign change of f along t."""
    crossings = []
    definite = np.nonzero(signs != 0)[0]
    for a, b in zip(definite[:-1], definite[1:]):
        if signs[a] * signs[b] < 0:
            crossings.append(float(brentq(f, t[a], t[b], xtol=1e-12, rtol=1e-14)))
    return sorted(crossings)


def compare_by_index(
    d1: DiscountFunction,
    d2: DiscountFunction,
    grid: TimeGrid | None = None,
    tol: float | None = None,
) -> ComparisonVerdict:
    """Order two discount functions by pointwise index of DI.

    StrictlyMoreDI / MoreDI when I1 >= I2 across the grid (strict under
    the flat-run rule); EquallyDI with the fitted exponent when the
    indices coincide; Incomparable, with refined crossing times, when
    the sign of I1 - I2 flips.
    """
    if grid is None:
        grid = DEFAULT_GRID
    if tol is None:
        tol = default_tolerance(d1, d2)
    t = grid.points
    i1 = np.asarray(d1.index(t), dtype=float)
    i2 = np.asarray(d2.index(t), dtype=float)
    signs = _definite_sign_array(i1 - i2, np.maximum(np.abs(i1), np.abs(i2)), tol)

    has_pos = bool(np.any(signs > 0))
    has_neg = bool(np.any(signs < 0))
    if has_pos and has_neg:
        crossings = _refine_crossings(
            lambda x: float(d1.index(x)) - float(d2.index(x)), t, signs
        )
        return ComparisonVerdict(DIRelation.INCOMPARABLE, crossing_points=crossings)
    if not has_pos and not has_neg:
        fit_grid = grid if grid.t_min > 0.0 else TimeGrid(points=t[t > 0.0])
        c = fit_equal_DI_exponent(d1, d2, fit_grid, tol)
        if c is not None:
            return ComparisonVerdict(DIRelation.EQUALLY_DI, exponent=c)
        return ComparisonVerdict(DIRelation.MORE_DI)
    certify = grid.count >= MIN_STRICT_GRID and _longest_interior_zero_run(signs) <= MAX_FLAT_RUN
    if has_pos:
        rel = DIRelation.STRICTLY_MORE_DI if certify else DIRelation.MORE_DI
    else:
        rel = DIRelation.STRICTLY_LESS_DI if certify else DIRelation.LESS_DI
    return ComparisonVerdict(rel)


def z_grid_from_time_grid(d2: DiscountFunction, grid: TimeGrid) -> np.ndarray:
    """Image under z = ln D2(t): an increasing grid on (-inf, 0].

    Linear time grids are preferred sources; a log time grid maps to
    nearly-coincident z points at the small-t end, which amplifies
    inversion noise in the transform test.
    """
    z = np.asarray(d2.log_value(grid.points), dtype=float)
    return z[::-1].copy()


def convex_transform_test(
    d1: DiscountFunction,
    d2: DiscountFunction,
    z_grid: np.ndarray | None = None,
    tol: float | None = None,
) -> ComparisonVerdict:
    """Comparative DI via convexity of phi(z) = ln D1(D2^{-1}(e^z)).

    phi convex on (-inf, 0] means d1 is more DI than d2; linearity means
    equally DI with the slope as the exponent; concavity is less DI.
    Mixed curvature yields Incomparable with the tangency times recorded.
    """
    if tol is None:
        tol = default_tolerance(d1, d2)
    if z_grid is None:
        z_grid = z_grid_from_time_grid(d2, TimeGrid.linear(0.0, 60.0, 241))
    z = np.asarray(z_grid, dtype=float)
    if z.ndim != 1 or z.size < 3:
        raise GridTooCoarse("z grid needs at least 3 points")
    if np.any(np.diff(z) <= 0.0):
        raise DomainError("z grid must be strictly increasing")
    if np.any(z > 0.0):
        raise DomainError("z grid must lie in (-inf, 0]")

    times = np.array([invert_discount(d2, math.exp(zi)) for zi in z])
    phi = np.asarray(d1.log_value(times), dtype=float)
    interior, signs = _curvature_signs(z, phi, tol)
    has_pos = bool(np.any(signs > 0))
    has_neg = bool(np.any(signs < 0))
    if has_pos and has_neg:
        flip_times = [
            float(times[k + 1])
            for k in range(len(signs) - 1)
            if signs[k] * signs[k + 1] < 0
        ]
        return ComparisonVerdict(
            DIRelation.INCOMPARABLE, crossing_points=sorted(flip_times),
            method="ConvexTransform",
        )
    if not has_pos and not has_neg:
        # flat curvature suggests phi linear, i.e. D1 = D2^c with c the
        # slope; confirm with the residual against the straight chord
        slope = (phi[-1] - phi[0]) / (z[-1] - z[0])
        resid = phi - (phi[0] + slope * (z - z[0]))
        if np.max(np.abs(resid)) <= tol * max(1.0, float(np.max(np.abs(phi)))):
            return ComparisonVerdict(
                DIRelation.EQUALLY_DI, exponent=float(slope), method="ConvexTransform"
            )
        trend = (phi[-1] - phi[-2]) / (z[-1] - z[-2]) - (phi[1] - phi[0]) / (z[1] - z[0])
        rel = DIRelation.MORE_DI if trend > 0 else DIRelation.LESS_DI
        return ComparisonVerdict(rel, method="ConvexTransform")
    certify = z.size >= MIN_STRICT_GRID and _longest_interior_zero_run(signs) <= MAX_FLAT_RUN
    if has_pos:
        rel = DIRelation.STRICTLY_MORE_DI if certify else DIRelation.MORE_DI
    else:
        rel = DIRelation.STRICTLY_LESS_DI if certify else DIRelation.LESS_DI
    return ComparisonVerdict(rel, method="ConvexTransform")
