"""Weighted mixtures of discount functions and their impatience structure.

A mixture D = sum_i lambda_i D_i (strictly positive weights summing to
one) is itself a discount function, so everything in the package that
accepts a spec -- classification, comparison, profiles -- works on a
``MixtureSpec`` unchanged.

Evaluation is organized around two deliberately separate routes:

* the *stable* route works in log space: softmax component weights
  w_i(t) = lambda_i D_i(t) / D(t) give the mixture rate sum w_i r_i and
  its derivative sum w_i r_i' - Var_w(r), which survive horizons where
  the raw values underflow (an exponential-rate-0.01 mixture is below
  the double-precision floor past t ~ 7.4e7, yet rates remain O(0.01));
* the *raw* route sums component derivatives directly, D^(k) =
  sum_i lambda_i D_i^(k), and is used as the independent cross-check in
  :func:`decompose_index`.

Neither route ever finite-differences the mixture.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .comparison import (
    DEFAULT_GRID,
    ComparisonVerdict,
    DIRelation,
    compare_by_index,
    default_tolerance,
)
from .discount import DiscountFunction, spec_from_dict, spec_to_dict
from .errors import (
    DegenerateMixture,
    EmptyMixture,
    NotComparable,
    ParseError,
    WeightError,
)
from .grids import TimeGrid
from .tabular import format_csv

__all__ = [
    "MixtureSpec",
    "mix",
    "mixture_rate",
    "DecompositionReport",
    "decompose_index",
    "TheoremCheck",
    "verify_theorem_main",
    "mixture_from_dict",
    "mixture_to_dict",
    "mixture_from_json",
    "mixture_to_json",
    "INTERPRETATIONS",
]

INTERPRETATIONS = ("GroupAverage", "ProbabilityWeights")


class MixtureSpec(DiscountFunction):
    """Convex combination of discount functions, usable as one itself."""

    family = "mixture"

    def __init__(self, components, weights=None, interpretation="GroupAverage"):
        specs, lam = _normalize_components(components, weights)
        if interpretation not in INTERPRETATIONS:
            raise WeightError(
                f"interpretation must be one of {INTERPRETATIONS}, got {interpretation!r}"
            )
        self.components: tuple[DiscountFunction, ...] = specs
        self.weights: np.ndarray = lam
        self.interpretation = interpretation
        self.label = " + ".join(c.label or c.family for c in specs)
        seen = {}
        for k, c in enumerate(specs):
            key = c.param_key()
            if key in seen:
                warnings.warn(
                    DegenerateMixture(
                        f"components {seen[key]} and {k} are identical "
                        f"({c.describe()}); mixture theorems assume distinct components"
                    )
                )
            seen.setdefault(key, k)

    # -- stable log-space route ----------------------------------------
    @property
    def singular_at_zero(self) -> bool:  # type: ignore[override]
        return any(c.singular_at_zero for c in self.components)

    def _component_log_matrix(self, t: np.ndarray) -> np.ndarray:
        logs = [np.log(w) + c._log_value(t) for c, w in zip(self.components, self.weights)]
        return np.stack([np.broadcast_to(l, np.shape(t)) for l in logs])

    def _log_value(self, t):
        return logsumexp(self._component_log_matrix(t), axis=0)

    def _value(self, t):
        return np.exp(self._log_value(t))

    def _softmax_weights(self, t: np.ndarray) -> np.ndarray:
        L = self._component_log_matrix(t)
        return np.exp(L - logsumexp(L, axis=0))

    def _component_rates(self, t: np.ndarray) -> np.ndarray:
        return np.stack([np.broadcast_to(c._rate(t), np.shape(t)) for c in self.components])

    @staticmethod
    def _weighted_average(w, values):
        # Anchoring at the plain mean keeps the deviations small (and, for
        # clustered values, exactly representable), so the weighted average
        # of near-equal component rates rounds correctly instead of
        # accumulating one-ulp product errors.
        anchor = np.mean(values, axis=0)
        return anchor + np.sum(w * (values - anchor), axis=0)

    def _rate(self, t):
        return self._weighted_average(self._softmax_weights(t), self._component_rates(t))

    def _rate_deriv(self, t):
        w = self._softmax_weights(t)
        r = self._component_rates(t)
        rp = np.stack([np.broadcast_to(c._rate_deriv(t), np.shape(t)) for c in self.components])
        rbar = self._weighted_average(w, r)
        variance = np.sum(w * (r - rbar) ** 2, axis=0)
        return self._weighted_average(w, rp) - variance

    def _dvalue(self, t):
        return -self._rate(t) * self._value(t)

    def _d2value(self, t):
        r = self._rate(t)
        return (r * r - self._rate_deriv(t)) * self._value(t)

    # -- raw weight-sum route ------------------------------------------
    def raw_derivatives(self, t):
        """(D, D', D'') as plain weight-sums of component derivatives.

        Underflows for very large t; meant for desk-scale grids as the
        cross-check route independent of the softmax formulas.
        """
        arr = np.asarray(t, dtype=float)
        self._check_derivative_domain(np.atleast_1d(arr))
        d0 = sum(w * c._value(arr) for c, w in zip(self.components, self.weights))
        d1 = sum(w * c._dvalue(arr) for c, w in zip(self.components, self.weights))
        d2 = sum(w * c._d2value(arr) for c, w in zip(self.components, self.weights))
        return d0, d1, d2

    # -- identity -------------------------------------------------------
    def params(self):
        return {}

    def param_key(self):
        return (
            "mixture",
            tuple((c.param_key(), float(w)) for c, w in zip(self.components, self.weights)),
        )

    def describe(self) -> str:
        inner = ", ".join(
            f"{w:g}*{c.describe()}" for c, w in zip(self.components, self.weights)
        )
        return f"mixture({inner})"

    def __len__(self) -> int:
        return len(self.components)


def _normalize_components(components, weights):
    pairs = []
    if weights is not None:
        specs = list(components)
        weights = list(weights)
        if len(specs) != len(weights):
            raise WeightError("got %d components but %d weights" % (len(specs), len(weights)))
        pairs = list(zip(specs, weights))
    else:
        for item in components:
            if isinstance(item, DiscountFunction):
                pairs.append((item, None))
            else:
                spec, w = item
                pairs.append((spec, w))
        if any(w is None for _, w in pairs):
            if not all(w is None for _, w in pairs):
                raise WeightError("give weights for all components or none")
            pairs = [(s, 1.0 / len(pairs)) for s, _ in pairs] if pairs else []
    if len(pairs) == 0:
        raise EmptyMixture("a mixture needs at least two components, got none")
    if len(pairs) == 1:
        raise EmptyMixture("a mixture needs at least two components, got one")
    specs = tuple(s for s, _ in pairs)
    lam = np.array([float(w) for _, w in pairs])
    if np.any(~np.isfinite(lam)) or np.any(lam <= 0.0):
        raise WeightError(f"weights must be strictly positive and finite, got {lam}")
    lam = lam / lam.sum()
    if not all(isinstance(s, DiscountFunction) for s in specs):
        raise WeightError("components must be discount functions")
    return specs, lam


def mix(components, weights=None, interpretation="GroupAverage") -> MixtureSpec:
    """Build a mixture from (spec, weight) pairs, or specs plus weights,
    or bare specs for equal weighting.  Weights are normalized to sum 1."""
    return MixtureSpec(components, weights=weights, interpretation=interpretation)


def mixture_rate(m: MixtureSpec, t):
    """Time-preference rate of the mixture, softmax-weighted mean of the
    component rates; stable out to arbitrarily large horizons."""
    return m.rate(t)


# ---------------------------------------------------------------------------
# index decomposition
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DecompositionReport:
    """Pointwise split of the mixture index into component and residual parts.

    I_decomposed = sum_i alpha_i I_i + Q with alpha_i = w_i r_i / sum w_j r_j
    and Q = Var_w(r)/mean_w(r) >= 0; N is the quadratic-form numerator
    sum_{i<j} lambda_i lambda_j D_i D_j (r_i - r_j)^2, which satisfies
    N = Q * D * (-D').  I_direct comes from the independent raw route.
    """

    times: np.ndarray
    alpha: np.ndarray          # shape (n_components, n_times)
    Q: np.ndarray
    N_values: np.ndarray
    I_direct: np.ndarray
    I_decomposed: np.ndarray
    comp_index: np.ndarray     # shape (n_components, n_times)
    rates_differ: np.ndarray   # bool mask: strictness holds where True
    min_bound_violation: float

    def to_csv(self, metadata=()) -> str:
        n = self.alpha.shape[0]
        names = ["t", "I_direct", "I_decomposed", "Q", "N"]
        cols = [self.times, self.I_direct, self.I_decomposed, self.Q, self.N_values]
        for i in range(n):
            names.append(f"alpha_{i + 1}")
            cols.append(self.alpha[i])
        for i in range(n):
            names.append(f"I_{i + 1}")
            cols.append(self.comp_index[i])
        return format_csv(names, cols, metadata)


def decompose_index(m: MixtureSpec, grid: TimeGrid | None = None,
                    tol: float | None = None) -> DecompositionReport:
    """Evaluate the mixture index two ways and its decomposition weights.

    The direct route forms (-D''/D') - (-D'/D) from raw weight-sum
    derivatives; the decomposed route assembles sum alpha_i I_i + Q from
    softmax weights.  Their agreement (1e-7 relative) is the library's
    main internal consistency check for mixtures.
    """
    if grid is None:
        grid = DEFAULT_GRID
    if tol is None:
        tol = default_tolerance(*m.components)
    t = grid.points
    w = m._softmax_weights(t)
    r = m._component_rates(t)
    rp = np.stack([np.broadcast_to(c._rate_deriv(t), t.shape) for c in m.components])
    comp_index = -rp / r

    rbar = np.sum(w * r, axis=0)
    alpha = w * r / rbar
    Q = np.sum(w * (r - rbar) ** 2, axis=0) / rbar
    I_decomposed = np.sum(alpha * comp_index, axis=0) + Q

    d0, d1, d2 = m.raw_derivatives(t)
    I_direct = (-d2 / d1) - (-d1 / d0)

    lam = m.weights
    vals = np.stack([np.broadcast_to(c._value(t), t.shape) for c in m.components])
    n_comp = len(m.components)
    N = np.zeros_like(t)
    for i in range(n_comp):
        for j in range(i + 1, n_comp):
            N += lam[i] * lam[j] * vals[i] * vals[j] * (r[i] - r[j]) ** 2

    spread = r.max(axis=0) - r.min(axis=0)
    rates_differ = spread > tol * np.maximum(1.0, np.abs(r).max(axis=0))
    violation = float(np.max(np.maximum(0.0, comp_index.min(axis=0) - I_direct)))
    return DecompositionReport(
        times=t, alpha=alpha, Q=Q, N_values=N, I_direct=I_direct,
        I_decomposed=I_decomposed, comp_index=comp_index,
        rates_differ=rates_differ, min_bound_violation=violation,
    )


# ---------------------------------------------------------------------------
# mixture-dominates-the-least-DI-component theorem
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TheoremCheck:
    """Outcome of checking that a DI-chain mixture is strictly more DI
    than its least-DI component."""

    holds: bool
    relation: DIRelation
    index_gap: float
    flat_points: int
    chain: list  # consecutive-pair relations confirming the hypothesis

    def to_dict(self) -> dict:
        return {
            "holds": self.holds,
            "relation": self.relation.value,
            "index_gap": self.index_gap,
            "flat_points": self.flat_points,
            "chain": [rel.value for rel in self.chain],
        }


_CHAIN_OK = (DIRelation.STRICTLY_MORE_DI, DIRelation.MORE_DI, DIRelation.EQUALLY_DI)


def verify_theorem_main(m: MixtureSpec, grid: TimeGrid | None = None,
                        tol: float | None = None) -> TheoremCheck:
    """Check the aggregation theorem: if the components form a descending
    DI chain D1 >= ... >= Dn, the mixture is strictly more DI than Dn.

    The chain hypothesis is verified first on consecutive pairs; a pair
    that is Incomparable (or ordered the wrong way) raises NotComparable
    -- decompose_index is the right tool for such mixtures.  Returns the
    witnessing gap: the minimum of I_mix - I_n over grid points outside
    the within-tolerance flat set.
    """
    if grid is None:
        grid = DEFAULT_GRID
    if tol is None:
        tol = default_tolerance(*m.components)
    chain = []
    for a, b in zip(m.components[:-1], m.components[1:]):
        v = compare_by_index(a, b, grid, tol)
        if v.relation not in _CHAIN_OK:
            raise NotComparable(
                f"components {a.describe()} and {b.describe()} are {v.relation.value}; "
                "the chain hypothesis fails - use decompose_index for the general bound"
            )
        chain.append(v.relation)

    last = m.components[-1]
    verdict = compare_by_index(m, last, grid, tol)
    t = grid.points
    i_mix = np.asarray(m.index(t), dtype=float)
    i_last = np.asarray(last.index(t), dtype=float)
    diff = i_mix - i_last
    band = tol * np.maximum(1.0, np.maximum(np.abs(i_mix), np.abs(i_last)))
    definite = np.abs(diff) > band
    flat_points = int(np.sum(~definite))
    gap = float(diff[definite].min()) if np.any(definite) else 0.0
    holds = verdict.relation is DIRelation.STRICTLY_MORE_DI and gap > 0.0
    return TheoremCheck(
        holds=holds, relation=verdict.relation, index_gap=gap,
        flat_points=flat_points, chain=chain,
    )


# ---------------------------------------------------------------------------
# JSON wire format:
#   {"components": [{"spec": <spec object>, "weight": number}, ...],
#    "interpretation": "GroupAverage" | "ProbabilityWeights"}
# ---------------------------------------------------------------------------

def mixture_from_dict(data: dict) -> MixtureSpec:
    if not isinstance(data, dict):
        raise ParseError(f"mixture must be a JSON object, got {type(data).__name__}")
    unknown = set(data) - {"components", "interpretation"}
    if unknown:
        raise ParseError(f"unknown mixture fields: {sorted(unknown)}")
    if "components" not in data or not isinstance(data["components"], list):
        raise ParseError("mixture requires a 'components' array")
    pairs = []
    for k, entry in enumerate(data["components"]):
        if not isinstance(entry, dict) or set(entry) - {"spec", "weight"}:
            raise ParseError(f"component {k} must be an object with 'spec' and 'weight'")
        if "spec" not in entry or "weight" not in entry:
            raise ParseError(f"component {k} must carry both 'spec' and 'weight'")
        w = entry["weight"]
        if isinstance(w, bool) or not isinstance(w, (int, float)):
            raise ParseError(f"component {k} weight must be a number, got {w!r}")
        pairs.append((spec_from_dict(entry["spec"]), float(w)))
    interp = data.get("interpretation", "GroupAverage")
    if interp not in INTERPRETATIONS:
        raise ParseError(f"interpretation must be one of {INTERPRETATIONS}, got {interp!r}")
    return MixtureSpec(pairs, interpretation=interp)


def mixture_to_dict(m: MixtureSpec) -> dict:
    return {
        "components": [
            {"spec": spec_to_dict(c), "weight": float(w)}
            for c, w in zip(m.components, m.weights)
        ],
        "interpretation": m.interpretation,
    }


def mixture_from_json(text: str) -> MixtureSpec:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc
    return mixture_from_dict(data)


def mixture_to_json(m: MixtureSpec) -> str:
    return json.dumps(mixture_to_dict(m))
