"""Certainty-equivalent discount rates for probability-weighted bundles.

A bundle assigns probabilities p_i to proportional hyperbolic discount
functions 1/(1+h_i t).  The certainty-equivalent hyperbolic rate h(t)
solves 1/(1+h(t)t) = sum_i p_i/(1+h_i t); it starts at the arithmetic
mean sum p_i h_i as t -> 0+ and decreases strictly to the weighted
harmonic mean H = (sum p_i/h_i)^{-1}.

h(t) is computed from the algebraic rearrangement

    h(t) = [sum_i p_i h_i/(1+h_i t)] / [sum_i p_i/(1+h_i t)]

which is exactly (1/D - 1)/t with the subtraction carried out in closed
form, so there is no cancellation at small t and no underflow at large
t; no special-case branch is needed anywhere on (0, inf).

The exponential analogue delegates to the mixtures module:
the certainty-equivalent time-preference rate of an exponential bundle
is just the mixture rate, which falls from the mean of the rates to
their minimum.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .discount import Exponential
from .errors import (
    DomainError,
    GridError,
    InvalidBundle,
    NonpositiveTime,
    ParseError,
)
from .grids import TimeGrid
from .mixtures import MixtureSpec, mix, mixture_rate
from .tabular import format_csv

__all__ = [
    "HyperbolicBundle",
    "CEReport",
    "ce_discount",
    "ce_hyperbolic_rate",
    "two_rate_closed_form",
    "weighted_harmonic_mean",
    "arithmetic_mean_rate",
    "asymptotic_constant",
    "ce_exponential_rate",
    "exponential_mixture",
    "verify_ce_monotone",
    "bundle_from_dict",
    "bundle_to_dict",
    "bundle_from_json",
    "bundle_to_json",
]


class HyperbolicBundle:
    """Probabilities over proportional hyperbolic rates, sorted by rate.

    Construction drops zero-probability entries, merges duplicate rates
    (summing their probabilities), normalizes the probabilities to one,
    and sorts descending by h.
    """

    def __init__(self, entries) -> None:
        merged: dict[float, float] = {}
        count = 0
        for item in entries:
            h, p = item
            h = float(h)
            p = float(p)
            count += 1
            if not np.isfinite(h) or h <= 0.0:
                raise InvalidBundle(f"hyperbolic rate must be positive and finite, got {h}")
            if not np.isfinite(p) or p < 0.0:
                raise InvalidBundle(f"probability must be finite and >= 0, got {p}")
            if p == 0.0:
                continue
            merged[h] = merged.get(h, 0.0) + p
        if count == 0:
            raise InvalidBundle("bundle has no entries")
        if not merged:
            raise InvalidBundle("bundle has no entries with positive probability")
        rates = np.array(sorted(merged, reverse=True))
        probs = np.array([merged[h] for h in rates])
        self.h = rates
        self.p = probs / probs.sum()

    @property
    def n(self) -> int:
        return len(self.h)

    @property
    def degenerate(self) -> bool:
        """True when only one distinct rate survives."""
        return self.n == 1

    def entries(self):
        return list(zip(self.h.tolist(), self.p.tolist()))

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        inner = ", ".join(f"({h:g}, {p:g})" for h, p in self.entries())
        return f"HyperbolicBundle[{inner}]"


def _positive_times(t) -> np.ndarray:
    arr = np.asarray(t, dtype=float)
    if np.any(~np.isfinite(arr)):
        raise DomainError("time values must be finite")
    if np.any(arr <= 0.0):
        raise NonpositiveTime(
            "the certainty-equivalent hyperbolic rate is defined for t > 0 only"
        )
    return arr


def _nonnegative_times(t) -> np.ndarray:
    arr = np.asarray(t, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any(arr < 0.0):
        raise DomainError(f"time values must be finite and >= 0")
    return arr


def _out(t, res: np.ndarray):
    return float(res) if np.ndim(t) == 0 else res


def ce_discount(bundle: HyperbolicBundle, t):
    """D(t) = sum_i p_i / (1 + h_i t)."""
    arr = _nonnegative_times(t)
    terms = bundle.p[:, None] / (1.0 + np.outer(bundle.h, np.atleast_1d(arr)))
    res = terms.sum(axis=0).reshape(np.shape(arr))
    return _out(t, res)


def ce_hyperbolic_rate(bundle: HyperbolicBundle, t):
    """The rate making 1/(1+h(t)t) match the bundle's mixture value."""
    arr = _positive_times(t)
    flat = np.atleast_1d(arr)
    denom_terms = bundle.p[:, None] / (1.0 + np.outer(bundle.h, flat))
    numer = (bundle.h[:, None] * denom_terms).sum(axis=0)
    res = (numer / denom_terms.sum(axis=0)).reshape(np.shape(arr))
    return _out(t, res)


def two_rate_closed_form(bundle: HyperbolicBundle, t):
    """h(t) = (p1 h1 + p2 h2 + h1 h2 t) / (1 + (p1 h2 + p2 h1) t);
    exact for two-rate bundles."""
    if bundle.n != 2:
        raise InvalidBundle(f"closed form applies to two-rate bundles, got n={bundle.n}")
    arr = _positive_times(t)
    (h1, h2), (p1, p2) = bundle.h, bundle.p
    res = (p1 * h1 + p2 * h2 + h1 * h2 * arr) / (1.0 + (p1 * h2 + p2 * h1) * arr)
    return _out(t, res)


def weighted_harmonic_mean(bundle: HyperbolicBundle) -> float:
    """H = (sum_i p_i / h_i)^{-1}; the t -> inf limit of h(t)."""
    return float(1.0 / np.sum(bundle.p / bundle.h))


def arithmetic_mean_rate(bundle: HyperbolicBundle) -> float:
    """sum_i p_i h_i; the t -> 0+ limit of h(t)."""
    return float(np.sum(bundle.p * bundle.h))


def asymptotic_constant(bundle: HyperbolicBundle) -> float:
    """C with h(t) - H ~ C/t for large t.

    Expanding D(t) = S/t - S2/t^2 + O(t^-3) with S = sum p/h and
    S2 = sum p/h^2 gives C = H (S2/S - S) >= 0.
    """
    s = float(np.sum(bundle.p / bundle.h))
    s2 = float(np.sum(bundle.p / bundle.h**2))
    return (1.0 / s) * (s2 / s - s)


# ---------------------------------------------------------------------------
# exponential case
# ---------------------------------------------------------------------------

def exponential_mixture(rates, probs=None) -> MixtureSpec:
    """Probability-weighted mixture of exponential discount functions."""
    comps = [Exponential(rho=float(r)) for r in rates]
    if probs is None:
        return mix(comps, interpretation="ProbabilityWeights")
    return mix(comps, weights=probs, interpretation="ProbabilityWeights")


def ce_exponential_rate(m: MixtureSpec, t):
    """Certainty-equivalent time-preference rate of an exponential bundle:
    the mixture rate -D'/D, which decreases from sum p_i rho_i to min rho_i."""
    if not isinstance(m, MixtureSpec) or not all(
        isinstance(c, Exponential) for c in m.components
    ):
        raise DomainError(
            "ce_exponential_rate needs a mixture with exponential components only"
        )
    return mixture_rate(m, t)


# ---------------------------------------------------------------------------
# monotonicity report
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CEReport:
    """Certainty-equivalent rate trajectory with its limit and shape."""

    times: np.ndarray
    h_values: np.ndarray
    limit: float               # weighted harmonic mean H
    arithmetic_mean: float
    monotone: bool
    max_violation: float       # largest observed increase, 0 when monotone
    constant_rate: bool        # degenerate single-rate bundle

    def to_csv(self, metadata=()) -> str:
        n = len(self.times)
        return format_csv(
            ["t", "h_t", "H", "arithmetic_mean"],
            [self.times, self.h_values,
             np.full(n, self.limit), np.full(n, self.arithmetic_mean)],
            metadata,
        )

    def to_dict(self) -> dict:
        return {
            "limit": self.limit,
            "arithmetic_mean": self.arithmetic_mean,
            "monotone": self.monotone,
            "max_violation": self.max_violation,
            "constant_rate": self.constant_rate,
            "count": int(len(self.times)),
        }


def verify_ce_monotone(bundle: HyperbolicBundle, grid: TimeGrid) -> CEReport:
    """Trace h(t) over the grid and check for strict decrease.

    The grid must be strictly positive, at least 100 points, and span at
    least 4 decades, so both the arithmetic-mean transient and the
    harmonic-mean asymptote are visible.  A single-rate bundle reports
    monotone=False with the constant_rate flag instead.
    """
    if grid.t_min <= 0.0:
        raise GridError("monotonicity grid must lie in (0, inf)")
    if grid.count < 100:
        raise GridError(f"monotonicity grid needs >= 100 points, got {grid.count}")
    if grid.decades_spanned() < 4.0:
        raise GridError(
            f"monotonicity grid must span >= 4 decades, got {grid.decades_spanned():.2f}"
        )
    h_vals = ce_hyperbolic_rate(bundle, grid.points)
    increases = np.diff(h_vals)
    max_violation = float(max(0.0, increases.max()))
    constant = bundle.degenerate
    monotone = bool(np.all(increases < 0.0)) and not constant
    return CEReport(
        times=grid.points,
        h_values=h_vals,
        limit=weighted_harmonic_mean(bundle),
        arithmetic_mean=arithmetic_mean_rate(bundle),
        monotone=monotone,
        max_violation=max_violation,
        constant_rate=constant,
    )


# ---------------------------------------------------------------------------
# JSON wire format: {"entries": [{"h": number, "p": number}, ...]}
# ---------------------------------------------------------------------------

def bundle_from_dict(data: dict) -> HyperbolicBundle:
    if not isinstance(data, dict):
        raise ParseError(f"bundle must be a JSON object, got {type(data).__name__}")
    unknown = set(data) - {"entries"}
    if unknown:
        raise ParseError(f"unknown bundle fields: {sorted(unknown)}")
    if "entries" not in data or not isinstance(data["entries"], list):
        raise ParseError("bundle requires an 'entries' array")
    pairs = []
    for k, e in enumerate(data["entries"]):
        if not isinstance(e, dict) or set(e) != {"h", "p"}:
            raise ParseError(f"entry {k} must be an object with exactly 'h' and 'p'")
        for name in ("h", "p"):
            v = e[name]
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise ParseError(f"entry {k} field {name!r} must be a number, got {v!r}")
        pairs.append((float(e["h"]), float(e["p"])))
    return HyperbolicBundle(pairs)


def bundle_to_dict(bundle: HyperbolicBundle) -> dict:
    return {"entries": [{"h": h, "p": p} for h, p in bundle.entries()]}


def bundle_from_json(text: str) -> HyperbolicBundle:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc
    return bundle_from_dict(data)


def bundle_to_json(bundle: HyperbolicBundle) -> str:
    return json.dumps(bundle_to_dict(bundle))
