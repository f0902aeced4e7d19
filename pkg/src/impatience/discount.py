"""Discount-function families and their rate calculus.

Conventions used throughout the package:

* Time ``t`` is dimensionless and non-negative; ``D(0) = 1`` and ``D`` is
  strictly decreasing with ``0 < D(t) <= 1``.
* ``rate(t)   = -D'(t)/D(t)``            (time-preference rate)
* ``impatience_rate(t) = -D''(t)/D'(t)`` (impatience rate)
* ``index(t)  = impatience_rate - rate = -rate'(t)/rate(t)``; positive on
  decreasing-impatience functions, zero for exponentials, negative under
  increasing impatience.

Every family exposes two algebraically equivalent but numerically
independent routes to the index: the free function :func:`index_of_DI`
goes through the evaluated derivative triple, while
:meth:`DiscountFunction.index` uses the closed-form rate and its
derivative.  Tests hold the two routes to 1e-8 relative agreement.

All value/rate methods accept scalars or numpy arrays and are pure, so
grid sweeps are thread-safe and order-independent.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import (
    DomainError,
    InvalidParameters,
    NegativeTime,
    ParseError,
    SingularPoint,
    StepUnderflow,
)
from .grids import TimeGrid

__all__ = [
    "DiscountFunction",
    "Exponential",
    "GeneralizedHyperbolic",
    "ProportionalHyperbolic",
    "ZeroSpeedHyperbolic",
    "SlowWeibull",
    "CustomSpec",
    "TabulatedSpec",
    "RateProfile",
    "evaluate",
    "derivatives",
    "time_preference_rate",
    "impatience_rate",
    "index_of_DI",
    "index_from_rate",
    "rate_profile",
    "default_fd_step",
    "spec_from_dict",
    "spec_to_dict",
    "spec_from_json",
    "spec_to_json",
]


def _times(t) -> np.ndarray:
    arr = np.asarray(t, dtype=float)
    if np.any(~np.isfinite(arr)):
        raise DomainError("time values must be finite")
    if np.any(arr < 0.0):
        raise NegativeTime(f"discount functions are defined for t >= 0, got {arr.min()}")
    return arr


def _scalar_or_array(t, out: np.ndarray):
    return float(out) if np.ndim(t) == 0 else out


class DiscountFunction:
    """Base class for discount functions.

    Subclasses implement the vectorized ``_value``/``_log_value``/
    ``_dvalue``/``_d2value``/``_rate``/``_rate_deriv`` hooks on float
    arrays; the public methods add time validation and scalar passthrough.
    """

    family: str = "abstract"
    label: str = ""

    #: True when first/second derivatives (and hence rates) diverge at t=0.
    singular_at_zero: bool = False

    # -- hooks -----------------------------------------------------------
    def _value(self, t: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _log_value(self, t: np.ndarray) -> np.ndarray:
        return np.log(self._value(t))

    def _dvalue(self, t: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _d2value(self, t: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _rate(self, t: np.ndarray) -> np.ndarray:
        return -self._dvalue(t) / self._value(t)

    def _rate_deriv(self, t: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _check_derivative_domain(self, t: np.ndarray) -> None:
        if self.singular_at_zero and np.any(t == 0.0):
            raise SingularPoint(
                f"{self.family} derivatives and rates diverge at t = 0"
            )

    # -- public surface --------------------------------------------------
    def value(self, t):
        return _scalar_or_array(t, self._value(_times(t)))

    def log_value(self, t):
        return _scalar_or_array(t, self._log_value(_times(t)))

    def dvalue(self, t):
        arr = _times(t)
        self._check_derivative_domain(arr)
        return _scalar_or_array(t, self._dvalue(arr))

    def d2value(self, t):
        arr = _times(t)
        self._check_derivative_domain(arr)
        return _scalar_or_array(t, self._d2value(arr))

    def rate(self, t):
        arr = _times(t)
        self._check_derivative_domain(arr)
        return _scalar_or_array(t, self._rate(arr))

    def rate_deriv(self, t):
        arr = _times(t)
        self._check_derivative_domain(arr)
        return _scalar_or_array(t, self._rate_deriv(arr))

    def impatience_rate(self, t):
        """-D''/D', evaluated from the closed-form derivatives."""
        arr = _times(t)
        self._check_derivative_domain(arr)
        return _scalar_or_array(t, -self._d2value(arr) / self._dvalue(arr))

    def index(self, t):
        """Index of decreasing impatience, -rate'/rate."""
        arr = _times(t)
        self._check_derivative_domain(arr)
        return _scalar_or_array(t, -self._rate_deriv(arr) / self._rate(arr))

    # -- identity --------------------------------------------------------
    def params(self) -> dict[str, float]:
        return {}

    def param_key(self) -> tuple:
        """Hashable identity used by distinctness checks, never serialized."""
        return (self.family, tuple(sorted(self.params().items())))

    def describe(self) -> str:
        inner = ", ".join(f"{k}={v:g}" for k, v in self.params().items())
        base = f"{self.family}({inner})"
        return f"{base} '{self.label}'" if self.label else base

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return self.describe()


# ---------------------------------------------------------------------------
# hyperbolic-power helpers shared by the (1+ht)^(-a/h) families
# ---------------------------------------------------------------------------

def _hyp_value(a: float, h: float, t: np.ndarray) -> np.ndarray:
    return np.exp(-(a / h) * np.log1p(h * t))


def _hyp_log(a: float, h: float, t: np.ndarray) -> np.ndarray:
    return -(a / h) * np.log1p(h * t)


def _hyp_dvalue(a: float, h: float, t: np.ndarray) -> np.ndarray:
    return -a * np.exp(-(a / h + 1.0) * np.log1p(h * t))


def _hyp_d2value(a: float, h: float, t: np.ndarray) -> np.ndarray:
    return a * (a + h) * np.exp(-(a / h + 2.0) * np.log1p(h * t))


def _positive(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value) or value <= 0.0:
        raise InvalidParameters(f"{name} must be a positive finite number, got {value}")
    return value


@dataclass(frozen=True, repr=False)
class Exponential(DiscountFunction):
    """D(t) = exp(-rho * t); constant impatience, index identically 0."""

    rho: float
    label: str = ""
    family = "exponential"

    def __post_init__(self) -> None:
        object.__setattr__(self, "rho", _positive("rho", self.rho))

    def _value(self, t):
        return np.exp(-self.rho * t)

    def _log_value(self, t):
        return -self.rho * t

    def _dvalue(self, t):
        return -self.rho * np.exp(-self.rho * t)

    def _d2value(self, t):
        return self.rho * self.rho * np.exp(-self.rho * t)

    def _rate(self, t):
        return np.full_like(t, self.rho, dtype=float)

    def _rate_deriv(self, t):
        return np.zeros_like(t, dtype=float)

    @classmethod
    def from_discount_factor(cls, delta: float, label: str = "") -> "Exponential":
        """Discrete-time factor delta in (0,1): D(t) = delta**t."""
        if not 0.0 < delta < 1.0:
            raise InvalidParameters(f"discount factor must lie in (0,1), got {delta}")
        return cls(rho=-math.log(delta), label=label)

    def params(self):
        return {"rate": self.rho}


@dataclass(frozen=True, repr=False)
class GeneralizedHyperbolic(DiscountFunction):
    """D(t) = (1+ht)^(-alpha/h).

    ``h`` controls the degree of decreasing impatience (index h/(1+ht));
    ``alpha`` sets the time-preference rate alpha/(1+ht) but has no
    influence on the index.
    """

    alpha: float
    h: float
    label: str = ""
    family = "generalized_hyperbolic"

    def __post_init__(self) -> None:
        object.__setattr__(self, "alpha", _positive("alpha", self.alpha))
        object.__setattr__(self, "h", _positive("h", self.h))

    def _value(self, t):
        return _hyp_value(self.alpha, self.h, t)

    def _log_value(self, t):
        return _hyp_log(self.alpha, self.h, t)

    def _dvalue(self, t):
        return _hyp_dvalue(self.alpha, self.h, t)

    def _d2value(self, t):
        return _hyp_d2value(self.alpha, self.h, t)

    def _rate(self, t):
        return self.alpha / (1.0 + self.h * t)

    def _rate_deriv(self, t):
        u = 1.0 + self.h * t
        return -self.alpha * self.h / (u * u)

    def params(self):
        return {"alpha": self.alpha, "h": self.h}


@dataclass(frozen=True, repr=False)
class ProportionalHyperbolic(DiscountFunction):
    """D(t) = 1/(1+ht), the alpha = h special case."""

    h: float
    label: str = ""
    family = "proportional_hyperbolic"

    def __post_init__(self) -> None:
        object.__setattr__(self, "h", _positive("h", self.h))

    def _value(self, t):
        return 1.0 / (1.0 + self.h * t)

    def _log_value(self, t):
        return -np.log1p(self.h * t)

    def _dvalue(self, t):
        return _hyp_dvalue(self.h, self.h, t)

    def _d2value(self, t):
        return _hyp_d2value(self.h, self.h, t)

    def _rate(self, t):
        return self.h / (1.0 + self.h * t)

    def _rate_deriv(self, t):
        u = 1.0 + self.h * t
        return -self.h * self.h / (u * u)

    def params(self):
        return {"h": self.h}


@dataclass(frozen=True, repr=False)
class ZeroSpeedHyperbolic(DiscountFunction):
    """D(t) = (1+ht)^(-2).

    Stored as its own family (rather than the equivalent generalized
    hyperbolic with alpha = 2h) so inputs and reports keep the name;
    evaluation agrees with the general form to 1e-15.
    """

    h: float
    label: str = ""
    family = "zero_speed_hyperbolic"

    def __post_init__(self) -> None:
        object.__setattr__(self, "h", _positive("h", self.h))

    def _value(self, t):
        u = 1.0 + self.h * t
        return 1.0 / (u * u)

    def _log_value(self, t):
        return -2.0 * np.log1p(self.h * t)

    def _dvalue(self, t):
        return _hyp_dvalue(2.0 * self.h, self.h, t)

    def _d2value(self, t):
        return _hyp_d2value(2.0 * self.h, self.h, t)

    def _rate(self, t):
        return 2.0 * self.h / (1.0 + self.h * t)

    def _rate_deriv(self, t):
        u = 1.0 + self.h * t
        return -2.0 * self.h * self.h / (u * u)

    def params(self):
        return {"h": self.h}


@dataclass(frozen=True, repr=False)
class SlowWeibull(DiscountFunction):
    """D(t) = exp(-alpha * sqrt(t)).

    Rates and the index diverge at t = 0 (rate = alpha/(2 sqrt t),
    index = 1/(2t)), so derivative-based operations require t > 0.
    """

    alpha: float
    label: str = ""
    family = "slow_weibull"
    singular_at_zero = True

    def __post_init__(self) -> None:
        object.__setattr__(self, "alpha", _positive("alpha", self.alpha))

    def _value(self, t):
        return np.exp(-self.alpha * np.sqrt(t))

    def _log_value(self, t):
        return -self.alpha * np.sqrt(t)

    def _dvalue(self, t):
        s = np.sqrt(t)
        return -(self.alpha / 2.0) / s * np.exp(-self.alpha * s)

    def _d2value(self, t):
        s = np.sqrt(t)
        core = self.alpha / (4.0 * t * s) + self.alpha * self.alpha / (4.0 * t)
        return core * np.exp(-self.alpha * s)

    def _rate(self, t):
        return (self.alpha / 2.0) / np.sqrt(t)

    def _rate_deriv(self, t):
        return -(self.alpha / 4.0) / (t * np.sqrt(t))

    def params(self):
        return {"alpha": self.alpha}


class CustomSpec(DiscountFunction):
    """User-supplied discount function backed by callables.

    ``value_fn`` is mandatory; analytic first/second derivatives are used
    when provided, otherwise scale-aware central differences of the value
    function stand in.  Callables must be vectorized over numpy arrays.
    Constructed programmatically only -- the JSON wire format carries
    parametric families exclusively.
    """

    family = "custom"

    def __init__(
        self,
        value_fn: Callable[[np.ndarray], np.ndarray],
        dvalue_fn: Callable[[np.ndarray], np.ndarray] | None = None,
        d2value_fn: Callable[[np.ndarray], np.ndarray] | None = None,
        log_value_fn: Callable[[np.ndarray], np.ndarray] | None = None,
        label: str = "",
    ) -> None:
        self.value_fn = value_fn
        self.dvalue_fn = dvalue_fn
        self.d2value_fn = d2value_fn
        self.log_value_fn = log_value_fn
        self.label = label

    @property
    def has_analytic_derivatives(self) -> bool:
        return self.dvalue_fn is not None and self.d2value_fn is not None

    def _value(self, t):
        return np.asarray(self.value_fn(t), dtype=float)

    def _log_value(self, t):
        if self.log_value_fn is not None:
            return np.asarray(self.log_value_fn(t), dtype=float)
        return np.log(self._value(t))

    def _fd(self, t: np.ndarray, order: int) -> np.ndarray:
        flat = np.atleast_1d(t).astype(float)
        out = np.array(
            [_fd_derivatives(self._value, ti, default_fd_step(ti))[order] for ti in flat]
        )
        return out.reshape(np.shape(t))

    def _dvalue(self, t):
        if self.dvalue_fn is not None:
            return np.asarray(self.dvalue_fn(t), dtype=float)
        return self._fd(t, 1)

    def _d2value(self, t):
        if self.d2value_fn is not None:
            return np.asarray(self.d2value_fn(t), dtype=float)
        return self._fd(t, 2)

    def _rate_deriv(self, t):
        d = self._value(t)
        d1 = self._dvalue(t)
        d2 = self._d2value(t)
        return -(d2 * d - d1 * d1) / (d * d)

    def params(self):
        return {}

    def param_key(self):
        return (self.family, id(self))

    def describe(self) -> str:
        return f"custom '{self.label}'" if self.label else "custom"


class TabulatedSpec(DiscountFunction):
    """Discount function given as a (t, D) table.

    Monotone cubic (PCHIP) interpolation of ln D preserves positivity and
    strict decrease of D; derivatives come from the interpolant.  The
    valid domain is the tabulated range.
    """

    family = "custom"

    def __init__(self, times, values, label: str = "") -> None:
        from scipy.interpolate import PchipInterpolator

        t = np.asarray(times, dtype=float)
        d = np.asarray(values, dtype=float)
        if t.ndim != 1 or t.shape != d.shape or t.size < 4:
            raise InvalidParameters("tabulated spec needs matching 1-D arrays, >= 4 rows")
        if np.any(np.diff(t) <= 0.0) or t[0] < 0.0:
            raise InvalidParameters("tabulated times must be strictly increasing, t >= 0")
        if np.any(d <= 0.0) or np.any(d > 1.0 + 1e-12):
            raise InvalidParameters("tabulated values must lie in (0, 1]")
        if np.any(np.diff(d) >= 0.0):
            raise InvalidParameters("tabulated values must be strictly decreasing")
        self.label = label
        self.t_lo = float(t[0])
        self.t_hi = float(t[-1])
        self._g = PchipInterpolator(t, np.log(d), extrapolate=False)
        self._g1 = self._g.derivative(1)
        self._g2 = self._g.derivative(2)

    def _clip_domain(self, t: np.ndarray) -> np.ndarray:
        if np.any(t < self.t_lo) or np.any(t > self.t_hi):
            raise DomainError(
                f"tabulated spec is defined on [{self.t_lo:g}, {self.t_hi:g}] only"
            )
        return t

    def _value(self, t):
        return np.exp(self._g(self._clip_domain(t)))

    def _log_value(self, t):
        return np.asarray(self._g(self._clip_domain(t)), dtype=float)

    def _dvalue(self, t):
        t = self._clip_domain(t)
        return np.exp(self._g(t)) * self._g1(t)

    def _d2value(self, t):
        t = self._clip_domain(t)
        g1 = self._g1(t)
        return np.exp(self._g(t)) * (self._g2(t) + g1 * g1)

    def _rate(self, t):
        return -np.asarray(self._g1(self._clip_domain(t)), dtype=float)

    def _rate_deriv(self, t):
        return -np.asarray(self._g2(self._clip_domain(t)), dtype=float)

    def params(self):
        return {}

    def param_key(self):
        return (self.family, id(self))

    def describe(self) -> str:
        return f"tabulated '{self.label}'" if self.label else "tabulated"


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

def evaluate(spec: DiscountFunction, t):
    """D(t); validates t >= 0."""
    return spec.value(t)


def default_fd_step(t: float) -> float:
    """Scale-aware central-difference step, max(1e-6, 1e-6 * |t|)."""
    return max(1e-6, 1e-6 * abs(float(t)))


def _fd_derivatives(f, t: float, step: float) -> tuple[float, float, float]:
    """(f, f', f'') by central differences; one-sided second order when
    the left stencil point would fall below t = 0."""
    if not math.isfinite(step) or step <= 0.0:
        raise StepUnderflow(f"finite-difference step must be positive, got {step}")
    if t + step == t:
        raise StepUnderflow(f"step {step} underflows at t = {t}")
    f0 = float(f(np.asarray(t, dtype=float)))
    if t - step < 0.0:
        f1 = float(f(np.asarray(t + step)))
        f2 = float(f(np.asarray(t + 2.0 * step)))
        f3 = float(f(np.asarray(t + 3.0 * step)))
        d1 = (-3.0 * f0 + 4.0 * f1 - f2) / (2.0 * step)
        d2 = (2.0 * f0 - 5.0 * f1 + 4.0 * f2 - f3) / (step * step)
    else:
        fp = float(f(np.asarray(t + step)))
        fm = float(f(np.asarray(t - step)))
        d1 = (fp - fm) / (2.0 * step)
        d2 = (fp - 2.0 * f0 + fm) / (step * step)
    return f0, d1, d2


def derivatives(
    spec: DiscountFunction, t, mode: str = "analytic", step: float | None = None
) -> tuple:
    """(D, D', D'') at t.

    ``mode="analytic"`` uses the family's closed forms (SingularPoint where
    they diverge); ``mode="fd"`` central-differences the value function
    with the given step (default scale-aware).
    """
    if mode == "analytic":
        return spec.value(t), spec.dvalue(t), spec.d2value(t)
    if mode == "fd":
        arr = _times(t)
        if arr.ndim == 0:
            ti = float(arr)
            return _fd_derivatives(spec._value, ti, step if step is not None else default_fd_step(ti))
        cols = [
            _fd_derivatives(spec._value, ti, step if step is not None else default_fd_step(ti))
            for ti in arr
        ]
        stacked = np.array(cols)
        return stacked[:, 0], stacked[:, 1], stacked[:, 2]
    raise DomainError(f"unknown derivative mode {mode!r}")


def time_preference_rate(spec: DiscountFunction, t, mode: str = "analytic", step=None):
    """-D'/D."""
    if mode == "analytic":
        return spec.rate(t)
    d0, d1, _ = derivatives(spec, t, mode=mode, step=step)
    return -d1 / d0


def impatience_rate(spec: DiscountFunction, t, mode: str = "analytic", step=None):
    """-D''/D'."""
    if mode == "analytic":
        return spec.impatience_rate(t)
    _, d1, d2 = derivatives(spec, t, mode=mode, step=step)
    return -d2 / d1


def index_of_DI(spec: DiscountFunction, t, mode: str = "analytic", step=None):
    """Index via the derivative triple: (-D''/D') - (-D'/D).

    This is the definitional route; :func:`index_from_rate` provides the
    independent -rate'/rate route the two are cross-checked against.
    """
    d0, d1, d2 = derivatives(spec, t, mode=mode, step=step)
    return (-d2 / d1) - (-d1 / d0)


def index_from_rate(spec: DiscountFunction, t):
    """Index via the closed-form rate: -rate'(t)/rate(t)."""
    return spec.index(t)


@dataclass(frozen=True)
class RateProfile:
    """Rate, impatience-rate and index values along a grid.

    Singular points (slow Weibull at t = 0) are reported as +inf and are
    excluded from grid comparisons by consumers.
    """

    times: np.ndarray
    r: np.ndarray
    ir: np.ndarray
    i_di: np.ndarray
    mode: str = "analytic"
    step: float | None = None


def rate_profile(
    spec: DiscountFunction, grid: TimeGrid, mode: str = "analytic", step: float | None = None
) -> RateProfile:
    pts = grid.points
    singular = np.zeros(pts.shape, dtype=bool)
    if spec.singular_at_zero:
        singular = pts == 0.0
    good = pts[~singular]
    r = np.full(pts.shape, np.inf)
    ir = np.full(pts.shape, np.inf)
    idx = np.full(pts.shape, np.inf)
    if mode == "analytic":
        r[~singular] = spec.rate(good)
        ir[~singular] = spec.impatience_rate(good)
        idx[~singular] = spec.index(good)
    else:
        d0, d1, d2 = derivatives(spec, good, mode=mode, step=step)
        r[~singular] = -d1 / d0
        ir[~singular] = -d2 / d1
        idx[~singular] = ir[~singular] - r[~singular]
    return RateProfile(times=pts, r=r, ir=ir, i_di=idx, mode=mode, step=step)


# ---------------------------------------------------------------------------
# JSON wire format: {"family": str, "params": {name: number}, "label": str}
# ---------------------------------------------------------------------------

_FAMILY_FIELDS: dict[str, tuple[type, tuple[str, ...]]] = {
    "exponential": (Exponential, ("rate",)),
    "generalized_hyperbolic": (GeneralizedHyperbolic, ("alpha", "h")),
    "proportional_hyperbolic": (ProportionalHyperbolic, ("h",)),
    "zero_speed_hyperbolic": (ZeroSpeedHyperbolic, ("h",)),
    "slow_weibull": (SlowWeibull, ("alpha",)),
}

_FAMILY_CTOR_ARGS: dict[str, tuple[str, ...]] = {
    "exponential": ("rho",),
    "generalized_hyperbolic": ("alpha", "h"),
    "proportional_hyperbolic": ("h",),
    "zero_speed_hyperbolic": ("h",),
    "slow_weibull": ("alpha",),
}


def spec_from_dict(data: dict) -> DiscountFunction:
    """Parse the fixed wire format; unknown fields are rejected."""
    if not isinstance(data, dict):
        raise ParseError(f"spec must be a JSON object, got {type(data).__name__}")
    unknown = set(data) - {"family", "params", "label"}
    if unknown:
        raise ParseError(f"unknown spec fields: {sorted(unknown)}")
    if "family" not in data or "params" not in data:
        raise ParseError("spec requires 'family' and 'params' fields")
    family = data["family"]
    if family not in _FAMILY_FIELDS:
        raise ParseError(
            f"unknown family {family!r}; expected one of {sorted(_FAMILY_FIELDS)}"
        )
    params = data["params"]
    if not isinstance(params, dict):
        raise ParseError("'params' must be an object of name: number pairs")
    cls, names = _FAMILY_FIELDS[family]
    if set(params) != set(names):
        raise ParseError(
            f"family {family!r} takes params {list(names)}, got {sorted(params)}"
        )
    values = []
    for name in names:
        v = params[name]
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            raise ParseError(f"param {name!r} must be a number, got {v!r}")
        values.append(float(v))
    label = data.get("label", "")
    if not isinstance(label, str):
        raise ParseError("'label' must be a string")
    kwargs = dict(zip(_FAMILY_CTOR_ARGS[family], values))
    return cls(label=label, **kwargs)


def spec_to_dict(spec: DiscountFunction) -> dict:
    if spec.family not in _FAMILY_FIELDS:
        raise ParseError(
            f"family {spec.family!r} has no JSON representation (parametric families only)"
        )
    return {"family": spec.family, "params": spec.params(), "label": spec.label}


def spec_from_json(text: str) -> DiscountFunction:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from exc
    return spec_from_dict(data)


def spec_to_json(spec: DiscountFunction) -> str:
    return json.dumps(spec_to_dict(spec))
