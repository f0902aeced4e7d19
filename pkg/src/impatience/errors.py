"""Exception hierarchy shared by the whole package.

Two broad branches matter for callers (and for the CLI exit codes):

* ``ParseError`` -- the input could not be understood (malformed JSON,
  unknown fields, wrong shapes).  Maps to exit code 2.
* ``DomainError`` -- the input parsed fine but the requested computation
  is mathematically invalid (negative times, bad parameters, singular
  points, ...).  Maps to exit code 3.

IO failures are plain ``OSError`` and map to exit code 4.
"""


class ImpatienceError(Exception):
    """Base class for all package-specific errors."""


class ParseError(ImpatienceError):
    """Input file or payload does not match the expected schema."""


class SchemaError(ParseError):
    """A CSV artifact does not have the layout a consumer requires."""


class DomainError(ImpatienceError):
    """Mathematically invalid request for otherwise well-formed input."""


class NegativeTime(DomainError):
    """Evaluation time t < 0 requested."""


class NonpositiveTime(DomainError):
    """Evaluation time t <= 0 requested where only t > 0 is defined."""


class InvalidParameters(DomainError):
    """Family parameters violate their constraints (e.g. h <= 0)."""


class SingularPoint(DomainError):
    """Derivative or rate requested at a point where it diverges."""


class StepUnderflow(DomainError):
    """Finite-difference step too small to perturb t in floating point."""


class GridError(DomainError):
    """Evaluation grid violates a precondition of the operation."""


class GridTooCoarse(GridError):
    """Grid has too few points for the requested analysis."""


class InversionFailure(DomainError):
    """Bisection inversion could not bracket the requested value."""


class DegenerateInput(DomainError):
    """Input is degenerate for the operation (e.g. ln D = 0 at t = 0)."""


class WeightError(DomainError):
    """Mixture weights are not strictly positive finite numbers."""


class EmptyMixture(WeightError):
    """Fewer than two components supplied to a mixture."""


class NotComparable(DomainError):
    """Mixture components do not form the required comparative-DI chain."""


class InvalidBundle(DomainError):
    """Hyperbolic rate bundle violates its constraints."""


class DegenerateMixture(UserWarning):
    """Two mixture components coincide; theorems assume distinct ones."""
