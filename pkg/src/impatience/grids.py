"""Evaluation grids on the non-negative time axis.

A :class:`TimeGrid` is a strictly increasing array of times t >= 0 plus a
record of how it was built (its "kind"), which downstream CSV metadata
reports.  Grids are immutable; all sweep operations treat them read-only.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import GridError, GridTooCoarse

__all__ = ["TimeGrid"]


@dataclass(frozen=True)
class TimeGrid:
    """Strictly increasing evaluation points on [0, t_max].

    ``kind`` is metadata only ("linear", "log", "composite" or "custom");
    the points array is authoritative.
    """

    points: np.ndarray
    kind: str = "custom"

    def __post_init__(self) -> None:
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 1:
            raise GridError("grid points must form a 1-D array")
        if pts.size < 3:
            raise GridTooCoarse(f"grid needs at least 3 points, got {pts.size}")
        if not np.all(np.isfinite(pts)):
            raise GridError("grid points must be finite")
        if pts[0] < 0.0:
            raise GridError(f"grid must start at t >= 0, got t_min={pts[0]}")
        if np.any(np.diff(pts) <= 0.0):
            raise GridError("grid points must be strictly increasing")
        object.__setattr__(self, "points", pts)

    @classmethod
    def linear(cls, t_min: float, t_max: float, count: int) -> "TimeGrid":
        if count < 3:
            raise GridTooCoarse(f"grid needs at least 3 points, got {count}")
        return cls(np.linspace(float(t_min), float(t_max), int(count)), kind="linear")

    @classmethod
    def logspace(cls, t_min: float, t_max: float, count: int) -> "TimeGrid":
        """Geometrically spaced grid; requires t_min > 0."""
        if t_min <= 0.0:
            raise GridError(f"log grid needs t_min > 0, got {t_min}")
        if count < 3:
            raise GridTooCoarse(f"grid needs at least 3 points, got {count}")
        return cls(
            np.geomspace(float(t_min), float(t_max), int(count)), kind="log"
        )

    @classmethod
    def linear_then_log(
        cls, t_start: float, t_break: float, t_max: float,
        linear_count: int, log_count: int,
    ) -> "TimeGrid":
        """Linear spacing on [t_start, t_break], geometric on (t_break, t_max].

        Used by the wide-horizon presets: linear resolution near the origin,
        log resolution over the asymptotic decades.
        """
        head = np.linspace(float(t_start), float(t_break), int(linear_count))
        tail = np.geomspace(float(t_break), float(t_max), int(log_count))[1:]
        return cls(np.concatenate([head, tail]), kind="composite")

    @property
    def t_min(self) -> float:
        return float(self.points[0])

    @property
    def t_max(self) -> float:
        return float(self.points[-1])

    @property
    def count(self) -> int:
        return int(self.points.size)

    def decades_spanned(self) -> float:
        """log10(t_max / t_min_positive); inf if no positive point exists."""
        positive = self.points[self.points > 0.0]
        if positive.size == 0:
            return 0.0
        return float(np.log10(self.t_max / positive[0]))

    def __len__(self) -> int:
        return self.count

    def __iter__(self):
        return iter(self.points)
