"""Request/response envelopes for the HTTP service.

Pydantic validates the envelope shape (grids, tolerances, flags).  The
polymorphic domain payloads -- discount specs, mixtures, bundles -- stay
as raw dicts here and are parsed by the library's strict wire-format
parsers, so the service and the CLI accept byte-for-byte the same JSON.
"""

from __future__ import annotations

from typing import Literal

from pydantic import BaseModel, ConfigDict, Field

from ..grids import TimeGrid

__all__ = [
    "GridModel",
    "AnalyzeRequest",
    "CompareRequest",
    "MixRequest",
    "CERequest",
    "SvgRequest",
    "ScenarioResponse",
    "SvgResponse",
    "ErrorResponse",
]


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class GridModel(_Strict):
    """Evaluation grid: endpoints, point count, linear or log spacing."""

    t_min: float
    t_max: float
    count: int = Field(ge=3, le=100_000)
    kind: Literal["lin", "log"] = "lin"

    def build(self) -> TimeGrid:
        if self.kind == "log":
            return TimeGrid.logspace(self.t_min, self.t_max, self.count)
        return TimeGrid.linear(self.t_min, self.t_max, self.count)


class AnalyzeRequest(_Strict):
    spec: dict
    grid: GridModel | None = None
    tol: float | None = Field(default=None, gt=0)
    fd_step: float | None = Field(default=None, gt=0)
    svg: bool = False


class CompareRequest(_Strict):
    first: dict
    second: dict
    grid: GridModel | None = None
    tol: float | None = Field(default=None, gt=0)
    svg: bool = False


class MixRequest(_Strict):
    mixture: dict
    grid: GridModel | None = None
    tol: float | None = Field(default=None, gt=0)
    svg: bool = False


class CERequest(_Strict):
    bundle: dict
    grid: GridModel | None = None
    svg: bool = False


class SvgRequest(_Strict):
    csv: str
    title: str = ""
    x_label: str = ""
    y_label: str = "value"
    log_x: bool | None = None


class ScenarioResponse(_Strict):
    summary: dict
    files: dict[str, str]


class SvgResponse(_Strict):
    svg: str


class ErrorResponse(_Strict):
    error: str
    kind: Literal["parse", "domain"]
