"""HTTP service wrapping the analysis library."""

from .app import app, create_app
from .schemas import (
    AnalyzeRequest,
    CERequest,
    CompareRequest,
    ErrorResponse,
    GridModel,
    MixRequest,
    ScenarioResponse,
    SvgRequest,
    SvgResponse,
)

__all__ = [
    "app",
    "create_app",
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
