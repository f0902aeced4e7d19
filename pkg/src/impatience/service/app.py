"""HTTP front end: routes requests to the scenario runners.

Error contract: malformed payloads return 400 with ``kind="parse"``;
well-formed payloads whose values violate a mathematical precondition
(bad parameters, out-of-domain times, too-coarse grids) return 422 with
``kind="domain"``.  Both bodies are machine-readable ``ErrorResponse``
objects, mirroring the CLI's exit codes 2 and 3.
"""

from __future__ import annotations

from fastapi import FastAPI, Query
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse

from .. import __version__
from ..ce import bundle_from_dict
from ..discount import spec_from_dict
from ..errors import DomainError, ParseError
from ..mixtures import mixture_from_dict
from ..scenarios import (
    ScenarioResult,
    figure1,
    figure2,
    figure3,
    household,
    run_analyze,
    run_ce,
    run_compare,
    run_mix,
)
from ..svg import PlotStyle, render_svg
from .schemas import (
    AnalyzeRequest,
    CERequest,
    CompareRequest,
    ErrorResponse,
    MixRequest,
    ScenarioResponse,
    SvgRequest,
    SvgResponse,
)

__all__ = ["create_app", "app"]

_ERROR_RESPONSES = {
    400: {"model": ErrorResponse},
    422: {"model": ErrorResponse},
}


def _with_charts(result: ScenarioResult, want_svg: bool) -> ScenarioResponse:
    files = dict(result.files)
    if want_svg:
        for name in list(files):
            if name.endswith(".csv"):
                files[name[:-4] + ".svg"] = render_svg(files[name])
    return ScenarioResponse(summary=result.summary, files=files)


def create_app() -> FastAPI:
    app = FastAPI(
        title="impatience",
        version=__version__,
        description="Discount-function impatience analysis service",
    )

    @app.exception_handler(ParseError)
    async def _parse_error(request, exc: ParseError):
        return JSONResponse(status_code=400, content={"error": str(exc), "kind": "parse"})

    @app.exception_handler(DomainError)
    async def _domain_error(request, exc: DomainError):
        return JSONResponse(status_code=422, content={"error": str(exc), "kind": "domain"})

    @app.exception_handler(RequestValidationError)
    async def _validation_error(request, exc: RequestValidationError):
        detail = "; ".join(
            f"{'.'.join(str(p) for p in err.get('loc', ()))}: {err.get('msg', '')}"
            for err in exc.errors()
        )
        return JSONResponse(
            status_code=400,
            content={"error": f"invalid request: {detail}", "kind": "parse"},
        )

    @app.get("/health")
    async def health() -> dict:
        return {"status": "ok", "version": __version__}

    @app.post("/analyze", response_model=ScenarioResponse, responses=_ERROR_RESPONSES)
    async def analyze(req: AnalyzeRequest) -> ScenarioResponse:
        spec = spec_from_dict(req.spec)
        grid = req.grid.build() if req.grid else None
        result = run_analyze(spec, grid=grid, tol=req.tol, fd_step=req.fd_step)
        return _with_charts(result, req.svg)

    @app.post("/compare", response_model=ScenarioResponse, responses=_ERROR_RESPONSES)
    async def compare(req: CompareRequest) -> ScenarioResponse:
        d1 = spec_from_dict(req.first)
        d2 = spec_from_dict(req.second)
        grid = req.grid.build() if req.grid else None
        result = run_compare(d1, d2, grid=grid, tol=req.tol)
        return _with_charts(result, req.svg)

    @app.post("/mix", response_model=ScenarioResponse, responses=_ERROR_RESPONSES)
    async def mix_endpoint(req: MixRequest) -> ScenarioResponse:
        m = mixture_from_dict(req.mixture)
        grid = req.grid.build() if req.grid else None
        result = run_mix(m, grid=grid, tol=req.tol)
        return _with_charts(result, req.svg)

    @app.post("/ce", response_model=ScenarioResponse, responses=_ERROR_RESPONSES)
    async def ce_endpoint(req: CERequest) -> ScenarioResponse:
        bundle = bundle_from_dict(req.bundle)
        grid = req.grid.build() if req.grid else None
        result = run_ce(bundle, grid=grid)
        return _with_charts(result, req.svg)

    @app.post("/svg", response_model=SvgResponse, responses=_ERROR_RESPONSES)
    async def svg_endpoint(req: SvgRequest) -> SvgResponse:
        style = PlotStyle(
            title=req.title, x_label=req.x_label, y_label=req.y_label, log_x=req.log_x
        )
        return SvgResponse(svg=render_svg(req.csv, style))

    _FIGURES = {1: figure1, 2: figure2, 3: figure3}

    @app.get("/figure/{number}", response_model=ScenarioResponse, responses=_ERROR_RESPONSES)
    async def figure(number: int, svg: bool = Query(default=False)) -> ScenarioResponse:
        preset = _FIGURES.get(number)
        if preset is None:
            raise ParseError(f"unknown figure {number}; choose 1, 2 or 3")
        return _with_charts(preset(), svg)

    @app.get("/household", response_model=ScenarioResponse, responses=_ERROR_RESPONSES)
    async def household_endpoint(
        horizon: int = Query(default=50, ge=1, le=100_000),
        svg: bool = Query(default=False),
    ) -> ScenarioResponse:
        return _with_charts(household(horizon), svg)

    return app


app = create_app()
