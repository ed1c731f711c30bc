"""Stateless HTTP/JSON service exposing simulation, search and fits.

Every endpoint delegates to the same core functions the CLI uses; handlers
share only immutable configuration, so concurrent requests are as good as
serial ones.
"""
from __future__ import annotations

import datetime as dt
from pathlib import Path

import numpy as np
from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles

from ..changepoint import default_cfg, fit_changepoint, fit_report
from ..data_io import RegressionSeries
from ..errors import (
    DegenerateSeries,
    InvalidSchedule,
    NotConverged,
    SpaceTooLarge,
    TooFewPoints,
)
from ..policy import INTENSITY_LEVELS, VACCINE_EFFICIENCY, default_catalog
from ..runner import result_to_dict, scenario_from_dict
from ..scenario import (
    SearchSpace,
    run_scenario,
    search_policies,
    search_space_size,
)
from .config import AppConfig
from .schemas import (
    ChangepointRequest,
    ChangepointResponse,
    PoliciesResponse,
    PolicyOut,
    SearchRequest,
    SearchResponse,
    SimulateRequest,
    SimulateResponse,
)


def create_app(config: AppConfig | None = None) -> FastAPI:
    config = config or AppConfig.from_env()
    app = FastAPI(title="epipolicy", version="0.1.0")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=list(config.cors_origins),
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(InvalidSchedule)
    def _invalid_schedule(request, exc: InvalidSchedule):
        return JSONResponse(status_code=400, content={
            "detail": "schedule validation failed",
            "violations": [
                {"rule": v.rule, "message": v.message, "block_index": v.block_index}
                for v in exc.violations
            ],
        })

    @app.exception_handler(NotConverged)
    def _not_converged(request, exc: NotConverged):
        return JSONResponse(status_code=422, content={
            "detail": str(exc),
            "rhat": {k: float(v) for k, v in exc.rhat.items()},
        })

    @app.exception_handler(SpaceTooLarge)
    def _too_large(request, exc: SpaceTooLarge):
        return JSONResponse(status_code=413, content={
            "detail": str(exc), "size": exc.size, "cap": exc.cap,
        })

    @app.exception_handler(ValueError)
    def _value_error(request, exc: ValueError):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.exception_handler(DegenerateSeries)
    def _degenerate(request, exc: DegenerateSeries):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.exception_handler(TooFewPoints)
    def _too_few(request, exc: TooFewPoints):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.get("/healthz")
    def healthz():
        return {"status": "ok"}

    @app.get("/api/policies", response_model=PoliciesResponse)
    def policies():
        catalog = default_catalog()
        return PoliciesResponse(
            policies=[
                PolicyOut(
                    id=p.id.value, efficiency=p.efficiency,
                    cost_kind=p.cost_kind.value, cost_magnitude=p.cost_magnitude,
                    tracing_cost_per_case=p.tracing_cost_per_case,
                    lag_days=p.lag_days)
                for p in catalog.values()
            ],
            vaccine_efficiency=VACCINE_EFFICIENCY,
            intensity_levels=list(INTENSITY_LEVELS),
        )

    @app.post("/api/simulate", response_model=SimulateResponse)
    def simulate(request: SimulateRequest):
        scenario = scenario_from_dict(request.as_scenario_dict())
        result = run_scenario(scenario)
        return result_to_dict(result)

    @app.post("/api/search", response_model=SearchResponse)
    def search(request: SearchRequest):
        base = scenario_from_dict(request.scenario.as_scenario_dict())
        space = SearchSpace(block_length=request.block_length)
        cap = request.cap if request.cap is not None else config.search_cap
        results = search_policies(space, base, cap=cap,
                                  workers=request.workers,
                                  top_k=request.top_k)
        return SearchResponse(
            evaluated=search_space_size(space, base.horizon),
            results=[
                {
                    "rank": r.rank,
                    "encoding": r.encoding,
                    "schedule": r.schedule.to_json_dict(),
                    "total_cases": r.total_cases,
                    "total_deaths": r.total_deaths,
                    "total_loss": r.total_loss,
                }
                for r in results
            ],
        )

    @app.post("/api/changepoint", response_model=ChangepointResponse)
    def changepoint(request: ChangepointRequest):
        if len(request.dates) != len(request.values):
            raise ValueError("dates and values must have equal length")
        if len(request.dates) < 3:
            raise DegenerateSeries("need at least 3 points")
        day0, day1 = request.dates[0], request.dates[-1]
        span = (day1 - day0).days
        if span <= 0:
            raise ValueError("dates must be increasing")
        values = np.asarray(request.values, dtype=float)
        if np.any(values < 1.0):
            raise ValueError("values must be cumulative counts >= 1")
        t = np.array([(d - day0).days / span for d in request.dates])
        series = RegressionSeries(t=t, y=np.log(values), date_range=(day0, day1))
        seed = request.seed if request.seed is not None else config.default_seed
        cfg = default_cfg(seed=seed, num_warmup=request.num_warmup,
                          num_samples=request.num_samples,
                          num_chains=request.num_chains)
        posterior = fit_changepoint(series, cfg)
        return fit_report(posterior, request.country, request.policy_start)

    ui_dir = config.ui_dir
    if ui_dir is None:
        candidate = Path(__file__).resolve().parents[3] / "frontend" / "dist"
        ui_dir = str(candidate) if candidate.is_dir() else None
    if ui_dir and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
