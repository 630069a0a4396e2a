"""FastAPI application factory: routers, error mapping, trial-close gate."""

from __future__ import annotations

from contextlib import asynccontextmanager
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse

from ..config import ServiceConfig
from ..errors import GeogiveError, TrialClosed
from .http import error_response
from .runtime import ServiceRuntime
from . import routes_account, routes_admin, routes_offers, routes_public, routes_study

MUTATING_METHODS = {"POST", "PATCH", "PUT", "DELETE"}

# While the trial is closed, user-facing mutations are rejected. Sessions
# stay available (participants must be able to sign in), review submission
# for already-created tasks stays open, and the operator surfaces are exempt.
TRIAL_EXEMPT_PREFIXES = ("/v1/sessions", "/v1/moderation", "/v1/admin")
TRIAL_EXEMPT_EXACT = ("/v1/reviews",)


def create_app(config: ServiceConfig | None = None, runtime: ServiceRuntime | None = None) -> FastAPI:
    runtime = runtime or ServiceRuntime(config or ServiceConfig())

    @asynccontextmanager
    async def lifespan(app: FastAPI):
        runtime.start()
        try:
            yield
        finally:
            runtime.shutdown()

    app = FastAPI(title="geogive", version="0.1.0", lifespan=lifespan)
    app.state.runtime = runtime

    @app.exception_handler(GeogiveError)
    async def handle_domain_error(request: Request, exc: GeogiveError):
        return error_response(exc)

    @app.exception_handler(RequestValidationError)
    async def handle_validation_error(request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=422,
            content={
                "code": "validation_failed",
                "message": "request body or parameters failed validation",
                "details": {"errors": [str(e.get("msg", "")) + " @ " + "/".join(map(str, e.get("loc", ()))) for e in exc.errors()]},
            },
        )

    @app.middleware("http")
    async def trial_gate(request: Request, call_next):
        if request.method in MUTATING_METHODS and request.url.path.startswith("/v1"):
            path = request.url.path.rstrip("/")
            exempt = path in TRIAL_EXEMPT_EXACT or any(path.startswith(p) for p in TRIAL_EXEMPT_PREFIXES)
            if not exempt and runtime.trial_is_closed():
                return error_response(TrialClosed("the trial is closed; only open reviews may still be submitted"))
        return await call_next(request)

    app.include_router(routes_public.router)
    app.include_router(routes_account.router)
    app.include_router(routes_offers.router)
    app.include_router(routes_study.router)
    app.include_router(routes_admin.router)

    if runtime.config.static_dir and Path(runtime.config.static_dir).exists():
        from fastapi.staticfiles import StaticFiles

        app.mount("/app", StaticFiles(directory=runtime.config.static_dir, html=True), name="webapp")

    return app
