from __future__ import annotations

import logging
import os
from contextlib import asynccontextmanager

from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware
from starlette.middleware.base import BaseHTTPMiddleware
from starlette.requests import Request

from .api import coxeter, families, verify
from .exceptions import ConfigError

DEFAULT_ORIGINS = "http://localhost:8001,http://127.0.0.1:8001"


def allowed_origins() -> list[str]:
    """Comma-separated ALLOWED_ORIGINS, defaulting to localhost."""
    raw = os.environ.get("ALLOWED_ORIGINS", DEFAULT_ORIGINS)
    return [origin.strip() for origin in raw.split(",") if origin.strip()]


# Security headers middleware


class SecurityHeadersMiddleware(BaseHTTPMiddleware):
    """Add security headers to all responses."""

    async def dispatch(self, request: Request, call_next):
        response = await call_next(request)
        response.headers["X-Content-Type-Options"] = "nosniff"
        response.headers["X-Frame-Options"] = "DENY"
        response.headers["Content-Security-Policy"] = "default-src 'none'; frame-ancestors 'none'"
        response.headers["Cache-Control"] = "no-store"
        return response


@asynccontextmanager
async def lifespan(app: FastAPI):
    """Lifespan context manager for startup and shutdown events."""
    from .settings import config_path, load_settings

    logging.basicConfig(
        level=logging.INFO,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
    )

    try:
        settings = load_settings().validate()
    except ConfigError as e:
        raise RuntimeError(f"Invalid settings in {config_path()}: {e.message}")
    logging.info(f"max_rank={settings.max_rank}, default_radius={settings.default_radius}")
    logging.info(f"Allowed CORS origins: {', '.join(allowed_origins())}")

    yield


app = FastAPI(
    title="LCY Cones",
    description="Read-only service for cones and Weyl group checks of log Calabi-Yau surface families",
    version="0.1.0",
    lifespan=lifespan,
)

app.add_middleware(
    CORSMiddleware,
    allow_origins=allowed_origins(),
    allow_credentials=False,
    allow_methods=["GET", "POST"],
    allow_headers=["Content-Type"],
    max_age=600,
)
app.add_middleware(SecurityHeadersMiddleware)

app.include_router(families.router)
app.include_router(verify.router)
app.include_router(coxeter.router)


@app.get("/api/health")
async def health_check():
    """Health check endpoint"""
    return {"status": "ok"}
