from __future__ import annotations

import os

from fastapi import FastAPI
from fastapi.middleware.cors import CORSMiddleware

from api.routes import router as api_router
from cli import __version__
from services.common.config import env_path


def create_app() -> FastAPI:
    app = FastAPI(title="ESM Latency Predictor API", version=__version__)

    raw = os.getenv("ESM_CORS_ALLOW_ORIGINS", "")
    origins = [o.strip() for o in raw.split(",") if o.strip()]
    if origins:
        app.add_middleware(
            CORSMiddleware,
            allow_origins=origins,
            allow_methods=["GET", "POST"],
            allow_headers=["*"],
        )

    app.include_router(api_router, prefix="/api")

    @app.get("/health")
    def health() -> dict:
        model = env_path("ESM_MODEL_PATH")
        return {
            "status": "ok",
            "model_configured": model is not None and model.is_file(),
        }

    return app


app = create_app()
