from __future__ import annotations

import logging

from fastapi import FastAPI

from app.codes_router import router as codes_router
from app.config import settings

logging.basicConfig(level=logging.INFO, format=settings.log_format)

app = FastAPI(title="fewweight", version="1.0.0")


@app.get("/health")
def health() -> dict:
    return {"ok": True}


app.include_router(codes_router)
