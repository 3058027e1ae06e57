"""HTTP surface: the three wire-protocol endpoints.

Error mapping: malformed request bodies return 400, structurally valid
bodies with invalid ids/positions return 422, inference failures 500.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from .backend import ModelBackend


class ClassifyRequest(BaseModel):
    sentences: list[list[int]]


class FillMaskRequest(BaseModel):
    tokens: list[int]
    positions: list[int]


def create_app(backend: ModelBackend) -> FastAPI:
    app = FastAPI(title="margattr model server", docs_url=None, redoc_url=None)
    meta = backend.meta()
    mask_id = meta["mask_id"]
    vocab_size = meta["vocab_size"]

    @app.exception_handler(RequestValidationError)
    async def malformed_body(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"error": "malformed body", "detail": exc.errors()})

    @app.exception_handler(Exception)
    async def inference_failure(request: Request, exc: Exception):
        return JSONResponse(status_code=500, content={"error": f"inference failure: {exc}"})

    def check_ids(ids, what: str) -> None:
        for tid in ids:
            if not 0 <= tid < vocab_size:
                raise HTTPException(status_code=422, detail=f"{what} id {tid} outside vocabulary")

    @app.get("/v1/meta")
    def get_meta() -> dict:
        return meta

    @app.post("/v1/classify")
    def classify(body: ClassifyRequest) -> dict:
        if not body.sentences:
            raise HTTPException(status_code=422, detail="empty batch")
        for sent in body.sentences:
            if not sent:
                raise HTTPException(status_code=422, detail="empty sentence")
            check_ids(sent, "token")
        return {"class_count": meta["class_count"], "probs": backend.classify(body.sentences)}

    @app.post("/v1/fill-mask")
    def fill_mask(body: FillMaskRequest) -> dict:
        if not body.tokens:
            raise HTTPException(status_code=422, detail="empty token sequence")
        if not body.positions:
            raise HTTPException(status_code=422, detail="no positions given")
        check_ids(body.tokens, "token")
        if len(set(body.positions)) != len(body.positions):
            raise HTTPException(status_code=422, detail="duplicate positions")
        for pos in body.positions:
            if not 0 <= pos < len(body.tokens):
                raise HTTPException(status_code=422, detail=f"position {pos} outside sequence")
            if body.tokens[pos] != mask_id:
                raise HTTPException(
                    status_code=422, detail=f"position {pos} does not hold the mask token {mask_id}"
                )
        return {"distributions": backend.fill_mask(body.tokens, body.positions)}

    return app
