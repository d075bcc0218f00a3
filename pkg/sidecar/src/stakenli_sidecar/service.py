"""FastAPI app exposing /v1/health, /v1/entail, and /v1/ner.

Inference is serialized behind a lock, so concurrent requests queue; the
score order inside one /v1/entail body always matches the pair order.
"""

from __future__ import annotations

import threading

from fastapi import FastAPI
from pydantic import BaseModel

from .backends import EntailmentBackend
from .ner import NerBackend


class Pair(BaseModel):
    premise: str
    hypothesis: str


class EntailRequest(BaseModel):
    pairs: list[Pair]


class EntailResponse(BaseModel):
    scores: list[float]


class NerRequest(BaseModel):
    text: str


class Entity(BaseModel):
    surface: str
    kind: str
    start: int
    end: int


class NerResponse(BaseModel):
    entities: list[Entity]


class HealthResponse(BaseModel):
    status: str
    model: str


def create_app(
    entail_backend: EntailmentBackend,
    ner_backend: NerBackend,
    model_name: str | None = None,
) -> FastAPI:
    app = FastAPI(title="stakenli-sidecar")
    inference_lock = threading.Lock()
    name = model_name or entail_backend.name

    @app.get("/v1/health", response_model=HealthResponse)
    def health():
        return HealthResponse(status="ok", model=name)

    @app.post("/v1/entail", response_model=EntailResponse)
    def entail(request: EntailRequest):
        pairs = [(p.premise, p.hypothesis) for p in request.pairs]
        with inference_lock:
            scores = entail_backend.score_pairs(pairs)
        return EntailResponse(scores=[float(s) for s in scores])

    @app.post("/v1/ner", response_model=NerResponse)
    def ner(request: NerRequest):
        with inference_lock:
            entities = ner_backend.extract(request.text)
        return NerResponse(entities=[Entity(**e) for e in entities])

    return app
