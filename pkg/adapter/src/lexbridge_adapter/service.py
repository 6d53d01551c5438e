"""Cross-encoder scoring endpoint speaking the lexbridge wire protocol.

POST /score with {"pairs": [{"query_text", "candidate_text"}]} returns
{"scores": [...]} in request order. Malformed requests get a structured
error response instead of a crash. Handlers run in a worker thread pool, so
the endpoint tolerates concurrent requests; one lock serializes access to
the underlying model, which is not thread-safe.
"""
from __future__ import annotations

import threading

import uvicorn
from fastapi import FastAPI
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from lexbridge_adapter import ModelLoadFailure

DEFAULT_CROSS_ENCODER = "cross-encoder/ms-marco-MiniLM-L6-v2"


class Pair(BaseModel):
    query_text: str
    candidate_text: str


class ScoreRequest(BaseModel):
    pairs: list[Pair]


class CrossEncoderScorer:
    """Lazy-loading, lock-guarded wrapper around a cross-encoder model."""

    def __init__(self, model_id: str = DEFAULT_CROSS_ENCODER):
        self.model_id = model_id
        self._model = None
        self._lock = threading.Lock()

    def _ensure_model(self):
        if self._model is None:
            try:
                from sentence_transformers import CrossEncoder

                self._model = CrossEncoder(self.model_id)
            except Exception as exc:
                raise ModelLoadFailure(
                    f"cannot load cross-encoder {self.model_id!r}: {exc}") from exc
        return self._model

    def __call__(self, pairs: list[tuple[str, str]]) -> list[float]:
        with self._lock:
            model = self._ensure_model()
            if not pairs:
                return []
            scores = model.predict(pairs, convert_to_numpy=True,
                                   show_progress_bar=False)
            return [float(s) for s in scores]


def create_app(scorer=None) -> FastAPI:
    """Build the scoring app around any callable pairs -> scores."""
    if scorer is None:
        scorer = CrossEncoderScorer()
    app = FastAPI(title="lexbridge scoring service")

    @app.post("/score")
    def score(request: ScoreRequest):
        pairs = [(p.query_text, p.candidate_text) for p in request.pairs]
        try:
            scores = scorer(pairs)
        except Exception as exc:
            return JSONResponse(status_code=500,
                                content={"error": type(exc).__name__,
                                         "message": str(exc)})
        if len(scores) != len(pairs):
            return JSONResponse(status_code=500,
                                content={"error": "ScorerContract",
                                         "message": "score count mismatch"})
        return {"scores": [float(s) for s in scores]}

    return app


def serve_scores(port: int, scorer=None, host: str = "127.0.0.1") -> None:
    """Run the scoring endpoint until interrupted."""
    uvicorn.run(create_app(scorer), host=host, port=port, log_level="warning")
