from __future__ import annotations

import hashlib
import socket
import threading
import time

import numpy as np
import pytest
import uvicorn


class HashEncoder:
    """Deterministic stand-in for a sentence-transformers encoder.

    Mirrors the encode() signature the exporter relies on and records the
    texts it saw so tests can assert prefixing.
    """

    def __init__(self, dim: int = 32):
        self.dim = dim
        self.seen: list[str] = []

    def encode(self, texts, batch_size=32, convert_to_numpy=True,
               normalize_embeddings=True, show_progress_bar=False):
        self.seen.extend(texts)
        rows = []
        for text in texts:
            digest = hashlib.sha256(text.encode("utf-8")).digest()
            raw = np.frombuffer((digest * ((self.dim * 4) // len(digest) + 1))
                                [: self.dim * 4], dtype=np.uint32)
            vec = raw.astype(np.float64) - raw.mean()
            if not vec.any():
                vec = np.ones(self.dim)
            if normalize_embeddings:
                vec = vec / np.linalg.norm(vec)
            rows.append(vec)
        return np.vstack(rows)


class OverlapScorer:
    """Token-overlap pair scorer used in place of a cross-encoder."""

    def __init__(self):
        self.calls = 0
        self.lock = threading.Lock()

    def __call__(self, pairs):
        with self.lock:
            self.calls += 1
        scores = []
        for query, candidate in pairs:
            a, b = set(query.split()), set(candidate.split())
            union = a | b
            scores.append(len(a & b) / len(union) if union else 0.0)
        return scores


@pytest.fixture()
def hash_encoder():
    return HashEncoder()


def _free_port() -> int:
    with socket.socket() as sock:
        sock.bind(("127.0.0.1", 0))
        return sock.getsockname()[1]


@pytest.fixture()
def scoring_server():
    """A live uvicorn server around the app with the overlap scorer."""
    from lexbridge_adapter.service import create_app

    scorer = OverlapScorer()
    port = _free_port()
    config = uvicorn.Config(create_app(scorer), host="127.0.0.1", port=port,
                            log_level="error")
    server = uvicorn.Server(config)
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    deadline = time.time() + 10
    while not server.started:
        if time.time() > deadline:
            raise RuntimeError("scoring server did not start")
        time.sleep(0.02)
    yield f"http://127.0.0.1:{port}/score", scorer
    server.should_exit = True
    thread.join(timeout=5)


def write_corpus_jsonl(path, rows):
    """Corpus records in the documented file format, bypassing the core."""
    import json

    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for row in rows:
            fh.write(json.dumps(row, ensure_ascii=False, separators=(",", ":")) + "\n")
