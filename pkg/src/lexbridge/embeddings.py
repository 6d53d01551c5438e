"""Provision vectors: deterministic trigram test embedder, vector file I/O,
and cosine similarity.

The trigram embedder is a desk-scale stand-in for an external multilingual
model: it feature-hashes character trigrams with a platform-stable 64-bit
hash, so the same text always yields the same unit vector on any machine.
Real model vectors enter through the same vector file format.
"""
from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from lexbridge.errors import (
    BadNorm,
    DimMismatch,
    DuplicateId,
    EmptyText,
    HeaderCountMismatch,
    IoFailure,
    UnknownProvision,
)

# Norm handling at ingestion: drift below _RENORM_TOL is silently fixed
# (float serialization artifacts); anything at or above it is corrupt data.
UNIT_TOL = 1e-6
_RENORM_TOL = 1e-3

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_MASK64 = (1 << 64) - 1


def fnv1a64(data: bytes) -> int:
    """FNV-1a 64-bit hash; stable across runs and platforms."""
    h = _FNV_OFFSET
    for byte in data:
        h = ((h ^ byte) * _FNV_PRIME) & _MASK64
    return h


def char_trigrams(text: str) -> list[str]:
    """Lowercased character trigrams; texts shorter than 3 chars contribute
    themselves as a single gram so every non-empty text has features."""
    text = text.lower()
    if len(text) < 3:
        return [text]
    return [text[i:i + 3] for i in range(len(text) - 2)]


def trigram_embed(text: str, dim: int) -> np.ndarray:
    """Feature-hash character trigrams into a unit vector of length dim.

    bucket = hash mod dim; sign = popcount parity of the hash (even -> +1).
    Deterministic across runs and platforms.

    Raises EmptyText for empty input; requires dim >= 8.
    """
    if dim < 8:
        raise ValueError(f"dim must be >= 8, got {dim}")
    if not text:
        raise EmptyText("cannot embed empty text")

    vec = np.zeros(dim, dtype=np.float64)
    for gram in char_trigrams(text):
        h = fnv1a64(gram.encode("utf-8"))
        sign = 1.0 if bin(h).count("1") % 2 == 0 else -1.0
        vec[h % dim] += sign

    norm = float(np.linalg.norm(vec))
    if norm == 0.0:
        # Opposite-signed grams cancelled in every bucket; fall back to a
        # single deterministic bucket keyed by the whole text.
        vec[fnv1a64(text.lower().encode("utf-8")) % dim] = 1.0
        norm = 1.0
    return vec / norm


def cosine(u, v) -> float:
    """Cosine similarity; equals the dot product for unit vectors.

    Raises DimMismatch on unequal dimensions.
    """
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise DimMismatch(f"{u.shape} vs {v.shape}")
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu == 0.0 or nv == 0.0:
        raise ValueError("cosine undefined for zero vectors")
    return float(np.dot(u / nu, v / nv))


@dataclass(frozen=True)
class VectorFileHeader:
    dim: int
    provider: str
    count: int


class VectorStore:
    """Immutable set of unit vectors keyed by provision_id."""

    def __init__(self, ids: list[str], matrix: np.ndarray, provider: str):
        if matrix.ndim != 2 or len(ids) != matrix.shape[0]:
            raise ValueError("ids and matrix rows must align")
        self.ids = list(ids)
        self.matrix = matrix
        self.provider = provider
        self._index: dict[str, int] = {}
        for i, pid in enumerate(self.ids):
            if pid in self._index:
                raise DuplicateId(pid)
            self._index[pid] = i
        self.matrix.setflags(write=False)

    @property
    def dim(self) -> int:
        return int(self.matrix.shape[1])

    def __len__(self) -> int:
        return len(self.ids)

    def __contains__(self, provision_id: str) -> bool:
        return provision_id in self._index

    def get(self, provision_id: str) -> np.ndarray:
        i = self._index.get(provision_id)
        if i is None:
            raise UnknownProvision(provision_id)
        return self.matrix[i]


def build_store(corpus, dim: int, provider: str = "trigram") -> VectorStore:
    """Embed every corpus provision with the trigram embedder."""
    ids = [p.provision_id for p in corpus]
    matrix = np.zeros((len(ids), dim), dtype=np.float64)
    for i, p in enumerate(corpus):
        matrix[i] = trigram_embed(p.text, dim)
    return VectorStore(ids, matrix, provider)


def ingest_vectors(path, corpus=None) -> VectorStore:
    """Load a vector file into a store.

    Records are re-normalized when their norm drifts by less than 1e-3 and
    rejected (BadNorm) otherwise. When a corpus is bound, every id must
    resolve (UnknownProvision). Header count must match the record count.
    """
    try:
        with open(path, encoding="utf-8") as fh:
            lines = [ln for ln in (raw.strip() for raw in fh) if ln]
    except OSError as exc:
        raise IoFailure(str(exc)) from exc
    if not lines:
        raise IoFailure(f"{path}: empty vector file, header expected")

    head = json.loads(lines[0])
    header = VectorFileHeader(dim=int(head["dim"]), provider=str(head["provider"]),
                              count=int(head["count"]))
    if header.dim <= 0:
        raise IoFailure(f"{path}: non-positive dim in header")

    ids: list[str] = []
    rows: list[np.ndarray] = []
    for line in lines[1:]:
        rec = json.loads(line)
        pid = rec["provision_id"]
        vec = np.asarray(rec["vector"], dtype=np.float64)
        if vec.shape != (header.dim,):
            raise DimMismatch(
                f"{pid}: vector length {vec.shape[0] if vec.ndim == 1 else vec.shape}"
                f" under header dim {header.dim}")
        norm = float(np.linalg.norm(vec))
        if abs(norm - 1.0) >= _RENORM_TOL:
            raise BadNorm(f"{pid}: norm {norm:.6g} deviates by >= {_RENORM_TOL}")
        if abs(norm - 1.0) > UNIT_TOL:
            vec = vec / norm
        if corpus is not None and corpus.get(pid) is None:
            raise UnknownProvision(pid)
        ids.append(pid)
        rows.append(vec)

    if len(ids) != header.count:
        raise HeaderCountMismatch(f"header says {header.count}, file has {len(ids)}")
    matrix = np.vstack(rows) if rows else np.zeros((0, header.dim), dtype=np.float64)
    return VectorStore(ids, matrix, header.provider)


def write_vectors(store: VectorStore, path) -> None:
    """Write a store in the vector file format (header line, then records)."""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(path.suffix + ".tmp")
        with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
            header = {"dim": store.dim, "provider": store.provider, "count": len(store)}
            fh.write(json.dumps(header, separators=(",", ":")) + "\n")
            for i, pid in enumerate(store.ids):
                rec = {"provision_id": pid, "vector": [float(x) for x in store.matrix[i]]}
                fh.write(json.dumps(rec, ensure_ascii=False, separators=(",", ":")) + "\n")
        os.replace(tmp, path)
    except OSError as exc:
        raise IoFailure(str(exc)) from exc
