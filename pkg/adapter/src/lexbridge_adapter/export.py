"""Batch embedding export: corpus file in, vector file out.

The default encoder is a sentence-transformers model (the multilingual e5
family by default); any object with a compatible ``encode`` method can be
injected instead, which is how tests run without model downloads. Prefixing
("query: " / "passage: ") is applied here so the core stays model-agnostic;
one prefix is used for every provision because each gets a single vector
serving both retrieval roles.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from lexbridge_adapter import ModelLoadFailure
from lexbridge_adapter.formats import read_corpus_records, write_vector_file

DEFAULT_MODEL = "intfloat/multilingual-e5-large"

PREFIXES = {"query": "query: ", "passage": "passage: ", "none": ""}


@dataclass(frozen=True)
class ExportJob:
    corpus_path: str
    output_path: str
    model_id: str = DEFAULT_MODEL
    batch_size: int = 32
    prefix: str = "query"

    def __post_init__(self):
        if self.prefix not in PREFIXES:
            raise ValueError(f"prefix must be one of {sorted(PREFIXES)}")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")


def load_encoder(model_id: str):
    """Load a sentence-transformers encoder; wraps failures uniformly."""
    try:
        from sentence_transformers import SentenceTransformer

        return SentenceTransformer(model_id)
    except Exception as exc:
        raise ModelLoadFailure(f"cannot load encoder {model_id!r}: {exc}") from exc


def export_embeddings(job: ExportJob, encoder=None) -> dict:
    """Encode every corpus provision and write the vector file.

    Returns the written header. Output order follows corpus order; vectors
    are unit-normalized regardless of what the encoder emits.
    """
    records = read_corpus_records(job.corpus_path)
    if encoder is None:
        encoder = load_encoder(job.model_id)

    prefix = PREFIXES[job.prefix]
    texts = [prefix + r["text"] for r in records]
    ids = [r["provision_id"] for r in records]

    if texts:
        vectors = encoder.encode(texts, batch_size=job.batch_size,
                                 convert_to_numpy=True,
                                 normalize_embeddings=True,
                                 show_progress_bar=False)
        matrix = np.asarray(vectors, dtype=np.float64)
    else:
        matrix = np.zeros((0, 1), dtype=np.float64)

    return write_vector_file(job.output_path, ids, matrix,
                             provider=job.model_id)
