"""The lexbridge file formats this adapter speaks.

Corpus file: UTF-8 JSON lines, one provision per line, with at least
``provision_id`` and ``text`` fields. Vector file: a JSON header line
``{"dim", "provider", "count"}`` followed by one
``{"provision_id", "vector"}`` record per line, vectors unit-normalized.
The core package is the authority for both formats; nothing here imports it.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np


def read_corpus_records(path) -> list[dict]:
    """Load corpus records in file order."""
    records = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            record = json.loads(line)
            if "provision_id" not in record or "text" not in record:
                raise ValueError(f"{path}: corpus record missing provision_id/text")
            records.append(record)
    return records


def write_vector_file(path, provision_ids: list[str], matrix: np.ndarray,
                      provider: str) -> dict:
    """Write vectors in the core's file format; returns the header."""
    matrix = np.asarray(matrix, dtype=np.float64)
    if matrix.ndim != 2 or matrix.shape[0] != len(provision_ids):
        raise ValueError("matrix rows must align with provision_ids")

    norms = np.linalg.norm(matrix, axis=1)
    if np.any(norms == 0.0):
        raise ValueError("zero vector cannot be unit-normalized")
    matrix = matrix / norms[:, None]

    header = {"dim": int(matrix.shape[1]), "provider": provider,
              "count": len(provision_ids)}
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(json.dumps(header, separators=(",", ":")) + "\n")
        for pid, row in zip(provision_ids, matrix):
            record = {"provision_id": pid, "vector": [float(x) for x in row]}
            fh.write(json.dumps(record, ensure_ascii=False,
                                separators=(",", ":")) + "\n")
    return header
