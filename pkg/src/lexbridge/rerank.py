"""Pair scoring, truncation, and correspondence record output.

Scoring is pluggable: a remote cross-encoder service speaking a small JSON
wire protocol, or a deterministic lexical fallback (trigram Jaccard) that
keeps the whole pipeline runnable offline.
"""
from __future__ import annotations

import hashlib
import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import requests

from lexbridge.corpus import Corpus
from lexbridge.embeddings import VectorStore, char_trigrams
from lexbridge.errors import (
    ConfigInvalid,
    IoFailure,
    MissingText,
    ServiceBadResponse,
    ServiceUnreachable,
)
from lexbridge.retrieval import CandidateSet, RetrievalConfig, build_index, retrieve

SCORERS = ("lexical_fallback", "remote_service")


@dataclass(frozen=True)
class RerankConfig:
    topk_final: int = 60
    scorer: str = "lexical_fallback"
    service_endpoint: str | None = None
    score_floor: float | None = None
    max_in_flight: int = 4
    batch_size: int = 32

    def __post_init__(self):
        if self.topk_final < 1:
            raise ConfigInvalid(f"topk_final must be >= 1, got {self.topk_final}")
        if self.scorer not in SCORERS:
            raise ConfigInvalid(f"unknown scorer {self.scorer!r}, expected one of {SCORERS}")
        if self.scorer == "remote_service" and not self.service_endpoint:
            raise ConfigInvalid("remote_service scorer requires service_endpoint")
        if self.max_in_flight < 1 or self.batch_size < 1:
            raise ConfigInvalid("max_in_flight and batch_size must be >= 1")


@dataclass(frozen=True)
class Link:
    provision_id: str
    country: str
    rerank_score: float
    sim_score: float


@dataclass(frozen=True)
class CorrespondenceRecord:
    query_id: str
    query_text_digest: str
    scorer_tag: str
    links: tuple


def text_digest(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def lexical_score(a: str, b: str) -> float:
    """Jaccard similarity of the character-trigram sets of two texts."""
    if not a or not b:
        raise MissingText("lexical scorer needs two non-empty texts")
    ta = set(char_trigrams(a))
    tb = set(char_trigrams(b))
    union = len(ta | tb)
    return len(ta & tb) / union if union else 0.0


def logistic(x: float) -> float:
    if x >= 0:
        return 1.0 / (1.0 + math.exp(-x))
    e = math.exp(x)
    return e / (1.0 + e)


class LexicalScorer:
    """Deterministic offline pair scorer."""

    tag = "lexical_fallback"

    def score_pairs(self, pairs: list[tuple[str, str]]) -> list[float]:
        return [lexical_score(q, c) for q, c in pairs]


class RemoteScorer:
    """Client for the cross-encoder scoring wire protocol.

    POSTs {"pairs": [{"query_text", "candidate_text"}]} and expects
    {"scores": [...]} in the same order. Batches are scored with at most
    ``max_in_flight`` concurrent requests; returned scores outside [0, 1]
    are squashed through the logistic function.
    """

    tag = "remote_service"

    def __init__(self, endpoint: str, max_in_flight: int = 4, batch_size: int = 32,
                 timeout: float = 30.0):
        self.endpoint = endpoint
        self.max_in_flight = max_in_flight
        self.batch_size = batch_size
        self.timeout = timeout

    def _score_batch(self, batch: list[tuple[str, str]]) -> list[float]:
        payload = {"pairs": [{"query_text": q, "candidate_text": c} for q, c in batch]}
        try:
            resp = requests.post(self.endpoint, json=payload, timeout=self.timeout)
        except requests.RequestException as exc:
            raise ServiceUnreachable(f"{self.endpoint}: {exc}") from exc
        if resp.status_code != 200:
            raise ServiceBadResponse(f"HTTP {resp.status_code}: {resp.text[:200]}")
        try:
            scores = resp.json()["scores"]
        except (ValueError, KeyError, TypeError) as exc:
            raise ServiceBadResponse(f"unparseable response: {exc}") from exc
        if not isinstance(scores, list) or len(scores) != len(batch):
            raise ServiceBadResponse(
                f"expected {len(batch)} scores, got {scores!r:.200}")
        out = []
        for s in scores:
            if not isinstance(s, (int, float)):
                raise ServiceBadResponse(f"non-numeric score {s!r}")
            s = float(s)
            out.append(s if 0.0 <= s <= 1.0 else logistic(s))
        return out

    def score_pairs(self, pairs: list[tuple[str, str]]) -> list[float]:
        if not pairs:
            return []
        batches = [pairs[i:i + self.batch_size]
                   for i in range(0, len(pairs), self.batch_size)]
        if len(batches) == 1:
            return self._score_batch(batches[0])
        with ThreadPoolExecutor(max_workers=self.max_in_flight) as pool:
            results = list(pool.map(self._score_batch, batches))
        return [s for batch in results for s in batch]


def make_scorer(cfg: RerankConfig):
    if cfg.scorer == "remote_service":
        return RemoteScorer(cfg.service_endpoint, cfg.max_in_flight, cfg.batch_size)
    return LexicalScorer()


def score_pairs(query, candidates: CandidateSet, scorer, corpus: Corpus,
                ) -> list[tuple[str, float]]:
    """Score every (query, candidate) text pair; one score in [0, 1] each.

    Raises MissingText when a candidate text cannot be resolved.
    """
    if not query.text:
        raise MissingText(f"query {query.provision_id} has no text")
    pairs = []
    for cand in candidates.candidates:
        p = corpus.get(cand.provision_id)
        if p is None or not p.text:
            raise MissingText(f"candidate {cand.provision_id} has no text")
        pairs.append((query.text, p.text))
    scores = scorer.score_pairs(pairs)
    return [(cand.provision_id, score)
            for cand, score in zip(candidates.candidates, scores)]


def finalize(query_id: str, query_digest: str, scored: list[tuple[str, float]],
             candidates: CandidateSet, cfg: RerankConfig, scorer_tag: str,
             ) -> CorrespondenceRecord:
    """Order by rerank score, apply the optional floor, truncate to
    topk_final, and attach the retrieval sim_score to each link."""
    by_id = {c.provision_id: c for c in candidates.candidates}
    links = []
    for pid, score in scored:
        cand = by_id[pid]
        links.append(Link(provision_id=pid, country=cand.country,
                          rerank_score=score, sim_score=cand.sim_score))
    links.sort(key=lambda l: (-l.rerank_score, l.provision_id, l.country))
    if cfg.score_floor is not None:
        links = [l for l in links if l.rerank_score >= cfg.score_floor]
    return CorrespondenceRecord(
        query_id=query_id,
        query_text_digest=query_digest,
        scorer_tag=scorer_tag,
        links=tuple(links[:cfg.topk_final]),
    )


def run_linking(corpus: Corpus, store: VectorStore, retrieval_cfg: RetrievalConfig,
                rerank_cfg: RerankConfig, out_path, scorer=None) -> list[CorrespondenceRecord]:
    """Retrieve, rerank, and write one CorrespondenceRecord per query-country
    provision, sorted by (law_id, ordinal). The file is written to a temp
    path and atomically renamed, so interrupted runs leave nothing partial.
    """
    if scorer is None:
        scorer = make_scorer(rerank_cfg)

    queries = sorted(corpus.for_country(retrieval_cfg.query_country),
                     key=lambda p: (p.law_id, p.ordinal))
    index = build_index(store, corpus)

    records = []
    for query in queries:
        vector = store.get(query.provision_id)
        candidate_set = retrieve(index, query, vector, retrieval_cfg)
        scored = score_pairs(query, candidate_set, scorer, corpus)
        records.append(finalize(query.provision_id, text_digest(query.text),
                                scored, candidate_set, rerank_cfg, scorer.tag))

    write_correspondences(records, out_path, scorer_tag=scorer.tag,
                          query_country=retrieval_cfg.query_country)
    return records


def write_correspondences(records, path, scorer_tag: str, query_country: str) -> None:
    """Correspondence file: header line, then one record per line with
    scores at 6 decimal places."""
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(path.suffix + ".tmp")
        with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
            header = {"kind": "correspondences", "scorer": scorer_tag,
                      "query_country": query_country, "count": len(records)}
            fh.write(json.dumps(header, separators=(",", ":")) + "\n")
            for rec in records:
                fh.write(json.dumps(_record_to_json(rec), ensure_ascii=False,
                                    separators=(",", ":")) + "\n")
        os.replace(tmp, path)
    except OSError as exc:
        raise IoFailure(str(exc)) from exc


def _record_to_json(rec: CorrespondenceRecord) -> dict:
    return {
        "query_id": rec.query_id,
        "query_text_digest": rec.query_text_digest,
        "scorer_tag": rec.scorer_tag,
        "links": [
            {"provision_id": l.provision_id, "country": l.country,
             "rerank_score": round(l.rerank_score, 6),
             "sim_score": round(l.sim_score, 6)}
            for l in rec.links
        ],
    }


def read_correspondences(path) -> tuple[dict, list[CorrespondenceRecord]]:
    """Read back a correspondence file; returns (header, records)."""
    try:
        with open(path, encoding="utf-8") as fh:
            lines = [ln for ln in (raw.strip() for raw in fh) if ln]
    except OSError as exc:
        raise IoFailure(str(exc)) from exc
    if not lines:
        raise IoFailure(f"{path}: empty correspondence file, header expected")
    header = json.loads(lines[0])
    records = []
    for line in lines[1:]:
        raw = json.loads(line)
        links = tuple(Link(provision_id=l["provision_id"], country=l["country"],
                           rerank_score=float(l["rerank_score"]),
                           sim_score=float(l["sim_score"]))
                      for l in raw["links"])
        records.append(CorrespondenceRecord(
            query_id=raw["query_id"],
            query_text_digest=raw["query_text_digest"],
            scorer_tag=raw["scorer_tag"],
            links=links,
        ))
    return header, records
