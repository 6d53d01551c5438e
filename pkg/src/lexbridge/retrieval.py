"""Nearest-neighbor candidate generation with country quotas.

The index is an exact flat index: corpora are a few thousand provisions, so
exhaustive dot products beat an approximate structure at this scale and keep
results reproducible. Candidate selection happens in three steps: top-k over
the target countries, a per-country pre-cap, then the per-country quota.
Ties are broken by (country, provision_id) ascending so identical inputs
always produce identical candidate sets.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from lexbridge.errors import ConfigInvalid, DimMismatch, EmptyIndex, UnknownProvision
from lexbridge.corpus import Corpus, Provision
from lexbridge.embeddings import VectorStore


def _default_quotas() -> dict[str, int]:
    return {"KR": 30, "FR": 30}


@dataclass(frozen=True)
class RetrievalConfig:
    topk_cand: int = 120
    pre_per_country: int = 80
    quota_per_country: dict = field(default_factory=_default_quotas)
    target_countries: tuple = ("KR", "FR")
    query_country: str = "JP"

    def __post_init__(self):
        quotas = dict(self.quota_per_country)
        targets = tuple(self.target_countries)
        object.__setattr__(self, "quota_per_country", quotas)
        object.__setattr__(self, "target_countries", targets)
        if not targets:
            raise ConfigInvalid("target_countries is empty")
        missing = [c for c in targets if c not in quotas]
        if missing:
            raise ConfigInvalid(f"no quota for target countries: {missing}")
        if not quotas or min(quotas.values()) < 1:
            raise ConfigInvalid("every quota must be >= 1")
        if not (self.topk_cand >= self.pre_per_country >= max(quotas.values()) >= 1):
            raise ConfigInvalid(
                f"need topk_cand >= pre_per_country >= max quota >= 1, got "
                f"{self.topk_cand} / {self.pre_per_country} / {max(quotas.values())}")
        if self.query_country in targets:
            raise ConfigInvalid(
                f"query country {self.query_country} must not be a target country")


@dataclass(frozen=True)
class Candidate:
    provision_id: str
    country: str
    sim_score: float


@dataclass(frozen=True)
class CandidateSet:
    query_id: str
    candidates: tuple


class FlatIndex:
    """Exact top-k by descending inner product over all records."""

    def __init__(self, ids: list[str], countries: list[str], matrix: np.ndarray):
        self.ids = ids
        self.countries = countries
        self.matrix = matrix

    @property
    def dim(self) -> int:
        return int(self.matrix.shape[1])

    def __len__(self) -> int:
        return len(self.ids)

    def _scores(self, vector) -> np.ndarray:
        v = np.asarray(vector, dtype=np.float64)
        if v.shape != (self.dim,):
            raise DimMismatch(f"query dim {v.shape} vs index dim {self.dim}")
        return self.matrix @ v

    def search(self, vector, k: int) -> list[tuple[str, float]]:
        """Raw top-k over every record, no country logic. Ties break by
        provision_id ascending."""
        scores = self._scores(vector)
        order = sorted(range(len(self.ids)), key=lambda i: (-scores[i], self.ids[i]))
        return [(self.ids[i], float(scores[i])) for i in order[:k]]


def build_index(store: VectorStore, corpus: Corpus) -> FlatIndex:
    """Index every store record, resolving countries through the corpus.

    Raises EmptyIndex for an empty store and UnknownProvision for ids the
    corpus cannot resolve.
    """
    if len(store) == 0:
        raise EmptyIndex("no records to index")
    countries = []
    for pid in store.ids:
        country = corpus.country_of(pid)
        if country is None:
            raise UnknownProvision(pid)
        countries.append(country)
    return FlatIndex(list(store.ids), countries, store.matrix)


def retrieve(index: FlatIndex, query: Provision, query_vector,
             cfg: RetrievalConfig) -> CandidateSet:
    """Generate the candidate set for one query provision.

    (a) top topk_cand neighbors drawn from the target countries (the query's
    own country is never a target), (b) keep at most pre_per_country per
    country, (c) apply quota_per_country; lowest-scored entries drop first at
    each step. Result ordered by score descending; ties order by
    provision_id ascending, which for corpus ids (country-prefixed) equals
    (country, provision_id) ascending.
    """
    scores = index._scores(query_vector)
    targets = set(cfg.target_countries)

    pool = [i for i, c in enumerate(index.countries)
            if c in targets and c != query.country and index.ids[i] != query.provision_id]
    pool.sort(key=lambda i: (-scores[i], index.ids[i], index.countries[i]))

    kept = pool[:cfg.topk_cand]

    per_country: dict[str, int] = {}
    pre_kept = []
    for i in kept:
        c = index.countries[i]
        per_country[c] = per_country.get(c, 0) + 1
        if per_country[c] <= cfg.pre_per_country:
            pre_kept.append(i)

    per_country.clear()
    final = []
    for i in pre_kept:
        c = index.countries[i]
        per_country[c] = per_country.get(c, 0) + 1
        if per_country[c] <= cfg.quota_per_country[c]:
            final.append(i)

    candidates = tuple(
        Candidate(provision_id=index.ids[i], country=index.countries[i],
                  sim_score=float(scores[i]))
        for i in final)
    return CandidateSet(query_id=query.provision_id, candidates=candidates)


def dump_candidates(candidate_sets, path) -> None:
    """Debug dump: one line per query with ranked candidates, scores at 6
    decimal places."""
    import json

    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for cs in candidate_sets:
            record = {
                "query_id": cs.query_id,
                "candidates": [
                    {"provision_id": c.provision_id, "country": c.country,
                     "sim_score": round(c.sim_score, 6)}
                    for c in cs.candidates
                ],
            }
            fh.write(json.dumps(record, ensure_ascii=False, separators=(",", ":")) + "\n")
