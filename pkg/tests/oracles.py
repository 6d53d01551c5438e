"""Independent reference implementations used to check the real ones.

These stay deliberately primitive: straight-line loops, stdlib only, no
imports from the package paths they verify.
"""
from __future__ import annotations

import math
import re


def fnv1a64_oracle(data: bytes) -> int:
    h = 14695981039346656037
    for b in data:
        h = h ^ b
        h = (h * 1099511628211) % (2 ** 64)
    return h


def trigram_embed_oracle(text: str, dim: int) -> list[float]:
    """Straight-line reimplementation of the hashed-trigram unit vector."""
    text = text.lower()
    if len(text) >= 3:
        grams = []
        for i in range(len(text) - 2):
            grams.append(text[i] + text[i + 1] + text[i + 2])
    else:
        grams = [text]

    vec = [0.0] * dim
    for gram in grams:
        h = fnv1a64_oracle(gram.encode("utf-8"))
        ones = 0
        x = h
        while x:
            ones += x & 1
            x >>= 1
        sign = 1.0 if ones % 2 == 0 else -1.0
        vec[h % dim] += sign

    norm = math.sqrt(sum(x * x for x in vec))
    if norm == 0.0:
        vec[fnv1a64_oracle(text.encode("utf-8")) % dim] = 1.0
        norm = 1.0
    return [x / norm for x in vec]


def cosine_oracle(u: list[float], v: list[float]) -> float:
    nu = math.sqrt(sum(x * x for x in u))
    nv = math.sqrt(sum(x * x for x in v))
    return sum(a * b for a, b in zip(u, v)) / (nu * nv)


def brute_force_topk(ids: list[str], vectors, query, k: int) -> list[str]:
    """Exact top-k ids by dot product, pure-python arithmetic."""
    scored = []
    for pid, vec in zip(ids, vectors):
        dot = 0.0
        for a, b in zip(vec, query):
            dot += float(a) * float(b)
        scored.append((pid, dot))
    scored.sort(key=lambda t: (-t[1], t[0]))
    return [pid for pid, _ in scored[:k]]


def jaccard_oracle(a: str, b: str) -> float:
    def grams(t: str) -> set:
        t = t.lower()
        if len(t) < 3:
            return {t}
        out = set()
        for i in range(len(t) - 2):
            out.add(t[i:i + 3])
        return out

    ga, gb = grams(a), grams(b)
    union = ga | gb
    if not union:
        return 0.0
    return len(ga & gb) / len(union)


def count_elements(xml_text: str, name: str) -> int:
    """Count start tags of exactly this element name, by regex (independent
    of any XML library)."""
    return len(re.findall(rf"<{re.escape(name)}[\s/>]", xml_text))


def count_article_eids(akn_xml: str) -> int:
    """Count article-level eIds in serialized AKN: art_<num> with no dots."""
    return len(re.findall(r'eId="art_[^".]+"', akn_xml))


def filter_edges_oracle(records, rules: dict) -> list[tuple]:
    """Brute-force reimplementation of threshold + per-country cap.

    rules: country -> (min_score, max_edges). Returns (query, target, score)
    tuples."""
    out = []
    for record in records:
        for country in sorted({l.country for l in record.links}):
            min_score, max_edges = rules[country]
            passing = [l for l in record.links
                       if l.country == country and l.rerank_score >= min_score]
            passing.sort(key=lambda l: (-l.rerank_score, l.provision_id))
            for link in passing[:max_edges]:
                out.append((record.query_id, link.provision_id, link.rerank_score))
    return out


def recount_stats(graph) -> dict:
    """Walk the edge list from scratch and recount what graph_stats reports."""
    per_country = {}
    for n in graph.nodes:
        per_country[n.country] = per_country.get(n.country, 0) + 1
    degrees = {n.provision_id: 0 for n in graph.nodes}
    for e in graph.edges:
        degrees[e.query_id] += 1
        degrees[e.target_id] += 1
    return {
        "nodes_total": len(graph.nodes),
        "nodes_per_country": per_country,
        "edges_total": len(graph.edges),
        "degrees": degrees,
    }


def pipeline_oracle(queries, pool, topk_cand, pre_per_country, quotas,
                    topk_final, score_fn) -> dict:
    """End-to-end brute-force re-derivation of per-query links.

    queries/pool: lists of (provision_id, country, text, vector). Returns
    query_id -> ordered list of (provision_id, rerank_score).
    """
    results = {}
    for qid, qcountry, qtext, qvec in queries:
        scored = []
        for pid, country, text, vec in pool:
            if country not in quotas or country == qcountry or pid == qid:
                continue
            dot = 0.0
            for a, b in zip(qvec, vec):
                dot += float(a) * float(b)
            scored.append((pid, country, text, dot))
        scored.sort(key=lambda t: (-t[3], t[0], t[1]))
        scored = scored[:topk_cand]

        seen = {}
        pre = []
        for entry in scored:
            c = entry[1]
            seen[c] = seen.get(c, 0) + 1
            if seen[c] <= pre_per_country:
                pre.append(entry)
        seen = {}
        kept = []
        for entry in pre:
            c = entry[1]
            seen[c] = seen.get(c, 0) + 1
            if seen[c] <= quotas[c]:
                kept.append(entry)

        reranked = [(pid, c, score_fn(qtext, text)) for pid, c, text, _ in kept]
        reranked.sort(key=lambda t: (-t[2], t[0], t[1]))
        results[qid] = [(pid, score) for pid, _, score in reranked[:topk_final]]
    return results
