from __future__ import annotations

import json
import threading

import pytest
import requests


def test_self_pair_scores_at_top_of_range(scoring_server):
    url, _ = scoring_server
    text = "the seller shall deliver the goods"
    payload = {"pairs": [
        {"query_text": text, "candidate_text": text},
        {"query_text": text, "candidate_text": "unrelated words entirely"},
        {"query_text": text, "candidate_text": "the buyer shall pay the price"},
    ]}
    response = requests.post(url, json=payload, timeout=10)
    assert response.status_code == 200
    scores = response.json()["scores"]
    assert len(scores) == 3
    assert scores[0] == max(scores)


def test_empty_pairs_list(scoring_server):
    url, _ = scoring_server
    response = requests.post(url, json={"pairs": []}, timeout=10)
    assert response.status_code == 200
    assert response.json() == {"scores": []}


def test_malformed_request_gets_structured_error(scoring_server):
    url, _ = scoring_server
    response = requests.post(url, data="not json at all",
                             headers={"Content-Type": "application/json"},
                             timeout=10)
    assert response.status_code != 200
    assert response.json()  # structured body, not a crash

    response = requests.post(url, json={"wrong_key": []}, timeout=10)
    assert response.status_code == 422

    # Server still answers afterwards.
    response = requests.post(url, json={"pairs": []}, timeout=10)
    assert response.status_code == 200


def test_scorer_exception_becomes_500(scoring_server):
    url, scorer = scoring_server
    original = scorer.__class__.__call__

    def explode(self, pairs):
        raise RuntimeError("model on fire")

    scorer.__class__.__call__ = explode
    try:
        response = requests.post(
            url, json={"pairs": [{"query_text": "a", "candidate_text": "b"}]},
            timeout=10)
        assert response.status_code == 500
        assert response.json()["error"] == "RuntimeError"
    finally:
        scorer.__class__.__call__ = original


def test_order_preserved(scoring_server):
    url, _ = scoring_server
    pairs = [{"query_text": "a b c", "candidate_text": "a b c d"[: i + 1]}
             for i in range(8)]
    response = requests.post(url, json={"pairs": pairs}, timeout=10)
    scores = response.json()["scores"]

    singles = []
    for pair in pairs:
        one = requests.post(url, json={"pairs": [pair]}, timeout=10)
        singles.append(one.json()["scores"][0])
    assert scores == singles


def test_four_concurrent_requests(scoring_server):
    url, _ = scoring_server
    results = {}

    def call(i):
        pairs = [{"query_text": f"text {i} shared tokens",
                  "candidate_text": f"text {j} shared tokens"}
                 for j in range(10)]
        response = requests.post(url, json={"pairs": pairs}, timeout=30)
        results[i] = (response.status_code, response.json()["scores"])

    threads = [threading.Thread(target=call, args=(i,)) for i in range(4)]
    for t in threads:
        t.start()
    for t in threads:
        t.join(timeout=30)

    assert len(results) == 4
    for i, (status, scores) in results.items():
        assert status == 200
        assert len(scores) == 10
        assert scores[i] == max(scores)  # self-pair wins within each request
