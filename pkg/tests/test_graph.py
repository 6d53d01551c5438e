from __future__ import annotations

import json
import random
import xml.etree.ElementTree as ET

import pytest

from fixture_gen import synthetic_provisions
from oracles import filter_edges_oracle, recount_stats
from lexbridge.corpus import Corpus
from lexbridge.errors import ConfigInvalid, MissingRule, UnknownProvision
from lexbridge.graph import (
    GRAPHML_NS,
    CorrespondenceGraph,
    Edge,
    EdgeRule,
    build_graph,
    default_edge_rules,
    export_graph,
    graph_stats,
    select_edges,
)
from lexbridge.rerank import CorrespondenceRecord, Link


def _record(query_id, links):
    return CorrespondenceRecord(
        query_id=query_id, query_text_digest="d", scorer_tag="lexical_fallback",
        links=tuple(Link(provision_id=pid, country=country, rerank_score=score,
                         sim_score=score)
                    for pid, country, score in links))


def _corpus(jp=3, kr=3, fr=3):
    provisions = (
        synthetic_provisions("JP", "jp-law", [f"jp text {i}" for i in range(jp)], "ja")
        + synthetic_provisions("KR", "kr-law", [f"kr text {i}" for i in range(kr)], "ko")
        + synthetic_provisions("FR", "fr-law", [f"fr text {i}" for i in range(fr)], "fr")
    )
    return Corpus(provisions)


def test_threshold_and_cap():
    record = _record("JP:jp-law:art_1", [
        ("KR:kr-law:art_1", "KR", 0.99),
        ("KR:kr-law:art_2", "KR", 0.96),
        ("KR:kr-law:art_3", "KR", 0.95),
        ("KR:kr-law:art_4", "KR", 0.94),
    ])
    edges = select_edges([record], default_edge_rules())
    assert [e.score for e in edges] == [0.99, 0.96, 0.95]
    assert all(e.query_id == "JP:jp-law:art_1" for e in edges)


def test_below_threshold_yields_nothing():
    record = _record("JP:jp-law:art_1", [
        ("FR:fr-law:art_1", "FR", 0.79),
        ("FR:fr-law:art_2", "FR", 0.79),
    ])
    assert select_edges([record], default_edge_rules()) == []


def test_missing_rule():
    record = _record("JP:jp-law:art_1", [("DE:de-law:art_1", "DE", 0.99)])
    with pytest.raises(MissingRule):
        select_edges([record], default_edge_rules())


def test_random_records_match_filter_oracle():
    rng = random.Random(17)
    records = []
    for q in range(100):
        links = []
        for i in range(rng.randint(0, 12)):
            country = rng.choice(["KR", "FR"])
            links.append((f"{country}:{country.lower()}-law:art_{i}", country,
                          round(rng.random(), 6)))
        records.append(_record(f"JP:jp-law:art_{q}", links))

    rules = default_edge_rules()
    edges = select_edges(records, rules)
    expected = filter_edges_oracle(
        records, {r.country: (r.min_score, r.max_edges_per_query) for r in rules})
    assert [(e.query_id, e.target_id, e.score) for e in edges] == expected


def test_monotone_in_min_score():
    rng = random.Random(23)
    records = []
    for q in range(40):
        links = [(f"KR:kr-law:art_{i}", "KR", round(rng.random(), 6))
                 for i in range(8)]
        records.append(_record(f"JP:jp-law:art_{q}", links))
    sweep = [0.0, 0.25, 0.5, 0.75, 0.95]
    counts = []
    for threshold in sweep:
        rules = [EdgeRule("KR", threshold, 3), EdgeRule("FR", 0.8, 3)]
        counts.append(len(select_edges(records, rules)))
    assert counts == sorted(counts, reverse=True)


def test_single_edge_graph_layout():
    corpus = _corpus()
    edges = [Edge("JP:jp-law:art_1", "KR:kr-law:art_2", 0.97)]
    graph = build_graph(edges, corpus)
    assert len(graph.nodes) == 2
    by_country = {n.country: n for n in graph.nodes}
    assert by_country["KR"].column == 0 and by_country["KR"].row == 0
    assert by_country["JP"].column == 1 and by_country["JP"].row == 0


def test_node_counting_and_isolates_dropped():
    corpus = _corpus()
    edges = [
        Edge("JP:jp-law:art_1", "KR:kr-law:art_1", 0.99),
        Edge("JP:jp-law:art_1", "KR:kr-law:art_2", 0.98),
        Edge("JP:jp-law:art_2", "KR:kr-law:art_3", 0.97),
        Edge("JP:jp-law:art_2", "FR:fr-law:art_1", 0.85),
    ]
    graph = build_graph(edges, corpus)
    stats = graph_stats(graph)
    assert stats["nodes_total"] == 6
    assert stats["nodes_per_country"] == {"FR": 1, "JP": 2, "KR": 3}
    assert stats["edges_total"] == len(edges)  # dropping isolates keeps edges


def test_rows_ordered_by_law_and_ordinal():
    corpus = _corpus(jp=3)
    edges = [
        Edge("JP:jp-law:art_3", "KR:kr-law:art_1", 0.99),
        Edge("JP:jp-law:art_1", "KR:kr-law:art_1", 0.99),
    ]
    graph = build_graph(edges, corpus)
    jp_nodes = sorted((n for n in graph.nodes if n.country == "JP"),
                      key=lambda n: n.row)
    assert [n.provision_id for n in jp_nodes] == [
        "JP:jp-law:art_1", "JP:jp-law:art_3"]
    assert [n.row for n in jp_nodes] == [0, 1]


def test_empty_graph():
    graph = build_graph([], _corpus())
    assert graph.nodes == [] and graph.edges == []
    stats = graph_stats(graph)
    assert stats["nodes_total"] == 0
    assert stats["edges_total"] == 0
    assert stats["nodes_per_country"] == {}


def test_unknown_endpoint():
    with pytest.raises(UnknownProvision):
        build_graph([Edge("JP:jp-law:art_1", "XX:ghost:art_1", 0.9)], _corpus())


def test_country_without_column():
    corpus = Corpus(synthetic_provisions("DE", "de-law", ["text"], "de")
                    + synthetic_provisions("JP", "jp-law", ["text"], "ja"))
    edges = [Edge("JP:jp-law:art_1", "DE:de-law:art_1", 0.9)]
    with pytest.raises(ConfigInvalid):
        build_graph(edges, corpus)
    graph = build_graph(edges, corpus, columns={"DE": 0, "JP": 1})
    assert len(graph.nodes) == 2


def test_stats_match_recount_oracle():
    rng = random.Random(5)
    corpus = _corpus(jp=30, kr=40, fr=40)
    edges = []
    for q in range(30):
        for _ in range(rng.randint(0, 4)):
            country = rng.choice(["KR", "FR"])
            n = rng.randint(1, 40)
            edges.append(Edge(f"JP:jp-law:art_{q + 1}",
                              f"{country}:{country.lower()}-law:art_{n}",
                              round(0.8 + 0.2 * rng.random(), 6)))
    # Deduplicate parallel edges for a clean degree count.
    edges = list({(e.query_id, e.target_id): e for e in edges}.values())
    graph = build_graph(edges, corpus)
    stats = graph_stats(graph)
    oracle = recount_stats(graph)
    assert stats["nodes_total"] == oracle["nodes_total"]
    assert stats["nodes_per_country"] == dict(sorted(oracle["nodes_per_country"].items()))
    assert stats["edges_total"] == oracle["edges_total"]
    for country, hist in stats["degree_distribution"].items():
        expect = {}
        for pid, deg in oracle["degrees"].items():
            if pid.startswith(country):
                expect[str(deg)] = expect.get(str(deg), 0) + 1
        assert hist == expect


def _two_node_graph():
    corpus = _corpus()
    return build_graph([Edge("JP:jp-law:art_1", "FR:fr-law:art_2", 0.88)], corpus)


def test_empty_dot_export(tmp_path):
    path = tmp_path / "g.dot"
    export_graph(CorrespondenceGraph(), "dot", path)
    assert path.read_text(encoding="utf-8") == "digraph correspondences {\n}\n"


def test_graphml_roundtrip(tmp_path):
    graph = _two_node_graph()
    path = tmp_path / "g.graphml"
    export_graph(graph, "graphml", path)

    root = ET.fromstring(path.read_text(encoding="utf-8"))
    ns = {"g": GRAPHML_NS}
    nodes = root.findall(".//g:node", ns)
    edges = root.findall(".//g:edge", ns)
    assert {n.get("id") for n in nodes} == {n.provision_id for n in graph.nodes}
    assert {(e.get("source"), e.get("target")) for e in edges} == {
        (e.query_id, e.target_id) for e in graph.edges}
    score = edges[0].find("g:data[@key='d_score']", ns)
    assert float(score.text) == pytest.approx(0.88, abs=1e-9)


def test_nodelink_structure(tmp_path):
    graph = _two_node_graph()
    path = tmp_path / "g.nodelink"
    export_graph(graph, "nodelink", path)
    payload = json.loads(path.read_text(encoding="utf-8"))
    assert {n["id"] for n in payload["nodes"]} == {n.provision_id for n in graph.nodes}
    assert payload["links"][0]["score"] == pytest.approx(0.88, abs=1e-9)
    assert {"country", "column", "row", "id"} <= set(payload["nodes"][0])


def test_exports_deterministic(tmp_path):
    graph = _two_node_graph()
    for fmt in ("graphml", "dot", "nodelink"):
        a, b = tmp_path / f"a.{fmt}", tmp_path / f"b.{fmt}"
        export_graph(graph, fmt, a)
        export_graph(graph, fmt, b)
        assert a.read_bytes() == b.read_bytes()


def test_golden_exports(tmp_path):
    from conftest import GOLDEN_DIR

    corpus = _corpus()
    edges = [
        Edge("JP:jp-law:art_1", "KR:kr-law:art_1", 0.99),
        Edge("JP:jp-law:art_1", "FR:fr-law:art_2", 0.85),
        Edge("JP:jp-law:art_2", "KR:kr-law:art_3", 0.951),
    ]
    graph = build_graph(edges, corpus)
    for fmt in ("graphml", "dot", "nodelink"):
        out = tmp_path / f"fixture.{fmt}"
        export_graph(graph, fmt, out)
        golden = GOLDEN_DIR / f"fixture.{fmt}"
        assert out.read_text(encoding="utf-8") == golden.read_text(encoding="utf-8")


def test_unknown_format():
    with pytest.raises(ValueError):
        export_graph(CorrespondenceGraph(), "gexf", "/tmp/x")
