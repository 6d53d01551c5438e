"""Thresholded correspondence network: edge selection, tripartite layout,
statistics, and deterministic GraphML/DOT/node-link export."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from lexbridge.corpus import Corpus
from lexbridge.errors import ConfigInvalid, IoFailure, MissingRule, UnknownProvision

# Per-country defaults: KR edges need >= 0.95, FR edges >= 0.80, both capped
# at 3 per query.
DEFAULT_EDGE_RULES = (
    ("KR", 0.95, 3),
    ("FR", 0.80, 3),
)

DEFAULT_COLUMNS = {"KR": 0, "JP": 1, "FR": 2}

EXPORT_FORMATS = ("graphml", "dot", "nodelink")

GRAPHML_NS = "http://graphml.graphdrawing.org/xmlns"


@dataclass(frozen=True)
class EdgeRule:
    country: str
    min_score: float
    max_edges_per_query: int

    def __post_init__(self):
        if not (0.0 <= self.min_score <= 1.0):
            raise ConfigInvalid(f"min_score must be in [0,1], got {self.min_score}")
        if self.max_edges_per_query < 0:
            raise ConfigInvalid("max_edges_per_query must be >= 0")


def default_edge_rules() -> list[EdgeRule]:
    return [EdgeRule(c, s, m) for c, s, m in DEFAULT_EDGE_RULES]


@dataclass(frozen=True)
class Edge:
    query_id: str
    target_id: str
    score: float


@dataclass(frozen=True)
class GraphNode:
    provision_id: str
    country: str
    column: int
    row: int


@dataclass
class CorrespondenceGraph:
    nodes: list = field(default_factory=list)
    edges: list = field(default_factory=list)


def select_edges(records, rules) -> list[Edge]:
    """Per record and per country: keep links scoring at or above the
    country's threshold, then the top max_edges_per_query by score.

    Raises MissingRule when a link's country has no rule.
    """
    by_country = {r.country: r for r in rules}
    edges: list[Edge] = []
    for record in records:
        groups: dict[str, list] = {}
        for link in record.links:
            rule = by_country.get(link.country)
            if rule is None:
                raise MissingRule(f"no edge rule for country {link.country}")
            groups.setdefault(link.country, []).append(link)
        for country in sorted(groups):
            rule = by_country[country]
            passing = [l for l in groups[country] if l.rerank_score >= rule.min_score]
            passing.sort(key=lambda l: (-l.rerank_score, l.provision_id))
            for link in passing[:rule.max_edges_per_query]:
                edges.append(Edge(query_id=record.query_id,
                                  target_id=link.provision_id,
                                  score=link.rerank_score))
    return edges


def build_graph(edges, corpus: Corpus, columns: dict | None = None) -> CorrespondenceGraph:
    """Lay out the network: only edge-incident nodes, fixed columns per
    country, rows ranked by (law_id, ordinal) within each column.

    Raises UnknownProvision for unresolvable endpoints and ConfigInvalid for
    countries without a column.
    """
    if columns is None:
        columns = DEFAULT_COLUMNS

    incident: set[str] = set()
    for e in edges:
        incident.add(e.query_id)
        incident.add(e.target_id)

    resolved = {}
    for pid in incident:
        p = corpus.get(pid)
        if p is None:
            raise UnknownProvision(pid)
        if p.country not in columns:
            raise ConfigInvalid(f"no column assigned for country {p.country}")
        resolved[pid] = p

    nodes: list[GraphNode] = []
    for country in sorted({p.country for p in resolved.values()},
                          key=lambda c: columns[c]):
        members = sorted((p for p in resolved.values() if p.country == country),
                         key=lambda p: (p.law_id, p.ordinal))
        for row, p in enumerate(members):
            nodes.append(GraphNode(provision_id=p.provision_id, country=country,
                                   column=columns[country], row=row))
    return CorrespondenceGraph(nodes=nodes, edges=list(edges))


def graph_stats(graph: CorrespondenceGraph) -> dict:
    """Exact counts: totals, per-country node counts, degree histograms, and
    mean edge score per country."""
    nodes_per_country: dict[str, int] = {}
    for n in graph.nodes:
        nodes_per_country[n.country] = nodes_per_country.get(n.country, 0) + 1

    country_of = {n.provision_id: n.country for n in graph.nodes}
    degree: dict[str, int] = {n.provision_id: 0 for n in graph.nodes}
    score_sums: dict[str, float] = {}
    score_counts: dict[str, int] = {}
    for e in graph.edges:
        for pid in (e.query_id, e.target_id):
            degree[pid] = degree.get(pid, 0) + 1
            c = country_of.get(pid, "?")
            score_sums[c] = score_sums.get(c, 0.0) + e.score
            score_counts[c] = score_counts.get(c, 0) + 1

    histogram: dict[str, dict[str, int]] = {}
    for pid, deg in degree.items():
        c = country_of[pid]
        bucket = histogram.setdefault(c, {})
        bucket[str(deg)] = bucket.get(str(deg), 0) + 1

    return {
        "nodes_total": len(graph.nodes),
        "nodes_per_country": dict(sorted(nodes_per_country.items())),
        "edges_total": len(graph.edges),
        "degree_distribution": {c: dict(sorted(h.items(), key=lambda kv: int(kv[0])))
                                for c, h in sorted(histogram.items())},
        "mean_score_per_country": {c: round(score_sums[c] / score_counts[c], 6)
                                   for c in sorted(score_sums)},
    }


def export_graph(graph: CorrespondenceGraph, fmt: str, path) -> None:
    """Write the graph in one of graphml, dot, or nodelink. Output is
    deterministic for a given graph."""
    if fmt not in EXPORT_FORMATS:
        raise ValueError(f"unknown format {fmt!r}, expected one of {EXPORT_FORMATS}")
    writer = {"graphml": _to_graphml, "dot": _to_dot, "nodelink": _to_nodelink}[fmt]
    text = writer(graph)
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise IoFailure(str(exc)) from exc


def _esc_xml(text: str) -> str:
    return (text.replace("&", "&amp;").replace("<", "&lt;")
            .replace(">", "&gt;").replace('"', "&quot;"))


def _to_graphml(graph: CorrespondenceGraph) -> str:
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<graphml xmlns="{GRAPHML_NS}">',
        '  <key id="d_country" for="node" attr.name="country" attr.type="string"/>',
        '  <key id="d_column" for="node" attr.name="column" attr.type="int"/>',
        '  <key id="d_row" for="node" attr.name="row" attr.type="int"/>',
        '  <key id="d_score" for="edge" attr.name="score" attr.type="double"/>',
        '  <graph id="correspondences" edgedefault="directed">',
    ]
    for n in graph.nodes:
        lines.append(f'    <node id="{_esc_xml(n.provision_id)}">')
        lines.append(f'      <data key="d_country">{_esc_xml(n.country)}</data>')
        lines.append(f'      <data key="d_column">{n.column}</data>')
        lines.append(f'      <data key="d_row">{n.row}</data>')
        lines.append("    </node>")
    for e in graph.edges:
        lines.append(f'    <edge source="{_esc_xml(e.query_id)}" '
                     f'target="{_esc_xml(e.target_id)}">')
        lines.append(f'      <data key="d_score">{e.score:.6f}</data>')
        lines.append("    </edge>")
    lines.append("  </graph>")
    lines.append("</graphml>")
    return "\n".join(lines) + "\n"


def _esc_dot(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"')


def _to_dot(graph: CorrespondenceGraph) -> str:
    lines = ["digraph correspondences {"]
    for n in graph.nodes:
        lines.append(
            f'  "{_esc_dot(n.provision_id)}" [country="{_esc_dot(n.country)}" '
            f'column={n.column} row={n.row}];')
    for e in graph.edges:
        lines.append(
            f'  "{_esc_dot(e.query_id)}" -> "{_esc_dot(e.target_id)}" '
            f'[score={e.score:.6f}];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def _to_nodelink(graph: CorrespondenceGraph) -> str:
    payload = {
        "directed": True,
        "nodes": [
            {"id": n.provision_id, "country": n.country,
             "column": n.column, "row": n.row}
            for n in graph.nodes
        ],
        "links": [
            {"source": e.query_id, "target": e.target_id,
             "score": round(e.score, 6)}
            for e in graph.edges
        ],
    }
    return json.dumps(payload, ensure_ascii=False, indent=2) + "\n"


def write_stats(stats: dict, path) -> None:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(stats, fh, ensure_ascii=False, indent=2, sort_keys=True)
            fh.write("\n")
    except OSError as exc:
        raise IoFailure(str(exc)) from exc
