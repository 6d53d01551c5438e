"""Pipeline CLI: convert, corpus, embed, link, graph, all.

Every stage reads and writes files under the configured output directory,
so any stage can be rerun or inspected in isolation. Diagnostics go to
stderr; data only to files. A provenance record (config and input digests)
is written after every successful command.
"""
from __future__ import annotations

import argparse
import dataclasses
import hashlib
import json
import os
import sys
from pathlib import Path

import lexbridge
from lexbridge import akn as aknmod
from lexbridge import corpus as corpusmod
from lexbridge import embeddings, graph as graphmod, jls, rerank as rerankmod
from lexbridge.config import PipelineConfig, load_config
from lexbridge.errors import LexbridgeError, StageInputMissing, ValidationFailed
from lexbridge.frbr import build_identity

SCORER_URL_ENV = "LEXBRIDGE_SCORER_URL"

COMMANDS = ("convert", "corpus", "embed", "link", "graph", "all")


def _sha256_bytes(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def _write_provenance(cfg: PipelineConfig, command: str, inputs: list[Path]) -> None:
    record = {
        "command": command,
        "run_id": cfg.run_id,
        "package_version": lexbridge.__version__,
        "config_digest": corpusmod.sha256_file(cfg.config_path),
        "input_digests": {str(p): corpusmod.sha256_file(p) for p in sorted(inputs)},
    }
    cfg.provenance_dir.mkdir(parents=True, exist_ok=True)
    out = cfg.provenance_dir / f"{command}.json"
    with open(out, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(record, fh, ensure_ascii=False, indent=2, sort_keys=True)
        fh.write("\n")


def _akn_filename(identity) -> str:
    return (f"{identity.country}-{identity.number}-"
            f"{identity.language}@{identity.version_date}.akn.xml")


def cmd_convert(cfg: PipelineConfig) -> None:
    """JLS XML (or passthrough AKN) per country into canonical AKN files."""
    rules = aknmod.load_rules(cfg.rules_path) if cfg.rules_path else None
    input_files: list[Path] = []

    for country in sorted(cfg.inputs):
        entry = cfg.inputs[country]
        out_dir = cfg.akn_dir / country
        out_dir.mkdir(parents=True, exist_ok=True)

        for law in entry.laws:
            input_files.append(law.file)
            text = law.file.read_text(encoding="utf-8")

            if entry.format == "akn":
                doc = aknmod.read_akn(text)
            else:
                parsed = jls.parse_jls(text)
                for warning in parsed.warnings:
                    print(jls.format_warning(str(law.file), warning), file=sys.stderr)
                issues = jls.validate_hierarchy(parsed)
                if issues:
                    first = issues[0]
                    raise ValidationFailed(
                        f"{law.file}: {len(issues)} structural issue(s), "
                        f"first: {first.rule} at {first.path}")
                identity = build_identity(
                    country=country.lower(),
                    date=law.date or entry.date or "",
                    number=law.number or parsed.law_num,
                    language=law.language or entry.language or parsed.language,
                    version_date=law.version_date or entry.version_date or "",
                )
                doc = aknmod.convert(parsed, identity, rules)

            serialized = aknmod.serialize_akn(doc)
            out = out_dir / _akn_filename(doc.identity)
            out.write_bytes(serialized.encode("utf-8"))

    _write_provenance(cfg, "convert", input_files)


def _akn_files(cfg: PipelineConfig) -> list[Path]:
    if not cfg.akn_dir.is_dir():
        return []
    return sorted(cfg.akn_dir.glob("*/*.akn.xml"))


def cmd_corpus(cfg: PipelineConfig) -> None:
    """Extract provisions from every converted AKN file into one corpus."""
    files = _akn_files(cfg)
    if not files:
        raise StageInputMissing(f"no AKN files under {cfg.akn_dir}; run convert first")

    provisions: list = []
    digests: dict[str, str] = {}
    for file in files:
        doc = aknmod.read_akn(file.read_text(encoding="utf-8"))
        provisions.extend(corpusmod.extract_provisions(doc, cfg.level))
        digests[str(file.relative_to(cfg.output_dir))] = corpusmod.sha256_file(file)

    corpusmod.write_corpus(provisions, cfg.corpus_path, corpus_id=cfg.run_id,
                           source_digests=digests, level=cfg.level)
    _write_provenance(cfg, "corpus", files)


def cmd_embed(cfg: PipelineConfig) -> None:
    """Trigram-embed the corpus, or ingest an external vector file."""
    if not cfg.corpus_path.is_file():
        raise StageInputMissing(f"corpus not found at {cfg.corpus_path}; run corpus first")
    corpus = corpusmod.read_corpus(cfg.corpus_path)

    inputs = [cfg.corpus_path]
    if cfg.embed.provider == "ingest":
        store = embeddings.ingest_vectors(cfg.embed.vectors_path, corpus)
        inputs.append(cfg.embed.vectors_path)
    else:
        store = embeddings.build_store(corpus, cfg.embed.dim, provider="trigram")
    embeddings.write_vectors(store, cfg.vectors_path)
    _write_provenance(cfg, "embed", inputs)


def cmd_link(cfg: PipelineConfig) -> None:
    """Retrieval plus reranking into the correspondence file."""
    if not cfg.corpus_path.is_file():
        raise StageInputMissing(f"corpus not found at {cfg.corpus_path}; run corpus first")
    if not cfg.vectors_path.is_file():
        raise StageInputMissing(f"vectors not found at {cfg.vectors_path}; run embed first")

    corpus = corpusmod.read_corpus(cfg.corpus_path)
    store = embeddings.ingest_vectors(cfg.vectors_path, corpus)

    rerank_cfg = cfg.rerank
    override = os.environ.get(SCORER_URL_ENV)
    if override:
        rerank_cfg = dataclasses.replace(rerank_cfg, service_endpoint=override)

    rerankmod.run_linking(corpus, store, cfg.retrieval, rerank_cfg, cfg.links_path)
    _write_provenance(cfg, "link", [cfg.corpus_path, cfg.vectors_path])


def cmd_graph(cfg: PipelineConfig) -> None:
    """Edge selection, layout, stats, and all three exports."""
    if not cfg.links_path.is_file():
        raise StageInputMissing(f"links not found at {cfg.links_path}; run link first")
    if not cfg.corpus_path.is_file():
        raise StageInputMissing(f"corpus not found at {cfg.corpus_path}; run corpus first")

    corpus = corpusmod.read_corpus(cfg.corpus_path)
    _, records = rerankmod.read_correspondences(cfg.links_path)
    edges = graphmod.select_edges(records, cfg.edge_rules)
    g = graphmod.build_graph(edges, corpus, cfg.columns)

    for fmt in graphmod.EXPORT_FORMATS:
        graphmod.export_graph(g, fmt, cfg.graph_dir / f"{cfg.run_id}.{fmt}")
    graphmod.write_stats(graphmod.graph_stats(g), cfg.graph_dir / f"{cfg.run_id}.stats.json")
    _write_provenance(cfg, "graph", [cfg.links_path, cfg.corpus_path])


def cmd_all(cfg: PipelineConfig) -> None:
    """Run every stage in order, stopping at the first error."""
    cmd_convert(cfg)
    cmd_corpus(cfg)
    cmd_embed(cfg)
    cmd_link(cfg)
    cmd_graph(cfg)


_DISPATCH = {
    "convert": cmd_convert,
    "corpus": cmd_corpus,
    "embed": cmd_embed,
    "link": cmd_link,
    "graph": cmd_graph,
    "all": cmd_all,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lexbridge",
        description="Legislative conversion and correspondence pipeline.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name, help=_DISPATCH[name].__doc__)
        p.add_argument("--config", required=True, help="pipeline TOML file")
        p.add_argument("--run-id", default=None, help="override the configured run_id")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, run_id=args.run_id)
        _DISPATCH[args.command](cfg)
    except LexbridgeError as exc:
        line = json.dumps({"error": type(exc).__name__, "message": str(exc)},
                          ensure_ascii=False)
        print(f"ERROR {line}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
