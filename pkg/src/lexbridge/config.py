"""Pipeline configuration: one TOML file drives every stage.

Paths inside the file are resolved relative to the file's own directory.
Numeric constraints of the embedded retrieval/rerank/edge-rule settings are
enforced when the file is loaded, not when a stage finally uses them.
"""
from __future__ import annotations

import sys
from dataclasses import dataclass, field
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from lexbridge.corpus import LEVEL_ELEMENTS
from lexbridge.errors import ConfigInvalid
from lexbridge.graph import DEFAULT_COLUMNS, EdgeRule, default_edge_rules
from lexbridge.rerank import RerankConfig
from lexbridge.retrieval import RetrievalConfig

EMBED_PROVIDERS = ("trigram", "ingest")
INPUT_FORMATS = ("jls", "akn")


@dataclass(frozen=True)
class LawInput:
    file: Path
    date: str | None = None
    number: str | None = None
    language: str | None = None
    version_date: str | None = None


@dataclass(frozen=True)
class CountryInput:
    country: str
    format: str = "jls"
    language: str | None = None
    date: str | None = None
    version_date: str | None = None
    laws: tuple = ()


@dataclass(frozen=True)
class EmbedSettings:
    provider: str = "trigram"
    dim: int = 64
    vectors_path: Path | None = None


@dataclass(frozen=True)
class PipelineConfig:
    run_id: str
    output_dir: Path
    level: str
    inputs: dict
    embed: EmbedSettings
    retrieval: RetrievalConfig
    rerank: RerankConfig
    edge_rules: tuple
    columns: dict
    config_path: Path
    rules_path: Path | None = None

    # Stage artifact locations, all under output_dir.
    @property
    def akn_dir(self) -> Path:
        return self.output_dir / "akn"

    @property
    def corpus_path(self) -> Path:
        return self.output_dir / "corpus" / "provisions.jsonl"

    @property
    def vectors_path(self) -> Path:
        return self.output_dir / "vectors" / "vectors.jsonl"

    @property
    def links_path(self) -> Path:
        return self.output_dir / "links" / "correspondences.jsonl"

    @property
    def graph_dir(self) -> Path:
        return self.output_dir / "graph"

    @property
    def provenance_dir(self) -> Path:
        return self.output_dir / "provenance"


def _require(table: dict, key: str, where: str):
    if key not in table:
        raise ConfigInvalid(f"missing key {key!r} in {where}")
    return table[key]


def load_config(path, run_id: str | None = None) -> PipelineConfig:
    """Parse and validate a pipeline TOML file.

    Raises ConfigInvalid on unknown enum values, missing files, or broken
    numeric constraints (the embedded configs validate themselves).
    """
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    except OSError as exc:
        raise ConfigInvalid(f"cannot read config: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigInvalid(f"config is not valid TOML: {exc}") from exc

    base = path.parent

    def resolve(p) -> Path:
        p = Path(p)
        return p if p.is_absolute() else (base / p)

    level = raw.get("level", "article")
    if level not in LEVEL_ELEMENTS:
        raise ConfigInvalid(f"level must be one of {sorted(LEVEL_ELEMENTS)}, got {level!r}")

    inputs: dict[str, CountryInput] = {}
    for country, section in raw.get("input", {}).items():
        country = country.upper()
        fmt = section.get("format", "jls")
        if fmt not in INPUT_FORMATS:
            raise ConfigInvalid(f"input.{country}.format must be one of {INPUT_FORMATS}")
        laws = []
        for law in section.get("laws", []):
            file = resolve(_require(law, "file", f"input.{country}.laws"))
            if not file.is_file():
                raise ConfigInvalid(f"law file does not exist: {file}")
            laws.append(LawInput(
                file=file,
                date=law.get("date"),
                number=str(law["number"]) if "number" in law else None,
                language=law.get("language"),
                version_date=law.get("version_date"),
            ))
        if not laws:
            raise ConfigInvalid(f"input.{country} lists no laws")
        inputs[country] = CountryInput(
            country=country,
            format=fmt,
            language=section.get("language"),
            date=section.get("date"),
            version_date=section.get("version_date"),
            laws=tuple(laws),
        )
    if not inputs:
        raise ConfigInvalid("no [input.XX] sections")

    embed_raw = raw.get("embed", {})
    provider = embed_raw.get("provider", "trigram")
    if provider not in EMBED_PROVIDERS:
        raise ConfigInvalid(f"embed.provider must be one of {EMBED_PROVIDERS}")
    vectors_path = None
    if provider == "ingest":
        vectors_path = resolve(_require(embed_raw, "vectors_path", "embed"))
        if not vectors_path.is_file():
            raise ConfigInvalid(f"embed.vectors_path does not exist: {vectors_path}")
    dim = int(embed_raw.get("dim", 64))
    if dim < 8:
        raise ConfigInvalid(f"embed.dim must be >= 8, got {dim}")
    embed = EmbedSettings(provider=provider, dim=dim, vectors_path=vectors_path)

    retrieval_raw = dict(raw.get("retrieval", {}))
    retrieval_raw.setdefault("query_country", raw.get("query_country", "JP"))
    retrieval_raw["query_country"] = str(retrieval_raw["query_country"]).upper()
    if "target_countries" in retrieval_raw:
        retrieval_raw["target_countries"] = tuple(
            str(c).upper() for c in retrieval_raw["target_countries"])
    if "quota_per_country" in retrieval_raw:
        retrieval_raw["quota_per_country"] = {
            str(k).upper(): int(v) for k, v in retrieval_raw["quota_per_country"].items()}
    try:
        retrieval = RetrievalConfig(**retrieval_raw)
    except TypeError as exc:
        raise ConfigInvalid(f"bad [retrieval] section: {exc}") from exc

    try:
        rerank = RerankConfig(**dict(raw.get("rerank", {})))
    except TypeError as exc:
        raise ConfigInvalid(f"bad [rerank] section: {exc}") from exc

    if "edge_rules" in raw:
        edge_rules = tuple(
            EdgeRule(country=str(r["country"]).upper(),
                     min_score=float(_require(r, "min_score", "edge_rules")),
                     max_edges_per_query=int(_require(r, "max_edges_per_query",
                                                      "edge_rules")))
            for r in raw["edge_rules"])
    else:
        edge_rules = tuple(default_edge_rules())

    columns = {str(k).upper(): int(v) for k, v in raw.get("columns", {}).items()}
    if not columns:
        columns = dict(DEFAULT_COLUMNS)

    rules_path = None
    if "mapping_rules" in raw:
        rules_path = resolve(raw["mapping_rules"])
        if not rules_path.is_file():
            raise ConfigInvalid(f"mapping_rules file does not exist: {rules_path}")

    return PipelineConfig(
        run_id=run_id or raw.get("run_id", "run"),
        output_dir=resolve(raw.get("output_dir", "out")),
        level=level,
        inputs=inputs,
        embed=embed,
        retrieval=retrieval,
        rerank=rerank,
        edge_rules=edge_rules,
        columns=columns,
        config_path=path,
        rules_path=rules_path,
    )
