"""Provision-level text units extracted from AKN documents.

A corpus is a line-delimited JSON file, one provision per line, with a
sibling ``<file>.manifest`` carrying counts and source digests.
"""
from __future__ import annotations

import hashlib
import json
import os
from dataclasses import asdict, dataclass
from pathlib import Path

from lexbridge.akn import AknDocument, AknElement
from lexbridge.errors import DuplicateId, IoFailure, NoSuchLevel

# Extraction level -> AKN element name.
LEVEL_ELEMENTS = {"article": "article", "paragraph": "paragraph", "item": "point"}

_RECORD_FIELDS = ("provision_id", "country", "law_id", "eid", "level",
                  "language", "ordinal", "text")


@dataclass(frozen=True)
class Provision:
    """Atomic comparable text unit."""

    provision_id: str
    country: str
    law_id: str
    eid: str
    level: str
    language: str
    ordinal: int
    text: str


@dataclass(frozen=True)
class CorpusManifest:
    corpus_id: str
    countries: list
    level: str
    provision_count: int
    source_digests: dict


class Corpus:
    """In-memory corpus with id-keyed access."""

    def __init__(self, provisions: list[Provision]):
        self.provisions = list(provisions)
        self.by_id: dict[str, Provision] = {}
        for p in self.provisions:
            if p.provision_id in self.by_id:
                raise DuplicateId(p.provision_id)
            self.by_id[p.provision_id] = p

    def __len__(self) -> int:
        return len(self.provisions)

    def __iter__(self):
        return iter(self.provisions)

    def get(self, provision_id: str) -> Provision | None:
        return self.by_id.get(provision_id)

    def country_of(self, provision_id: str) -> str | None:
        p = self.by_id.get(provision_id)
        return p.country if p else None

    def for_country(self, country: str) -> list[Provision]:
        return [p for p in self.provisions if p.country == country]

    @property
    def countries(self) -> list[str]:
        return sorted({p.country for p in self.provisions})


def _normalize_ws(text: str) -> str:
    return " ".join(text.split())


def _flatten_text(el: AknElement, parts: list[str]) -> None:
    # Preorder walk: own heading, own text, then children.
    if el.heading:
        parts.append(el.heading)
    if el.text:
        parts.append(el.text)
    for child in el.children:
        _flatten_text(child, parts)


def extract_provisions(doc: AknDocument, level: str) -> list[Provision]:
    """Extract one Provision per element of the requested level, in document
    order. Text is the whitespace-normalized concatenation of the element's
    heading and all descendant text; contentless elements are skipped so the
    non-empty-text invariant holds.

    Raises NoSuchLevel when the document has no elements at that level.
    """
    if level not in LEVEL_ELEMENTS:
        raise NoSuchLevel(f"unknown level {level!r}, expected one of {sorted(LEVEL_ELEMENTS)}")
    element_name = LEVEL_ELEMENTS[level]

    matches: list[AknElement] = []
    _collect(doc.act, element_name, matches)
    if not matches:
        raise NoSuchLevel(f"document has no {element_name} elements")

    identity = doc.identity
    country = identity.country.upper()
    provisions: list[Provision] = []
    for el in matches:
        parts: list[str] = []
        _flatten_text(el, parts)
        text = _normalize_ws(" ".join(parts))
        if not text:
            continue
        eid = el.eid or ""
        provisions.append(Provision(
            provision_id=f"{country}:{identity.law_id}:{eid}",
            country=country,
            law_id=identity.law_id,
            eid=eid,
            level=level,
            language=identity.language,
            ordinal=len(provisions),
            text=text,
        ))
    return provisions


def _collect(el: AknElement, name: str, out: list[AknElement]) -> None:
    if el.name == name:
        out.append(el)
    for child in el.children:
        _collect(child, name, out)


def write_corpus(provisions, path, corpus_id: str = "corpus",
                 source_digests: dict | None = None,
                 level: str | None = None) -> CorpusManifest:
    """Write provisions as JSON lines plus a sibling manifest file.

    Raises DuplicateId on repeated provision_ids and IoFailure on write errors.
    """
    provisions = list(provisions)
    seen: set[str] = set()
    levels: set[str] = set()
    for p in provisions:
        if p.provision_id in seen:
            raise DuplicateId(p.provision_id)
        seen.add(p.provision_id)
        levels.add(p.level)

    if level is None:
        level = levels.pop() if len(levels) == 1 else ("mixed" if levels else "empty")

    manifest = CorpusManifest(
        corpus_id=corpus_id,
        countries=sorted({p.country for p in provisions}),
        level=level,
        provision_count=len(provisions),
        source_digests=dict(sorted((source_digests or {}).items())),
    )

    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(path.suffix + ".tmp")
        with open(tmp, "w", encoding="utf-8", newline="\n") as fh:
            for p in provisions:
                record = {k: getattr(p, k) for k in _RECORD_FIELDS}
                fh.write(json.dumps(record, ensure_ascii=False, separators=(",", ":")))
                fh.write("\n")
        os.replace(tmp, path)
        with open(manifest_path(path), "w", encoding="utf-8", newline="\n") as fh:
            json.dump(asdict(manifest), fh, ensure_ascii=False, indent=2)
            fh.write("\n")
    except OSError as exc:
        raise IoFailure(str(exc)) from exc
    return manifest


def manifest_path(corpus_path) -> Path:
    return Path(str(corpus_path) + ".manifest")


def read_corpus(path) -> Corpus:
    """Load a corpus file; the inverse of write_corpus (field-for-field)."""
    provisions: list[Provision] = []
    try:
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                raw = json.loads(line)
                provisions.append(Provision(**{k: raw[k] for k in _RECORD_FIELDS}))
    except OSError as exc:
        raise IoFailure(str(exc)) from exc
    return Corpus(provisions)


def read_manifest(corpus_path) -> CorpusManifest:
    try:
        with open(manifest_path(corpus_path), encoding="utf-8") as fh:
            return CorpusManifest(**json.load(fh))
    except OSError as exc:
        raise IoFailure(str(exc)) from exc


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()
