"""Parser for JLS-format legislative XML into a validated hierarchical tree.

JLS files (the e-LAWS flavour of Japanese statute XML) nest structural
elements such as <Law>, <LawBody>, <MainProvision>, <Part>, <Chapter>,
<Section>, <Article>, <Paragraph>, <Item> and <Sentence>. Labels come from
``Num`` attributes, titles from sibling metadata elements (<ArticleCaption>,
<ChapterTitle>, ...), and sentence text is often wrapped in container
elements (<ParagraphSentence>, <ItemSentence>). This module flattens all of
that into a small, uniform node tree.
"""
from __future__ import annotations

import xml.etree.ElementTree as ET
from dataclasses import dataclass, field

from lexbridge.errors import EmptyBody, MalformedXml, MissingRoot

# Supported structural kinds, in no particular order.
KINDS = frozenset({
    "Law", "LawBody", "MainProvision", "Part", "Chapter", "Section",
    "Article", "Paragraph", "Item", "Sentence",
})

# Legal child kinds per parent kind. Sentence is a leaf.
CHILD_KINDS: dict[str, frozenset[str]] = {
    "Law": frozenset({"LawBody"}),
    "LawBody": frozenset({"MainProvision", "Part", "Chapter", "Section", "Article"}),
    "MainProvision": frozenset({"Part", "Chapter", "Section", "Article"}),
    "Part": frozenset({"Part", "Chapter", "Section", "Article"}),
    "Chapter": frozenset({"Part", "Chapter", "Section", "Article"}),
    "Section": frozenset({"Part", "Chapter", "Section", "Article"}),
    "Article": frozenset({"Paragraph"}),
    "Paragraph": frozenset({"Item", "Sentence"}),
    "Item": frozenset({"Sentence", "Item"}),
    "Sentence": frozenset(),
}

# Metadata elements consumed into node fields instead of becoming nodes.
_TITLE_ELEMENTS = {
    "Part": "PartTitle",
    "Chapter": "ChapterTitle",
    "Section": "SectionTitle",
    "Article": "ArticleCaption",
    "Item": "ItemTitle",
}
# Elements whose text serves as a num label when the Num attribute is absent.
_NUM_ELEMENTS = {
    "Article": "ArticleTitle",
    "Paragraph": "ParagraphNum",
}
# Transparent wrappers whose Sentence children are lifted into the parent.
_SENTENCE_WRAPPERS = {"ParagraphSentence", "ItemSentence"}


@dataclass
class JlsNode:
    """One node of the parsed law tree. Only Sentence nodes carry text."""

    kind: str
    num: str | None = None
    title: str | None = None
    children: list["JlsNode"] = field(default_factory=list)
    text: str | None = None


@dataclass
class SkippedElement:
    """Record of an unknown element dropped during parsing."""

    path: str
    name: str


@dataclass
class JlsDocument:
    """A parsed law: title, official number, language tag, and node tree."""

    law_title: str
    law_num: str
    language: str
    root: JlsNode
    warnings: list[SkippedElement] = field(default_factory=list)


@dataclass(frozen=True)
class StructuralIssue:
    """One invariant violation found by validate_hierarchy."""

    path: str
    rule: str
    detail: str


def _clean(text: str | None) -> str:
    """Collapse whitespace runs to single spaces and trim."""
    if not text:
        return ""
    return " ".join(text.split())


def _local(tag: str) -> str:
    return tag.split("}", 1)[-1]


def parse_jls(xml_text: str) -> JlsDocument:
    """Parse JLS XML text into a JlsDocument.

    The node tree mirrors element nesting for the supported kinds; known
    metadata elements populate num/title/law fields; anything else inside a
    supported container is skipped and recorded in ``warnings``.

    Raises:
        MalformedXml: input is not well-formed XML.
        MissingRoot: no Law element exists.
        EmptyBody: the Law contains no Article anywhere.
    """
    try:
        root_el = ET.fromstring(xml_text)
    except ET.ParseError as exc:
        raise MalformedXml(str(exc)) from exc

    if _local(root_el.tag) == "Law":
        law_el = root_el
    else:
        law_el = next((el for el in root_el.iter() if _local(el.tag) == "Law"), None)
        if law_el is None:
            raise MissingRoot("no Law element in input")

    warnings: list[SkippedElement] = []
    meta = {"law_title": "", "law_num": ""}
    root = _parse_element(law_el, "Law", warnings, meta)

    law_num = meta["law_num"] or _clean(law_el.get("Num")) or "unknown"
    language = _clean(law_el.get("Lang")) or "ja"

    if not _contains_kind(root, "Article"):
        raise EmptyBody("Law contains no Article")

    return JlsDocument(
        law_title=meta["law_title"],
        law_num=law_num,
        language=language,
        root=root,
        warnings=warnings,
    )


def _parse_element(el: ET.Element, path: str, warnings: list[SkippedElement],
                   meta: dict[str, str]) -> JlsNode:
    kind = _local(el.tag)
    node = JlsNode(kind=kind, num=_clean(el.get("Num")) or None)

    if kind == "Sentence":
        node.text = _clean("".join(el.itertext()))
        return node

    title_el = _TITLE_ELEMENTS.get(kind)
    num_el = _NUM_ELEMENTS.get(kind)
    kind_counts: dict[str, int] = {}
    stray_text: list[str] = []

    if el.text and el.text.strip():
        stray_text.append(_clean(el.text))

    for child in el:
        name = _local(child.tag)
        if child.tail and child.tail.strip():
            stray_text.append(_clean(child.tail))

        if name in KINDS:
            kind_counts[name] = kind_counts.get(name, 0) + 1
            child_path = f"{path}/{name}[{kind_counts[name]}]"
            node.children.append(_parse_element(child, child_path, warnings, meta))
        elif name in _SENTENCE_WRAPPERS:
            for sent in child:
                if _local(sent.tag) == "Sentence":
                    kind_counts["Sentence"] = kind_counts.get("Sentence", 0) + 1
                    sent_path = f"{path}/Sentence[{kind_counts['Sentence']}]"
                    node.children.append(_parse_element(sent, sent_path, warnings, meta))
                else:
                    warnings.append(SkippedElement(f"{path}/{name}", _local(sent.tag)))
        elif name == title_el:
            node.title = _clean("".join(child.itertext())) or None
        elif name == num_el:
            if node.num is None:
                node.num = _clean("".join(child.itertext())) or None
        elif kind == "Law" and name == "LawNum":
            meta["law_num"] = _clean("".join(child.itertext()))
        elif kind == "LawBody" and name == "LawTitle":
            meta["law_title"] = _clean("".join(child.itertext()))
        else:
            warnings.append(SkippedElement(path, name))

    if stray_text:
        # Mixed content: concatenate into one implicit Sentence, first child.
        node.children.insert(0, JlsNode(kind="Sentence", text=" ".join(stray_text)))

    return node


def _contains_kind(node: JlsNode, kind: str) -> bool:
    if node.kind == kind:
        return True
    return any(_contains_kind(c, kind) for c in node.children)


def node_path(parent_path: str, node: JlsNode, index_among_kind: int,
              kind_total: int) -> str:
    """XPath-ish path segment: index shown only when siblings share the kind."""
    seg = node.kind if kind_total <= 1 else f"{node.kind}[{index_among_kind}]"
    return f"{parent_path}/{seg}" if parent_path else seg


def validate_hierarchy(doc: JlsDocument) -> list[StructuralIssue]:
    """Check every JlsNode invariant; a clean document yields an empty list.

    Rules checked: root-is-law, single-body, child-kind legality, text only
    in Sentence nodes, and sibling num uniqueness per kind.
    """
    issues: list[StructuralIssue] = []
    root = doc.root

    if root.kind != "Law":
        issues.append(StructuralIssue(root.kind, "root-kind", "root node is not Law"))
        return issues
    bodies = [c for c in root.children if c.kind == "LawBody"]
    if len(bodies) != 1:
        issues.append(StructuralIssue(
            "Law", "single-body", f"Law has {len(bodies)} LawBody children, expected 1"))

    _validate_node(root, "Law", issues)
    return issues


def _validate_node(node: JlsNode, path: str, issues: list[StructuralIssue]) -> None:
    legal = CHILD_KINDS.get(node.kind, frozenset())

    if node.kind != "Sentence" and node.text is not None:
        issues.append(StructuralIssue(
            path, "text-in-sentence-only", f"{node.kind} node carries text"))
    if node.kind == "Sentence" and node.children:
        issues.append(StructuralIssue(
            path, "sentence-is-leaf", "Sentence node has children"))

    totals: dict[str, int] = {}
    for child in node.children:
        totals[child.kind] = totals.get(child.kind, 0) + 1

    seen_nums: dict[tuple[str, str], str] = {}
    counters: dict[str, int] = {}
    for child in node.children:
        counters[child.kind] = counters.get(child.kind, 0) + 1
        child_path = node_path(path, child, counters[child.kind], totals[child.kind])

        if child.kind not in legal:
            issues.append(StructuralIssue(
                child_path, "child-kind-legality",
                f"{child.kind} is not a legal child of {node.kind}"))
        if child.num is not None:
            key = (child.kind, child.num)
            if key in seen_nums:
                issues.append(StructuralIssue(
                    child_path, "duplicate-sibling-num",
                    f"{child.kind} num '{child.num}' repeats within {path}"))
            seen_nums[key] = child_path

        _validate_node(child, child_path, issues)


# --- debug re-serialization -------------------------------------------------

_XML_ESCAPES = [("&", "&amp;"), ("<", "&lt;"), (">", "&gt;"), ('"', "&quot;")]


def _esc(text: str) -> str:
    for raw, rep in _XML_ESCAPES:
        text = text.replace(raw, rep)
    return text


def to_debug_xml(doc: JlsDocument) -> str:
    """Re-serialize a document in canonical JLS form.

    parse_jls(to_debug_xml(doc)) reproduces doc exactly, which makes the
    parse step idempotent and gives a stable form for diffing trees.
    """
    lines: list[str] = ['<?xml version="1.0" encoding="UTF-8"?>']
    _emit(doc.root, doc, 0, lines)
    return "\n".join(lines) + "\n"


def _emit(node: JlsNode, doc: JlsDocument, depth: int, lines: list[str]) -> None:
    pad = "  " * depth
    attrs = ""
    if node.num is not None:
        attrs += f' Num="{_esc(node.num)}"'
    if node.kind == "Law":
        attrs += f' Lang="{_esc(doc.language)}"'

    if node.kind == "Sentence":
        lines.append(f"{pad}<Sentence{attrs}>{_esc(node.text or '')}</Sentence>")
        return

    lines.append(f"{pad}<{node.kind}{attrs}>")
    inner = "  " * (depth + 1)
    if node.kind == "Law" and doc.law_num:
        lines.append(f"{inner}<LawNum>{_esc(doc.law_num)}</LawNum>")
    if node.kind == "LawBody" and doc.law_title:
        lines.append(f"{inner}<LawTitle>{_esc(doc.law_title)}</LawTitle>")
    title_el = _TITLE_ELEMENTS.get(node.kind)
    if title_el and node.title is not None:
        lines.append(f"{inner}<{title_el}>{_esc(node.title)}</{title_el}>")
    for child in node.children:
        _emit(child, doc, depth + 1, lines)
    lines.append(f"{pad}</{node.kind}>")


def iter_nodes(node: JlsNode):
    """Yield node and all descendants in document order."""
    yield node
    for child in node.children:
        yield from iter_nodes(child)


def count_kinds(doc: JlsDocument) -> dict[str, int]:
    """Tally node kinds over the whole tree (debugging/tests)."""
    counts: dict[str, int] = {}
    for node in iter_nodes(doc.root):
        counts[node.kind] = counts.get(node.kind, 0) + 1
    return counts


def format_warning(file: str, warning: SkippedElement) -> str:
    """Diagnostic line for a skipped element: WARN <file>:<path> skipped element <name>."""
    return f"WARN {file}:{warning.path} skipped element {warning.name}"
