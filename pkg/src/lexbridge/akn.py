"""JLS tree to Akoma Ntoso conversion, validation, and serialization.

The converter is rule-driven: a declarative table maps each JLS node kind to
an AKN element name plus an eId prefix. The default table covers the ten
supported kinds; extra rules can be loaded from a plain-text file without
code changes. LawBody and MainProvision both map to ``body`` and are merged
into a single element.
"""
from __future__ import annotations

import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field

from lexbridge.errors import MalformedXml, UnmappedKind, ValidationFailed
from lexbridge.frbr import (
    EXPRESSION_URI_RE,
    MANIFESTATION_URI_RE,
    WORK_URI_RE,
    FrbrIdentity,
    build_identity,
    parse_expression_uri,
)
from lexbridge.jls import JlsDocument, JlsNode

AKN_NS = "http://docs.oasis-open.org/legaldocml/ns/akn/3.0"

# Structural elements: everything below body that must carry a unique eId.
STRUCTURAL_ELEMENTS = frozenset({"part", "chapter", "section", "article",
                                 "paragraph", "point"})

# Legal child names per element name in the converted tree.
AKN_CHILD_ELEMENTS: dict[str, frozenset[str]] = {
    "act": frozenset({"body"}),
    "body": frozenset({"part", "chapter", "section", "article"}),
    "part": frozenset({"part", "chapter", "section", "article"}),
    "chapter": frozenset({"part", "chapter", "section", "article"}),
    "section": frozenset({"part", "chapter", "section", "article"}),
    "article": frozenset({"paragraph"}),
    "paragraph": frozenset({"point", "p"}),
    "point": frozenset({"point", "p"}),
    "p": frozenset(),
}

_EID_SEGMENT_RE = re.compile(r"^[a-z][a-z0-9]*_[0-9A-Za-z-]+$")
_EID_NUM_SANITIZE_RE = re.compile(r"[^0-9A-Za-z-]+")


@dataclass(frozen=True)
class MappingRule:
    """One source-kind to target-element rule.

    ``eid_prefix`` drives eId synthesis; ``num_recipe`` says how the source
    num label surfaces in AKN ("child" emits a <num> element, "omit" drops it).
    """

    source_kind: str
    target_element: str
    eid_prefix: str | None = None
    num_recipe: str = "omit"


DEFAULT_RULES: dict[str, MappingRule] = {r.source_kind: r for r in (
    MappingRule("Law", "act"),
    MappingRule("LawBody", "body"),
    MappingRule("MainProvision", "body"),
    MappingRule("Part", "part", "part", "child"),
    MappingRule("Chapter", "chapter", "chp", "child"),
    MappingRule("Section", "section", "sec", "child"),
    MappingRule("Article", "article", "art", "child"),
    MappingRule("Paragraph", "paragraph", "para", "child"),
    MappingRule("Item", "point", "point", "child"),
    MappingRule("Sentence", "p"),
)}


def load_rules(path) -> dict[str, MappingRule]:
    """Read a rule table file: one `source -> target [eid_prefix]` per line.

    Lines starting with # and blank lines are ignored. A prefix implies the
    "child" num recipe. Raises ValueError on syntax errors or duplicates.
    """
    rules: dict[str, MappingRule] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "->" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'source -> target [prefix]'")
            source, _, rest = line.partition("->")
            source = source.strip()
            parts = rest.split()
            if not source or not parts or len(parts) > 2:
                raise ValueError(f"{path}:{lineno}: expected 'source -> target [prefix]'")
            if source in rules:
                raise ValueError(f"{path}:{lineno}: duplicate rule for {source}")
            prefix = parts[1] if len(parts) == 2 else None
            rules[source] = MappingRule(
                source_kind=source,
                target_element=parts[0],
                eid_prefix=prefix,
                num_recipe="child" if prefix else "omit",
            )
    return rules


@dataclass
class AknElement:
    """One element of the converted tree."""

    name: str
    eid: str | None = None
    num: str | None = None
    heading: str | None = None
    children: list["AknElement"] = field(default_factory=list)
    text: str | None = None


@dataclass
class AknDocument:
    """Converted document: FRBR identity plus the act element tree."""

    identity: FrbrIdentity
    act: AknElement


@dataclass(frozen=True)
class Violation:
    """One structural-rule violation found by validate_akn."""

    where: str
    rule: str
    detail: str


ValidationReport = list  # list[Violation]


def _eid_num(num: str | None, ordinal: int) -> str:
    """eId num component: sanitized label, or 1-based ordinal when unusable."""
    if num:
        cleaned = _EID_NUM_SANITIZE_RE.sub("-", num.strip()).strip("-")
        if cleaned:
            return cleaned
    return str(ordinal)


def convert(doc: JlsDocument, identity_inputs, rules: dict[str, MappingRule] | None = None,
            ) -> AknDocument:
    """Transform a validated JlsDocument into an AknDocument.

    ``identity_inputs`` is either a FrbrIdentity or a mapping with keys
    country/date/number/language/version_date. The caller is responsible for
    running validate_hierarchy first; conversion assumes a conformant tree.

    Raises:
        UnmappedKind: a node kind has no rule.
        InvalidIdentity: identity inputs missing or ill-formed.
    """
    if rules is None:
        rules = DEFAULT_RULES
    if isinstance(identity_inputs, FrbrIdentity):
        identity = identity_inputs
    else:
        identity = build_identity(
            country=identity_inputs.get("country", ""),
            date=identity_inputs.get("date", ""),
            number=identity_inputs.get("number", ""),
            language=identity_inputs.get("language", ""),
            version_date=identity_inputs.get("version_date", ""),
        )

    act = _convert_node(doc.root, rules, parent_eid="")
    return AknDocument(identity=identity, act=act)


def _rule_for(kind: str, rules: dict[str, MappingRule]) -> MappingRule:
    rule = rules.get(kind)
    if rule is None:
        raise UnmappedKind(f"no mapping rule for kind {kind}")
    return rule


def _convert_node(node: JlsNode, rules: dict[str, MappingRule], parent_eid: str,
                  ) -> AknElement:
    # Root conversion: the act itself never carries an eId.
    rule = _rule_for(node.kind, rules)
    element = AknElement(
        name=rule.target_element,
        num=node.num if rule.num_recipe == "child" else None,
        heading=node.title,
        text=(node.text or None) if node.kind == "Sentence" else None,
    )
    _convert_children(node, element, rules, parent_eid)
    return element


def _convert_children(node: JlsNode, parent: AknElement,
                      rules: dict[str, MappingRule], parent_eid: str) -> None:
    # Children mapping to the parent's own "body" target are merged into it.
    ordinals: dict[str, int] = {}
    for child in node.children:
        rule = _rule_for(child.kind, rules)
        if rule.target_element == "body" and parent.name == "body":
            _convert_children(child, parent, rules, parent_eid)
            continue

        converted = AknElement(
            name=rule.target_element,
            num=child.num if rule.num_recipe == "child" else None,
            heading=child.title,
            text=(child.text or None) if child.kind == "Sentence" else None,
        )
        if rule.eid_prefix:
            ordinals[rule.eid_prefix] = ordinals.get(rule.eid_prefix, 0) + 1
            segment = f"{rule.eid_prefix}_{_eid_num(child.num, ordinals[rule.eid_prefix])}"
            # Articles are numbered continuously through a law, so their eIds
            # start a fresh chain; container eIds chain from the body down.
            base = "" if rule.target_element == "article" else parent_eid
            converted.eid = f"{base}.{segment}" if base else segment
        _convert_children(child, converted, rules,
                          converted.eid if converted.eid else parent_eid)
        parent.children.append(converted)


def iter_elements(element: AknElement):
    """Yield element and all descendants in document order."""
    yield element
    for child in element.children:
        yield from iter_elements(child)


def validate_akn(doc: AknDocument) -> ValidationReport:
    """Structural-rule validation: eId uniqueness and grammar, legal nesting,
    well-formed identity URIs. Violations are data, not exceptions."""
    report: list[Violation] = []

    ident = doc.identity
    if not WORK_URI_RE.match(ident.work_uri):
        report.append(Violation("identity", "work-uri", ident.work_uri))
    if not EXPRESSION_URI_RE.match(ident.expression_uri):
        report.append(Violation("identity", "expression-uri", ident.expression_uri))
    if not MANIFESTATION_URI_RE.match(ident.manifestation_uri):
        report.append(Violation("identity", "manifestation-uri", ident.manifestation_uri))

    if doc.act.name != "act":
        report.append(Violation(doc.act.name, "root-element", "root element is not act"))
        return report
    bodies = [c for c in doc.act.children if c.name == "body"]
    if len(bodies) != 1:
        report.append(Violation(
            "act", "single-body", f"act has {len(bodies)} body children, expected 1"))

    seen_eids: dict[str, str] = {}
    _validate_element(doc.act, "act", None, report, seen_eids)
    return report


def _validate_element(el: AknElement, path: str, parent_eid: str | None,
                      report: list[Violation], seen_eids: dict[str, str]) -> None:
    if el.name in STRUCTURAL_ELEMENTS and el.eid is None:
        report.append(Violation(path, "eid-required", f"{el.name} has no eId"))
    if el.eid is not None:
        if el.eid in seen_eids:
            report.append(Violation(
                el.eid, "eid-unique", f"eId also used at {seen_eids[el.eid]}"))
        seen_eids.setdefault(el.eid, path)
        segments = el.eid.split(".")
        if not all(_EID_SEGMENT_RE.match(s) for s in segments):
            report.append(Violation(el.eid, "eid-grammar", "segment violates prefix_num form"))
        if parent_eid and el.name != "article" and not el.eid.startswith(parent_eid + "."):
            report.append(Violation(
                el.eid, "eid-ancestry", f"eId does not extend parent eId {parent_eid}"))
    if el.text is not None and el.name != "p":
        report.append(Violation(path, "text-in-p-only", f"{el.name} carries text"))

    legal = AKN_CHILD_ELEMENTS.get(el.name, frozenset())
    for child in el.children:
        child_path = child.eid or f"{path}/{child.name}"
        if child.name not in legal:
            report.append(Violation(
                child_path, "nesting",
                f"{child.name} is not a legal child of {el.name}"))
        _validate_element(child, child_path, el.eid or parent_eid, report, seen_eids)


# --- serialization -----------------------------------------------------------

def _esc_text(text: str) -> str:
    return text.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def _esc_attr(text: str) -> str:
    return _esc_text(text).replace('"', "&quot;")


def serialize_akn(doc: AknDocument) -> str:
    """Serialize to deterministic AKN XML: fixed attribute order, 2-space
    indent, LF endings. Raises ValidationFailed when validate_akn is dirty."""
    report = validate_akn(doc)
    if report:
        raise ValidationFailed(
            f"{len(report)} violation(s), first: {report[0].rule} at {report[0].where}")

    ident = doc.identity
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<akomaNtoso xmlns="{AKN_NS}">',
        "  <act>",
        "    <meta>",
        '      <identification source="#lexbridge">',
        "        <FRBRWork>",
        f'          <FRBRthis value="{_esc_attr(ident.work_uri)}"/>',
        f'          <FRBRuri value="{_esc_attr(ident.work_uri)}"/>',
        f'          <FRBRdate date="{ident.date}" name="enactment"/>',
        f'          <FRBRcountry value="{ident.country}"/>',
        f'          <FRBRnumber value="{_esc_attr(ident.number)}"/>',
        "        </FRBRWork>",
        "        <FRBRExpression>",
        f'          <FRBRthis value="{_esc_attr(ident.expression_uri)}"/>',
        f'          <FRBRuri value="{_esc_attr(ident.expression_uri)}"/>',
        f'          <FRBRdate date="{ident.version_date}" name="version"/>',
        f'          <FRBRlanguage language="{ident.language}"/>',
        "        </FRBRExpression>",
        "        <FRBRManifestation>",
        f'          <FRBRthis value="{_esc_attr(ident.manifestation_uri)}"/>',
        f'          <FRBRuri value="{_esc_attr(ident.manifestation_uri)}"/>',
        f'          <FRBRdate date="{ident.version_date}" name="version"/>',
        "        </FRBRManifestation>",
        "      </identification>",
        "    </meta>",
    ]
    for child in doc.act.children:
        _serialize_element(child, 2, lines)
    lines.append("  </act>")
    lines.append("</akomaNtoso>")
    return "\n".join(lines) + "\n"


def _serialize_element(el: AknElement, depth: int, lines: list[str]) -> None:
    pad = "  " * depth
    attrs = f' eId="{_esc_attr(el.eid)}"' if el.eid is not None else ""

    if el.text is not None and not el.children:
        lines.append(f"{pad}<{el.name}{attrs}>{_esc_text(el.text)}</{el.name}>")
        return
    if not el.children and el.num is None and el.heading is None:
        lines.append(f"{pad}<{el.name}{attrs}/>")
        return

    lines.append(f"{pad}<{el.name}{attrs}>")
    inner = "  " * (depth + 1)
    if el.num is not None:
        lines.append(f"{inner}<num>{_esc_text(el.num)}</num>")
    if el.heading is not None:
        lines.append(f"{inner}<heading>{_esc_text(el.heading)}</heading>")
    for child in el.children:
        _serialize_element(child, depth + 1, lines)
    lines.append(f"{pad}</{el.name}>")


# --- reading back ------------------------------------------------------------

def read_akn(xml_text: str) -> AknDocument:
    """Parse serialized AKN back into an AknDocument (round trip of
    serialize_akn; also the entry point for corpora delivered as AKN)."""
    try:
        root = ET.fromstring(xml_text)
    except ET.ParseError as exc:
        raise MalformedXml(str(exc)) from exc

    ns = {"akn": AKN_NS}
    act_el = root.find("akn:act", ns)
    if act_el is None:
        raise MalformedXml("no act element under akomaNtoso root")

    expr_uri_el = act_el.find(".//akn:FRBRExpression/akn:FRBRuri", ns)
    if expr_uri_el is None or not expr_uri_el.get("value"):
        raise MalformedXml("missing FRBRExpression/FRBRuri")
    identity = parse_expression_uri(expr_uri_el.get("value"))

    act = AknElement(name="act")
    for child in act_el:
        name = child.tag.split("}", 1)[-1]
        if name == "meta":
            continue
        act.children.append(_read_element(child))
    return AknDocument(identity=identity, act=act)


def _read_element(el: ET.Element) -> AknElement:
    name = el.tag.split("}", 1)[-1]
    out = AknElement(name=name, eid=el.get("eId"))
    element_children = list(el)
    if not element_children:
        text = el.text if el.text and el.text.strip() else None
        out.text = text
        return out
    for child in element_children:
        child_name = child.tag.split("}", 1)[-1]
        if child_name == "num":
            out.num = child.text or ""
        elif child_name == "heading":
            out.heading = child.text or ""
        else:
            out.children.append(_read_element(child))
    return out
