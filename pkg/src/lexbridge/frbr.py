"""FRBR Work/Expression/Manifestation identity for converted documents.

URI grammar:
    work          /akn/{country}/act/{date}/{number}
    expression    {work}/{language}@{version_date}
    manifestation {expression}.xml
"""
from __future__ import annotations

import datetime
import re
from dataclasses import dataclass

from lexbridge.errors import InvalidIdentity

_COUNTRY_RE = re.compile(r"^[a-z]{2}$")
_LANGUAGE_RE = re.compile(r"^[a-z]{2,3}$")
_NUMBER_RE = re.compile(r"^[^\s/@]+$")

WORK_URI_RE = re.compile(
    r"^/akn/(?P<country>[a-z]{2})/act/(?P<date>\d{4}-\d{2}-\d{2})/(?P<number>[^\s/@]+)$")
EXPRESSION_URI_RE = re.compile(
    r"^(?P<work>/akn/[a-z]{2}/act/\d{4}-\d{2}-\d{2}/[^\s/@]+)"
    r"/(?P<language>[a-z]{2,3})@(?P<version_date>\d{4}-\d{2}-\d{2})$")
MANIFESTATION_URI_RE = re.compile(
    r"^(?P<expression>/akn/[a-z]{2}/act/\d{4}-\d{2}-\d{2}/[^\s/@]+"
    r"/[a-z]{2,3}@\d{4}-\d{2}-\d{2})\.xml$")


@dataclass(frozen=True)
class FrbrIdentity:
    country: str
    date: str
    number: str
    language: str
    version_date: str
    doc_type: str = "act"

    @property
    def work_uri(self) -> str:
        return f"/akn/{self.country}/{self.doc_type}/{self.date}/{self.number}"

    @property
    def expression_uri(self) -> str:
        return f"{self.work_uri}/{self.language}@{self.version_date}"

    @property
    def manifestation_uri(self) -> str:
        return f"{self.expression_uri}.xml"

    @property
    def law_id(self) -> str:
        """Work URI tail identifying the law within its jurisdiction."""
        return f"{self.date}/{self.number}"


def normalize_number(number: str) -> str:
    """Strip all whitespace from a law number; everything else stays as-is."""
    return "".join(number.split())


def _check_date(value: str, field: str) -> str:
    try:
        datetime.date.fromisoformat(value)
    except (TypeError, ValueError) as exc:
        raise InvalidIdentity(f"{field} is not an ISO-8601 date: {value!r}") from exc
    return value


def build_identity(country: str, date: str, number: str, language: str,
                   version_date: str) -> FrbrIdentity:
    """Validate and normalize identity inputs into a FrbrIdentity.

    Raises InvalidIdentity on missing or ill-formed inputs.
    """
    for field, value in (("country", country), ("date", date), ("number", number),
                         ("language", language), ("version_date", version_date)):
        if not value or not isinstance(value, str):
            raise InvalidIdentity(f"missing identity input: {field}")

    country = country.strip().lower()
    if not _COUNTRY_RE.match(country):
        raise InvalidIdentity(f"country is not ISO-3166 alpha-2: {country!r}")
    language = language.strip().lower()
    if not _LANGUAGE_RE.match(language):
        raise InvalidIdentity(f"language is not an ISO-639 code: {language!r}")
    number = normalize_number(number)
    if not _NUMBER_RE.match(number):
        raise InvalidIdentity(f"law number normalizes to an unusable value: {number!r}")

    return FrbrIdentity(
        country=country,
        date=_check_date(date.strip(), "date"),
        number=number,
        language=language,
        version_date=_check_date(version_date.strip(), "version_date"),
    )


def parse_expression_uri(uri: str) -> FrbrIdentity:
    """Recover a FrbrIdentity from an expression URI (inverse of the grammar)."""
    m = EXPRESSION_URI_RE.match(uri)
    if not m:
        raise InvalidIdentity(f"not an expression URI: {uri!r}")
    w = WORK_URI_RE.match(m.group("work"))
    assert w is not None  # implied by the expression regex
    return build_identity(
        country=w.group("country"),
        date=w.group("date"),
        number=w.group("number"),
        language=m.group("language"),
        version_date=m.group("version_date"),
    )


def parse_manifestation_uri(uri: str) -> FrbrIdentity:
    m = MANIFESTATION_URI_RE.match(uri)
    if not m:
        raise InvalidIdentity(f"not a manifestation URI: {uri!r}")
    return parse_expression_uri(m.group("expression"))


def parse_work_uri(uri: str) -> dict[str, str]:
    """Split a work URI into country/date/number components."""
    m = WORK_URI_RE.match(uri)
    if not m:
        raise InvalidIdentity(f"not a work URI: {uri!r}")
    return m.groupdict()
