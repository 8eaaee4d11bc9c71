"""Metadata records for data sources and their binarization into a context.

Records follow a simplified structured schema: free-text identification and
availability maps, plus controlled-vocabulary term lists for the Subject,
Organism and Quality categories.  Terms may be prefixed ("NCBI:Human") to
name the ontology they come from.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path

from .context import Attribute, FormalContext
from .errors import RegistryError
from .ontology import Ontology

#: Prefix allowed without an ontology declaration.
FREE_PREFIX = "free"

_DATE_SHAPE = re.compile(r"^\d{4}(-\d{2}(-\d{2}(T[0-9:.+\-Z]+)?)?)?$")


@dataclass(frozen=True)
class OntologyRef:
    prefix: str
    name: str
    version: str = ""
    location: str = ""


@dataclass
class MetadataRecord:
    id: str
    identification: dict[str, str] = field(default_factory=dict)
    subjects: list[str] = field(default_factory=list)
    organisms: list[str] = field(default_factory=list)
    quality: list[str] = field(default_factory=list)
    availability: dict[str, str] = field(default_factory=dict)
    ontologies_used: list[OntologyRef] = field(default_factory=list)

    def declared_prefixes(self) -> set[str]:
        return {ref.prefix for ref in self.ontologies_used} | {FREE_PREFIX}

    def terms_by_category(self) -> list[tuple[str, str]]:
        """(category, raw term) pairs in record order."""
        out = []
        out.extend(("Subject", t) for t in self.subjects)
        out.extend(("Organism", t) for t in self.organisms)
        out.extend(("Quality", t) for t in self.quality)
        return out


def split_term(raw: str) -> tuple[str | None, str]:
    """Split 'prefix:term' into its parts; bare terms have no prefix."""
    prefix, sep, term = raw.partition(":")
    if not sep:
        return None, raw
    return prefix, term


@dataclass(frozen=True)
class FieldRule:
    """Binarize one identification/availability field by exact value match."""

    section: str  # "identification" or "availability"
    fieldname: str
    equals: str
    attribute_term: str

    def category(self) -> str:
        return "Identification" if self.section == "identification" else "Availability"


@dataclass(frozen=True)
class BinarizationConfig:
    categories_included: frozenset[str] = frozenset({"Subject", "Organism", "Quality"})
    field_rules: tuple[FieldRule, ...] = ()


@dataclass(frozen=True)
class Finding:
    level: str  # "warning" or "info"
    message: str


def _record_from_doc(doc: dict) -> MetadataRecord:
    if not isinstance(doc, dict):
        raise RegistryError(f"record must be an object, got {type(doc).__name__}")
    rid = doc.get("id")
    if not rid or not isinstance(rid, str):
        raise RegistryError("record is missing a non-empty 'id'")
    refs = []
    for ref in doc.get("ontologies_used", []):
        refs.append(
            OntologyRef(
                prefix=ref["prefix"],
                name=ref.get("name", ""),
                version=ref.get("version", ""),
                location=ref.get("location", ""),
            )
        )
    record = MetadataRecord(
        id=rid,
        identification=dict(doc.get("identification", {})),
        subjects=list(doc.get("subjects", [])),
        organisms=list(doc.get("organisms", [])),
        quality=list(doc.get("quality", [])),
        availability=dict(doc.get("availability", {})),
        ontologies_used=refs,
    )
    declared = record.declared_prefixes()
    for _, raw in record.terms_by_category():
        prefix, _ = split_term(raw)
        if prefix is not None and prefix not in declared:
            raise RegistryError(
                f"record {rid!r} uses undeclared ontology prefix: {prefix!r}"
            )
    return record


def parse_records(text: str) -> list[MetadataRecord]:
    """Parse a JSON corpus document: {"records": [...]} or a bare record list."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise RegistryError(f"malformed record document: {exc}") from exc
    if isinstance(doc, dict) and "records" in doc:
        items = doc["records"]
    elif isinstance(doc, list):
        items = doc
    elif isinstance(doc, dict) and "id" in doc:
        items = [doc]
    else:
        raise RegistryError("record document must hold a record or a record list")
    records = [_record_from_doc(item) for item in items]
    seen = set()
    for r in records:
        if r.id in seen:
            raise RegistryError(f"duplicate record id: {r.id!r}")
        seen.add(r.id)
    return records


def load_records(path: str | Path) -> list[MetadataRecord]:
    """Load a corpus from one document file or a directory of per-source files."""
    path = Path(path)
    if path.is_dir():
        records = []
        for entry in sorted(path.glob("*.json")):
            records.extend(parse_records(entry.read_text(encoding="utf-8")))
        seen = set()
        for r in records:
            if r.id in seen:
                raise RegistryError(f"duplicate record id: {r.id!r}")
            seen.add(r.id)
        return records
    return parse_records(path.read_text(encoding="utf-8"))


def write_records(records: list[MetadataRecord]) -> str:
    """Emit a corpus document; parse_records round-trips it exactly."""
    doc = {
        "records": [
            {
                "id": r.id,
                "identification": r.identification,
                "subjects": r.subjects,
                "organisms": r.organisms,
                "quality": r.quality,
                "availability": r.availability,
                "ontologies_used": [
                    {
                        "prefix": ref.prefix,
                        "name": ref.name,
                        "version": ref.version,
                        "location": ref.location,
                    }
                    for ref in r.ontologies_used
                ],
            }
            for r in records
        ]
    }
    return json.dumps(doc, sort_keys=True, indent=1) + "\n"


def build_context(
    records: list[MetadataRecord], cfg: BinarizationConfig | None = None
) -> FormalContext:
    """One object per record with terms left, one attribute per distinct term.

    Attributes are keyed by (prefix, term, category) in first-occurrence
    order; records with no retained attribute are dropped, mirroring the
    category-projection view.  Identification and availability fields only
    binarize through explicit rules.
    """
    cfg = cfg or BinarizationConfig()
    if not cfg.categories_included:
        raise RegistryError("at least one category must be included")
    attrs: list[Attribute] = []
    attr_pos: dict[tuple[str, str], int] = {}
    memberships: list[set[tuple[str, str]]] = []
    kept: list[MetadataRecord] = []
    for r in records:
        keys: set[tuple[str, str]] = set()
        for category, raw in r.terms_by_category():
            if category not in cfg.categories_included:
                continue
            prefix, term = split_term(raw)
            a = Attribute(term=term, prefix=prefix, category=category)
            if a.key not in attr_pos:
                attr_pos[a.key] = len(attrs)
                attrs.append(a)
            keys.add(a.key)
        for rule in cfg.field_rules:
            section = r.identification if rule.section == "identification" else r.availability
            if section.get(rule.fieldname) == rule.equals:
                a = Attribute(term=rule.attribute_term, category=rule.category())
                if a.key not in attr_pos:
                    attr_pos[a.key] = len(attrs)
                    attrs.append(a)
                keys.add(a.key)
        if keys:
            memberships.append(keys)
            kept.append(r)
    rows = [[1 if a.key in keys else 0 for a in attrs] for keys in memberships]
    return FormalContext([r.id for r in kept], attrs, rows)


def validate_record(record: MetadataRecord, onts: list[Ontology]) -> list[Finding]:
    """Advisory findings: unknown vocabulary terms, empty categories, odd dates."""
    findings: list[Finding] = []
    by_prefix = {o.prefix: o for o in onts}
    for category, raw in record.terms_by_category():
        prefix, term = split_term(raw)
        if prefix is None or prefix == FREE_PREFIX:
            continue
        ont = by_prefix.get(prefix)
        if ont is not None and ont.resolve(term) is None:
            findings.append(
                Finding("warning", f"{category} term {raw!r} not found in ontology {prefix!r}")
            )
    for category, values in (
        ("subjects", record.subjects),
        ("organisms", record.organisms),
        ("quality", record.quality),
    ):
        if not values:
            findings.append(Finding("info", f"record {record.id!r} has no {category} terms"))
    for name, value in sorted(record.identification.items()):
        if "date" in name.lower() and not _DATE_SHAPE.match(value):
            findings.append(
                Finding("warning", f"identification field {name!r} is not a W3CDTF-shaped date: {value!r}")
            )
    return findings
