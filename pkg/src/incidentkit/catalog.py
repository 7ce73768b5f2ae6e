"""Catalog of reusable activity patterns.

Each pattern is a pre/post-condition template for one offender activity,
tagged with a category, an abstraction level (STANDARD for concrete
techniques, META for abstract characterizations), a severity, and its
provenance (a CAPEC id, or "domain-common" for everyday building actions).
Condition labels are taxonomy types; ``links`` types the link variables.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import FormatError, UnknownTypeError
from .incident import SEVERITIES
from .terms import parse_term

STANDARD = "STANDARD"
META = "META"


@dataclass(frozen=True)
class ActivityPattern:
    name: str
    category: str
    level: str
    severity: str
    pre: str
    post: str
    provenance: str
    activity_name: str
    links: dict = field(default_factory=dict)
    description: str = ""


def catalog_from_dict(doc, taxonomy):
    try:
        records = doc["patterns"]
    except (KeyError, TypeError):
        raise FormatError("catalog document needs a 'patterns' list") from None
    patterns = []
    for record in records:
        try:
            pattern = ActivityPattern(
                name=record["name"],
                category=record["category"],
                level=record["level"],
                severity=record["severity"],
                pre=record["pre"],
                post=record["post"],
                provenance=record.get("provenance", "domain-common"),
                activity_name=record.get("activity_name", record["name"]),
                links=dict(record.get("links") or {}),
                description=record.get("description", ""),
            )
        except (KeyError, TypeError) as exc:
            raise FormatError(f"bad catalog entry {record!r}: {exc}") from None
        if pattern.level not in (STANDARD, META):
            raise FormatError(f"pattern {pattern.name!r}: level {pattern.level!r}")
        if pattern.severity not in SEVERITIES:
            raise FormatError(f"pattern {pattern.name!r}: severity {pattern.severity!r}")
        for which in ("pre", "post"):
            try:
                term = parse_term(getattr(pattern, which))
            except Exception as exc:
                raise FormatError(f"pattern {pattern.name!r}: {which}: {exc}") from None
            for node in term.nodes:
                if not taxonomy.has(node.label):
                    raise UnknownTypeError(
                        f"pattern {pattern.name!r}: {which} label {node.label!r} "
                        "is not a taxonomy type")
        for link, type_name in pattern.links.items():
            if not taxonomy.has(type_name):
                raise UnknownTypeError(
                    f"pattern {pattern.name!r}: link {link!r} typed with "
                    f"unknown {type_name!r}")
        patterns.append(pattern)
    return patterns


def load_catalog(path, taxonomy):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise FormatError(f"cannot read catalog {path}: {exc}") from None
    return catalog_from_dict(doc, taxonomy)
