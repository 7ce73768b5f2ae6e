"""Three-level type hierarchy for system components and connections.

Types form a forest. A child normally sits one level below its parent; an
entry flagged ``same_level`` shares its parent's level and is kept fixed by
abstraction (e.g. a specific room abstracts to Room, not further up).
Concrete model elements are typed with leaf entries.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import FormatError, NoParentTypeError, UnknownTypeError

PHYSICAL = "PHYSICAL"
DIGITAL = "DIGITAL"

KIND_ROOTS = {PHYSICAL: "PhysicalConnection", DIGITAL: "DigitalConnection"}


@dataclass(frozen=True)
class TypeEntry:
    name: str
    parent: str | None
    level: int
    same_level: bool = False


@dataclass(frozen=True)
class Violation:
    element: str
    rule: str
    message: str

    def __str__(self):
        return f"{self.element}: {self.rule}: {self.message}"


class TypeTaxonomy:
    def __init__(self, entries):
        self.entries: dict[str, TypeEntry] = {}
        for entry in entries:
            if entry.name in self.entries:
                raise FormatError(f"duplicate taxonomy entry {entry.name!r}")
            self.entries[entry.name] = entry
        self._children: dict[str, list[str]] = {name: [] for name in self.entries}
        for entry in self.entries.values():
            if entry.parent is not None and entry.parent in self._children:
                self._children[entry.parent].append(entry.name)

    def __contains__(self, name):
        return name in self.entries

    def has(self, name):
        return name in self.entries

    def level(self, name):
        return self._entry(name).level

    def parent(self, name):
        return self._entry(name).parent

    def children(self, name):
        return tuple(self._children.get(name, ()))

    def is_leaf(self, name):
        """Concrete (instantiable) types have no subtypes."""
        return not self._children.get(name)

    def _entry(self, name):
        try:
            return self.entries[name]
        except KeyError:
            raise UnknownTypeError(f"unknown type {name!r}") from None

    def descends_or_equal(self, sub, sup):
        """True when ``sub`` is ``sup`` or a (transitive) subtype of it."""
        if sub not in self.entries or sup not in self.entries:
            return False
        cur = sub
        while cur is not None:
            if cur == sup:
                return True
            cur = self.entries[cur].parent
        return False

    def lift(self, name):
        """One abstraction step: same-level types stay, others go one level up."""
        entry = self._entry(name)
        if entry.same_level:
            return entry.name
        if entry.parent is None:
            raise NoParentTypeError(f"type {name!r} has no parent to abstract to")
        return entry.parent

    def resolve_slot(self, label):
        """Type for a rule slot label: the label itself, or the label with a
        trailing numeric suffix stripped (Room1 -> Room). None if neither is
        a known type."""
        if label in self.entries:
            return label
        stripped = label.rstrip("0123456789_")
        if stripped and stripped in self.entries:
            return stripped
        return None

    def validate(self):
        violations = []
        for entry in self.entries.values():
            if entry.level not in (1, 2, 3):
                violations.append(Violation(entry.name, "taxonomy-level",
                                            f"level {entry.level} outside 1..3"))
            if entry.parent is None:
                if entry.level != 1:
                    violations.append(Violation(entry.name, "taxonomy-root-level",
                                                "root entries must be level 1"))
                continue
            if entry.parent not in self.entries:
                violations.append(Violation(entry.name, "taxonomy-parent",
                                            f"parent {entry.parent!r} undefined"))
                continue
            expected = self.entries[entry.parent].level + (0 if entry.same_level else 1)
            if entry.level != expected:
                violations.append(Violation(entry.name, "taxonomy-level",
                                            f"level {entry.level}, expected {expected}"))
        # parent links must not cycle
        for name in self.entries:
            seen = set()
            cur = name
            while cur is not None:
                if cur in seen:
                    violations.append(Violation(name, "taxonomy-cycle",
                                                "parent chain forms a cycle"))
                    break
                seen.add(cur)
                cur = self.entries[cur].parent if cur in self.entries else None
        return violations

    def to_dict(self):
        entries = []
        for entry in self.entries.values():
            record = {"name": entry.name, "parent": entry.parent, "level": entry.level}
            if entry.same_level:
                record["same_level"] = True
            entries.append(record)
        return {"entries": entries}

    @classmethod
    def from_dict(cls, doc):
        try:
            raw = doc["entries"]
        except (KeyError, TypeError):
            raise FormatError("taxonomy document needs an 'entries' list") from None
        entries = []
        for record in raw:
            try:
                entries.append(TypeEntry(
                    name=record["name"],
                    parent=record.get("parent"),
                    level=int(record["level"]),
                    same_level=bool(record.get("same_level", False)),
                ))
            except (KeyError, TypeError, ValueError) as exc:
                raise FormatError(f"bad taxonomy entry {record!r}: {exc}") from None
        taxonomy = cls(entries)
        bad = taxonomy.validate()
        if bad:
            raise FormatError("invalid taxonomy: " + "; ".join(str(v) for v in bad))
        return taxonomy

    @classmethod
    def load(cls, path):
        try:
            with open(path, "r", encoding="utf-8") as fh:
                doc = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise FormatError(f"cannot read taxonomy {path}: {exc}") from None
        return cls.from_dict(doc)


def connection_type(kind, subtype):
    """Effective type of a connection record: its subtype, else the kind root."""
    if subtype:
        return subtype
    if kind not in KIND_ROOTS:
        raise UnknownTypeError(f"unknown connection kind {kind!r}")
    return KIND_ROOTS[kind]
