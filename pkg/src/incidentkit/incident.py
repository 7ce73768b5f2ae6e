"""Incident model: crime scripts made of scenes, activities, and entities.

A script is either an INSTANCE (entities name concrete assets of one system)
or a PATTERN (entities carry synthetic names and abstract types). Activity
pre/post-conditions are terms whose node labels are entity names and whose
link labels are entity-connection names (or free variables).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

from .errors import FormatError, TypeMismatchError, UnboundSlotError
from .system import Connection, _connection_from_dict, _connection_to_dict
from .taxonomy import Violation
from .terms import parse_term, substitute, term_to_text

INSTANCE = "INSTANCE"
PATTERN = "PATTERN"

EXACT = "EXACT"
PARTIAL = "PARTIAL"

SEVERITIES = ("LOW", "MEDIUM", "HIGH", "VERY_HIGH")
SEVERITY_WEIGHT = {name: weight for weight, name in enumerate(SEVERITIES, start=1)}

ROLES = ("initiator", "target", "location", "resource")

# attributes that describe the incident relationship, not the component
NON_MATCHING_ATTRIBUTES = {"role", "port"}


@dataclass(frozen=True)
class IncidentEntity:
    name: str
    type: str
    attributes: dict = field(default_factory=dict)
    contained: tuple = ()
    knowledge: str = PARTIAL


@dataclass(frozen=True)
class Activity:
    name: str
    pre: str | None = None
    post: str | None = None
    action: str | None = None
    initiator: str | None = None
    target: str | None = None
    location: str | None = None
    resource: str | None = None
    next: tuple = ()
    severity: str | None = None

    def role(self, name):
        return getattr(self, name)


class CrimeScript:
    def __init__(self, name, category, scenes, entities, connections=()):
        self.name = name
        self.category = category
        self.scenes = tuple(tuple(acts) for acts in scenes)
        self.entities = tuple(entities)
        self.connections = tuple(connections)
        self.entity_map = {e.name: e for e in self.entities}
        self.connection_map = {c.name: c for c in self.connections}

    def activities(self):
        """(scene index, position, activity) in scene-major order."""
        out = []
        for sid, scene in enumerate(self.scenes):
            for pos, act in enumerate(scene):
                out.append((sid, pos, act))
        return out

    def entity_types(self):
        return {e.name: e.type for e in self.entities}

    def connection_types(self):
        return {c.name: c.effective_type() for c in self.connections}

    def parent_entity(self, name):
        for entity in self.entities:
            if name in entity.contained:
                return entity.name
        return None

    def connections_of(self, name):
        return [c for c in self.connections if c.touches(name)]

    def to_dict(self):
        return {
            "name": self.name,
            "category": self.category,
            "entities": [
                {"name": e.name, "type": e.type, "attributes": dict(e.attributes),
                 "contained": list(e.contained), "knowledge": e.knowledge}
                for e in self.entities
            ],
            "connections": [_connection_to_dict(c) for c in self.connections],
            "scenes": [[_activity_to_dict(a) for a in scene] for scene in self.scenes],
        }

    @classmethod
    def from_dict(cls, doc):
        try:
            entities = tuple(
                IncidentEntity(name=e["name"], type=e["type"],
                               attributes=dict(e.get("attributes") or {}),
                               contained=tuple(e.get("contained") or ()),
                               knowledge=e.get("knowledge") or PARTIAL)
                for e in doc.get("entities", ())
            )
            connections = tuple(_connection_from_dict(c) for c in doc.get("connections", ()))
            scenes = [
                [_activity_from_dict(a) for a in scene]
                for scene in doc.get("scenes", ())
            ]
            return cls(doc["name"], doc["category"], scenes, entities, connections)
        except (KeyError, TypeError) as exc:
            raise FormatError(f"bad script document: {exc}") from None

    @classmethod
    def load(cls, path):
        try:
            with open(path, "r", encoding="utf-8") as fh:
                doc = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise FormatError(f"cannot read script {path}: {exc}") from None
        return cls.from_dict(doc)


def _activity_to_dict(act):
    record = {"name": act.name}
    for key in ("action", "initiator", "target", "location", "resource",
                "pre", "post", "severity"):
        value = getattr(act, key)
        if value is not None:
            record[key] = value
    record["next"] = list(act.next)
    return record


def _activity_from_dict(record):
    return Activity(
        name=record["name"],
        action=record.get("action"),
        initiator=record.get("initiator"),
        target=record.get("target"),
        location=record.get("location"),
        resource=record.get("resource"),
        pre=record.get("pre"),
        post=record.get("post"),
        next=tuple(record.get("next") or ()),
        severity=record.get("severity"),
    )


def validate_script(script, taxonomy, system=None):
    """All invariant violations for a crime script; empty when well-formed.

    With a system given, INSTANCE entity names must name assets of matching
    type and condition labels must stay within the system's assets; PATTERN
    entity names must *not* collide with asset names (they are synthetic).
    """
    violations = []
    if script.category not in (INSTANCE, PATTERN):
        violations.append(Violation(script.name, "category",
                                    f"category {script.category!r} invalid"))

    seen = set()
    for entity in script.entities:
        if entity.name in seen:
            violations.append(Violation(entity.name, "unique-name", "duplicate entity"))
        seen.add(entity.name)
        if not taxonomy.has(entity.type):
            violations.append(Violation(entity.name, "known-type",
                                        f"type {entity.type!r} not in taxonomy"))
        elif script.category == INSTANCE and not taxonomy.is_leaf(entity.type):
            violations.append(Violation(entity.name, "concrete-type",
                                        f"instance entity typed abstract {entity.type!r}"))
        if entity.knowledge not in (EXACT, PARTIAL):
            violations.append(Violation(entity.name, "knowledge",
                                        f"knowledge {entity.knowledge!r} invalid"))
        for child in entity.contained:
            if child not in script.entity_map:
                violations.append(Violation(entity.name, "containment-ref",
                                            f"contained entity {child!r} undefined"))
        if system is not None:
            asset = system.asset_map.get(entity.name)
            if script.category == INSTANCE:
                if asset is None:
                    violations.append(Violation(entity.name, "instance-entity",
                                                "no system asset with this name"))
                elif asset.type != entity.type:
                    violations.append(Violation(entity.name, "instance-entity",
                                                f"asset is {asset.type!r}, "
                                                f"entity says {entity.type!r}"))
            elif asset is not None:
                violations.append(Violation(entity.name, "pattern-entity",
                                            "pattern entity names a concrete asset"))

    parent = {}
    for entity in script.entities:
        for child in entity.contained:
            if child in parent:
                violations.append(Violation(child, "containment-forest",
                                            "entity has two containers"))
            parent[child] = entity.name

    for conn in script.connections:
        for endpoint in (conn.endpoint1, conn.endpoint2):
            if endpoint not in script.entity_map:
                violations.append(Violation(conn.name, "connection-endpoint",
                                            f"endpoint {endpoint!r} is not an entity"))
        if conn.subtype and not taxonomy.has(conn.subtype):
            violations.append(Violation(conn.name, "known-type",
                                        f"subtype {conn.subtype!r} not in taxonomy"))

    act_names = set()
    for sid, scene in enumerate(script.scenes):
        names_here = {a.name for a in scene}
        for act in scene:
            if act.name in act_names:
                violations.append(Violation(act.name, "unique-name",
                                            "duplicate activity name"))
            act_names.add(act.name)
            for role in ROLES:
                ref = act.role(role)
                if ref is not None and ref not in script.entity_map:
                    violations.append(Violation(act.name, "role-ref",
                                                f"{role} {ref!r} is not an entity"))
            for ref in act.next:
                if ref not in names_here:
                    violations.append(Violation(act.name, "next-ref",
                                                f"next {ref!r} not in the same scene"))
            if act.severity is not None and act.severity not in SEVERITIES:
                violations.append(Violation(act.name, "severity",
                                            f"severity {act.severity!r} invalid"))
            violations.extend(_validate_condition(act, script, taxonomy, system))
        violations.extend(_validate_next_order(scene, sid))
    return violations


def _validate_condition(act, script, taxonomy, system):
    violations = []
    for which in ("pre", "post"):
        text = getattr(act, which)
        if text is None:
            continue
        try:
            term = parse_term(text)
        except Exception as exc:
            violations.append(Violation(act.name, "condition-syntax", f"{which}: {exc}"))
            continue
        for node in term.nodes:
            if node.label in script.entity_map:
                if (system is not None and script.category == INSTANCE
                        and node.label not in system.asset_map):
                    violations.append(Violation(act.name, "condition-label",
                                                f"{which} references {node.label!r} "
                                                "which is not a system asset"))
                continue
            if taxonomy.has(node.label):
                if script.category == INSTANCE and system is not None:
                    violations.append(Violation(act.name, "condition-label",
                                                f"{which} uses type {node.label!r}; "
                                                "instance conditions name assets"))
                continue
            violations.append(Violation(act.name, "condition-label",
                                        f"{which} label {node.label!r} unknown"))
    return violations


def _validate_next_order(scene, sid):
    # next links must be acyclic (linear chains in practice)
    graph = {a.name: a.next for a in scene}
    state = {}

    def visit(name):
        if state.get(name) == 1:
            return True
        if state.get(name) == 2:
            return False
        state[name] = 1
        for succ in graph.get(name, ()):
            if visit(succ):
                return True
        state[name] = 2
        return False

    for act in scene:
        if visit(act.name):
            return [Violation(act.name, "next-acyclic",
                              f"scene {sid}: next links form a cycle")]
    return []


def bind_activity(activity, action, binding, taxonomy, system):
    """Instantiate an action rule into a concrete activity.

    ``binding`` maps node slots to asset names and may map link variables to
    connection names directly. Unmapped link variables are resolved against
    the system: the unique connection joining two bound member assets (or,
    for single-member links, the unique type-compatible connection at that
    asset). Raises UnboundSlot/TypeMismatch accordingly.
    """
    from .system import rule_node_types

    pre = parse_term(action.pre)
    post = parse_term(action.post)
    slot_types = rule_node_types(action, taxonomy)

    label_map = {}
    for term in (pre, post):
        for node in term.nodes:
            slot = node.label
            if slot in label_map:
                continue
            if slot not in binding:
                raise UnboundSlotError(f"slot {slot!r} has no binding")
            asset_name = binding[slot]
            asset = system.asset_map.get(asset_name)
            if asset is None:
                raise UnboundSlotError(f"slot {slot!r} bound to unknown asset {asset_name!r}")
            expected = slot_types.get(slot)
            if expected and not taxonomy.descends_or_equal(asset.type, expected):
                raise TypeMismatchError(
                    f"slot {slot!r} expects {expected!r}, got {asset.type!r} "
                    f"({asset_name!r})")
            label_map[slot] = asset_name

    link_members: dict[str, set] = {}
    for term in (pre, post):
        for node in term.nodes:
            for link in node.links:
                link_members.setdefault(link, set()).add(label_map[node.label])

    link_map = {}
    for link, members in sorted(link_members.items()):
        if link in binding:
            link_map[link] = binding[link]
            continue
        expected = action.slots.get(link)
        found = []
        for conn in system.connections:
            if expected and not taxonomy.descends_or_equal(conn.effective_type(), expected):
                continue
            if len(members) >= 2:
                if conn.endpoint1 in members and conn.endpoint2 in members:
                    found.append(conn.name)
            else:
                (only,) = tuple(members)
                if conn.touches(only):
                    found.append(conn.name)
        if len(found) != 1:
            raise UnboundSlotError(
                f"link {link!r} resolves to {len(found)} connections; "
                "bind it explicitly")
        link_map[link] = found[0]

    bound_pre = term_to_text(substitute(pre, label_map, link_map))
    bound_post = term_to_text(substitute(post, label_map, link_map))
    return replace(activity, pre=bound_pre, post=bound_post, action=action.name)
