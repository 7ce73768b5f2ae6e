"""System model: assets with containment, typed connections, and action rules.

Assets are concrete components typed with leaf taxonomy entries. Connections
are binary, typed by an optional subtype under their PHYSICAL/DIGITAL kind
root. Actions are rewrite rules over states; their condition labels are
slots, typed either explicitly (``slots``) or by the label itself with a
trailing number stripped (Room1 -> Room).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from .errors import FormatError
from .taxonomy import DIGITAL, PHYSICAL, Violation, connection_type
from .terms import parse_term


@dataclass(frozen=True)
class Asset:
    name: str
    type: str
    attributes: dict = field(default_factory=dict)
    contained: tuple = ()


@dataclass(frozen=True)
class Connection:
    name: str
    kind: str
    endpoint1: str
    endpoint2: str
    subtype: str | None = None

    def effective_type(self):
        return connection_type(self.kind, self.subtype)

    def touches(self, name):
        return name in (self.endpoint1, self.endpoint2)


@dataclass(frozen=True)
class ActionRule:
    name: str
    pre: str
    post: str
    slots: dict = field(default_factory=dict)
    fresh: tuple = ()


class SystemModel:
    def __init__(self, name, assets, connections, actions, initial=None):
        self.name = name
        self.assets = tuple(assets)
        self.connections = tuple(connections)
        self.actions = tuple(actions)
        self.initial = initial
        self.asset_map = {a.name: a for a in self.assets}
        self.connection_map = {c.name: c for c in self.connections}
        self.action_map = {a.name: a for a in self.actions}

    def asset_types(self):
        return {a.name: a.type for a in self.assets}

    def connection_types(self):
        return {c.name: c.effective_type() for c in self.connections}

    def parent_of(self, asset_name):
        for asset in self.assets:
            if asset_name in asset.contained:
                return asset.name
        return None

    def connections_of(self, asset_name):
        return [c for c in self.connections if c.touches(asset_name)]

    def to_dict(self):
        return {
            "name": self.name,
            "assets": [
                {"name": a.name, "type": a.type, "attributes": dict(a.attributes),
                 "contained": list(a.contained)}
                for a in self.assets
            ],
            "connections": [_connection_to_dict(c) for c in self.connections],
            "actions": [
                {"name": r.name, "pre": r.pre, "post": r.post,
                 "slots": dict(r.slots), "fresh": list(r.fresh)}
                for r in self.actions
            ],
            "initial": self.initial,
        }

    @classmethod
    def from_dict(cls, doc):
        try:
            assets = tuple(
                Asset(name=a["name"], type=a["type"],
                      attributes=dict(a.get("attributes") or {}),
                      contained=tuple(a.get("contained") or ()))
                for a in doc.get("assets", ())
            )
            connections = tuple(_connection_from_dict(c) for c in doc.get("connections", ()))
            actions = tuple(
                ActionRule(name=r["name"], pre=r["pre"], post=r["post"],
                           slots=dict(r.get("slots") or {}),
                           fresh=tuple(r.get("fresh") or ()))
                for r in doc.get("actions", ())
            )
        except (KeyError, TypeError) as exc:
            raise FormatError(f"bad system document: {exc}") from None
        return cls(doc.get("name", "system"), assets, connections, actions,
                   initial=doc.get("initial"))

    @classmethod
    def load(cls, path):
        try:
            with open(path, "r", encoding="utf-8") as fh:
                doc = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise FormatError(f"cannot read system {path}: {exc}") from None
        return cls.from_dict(doc)


def _connection_to_dict(c):
    record = {"name": c.name, "kind": c.kind,
              "endpoint1": c.endpoint1, "endpoint2": c.endpoint2}
    if c.subtype:
        record["subtype"] = c.subtype
    return record


def _connection_from_dict(c):
    return Connection(name=c["name"], kind=c["kind"],
                      endpoint1=c["endpoint1"], endpoint2=c["endpoint2"],
                      subtype=c.get("subtype"))


def rule_node_types(rule, taxonomy):
    """Slot label -> type for a rule's conditions. Declared slots come first
    (these also cover link variables); undeclared node labels fall back to
    the label with any numeric suffix stripped."""
    types = dict(rule.slots)
    for text in (rule.pre, rule.post):
        for node in parse_term(text).nodes:
            if node.label not in types:
                resolved = taxonomy.resolve_slot(node.label)
                if resolved:
                    types[node.label] = resolved
    return types


def validate_system(model, taxonomy):
    """All invariant violations, empty when the model is well-formed."""
    violations = []
    seen = set()
    for asset in model.assets:
        if asset.name in seen:
            violations.append(Violation(asset.name, "unique-name", "duplicate asset name"))
        seen.add(asset.name)
        if not taxonomy.has(asset.type):
            violations.append(Violation(asset.name, "known-type",
                                        f"type {asset.type!r} not in taxonomy"))
        elif not taxonomy.is_leaf(asset.type):
            violations.append(Violation(asset.name, "concrete-type",
                                        f"type {asset.type!r} is abstract"))
        for child in asset.contained:
            if child not in model.asset_map:
                violations.append(Violation(asset.name, "containment-ref",
                                            f"contained asset {child!r} undefined"))

    # containment is a forest: one parent max, no cycles
    parent = {}
    for asset in model.assets:
        for child in asset.contained:
            if child in parent:
                violations.append(Violation(child, "containment-forest",
                                            "asset has two containers"))
            parent[child] = asset.name
    for asset in model.assets:
        seen_chain = set()
        cur = asset.name
        while cur in parent:
            if cur in seen_chain:
                violations.append(Violation(asset.name, "containment-forest",
                                            "containment cycle"))
                break
            seen_chain.add(cur)
            cur = parent[cur]

    for conn in model.connections:
        if conn.name in seen:
            violations.append(Violation(conn.name, "unique-name",
                                        "connection name collides"))
        seen.add(conn.name)
        if conn.kind not in (PHYSICAL, DIGITAL):
            violations.append(Violation(conn.name, "connection-kind",
                                        f"kind {conn.kind!r} invalid"))
        for endpoint in (conn.endpoint1, conn.endpoint2):
            if endpoint not in model.asset_map:
                violations.append(Violation(conn.name, "connection-endpoint",
                                            f"endpoint {endpoint!r} undefined"))
        if conn.subtype:
            root = connection_type(conn.kind, None) if conn.kind in (PHYSICAL, DIGITAL) else None
            if not taxonomy.has(conn.subtype):
                violations.append(Violation(conn.name, "known-type",
                                            f"subtype {conn.subtype!r} not in taxonomy"))
            elif root and not taxonomy.descends_or_equal(conn.subtype, root):
                violations.append(Violation(conn.name, "connection-subtype",
                                            f"{conn.subtype!r} not under {root!r}"))

    for rule in model.actions:
        if rule.name in seen:
            violations.append(Violation(rule.name, "unique-name", "action name collides"))
        seen.add(rule.name)
        violations.extend(_validate_rule(rule, taxonomy))

    if model.initial:
        violations.extend(validate_state_text(model.initial, model, element="initial"))
    return violations


def _validate_rule(rule, taxonomy):
    violations = []
    try:
        pre = parse_term(rule.pre)
        post = parse_term(rule.post)
    except Exception as exc:
        return [Violation(rule.name, "condition-syntax", str(exc))]
    for which, term in (("pre", pre), ("post", post)):
        labels = [n.label for n in term.nodes]
        if len(set(labels)) != len(labels):
            violations.append(Violation(rule.name, "unique-slot",
                                        f"duplicate slot label in {which}-condition"))
        for label in labels:
            if label in rule.slots:
                if not taxonomy.has(rule.slots[label]):
                    violations.append(Violation(rule.name, "known-type",
                                                f"slot {label!r} typed with unknown "
                                                f"{rule.slots[label]!r}"))
            elif not taxonomy.resolve_slot(label):
                violations.append(Violation(rule.name, "slot-type",
                                            f"slot {label!r} has no resolvable type"))
    pre_links = {l for n in pre.nodes for l in n.links}
    post_links = {l for n in post.nodes for l in n.links}
    loose = post_links - pre_links - set(rule.fresh)
    for name in sorted(loose):
        violations.append(Violation(rule.name, "link-fresh",
                                    f"post link {name!r} neither in pre nor declared fresh"))
    post_labels = set(n.label for n in post.nodes)
    pre_labels = set(n.label for n in pre.nodes)
    for label in sorted(post_labels - pre_labels):
        if label in rule.slots:
            continue
        if not taxonomy.resolve_slot(label):
            violations.append(Violation(rule.name, "slot-type",
                                        f"created slot {label!r} has no resolvable type"))
    return violations


def validate_state_text(text, model, element="state"):
    """A state term is valid when it parses and every label is an asset."""
    violations = []
    try:
        term = parse_term(text)
    except Exception as exc:
        return [Violation(element, "state-syntax", str(exc))]
    for node in term.nodes:
        if node.label not in model.asset_map:
            violations.append(Violation(element, "state-label",
                                        f"label {node.label!r} is not an asset"))
    return violations
