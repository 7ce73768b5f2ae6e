"""Turn an incident instance into a shareable incident pattern.

Two steps. *Merging*: find activity spans whose first pre-condition and last
post-condition embed an activity pattern's conditions, pick a non-overlapping
selection maximizing (count, total severity), and collapse each span into one
activity carrying the span's outer conditions. *Abstraction*: lift every
entity and connection type one level (same-level types stay), replace all
concrete names with synthetic type-derived names, keep only configured
attributes, and flip the category to PATTERN.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace

from .errors import OverlappingSelectionError, ValidationFailedError
from .incident import (PATTERN, ROLES, SEVERITY_WEIGHT, Activity, CrimeScript,
                       IncidentEntity, validate_script)
from .matching import MatchMode, match
from .catalog import META
from .system import Connection
from .taxonomy import connection_type
from .terms import parse_term, substitute, term_to_text


@dataclass(frozen=True)
class CandidateMatch:
    pattern: str
    pattern_index: int
    scene: int
    start: int
    end: int
    weight: int
    meta: bool
    activity_name: str
    severity: str

    def overlaps(self, other):
        return (self.scene == other.scene
                and self.start <= other.end and other.start <= self.end)


@dataclass
class ExtractOptions:
    prefer_meta: bool = False
    kept_properties: dict = field(
        default_factory=lambda: {"target": ("status", "model")})


def find_candidates(script, patterns, taxonomy, system=None):
    """Every (pattern, span) whose pre matches the span's first activity
    pre-condition and post matches the span's last activity post-condition,
    under type subsumption. Spans stay within one scene; overlaps are kept
    (the selection step arbitrates)."""
    host_types = dict(script.entity_types())
    if system is not None:
        for name, type_ in system.asset_types().items():
            host_types.setdefault(name, type_)
    host_link_types = dict(script.connection_types())
    if system is not None:
        for name, type_ in system.connection_types().items():
            host_link_types.setdefault(name, type_)

    parsed = {}

    def cond_term(text):
        if text not in parsed:
            parsed[text] = parse_term(text)
        return parsed[text]

    candidates = []
    for pidx, pattern in enumerate(patterns):
        pre = cond_term(pattern.pre)
        post = cond_term(pattern.post)
        weight = SEVERITY_WEIGHT[pattern.severity]
        for sid, scene in enumerate(script.scenes):
            pre_hits, post_hits = [], []
            for pos, act in enumerate(scene):
                if act.pre and match(pre, cond_term(act.pre), MatchMode.TYPE_SUBSUME,
                                     taxonomy=taxonomy,
                                     pattern_link_types=pattern.links,
                                     host_types=host_types,
                                     host_link_types=host_link_types):
                    pre_hits.append(pos)
                if act.post and match(post, cond_term(act.post), MatchMode.TYPE_SUBSUME,
                                      taxonomy=taxonomy,
                                      pattern_link_types=pattern.links,
                                      host_types=host_types,
                                      host_link_types=host_link_types):
                    post_hits.append(pos)
            for start in pre_hits:
                for end in post_hits:
                    if end >= start:
                        candidates.append(CandidateMatch(
                            pattern=pattern.name, pattern_index=pidx,
                            scene=sid, start=start, end=end, weight=weight,
                            meta=(pattern.level == META),
                            activity_name=pattern.activity_name,
                            severity=pattern.severity))
    return candidates


def select_patterns(candidates, min_meta=None):
    """Best non-overlapping subset by (count, total severity weight), ties
    broken by earliest starts then catalog order; branch and bound over the
    span structure. With ``min_meta`` set, only subsets with strictly more
    META patterns qualify (None when infeasible)."""
    order = sorted(range(len(candidates)),
                   key=lambda i: (candidates[i].scene, candidates[i].start,
                                  candidates[i].end, candidates[i].pattern_index))
    items = [candidates[i] for i in order]
    n = len(items)

    def sort_key(selection):
        starts = tuple((c.scene, c.start) for c in selection)
        pattern_order = tuple(c.pattern_index for c in selection)
        return (starts, pattern_order)

    best = None  # (count, weight, neg sort key..., selection)
    best_rank = None

    def consider(selection):
        nonlocal best, best_rank
        if min_meta is not None and sum(1 for c in selection if c.meta) < min_meta:
            return
        rank = (len(selection), sum(c.weight for c in selection))
        if best is None or rank > best_rank or (
                rank == best_rank and sort_key(selection) < sort_key(best)):
            best = list(selection)
            best_rank = rank

    chosen = []

    def walk(i, metas_left_possible):
        if i == n:
            consider(chosen)
            return
        remaining = n - i
        if best_rank is not None:
            cap = (len(chosen) + remaining,
                   sum(c.weight for c in chosen) + sum(c.weight for c in items[i:]))
            if cap < best_rank:
                return
        item = items[i]
        if all(not item.overlaps(c) for c in chosen):
            chosen.append(item)
            walk(i + 1, metas_left_possible)
            chosen.pop()
        walk(i + 1, metas_left_possible)

    walk(0, None)
    if best is None:
        return None if min_meta is not None else []
    return sorted(best, key=lambda c: (c.scene, c.start, c.pattern_index))


def merge(script, selection):
    """Collapse each selected span into one activity named after its pattern,
    with the span's first pre-condition and last post-condition; everything
    else is kept in order."""
    chosen = sorted(selection, key=lambda c: (c.scene, c.start))
    for a, b in zip(chosen, chosen[1:]):
        if a.overlaps(b):
            raise OverlappingSelectionError(f"{a.pattern!r} overlaps {b.pattern!r}")

    scenes = []
    for sid, scene in enumerate(script.scenes):
        spans = {c.start: c for c in chosen if c.scene == sid}
        out = []
        pos = 0
        while pos < len(scene):
            span = spans.get(pos)
            if span is None:
                out.append(scene[pos])
                pos += 1
                continue
            covered = scene[span.start:span.end + 1]
            roles = {}
            for role in ("initiator", "location"):
                roles[role] = next((a.role(role) for a in covered if a.role(role)), None)
            for role in ("target", "resource"):
                roles[role] = next((a.role(role) for a in reversed(covered)
                                    if a.role(role)), None)
            out.append(Activity(
                name=span.activity_name,
                pre=covered[0].pre,
                post=covered[-1].post,
                severity=span.severity,
                **roles,
            ))
            pos = span.end + 1
        # rebuild the linear order
        out = [replace(act, next=(out[k + 1].name,) if k + 1 < len(out) else ())
               for k, act in enumerate(out)]
        scenes.append(out)
    return CrimeScript(script.name, script.category, scenes,
                       script.entities, script.connections)


def abstract(script, taxonomy, options=None, system=None):
    """Abstract a merged script into a PATTERN: entity types lifted one level
    (same-level types such as Room stay put), names replaced by synthetic
    type-derived names, connection subtypes lifted under their kind roots,
    only configured attributes kept per role, and activity names scrubbed of
    concrete names."""
    options = options or ExtractOptions()

    counters: dict[str, int] = {}

    def synthesize(type_name):
        base = type_name.lower()
        counters[base] = counters.get(base, 0) + 1
        return f"{base}{counters[base]}"

    entity_rename = {}
    lifted_types = {}
    for entity in script.entities:
        lifted = taxonomy.lift(entity.type)
        lifted_types[entity.name] = lifted
        entity_rename[entity.name] = synthesize(lifted)

    kept_for = {}
    for sid, scene in enumerate(script.scenes):
        for act in scene:
            for role in ROLES:
                ref = act.role(role)
                if ref is not None:
                    allowed = options.kept_properties.get(role, ())
                    kept_for.setdefault(ref, set()).update(allowed)

    entities = []
    for entity in script.entities:
        keep = kept_for.get(entity.name, set())
        attributes = {k: v for k, v in entity.attributes.items() if k in keep}
        entities.append(IncidentEntity(
            name=entity_rename[entity.name],
            type=lifted_types[entity.name],
            attributes=attributes,
            contained=tuple(entity_rename[c] for c in entity.contained),
            knowledge=entity.knowledge,
        ))

    conn_rename = {}
    connections = []
    for conn in script.connections:
        if conn.subtype:
            lifted = taxonomy.lift(conn.subtype)
            root = connection_type(conn.kind, None)
            subtype = None if lifted == root else lifted
        else:
            subtype = None
        new_name = synthesize(connection_type(conn.kind, subtype))
        conn_rename[conn.name] = new_name
        connections.append(Connection(
            name=new_name, kind=conn.kind,
            endpoint1=entity_rename[conn.endpoint1],
            endpoint2=entity_rename[conn.endpoint2],
            subtype=subtype,
        ))
    # concrete system links mentioned in conditions but not declared on the
    # script still must not leak
    if system is not None:
        for conn in system.connections:
            if conn.name not in conn_rename:
                conn_rename[conn.name] = synthesize(conn.effective_type())

    name_scrub = sorted(entity_rename, key=len, reverse=True)

    def scrub_text(text):
        for original in name_scrub:
            text = re.sub(rf"\b{re.escape(original)}\b", entity_rename[original], text)
        return text

    scenes = []
    for scene in script.scenes:
        out = []
        for act in scene:
            pre = post = None
            if act.pre:
                pre = term_to_text(substitute(parse_term(act.pre), entity_rename, conn_rename))
            if act.post:
                post = term_to_text(substitute(parse_term(act.post), entity_rename, conn_rename))
            out.append(Activity(
                name=scrub_text(act.name),
                pre=pre, post=post,
                action=None,
                initiator=entity_rename.get(act.initiator),
                target=entity_rename.get(act.target),
                location=entity_rename.get(act.location),
                resource=entity_rename.get(act.resource),
                next=tuple(scrub_text(ref) for ref in act.next),
                severity=act.severity,
            ))
        scenes.append(out)
    return CrimeScript(f"{script.name} pattern", PATTERN, scenes, entities, connections)


def extract(instance, system, patterns, taxonomy, options=None):
    """Full pipeline: candidates, optimal selection (optionally re-run to
    prefer META patterns), merge, abstract. Deterministic."""
    options = options or ExtractOptions()
    problems = validate_script(instance, taxonomy, system)
    if problems:
        raise ValidationFailedError(problems)
    candidates = find_candidates(instance, patterns, taxonomy, system)
    selection = select_patterns(candidates)
    if options.prefer_meta:
        meta_count = sum(1 for c in selection if c.meta)
        richer = select_patterns(candidates, min_meta=meta_count + 1)
        if richer is not None:
            selection = richer
    merged = merge(instance, selection)
    return abstract(merged, taxonomy, options, system=system)
