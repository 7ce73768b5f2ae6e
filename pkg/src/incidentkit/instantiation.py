"""Replay an incident pattern against a system and its explored state space.

Pipeline: match pattern entities to system components under the five
criteria (type, parent type, containments, connections, attributes), build
all relationship-consistent component sets, find the states satisfying each
activity condition (optionally fanned out over worker processes), enumerate
bounded non-cyclic traces whose states satisfy the activities in order,
filter them down to the shortest traces sharing maximal frequent action
sequences, and report per-action occurrence statistics.
"""

from __future__ import annotations

import multiprocessing
import os
import time
from dataclasses import dataclass, field

from .errors import BoundTooSmallError, NotInstantiableError
from .incident import EXACT, NON_MATCHING_ATTRIBUTES, PATTERN
from .compiled import PackedMatcher
from .matching import Matcher, MatchMode
from .mining import closed_frequent_sequences, is_subsequence
from .terms import parse_term, substitute, term_to_text


# ---------------------------------------------------------------------------
# entity matching


def _injective_assignment(needs, offers, compatible):
    """Can every need be matched to a distinct offer?"""
    order = sorted(range(len(needs)),
                   key=lambda i: sum(1 for o in offers if compatible(needs[i], o)))
    used = [False] * len(offers)

    def place(k):
        if k == len(order):
            return True
        need = needs[order[k]]
        for j, offer in enumerate(offers):
            if not used[j] and compatible(need, offer):
                used[j] = True
                if place(k + 1):
                    return True
                used[j] = False
        return False

    return place(0)


def match_entity(entity, script, system, taxonomy):
    """System assets matching a pattern entity under all five criteria.

    Containments and connections compare by count and type under the
    entity's knowledge: EXACT demands equal counts matched both ways,
    PARTIAL lets the component carry more. Attribute values compare
    case-insensitively; incident-only attributes (role, port) are skipped.
    """
    matches = []
    parent_entity = script.parent_entity(entity.name)
    child_types = [script.entity_map[c].type for c in entity.contained]
    conn_types = [c.effective_type() for c in script.connections_of(entity.name)]

    def subsumes(abstract_type, concrete_type):
        return taxonomy.descends_or_equal(concrete_type, abstract_type)

    for asset in system.assets:
        if not subsumes(entity.type, asset.type):
            continue
        if parent_entity is not None:
            asset_parent = system.parent_of(asset.name)
            if asset_parent is None:
                continue
            parent_type = script.entity_map[parent_entity].type
            if not subsumes(parent_type, system.asset_map[asset_parent].type):
                continue
        asset_child_types = [system.asset_map[c].type for c in asset.contained]
        if entity.knowledge == EXACT and len(asset_child_types) != len(child_types):
            continue
        if len(asset_child_types) < len(child_types):
            continue
        if not _injective_assignment(child_types, asset_child_types, subsumes):
            continue
        asset_conn_types = [c.effective_type() for c in system.connections_of(asset.name)]
        if entity.knowledge == EXACT and len(asset_conn_types) != len(conn_types):
            continue
        if len(asset_conn_types) < len(conn_types):
            continue
        if not _injective_assignment(conn_types, asset_conn_types, subsumes):
            continue
        ok = True
        for key, value in entity.attributes.items():
            if key in NON_MATCHING_ATTRIBUTES:
                continue
            have = asset.attributes.get(key)
            if have is None or str(have).lower() != str(value).lower():
                ok = False
                break
        if ok:
            matches.append(asset.name)
    return matches


@dataclass
class ComponentSets:
    assignments: list
    truncated: bool


def enumerate_component_sets(script, system, taxonomy, limit=10000):
    """All injective entity-to-asset assignments drawn from the per-entity
    matches that respect every inter-entity containment and connection
    relationship. Deterministic order; truncated at ``limit`` with a flag.
    Raises NotInstantiable naming the first entity with no matches."""
    entities = list(script.entities)
    candidates = {}
    for entity in entities:
        found = match_entity(entity, script, system, taxonomy)
        if not found:
            raise NotInstantiableError(entity.name)
        candidates[entity.name] = found

    containment_edges = []
    for entity in entities:
        for child in entity.contained:
            containment_edges.append((entity.name, child))
    connection_edges = [(c.endpoint1, c.endpoint2, c.effective_type())
                        for c in script.connections]

    asset_children = {a.name: set(a.contained) for a in system.assets}
    system_conns = {}
    for conn in system.connections:
        key = frozenset((conn.endpoint1, conn.endpoint2))
        system_conns.setdefault(key, []).append(conn.effective_type())

    def consistent(assignment):
        for parent, child in containment_edges:
            if parent in assignment and child in assignment:
                if assignment[child] not in asset_children[assignment[parent]]:
                    return False
        for e1, e2, ctype in connection_edges:
            if e1 in assignment and e2 in assignment:
                types = system_conns.get(frozenset((assignment[e1], assignment[e2])), ())
                if not any(taxonomy.descends_or_equal(t, ctype) for t in types):
                    return False
        return True

    assignments = []
    truncated = False

    def walk(k, assignment, used):
        nonlocal truncated
        if len(assignments) >= limit:
            truncated = True
            return
        if k == len(entities):
            assignments.append(dict(assignment))
            return
        entity = entities[k]
        for asset in candidates[entity.name]:
            if asset in used:
                continue
            assignment[entity.name] = asset
            if consistent(assignment):
                used.add(asset)
                walk(k + 1, assignment, used)
                used.discard(asset)
            del assignment[entity.name]

    walk(0, {}, set())
    return ComponentSets(assignments, truncated)


# ---------------------------------------------------------------------------
# state satisfaction


@dataclass
class MatchContext:
    """Label/link type resolvers binding a pattern script to a system."""

    taxonomy: object
    system: object
    script: object

    def host_types(self):
        return self.system.asset_types()

    def host_link_types(self):
        return self.system.connection_types()

    def pattern_link_types(self):
        return self.script.connection_types()


# a condition projected to finish sequentially under this budget is not
# worth the process fan-out
_PARALLEL_BUDGET_S = 1.0
_SAMPLE = 256


def _affinity_worker(conn):
    """Long-lived worker: packs state texts on first sight and keeps them
    (its own heap, so the parent's pages stay copy-on-write clean), then
    answers satisfaction queries over its fixed share of the state space."""
    import gc

    from .compiled import PackedMatcher, PackedState

    gc.freeze()
    cache: dict[str, object] = {}
    while True:
        try:
            message = conn.recv()
        except EOFError:
            return
        if message is None:
            return
        matcher, host_types, host_link_types, chunks = message
        packed_matcher = PackedMatcher(matcher, host_types, host_link_types)
        replies = []
        for texts, offset in chunks:
            hits = []
            for off, text in enumerate(texts):
                state = cache.get(text)
                if state is None:
                    state = PackedState(parse_term(text))
                    cache[text] = state
                if packed_matcher.exists(state):
                    hits.append(offset + off)
            replies.append(hits)
        conn.send(replies)


class _WorkerPool:
    """Fixed-affinity process pool: chunk i always lands on the same
    process, so per-worker parse caches stay effective across calls."""

    def __init__(self, processes):
        mp = multiprocessing.get_context("fork")
        self.processes = processes
        self.pipes = []
        self.procs = []
        for _ in range(processes):
            parent_conn, child_conn = mp.Pipe()
            proc = mp.Process(target=_affinity_worker, args=(child_conn,),
                              daemon=True)
            proc.start()
            child_conn.close()
            self.pipes.append(parent_conn)
            self.procs.append(proc)

    def run(self, matcher, host_types, host_link_types, chunks):
        groups = [[] for _ in range(self.processes)]
        per = (len(chunks) + self.processes - 1) // self.processes
        for i, chunk in enumerate(chunks):
            groups[min(i // per, self.processes - 1)].append((i, chunk))
        active = []
        for pipe, group in zip(self.pipes, groups):
            if group:
                pipe.send((matcher, host_types, host_link_types,
                           [chunk for _, chunk in group]))
                active.append((pipe, group))
        ordered = {}
        for pipe, group in active:
            replies = pipe.recv()
            for (i, _), hits in zip(group, replies):
                ordered[i] = hits
        return [ordered[i] for i in range(len(chunks))]

    def close(self):
        for pipe in self.pipes:
            try:
                pipe.send(None)
                pipe.close()
            except OSError:
                pass
        for proc in self.procs:
            proc.join(timeout=1)


_POOL = None
_POOL_SIZE = 0


def _get_pool(processes):
    global _POOL, _POOL_SIZE
    if _POOL is None or _POOL_SIZE != processes:
        if _POOL is not None:
            _POOL.close()
        _POOL = _WorkerPool(processes)
        _POOL_SIZE = processes
    return _POOL


def find_satisfying_states(lts, condition, binding, workers=1, *, ctx):
    """Indices of the states where the bound condition embeds.

    The state list is split into ``workers`` contiguous chunks dispatched to
    a persistent fixed-affinity process pool sized to the machine; chunks
    travel as serialized term text and workers keep their parsed share.
    Cheap conditions (a sampled prefix projects the full scan under a small
    time budget) stay sequential. Results are identical for any worker
    count.
    """
    term = condition if not isinstance(condition, str) else parse_term(condition)
    bound_term = substitute(term, dict(binding)) if binding else term
    matcher = Matcher(bound_term, MatchMode.TYPE_SUBSUME, taxonomy=ctx.taxonomy,
                      pattern_link_types=ctx.pattern_link_types())
    host_types = ctx.host_types()
    host_link_types = ctx.host_link_types()
    packed_matcher = PackedMatcher(matcher, host_types, host_link_types)

    n = len(lts.states)
    can_fork = "fork" in multiprocessing.get_all_start_methods()
    parallel = workers > 1 and can_fork and n >= workers
    packed = lts.packed_states()
    if parallel and n > _SAMPLE:
        started = time.perf_counter()
        head = _scan(packed_matcher, packed, range(_SAMPLE))
        projected = (time.perf_counter() - started) * (n - _SAMPLE) / _SAMPLE
        if projected < _PARALLEL_BUDGET_S:
            return head + _scan(packed_matcher, packed, range(_SAMPLE, n))
    if not parallel:
        return _scan(packed_matcher, packed, range(n))

    texts = lts.state_texts()
    chunk = (n + workers - 1) // workers
    bounds = [(i * chunk, min((i + 1) * chunk, n)) for i in range(workers)]
    chunks = [(texts[lo:hi], lo) for lo, hi in bounds if lo < hi]
    pool = _get_pool(min(len(chunks), os.cpu_count() or 1))
    hits = []
    for part in pool.run(matcher, host_types, host_link_types, chunks):
        hits.extend(part)
    return hits


def _scan(packed_matcher, packed_states, indices):
    exists = packed_matcher.exists
    return [idx for idx in indices if exists(packed_states[idx])]


# ---------------------------------------------------------------------------
# trace search


@dataclass(frozen=True)
class Trace:
    transitions: tuple  # transition indices into the LTS
    states: tuple       # visited state indices, len(transitions) + 1
    marks: tuple        # per activity: (pre state index, post state index)

    def actions(self, lts):
        return tuple(lts.transitions[t].action for t in self.transitions)


def _advance(w, satisfied, milestones):
    """Greedy milestone advancement at one state. Marking a pre-condition
    stops the sweep (its post needs a strictly later state); marking a
    post-condition lets the next activity's pre mark the same state."""
    advanced = []
    while w < len(milestones) and satisfied(milestones[w]):
        advanced.append(w)
        w += 1
        if (w - 1) % 2 == 0:
            break
    return w, advanced


def enumerate_traces(lts, activity_sets, bound):
    """All non-cyclic transition sequences of length <= bound whose states
    satisfy every activity's pre then post in order: the first state
    satisfies the first pre-condition, the last state completes the final
    post-condition, and a branch is cut when it revisits a state satisfying
    the most recently satisfied condition (such traces are found by the
    searches starting there instead)."""
    k = len(activity_sets)
    if k == 0:
        return []
    if bound < k:
        raise BoundTooSmallError(f"bound {bound} below {k} activities")
    milestones = []
    for pre, post in activity_sets:
        milestones.append(frozenset(pre))
        milestones.append(frozenset(post))
    total = len(milestones)
    successors = lts.successors()
    results = []

    from collections import deque
    queue = deque()
    for start in sorted(milestones[0]):
        if start >= len(lts.states):
            continue
        queue.append((start, 1, (), (start,), frozenset((start,)), ((0, start),)))

    while queue:
        state, w, path, states, visited, markpos = queue.popleft()
        if len(path) == bound:
            continue
        for tid, dst in successors[state]:
            if dst in visited:
                continue
            w2, advanced = _advance(w, lambda m: dst in m, milestones)
            if not advanced and dst in milestones[w - 1]:
                continue
            new_marks = markpos + tuple((j, dst) for j in advanced)
            new_path = path + (tid,)
            new_states = states + (dst,)
            if w2 == total:
                pairs = []
                flat = dict(new_marks)
                for act in range(k):
                    pairs.append((flat[2 * act], flat[2 * act + 1]))
                results.append(Trace(new_path, new_states, tuple(pairs)))
                continue
            queue.append((dst, w2, new_path, new_states,
                          visited | {dst}, new_marks))
    results.sort(key=lambda t: (len(t.transitions), t.transitions))
    return results


def filter_traces(traces, lts=None, min_support=2):
    """Shortest traces that embody a maximum-length closed frequent action
    sequence (support counted per trace). With fewer than two shortest
    traces, or no frequent sequence, the shortest set stands as is."""
    if not traces:
        return []
    shortest_len = min(len(t.transitions) for t in traces)
    shortest = [t for t in traces if len(t.transitions) == shortest_len]
    if len(shortest) < 2:
        return shortest
    sequences = [_trace_actions(t, lts) for t in shortest]
    closed = closed_frequent_sequences(sequences, min_support)
    if not closed:
        return shortest
    max_len = len(closed[0][0])
    winners = [p for p, _ in closed if len(p) == max_len]
    return [t for t, seq in zip(shortest, sequences)
            if any(is_subsequence(p, seq) for p in winners)]


@dataclass
class AnalysisReport:
    shortest: list
    occurrence: dict
    frequent_actions: list
    shortest_frequent: list

    def to_dict(self):
        return {
            "shortest_length": (len(self.shortest[0].transitions)
                                if self.shortest else None),
            "shortest_count": len(self.shortest),
            "occurrence": dict(sorted(self.occurrence.items())),
            "frequent_actions": list(self.frequent_actions),
            "shortest_frequent_count": len(self.shortest_frequent),
        }


def analyze(traces, lts=None, threshold=0.9):
    """Shortest traces, per-action occurrence percentage (traces containing
    the action at least once over all traces), and the shortest traces made
    up entirely of actions at or above the threshold."""
    if not traces:
        return AnalysisReport([], {}, [], [])
    sequences = [_trace_actions(t, lts) for t in traces]
    total = len(traces)
    occurrence = {}
    for seq in sequences:
        for action in set(seq):
            occurrence[action] = occurrence.get(action, 0) + 1
    occurrence = {a: c / total for a, c in occurrence.items()}
    frequent = sorted(a for a, pct in occurrence.items() if pct >= threshold)
    shortest_len = min(len(t.transitions) for t in traces)
    shortest = [t for t in traces if len(t.transitions) == shortest_len]
    shortest_frequent = [
        t for t, seq in zip(traces, sequences)
        if len(t.transitions) == shortest_len and all(occurrence[a] >= threshold for a in seq)
    ]
    return AnalysisReport(shortest, occurrence, frequent, shortest_frequent)


def _trace_actions(trace, lts):
    if hasattr(trace, "_action_seq"):
        return trace._action_seq
    if lts is None:
        raise ValueError("need the LTS to resolve trace actions")
    return trace.actions(lts)


# ---------------------------------------------------------------------------
# full pipeline


@dataclass
class InstantiateConfig:
    bound: int | None = None
    workers: int = 1
    set_limit: int = 10000
    threshold: float = 0.9
    min_support: int = 2


@dataclass
class SetResult:
    assignment: dict
    satisfying_counts: list
    traces: list
    filtered: list
    analysis: AnalysisReport


@dataclass
class InstantiationResult:
    instantiable: bool
    failing_entity: str | None
    bound: int
    sets: list = field(default_factory=list)
    assignments_truncated: bool = False
    timings: dict = field(default_factory=dict)

    def all_traces(self):
        return [t for s in self.sets for t in s.traces]

    def all_filtered(self):
        return [t for s in self.sets for t in s.filtered]

    def to_dict(self, lts=None):
        def trace_dict(trace):
            record = {"transitions": list(trace.transitions),
                      "states": list(trace.states),
                      "marks": [list(m) for m in trace.marks]}
            if hasattr(trace, "_action_seq"):
                record["actions"] = list(trace._action_seq)
            elif lts is not None:
                record["actions"] = list(trace.actions(lts))
            return record

        return {
            "instantiable": self.instantiable,
            "failing_entity": self.failing_entity,
            "bound": self.bound,
            "assignments_truncated": self.assignments_truncated,
            "generated_count": len(self.all_traces()),
            "filtered_count": len(self.all_filtered()),
            "sets": [
                {"assignment": dict(s.assignment),
                 "satisfying_counts": list(s.satisfying_counts),
                 "traces": [trace_dict(t) for t in s.traces],
                 "filtered": [trace_dict(t) for t in s.filtered],
                 "analysis": s.analysis.to_dict()}
                for s in self.sets
            ],
            "timings": {k: round(v, 6) for k, v in self.timings.items()},
        }


def _with_actions(traces, lts):
    for trace in traces:
        object.__setattr__(trace, "_action_seq", trace.actions(lts))
    return traces


def instantiate(pattern, system, lts, taxonomy, config=None):
    """Assess whether and how the pattern can occur in the system."""
    config = config or InstantiateConfig()
    if pattern.category != PATTERN:
        raise ValueError("instantiation expects a PATTERN script")
    activities = [act for _, _, act in pattern.activities()]
    for act in activities:
        if not act.pre or not act.post:
            raise ValueError(f"activity {act.name!r} lacks a pre/post-condition")
    k = len(activities)
    effective_bound = max(k, config.bound or k)

    timings = {}
    t0 = time.perf_counter()
    try:
        sets = enumerate_component_sets(pattern, system, taxonomy,
                                        limit=config.set_limit)
    except NotInstantiableError as exc:
        return InstantiationResult(False, exc.entity, effective_bound,
                                   timings={"total_s": time.perf_counter() - t0})
    timings["entity_matching_s"] = time.perf_counter() - t0

    ctx = MatchContext(taxonomy, system, pattern)
    sat_cache = {}
    results = []
    t_satisfy = 0.0
    t_traces = 0.0
    t_filter = 0.0
    for assignment in sets.assignments:
        t1 = time.perf_counter()
        activity_sets = []
        counts = []
        for act in activities:
            pair = []
            for text in (act.pre, act.post):
                bound_term = substitute(parse_term(text), dict(assignment))
                key = term_to_text(bound_term)
                if key not in sat_cache:
                    sat_cache[key] = frozenset(find_satisfying_states(
                        lts, bound_term, {}, workers=config.workers, ctx=ctx))
                pair.append(sat_cache[key])
            activity_sets.append((pair[0], pair[1]))
            counts.append([len(pair[0]), len(pair[1])])
        t2 = time.perf_counter()
        t_satisfy += t2 - t1
        traces = _with_actions(enumerate_traces(lts, activity_sets, effective_bound), lts)
        t3 = time.perf_counter()
        t_traces += t3 - t2
        filtered = filter_traces(traces, lts, min_support=config.min_support)
        report = analyze(traces, lts, threshold=config.threshold)
        t_filter += time.perf_counter() - t3
        results.append(SetResult(assignment, counts, traces, filtered, report))

    timings["satisfaction_s"] = t_satisfy
    timings["traces_s"] = t_traces
    timings["filtering_s"] = t_filter
    timings["total_s"] = time.perf_counter() - t0
    return InstantiationResult(True, None, effective_bound, results,
                               sets.truncated, timings)
