"""State-space exploration: breadth-first closure of the action rules over an
initial state, deduplicated by canonical keys.

Exploration is FIFO over states and declaration-ordered over rules, with
embeddings in the matcher's lexicographic order, so state indices and the
transition set are identical across runs. Transitions carry an embedding
digest, keeping the same rule fired at different redexes distinct. When the
state cap stops insertion of new states the result is flagged incomplete;
transitions between kept states are still recorded.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass

from .errors import FormatError, InvalidInitialStateError
from .rewriting import prepare_rule
from .system import rule_node_types
from .terms import canonical_key, parse_term, term_to_text


@dataclass(frozen=True)
class Transition:
    src: int
    action: str
    digest: str
    dst: int


class Lts:
    def __init__(self, states, keys, transitions, initial=0, complete=True):
        self.states = list(states)
        self.keys = list(keys)
        self.transitions = list(transitions)
        self.initial = initial
        self.complete = complete
        self._successors = None
        self._texts = None
        self._packed = None

    def state_texts(self):
        """Serialized states; the compact form handed to worker processes."""
        if self._texts is None:
            self._texts = [term_to_text(s) for s in self.states]
        return self._texts

    def packed_states(self):
        """Integer-packed states for high-volume satisfaction scans."""
        if self._packed is None:
            from .compiled import PackedState

            self._packed = [PackedState(s) for s in self.states]
        return self._packed

    def successors(self):
        """Per-state list of (transition index, target state index)."""
        if self._successors is None:
            table = [[] for _ in self.states]
            for tid, tr in enumerate(self.transitions):
                table[tr.src].append((tid, tr.dst))
            self._successors = table
        return self._successors

    def __len__(self):
        return len(self.states)


def generate_lts(system, initial, max_states, *, taxonomy):
    """Explore the system's behavior from ``initial`` (term or text)."""
    if max_states < 1:
        raise ValueError("max_states must be at least 1")
    if isinstance(initial, str):
        try:
            initial_term = parse_term(initial)
        except Exception as exc:
            raise InvalidInitialStateError(str(exc)) from None
    else:
        initial_term = initial
    asset_types = system.asset_types()
    for node in initial_term.nodes:
        if node.label not in asset_types:
            raise InvalidInitialStateError(
                f"initial state label {node.label!r} is not an asset")

    connection_types = system.connection_types()
    prepared = []
    for rule in system.actions:
        types = rule_node_types(rule, taxonomy)
        pre = parse_term(rule.pre)
        post = parse_term(rule.post)
        prepared.append(prepare_rule(rule, pre, post, taxonomy, types, types))

    states = [initial_term]
    keys = [canonical_key(initial_term)]
    index = {keys[0]: 0}
    transitions = []
    seen_transitions = set()
    complete = True
    queue = deque([0])

    while queue:
        src = queue.popleft()
        state = states[src]
        for rule in prepared:
            for emb, succ in rule.successors(state, host_types=asset_types,
                                             host_link_types=connection_types):
                key = canonical_key(succ)
                dst = index.get(key)
                if dst is None:
                    if len(states) >= max_states:
                        complete = False
                        continue
                    dst = len(states)
                    states.append(succ)
                    keys.append(key)
                    index[key] = dst
                    queue.append(dst)
                record = (src, rule.rule.name, emb.digest(), dst)
                if record not in seen_transitions:
                    seen_transitions.add(record)
                    transitions.append(Transition(*record))
    return Lts(states, keys, transitions, initial=0, complete=complete)


def export_lts(lts, path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(lts_to_dict(lts), fh)
    return path


def lts_to_dict(lts):
    return {
        "states": [{"key": key, "term": term_to_text(state)}
                   for key, state in zip(lts.keys, lts.states)],
        "transitions": [{"src": t.src, "action": t.action,
                         "digest": t.digest, "dst": t.dst}
                        for t in lts.transitions],
        "initial": lts.initial,
        "complete": lts.complete,
    }


def lts_from_dict(doc):
    try:
        states = []
        keys = []
        for record in doc["states"]:
            term = parse_term(record["term"])
            states.append(term)
            keys.append(record["key"])
        transitions = [Transition(int(t["src"]), t["action"], t["digest"], int(t["dst"]))
                       for t in doc["transitions"]]
        initial = int(doc["initial"])
        complete = bool(doc["complete"])
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"bad LTS document: {exc}") from None
    except Exception as exc:  # term syntax problems
        raise FormatError(f"bad LTS state term: {exc}") from None

    n = len(states)
    if len(set(keys)) != n:
        raise FormatError("duplicate canonical keys in LTS")
    for record, term in zip(keys, states):
        if canonical_key(term) != record:
            raise FormatError("stored key does not match its state term")
    for t in transitions:
        if not (0 <= t.src < n and 0 <= t.dst < n):
            raise FormatError(f"transition endpoint out of range: {t}")
    if not 0 <= initial < n:
        raise FormatError("initial state index out of range")
    lts = Lts(states, keys, transitions, initial=initial, complete=complete)
    reachable = {initial}
    frontier = [initial]
    successors = lts.successors()
    while frontier:
        cur = frontier.pop()
        for _, dst in successors[cur]:
            if dst not in reachable:
                reachable.add(dst)
                frontier.append(dst)
    if len(reachable) != n:
        raise FormatError("LTS has states unreachable from the initial state")
    return lts


def import_lts(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise FormatError(f"cannot read LTS {path}: {exc}") from None
    return lts_from_dict(doc)
