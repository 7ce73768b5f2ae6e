"""Embedding search: find all occurrences of a pattern term inside a host term.

An embedding maps pattern nodes injectively onto host nodes and pattern links
injectively onto host links so that

* labels are compatible (equal strings, or in TYPE_SUBSUME mode the host
  label's type descends from the pattern label's type),
* a pattern child maps to a direct child of its parent's image,
* roots of one pattern region map to host siblings (a shared parent, or roots
  of one host region); distinct pattern regions carry no co-location
  constraint,
* every pattern link maps to a host link carrying all its members' images.

Link names behave as variables in both modes: a link matches any host link
structurally, restricted by type only when both sides resolve to connection
types. The host may always carry extra children, links, and link members
(patterns describe sub-systems, not whole states).
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from enum import Enum


class MatchMode(Enum):
    EXACT_NAME = "EXACT_NAME"
    TYPE_SUBSUME = "TYPE_SUBSUME"


@dataclass(frozen=True)
class Embedding:
    nodes: tuple  # pattern node index (preorder) -> host node index
    links: tuple  # sorted (pattern link, host link) pairs

    def node_map(self):
        return dict(enumerate(self.nodes))

    def link_map(self):
        return dict(self.links)

    def digest(self):
        payload = ",".join(map(str, self.nodes)) + ";" + ",".join(f"{a}>{b}" for a, b in self.links)
        return hashlib.sha256(payload.encode()).hexdigest()[:12]


class Matcher:
    """Compiled pattern reusable across many hosts (states).

    Label/link compatibility verdicts are cached across calls, so one
    matcher instance must always be used with the same type maps (true for
    a rule explored over one system, or a condition over one LTS).
    """

    def __init__(self, pattern, mode, taxonomy=None,
                 pattern_types=None, pattern_link_types=None):
        if mode is MatchMode.TYPE_SUBSUME and taxonomy is None:
            raise ValueError("TYPE_SUBSUME matching needs a taxonomy")
        self.pattern = pattern
        self.mode = mode
        self.taxonomy = taxonomy
        self.pattern_types = pattern_types or {}
        self.pattern_link_types = pattern_link_types or {}
        pattern._index()
        self.p_nodes = pattern.nodes
        self.p_parents = pattern.parents
        self.p_children = pattern.children_of
        self.p_region = pattern.region_of
        self.p_links = [node.links for node in self.p_nodes]
        # region -> root node indices, in declaration order
        self.region_roots = {}
        for idx, parent in enumerate(self.p_parents):
            if parent is None:
                self.region_roots.setdefault(self.p_region[idx], []).append(idx)
        self._node_compat: dict[tuple, bool] = {}
        self._link_compat: dict[tuple, bool] = {}

    def _pattern_type(self, label):
        ptype = self.pattern_types.get(label)
        if ptype is not None:
            return ptype
        if self.taxonomy is not None and self.taxonomy.has(label):
            return label
        return None

    def embeddings(self, host, host_types=None, host_link_types=None):
        """All embeddings, ordered lexicographically by host node indices."""
        return self._search(host, host_types, host_link_types, first_only=False)

    def exists(self, host, host_types=None, host_link_types=None):
        """True when at least one embedding exists; stops at the first hit
        and never materializes witness objects."""
        return bool(self._search(host, host_types, host_link_types, first_only=True))

    def _label_ok_fn(self, host_types, host_link_types):
        taxonomy = self.taxonomy
        exact = self.mode is MatchMode.EXACT_NAME
        node_compat = self._node_compat
        link_compat = self._link_compat

        def label_ok(plabel, hlabel):
            if plabel == hlabel:
                return True
            if exact:
                return False
            key = (plabel, hlabel)
            cached = node_compat.get(key)
            if cached is None:
                ptype = self._pattern_type(plabel)
                htype = host_types.get(hlabel)
                if htype is None and taxonomy.has(hlabel):
                    htype = hlabel
                cached = (ptype is not None and htype is not None
                          and taxonomy.descends_or_equal(htype, ptype))
                node_compat[key] = cached
            return cached

        def link_ok(plink, hlink):
            if plink == hlink:
                return True
            key = (plink, hlink)
            cached = link_compat.get(key)
            if cached is None:
                ptype = self.pattern_link_types.get(plink)
                if ptype is None:
                    cached = True
                else:
                    htype = host_link_types.get(hlink)
                    cached = htype is None or taxonomy.descends_or_equal(htype, ptype)
                link_compat[key] = cached
            return cached

        return label_ok, link_ok

    def _search(self, host, host_types, host_link_types, first_only):
        host_types = host_types or {}
        host_link_types = host_link_types or {}
        host._index()
        h_nodes = host._nodes
        h_parents = host._parents
        h_region = host._region_of
        h_children = host.children_of
        h_linksets, h_links_sorted = host.link_views()
        label_idx = host.label_index()
        label_ok, link_ok = self._label_ok_fn(host_types, host_link_types)

        _cands_memo: dict[str, list] = {}

        def candidates_for_label(plabel):
            found = _cands_memo.get(plabel)
            if found is None:
                found = []
                for hlabel, indices in label_idx.items():
                    if label_ok(plabel, hlabel):
                        found.extend(indices)
                found.sort()
                _cands_memo[plabel] = found
            return found

        def sibling_key(h):
            parent = h_parents[h]
            return parent if parent is not None else ("region", h_region[h])

        def siblings_with_key(key):
            if isinstance(key, tuple):
                rid = key[1]
                return [i for i, (p, r) in enumerate(zip(h_parents, h_region))
                        if p is None and r == rid]
            return list(h_children[key])

        # order regions cheapest-first; within a region, the root with the
        # fewest candidates goes first, the rest are sibling-constrained
        plan = []
        region_cost = []
        for rid, roots in self.region_roots.items():
            costs = [(len(candidates_for_label(self.p_nodes[r].label)), r) for r in roots]
            costs.sort()
            region_cost.append((costs[0][0], rid, [r for _, r in costs]))
        region_cost.sort()
        for _, rid, roots in region_cost:
            first = True
            for root in roots:
                plan.append(("root-first" if first else "root-sibling", root, roots[0]))
                first = False
                stack = list(reversed(self.p_children[root]))
                while stack:
                    node = stack.pop()
                    plan.append(("child", node, self.p_parents[node]))
                    stack.extend(reversed(self.p_children[node]))

        node_map: dict[int, int] = {}
        used_nodes: set[int] = set()
        link_map: dict[str, str] = {}
        used_links: set[str] = set()
        results: list[Embedding] = []
        total_steps = len(plan)
        p_nodes = self.p_nodes
        p_links = self.p_links

        class _Found(Exception):
            pass

        def emit():
            if first_only:
                raise _Found
            nodes = tuple(node_map[i] for i in range(len(p_nodes)))
            links = tuple(sorted(link_map.items()))
            results.append(Embedding(nodes, links))

        def with_links(pls, h, step):
            """Recurse over injective assignments of unmapped pattern links;
            the common 0/1-link cases avoid generator machinery."""
            if not pls:
                assign(step)
                return
            head = pls[0]
            rest = pls[1:]
            for hlink in h_links_sorted[h]:
                if hlink in used_links or not link_ok(head, hlink):
                    continue
                used_links.add(hlink)
                link_map[head] = hlink
                with_links(rest, h, step)
                del link_map[head]
                used_links.discard(hlink)

        def assign(step):
            if step == total_steps:
                emit()
                return
            kind, p, anchor = plan[step]
            plabel = p_nodes[p].label
            if kind == "root-first":
                cands = candidates_for_label(plabel)
            elif kind == "root-sibling":
                cands = siblings_with_key(sibling_key(node_map[anchor]))
            else:
                cands = h_children[node_map[anchor]]
            pls = p_links[p]
            for h in cands:
                if h in used_nodes:
                    continue
                if kind != "root-first" and not label_ok(plabel, h_nodes[h].label):
                    continue
                if pls:
                    hset = h_linksets[h]
                    fixed_ok = True
                    pending = None
                    for pl in pls:
                        mapped = link_map.get(pl)
                        if mapped is None:
                            if pending is None:
                                pending = [pl]
                            else:
                                pending.append(pl)
                        elif mapped not in hset:
                            fixed_ok = False
                            break
                    if not fixed_ok:
                        continue
                else:
                    pending = None
                node_map[p] = h
                used_nodes.add(h)
                if pending:
                    with_links(pending, h, step + 1)
                else:
                    assign(step + 1)
                del node_map[p]
                used_nodes.discard(h)

        try:
            assign(0)
        except _Found:
            return True
        if first_only:
            return False
        return sorted(set(results), key=lambda e: (e.nodes, e.links))


def match(pattern, host, mode, *, taxonomy=None,
          pattern_types=None, host_types=None,
          pattern_link_types=None, host_link_types=None):
    """All embeddings of ``pattern`` in ``host``, ordered lexicographically by
    host node indices. Returns an empty list when nothing matches."""
    matcher = Matcher(pattern, mode, taxonomy=taxonomy,
                      pattern_types=pattern_types,
                      pattern_link_types=pattern_link_types)
    return matcher.embeddings(host, host_types=host_types,
                              host_link_types=host_link_types)
