"""Packed integer form of states for high-volume satisfaction scans.

Scanning tens of thousands of states against a condition is the hot loop of
instantiation. Walking full node-object trees streams far more memory than
the decision needs, which starves the cores; this module compiles each state
once into flat integer arrays (interned labels, parent/children indices,
state-local link ids) and runs the same embedding-existence search over
them. Verdicts are identical to the object matcher's.
"""

from __future__ import annotations

_INTERN: dict[str, int] = {}
_REVERSE: list[str] = []


def intern_label(label):
    lid = _INTERN.get(label)
    if lid is None:
        lid = len(_REVERSE)
        _INTERN[label] = lid
        _REVERSE.append(label)
    return lid


class PackedState:
    __slots__ = ("labels", "parent", "region", "children", "node_links",
                 "link_names", "label_nodes", "region_roots")

    def __init__(self, term):
        term._index()
        nodes = term._nodes
        n = len(nodes)
        self.labels = [intern_label(node.label) for node in nodes]
        self.parent = list(term._parents)
        self.region = list(term._region_of)
        children = [[] for _ in range(n)]
        for idx, parent in enumerate(term._parents):
            if parent is not None:
                children[parent].append(idx)
        self.children = [tuple(c) for c in children]
        link_ids: dict[str, int] = {}
        self.link_names = []
        node_links = []
        for node in nodes:
            ids = []
            for name in node.links:
                lid = link_ids.get(name)
                if lid is None:
                    lid = len(self.link_names)
                    link_ids[name] = lid
                    self.link_names.append(name)
                ids.append(lid)
            node_links.append(tuple(ids))
        self.node_links = node_links
        label_nodes: dict[int, list[int]] = {}
        for idx, lid in enumerate(self.labels):
            label_nodes.setdefault(lid, []).append(idx)
        self.label_nodes = {lid: tuple(ix) for lid, ix in label_nodes.items()}
        nregions = len(term.regions)
        region_roots = [[] for _ in range(nregions)]
        for idx in range(n):
            if self.parent[idx] is None:
                region_roots[self.region[idx]].append(idx)
        self.region_roots = [tuple(r) for r in region_roots]


class PackedMatcher:
    """Existence-only matcher over packed states. Mirrors the object
    matcher's semantics: injective nodes and links, direct-child placement,
    same-region roots on host siblings, label/link type subsumption."""

    def __init__(self, matcher, host_types, host_link_types):
        self.matcher = matcher
        self.host_types = host_types
        self.host_link_types = host_link_types
        label_ok, link_ok = matcher._label_ok_fn(host_types, host_link_types)
        self._label_ok = label_ok
        self._link_ok = link_ok
        self.p_nodes = matcher.p_nodes
        self.p_parents = matcher.p_parents
        self.p_children = matcher.p_children
        self.p_labels = [node.label for node in matcher.p_nodes]
        # pattern links indexed densely
        self.p_link_ids: dict[str, int] = {}
        for links in matcher.p_links:
            for name in links:
                if name not in self.p_link_ids:
                    self.p_link_ids[name] = len(self.p_link_ids)
        self.p_link_names = list(self.p_link_ids)
        self.p_node_links = [tuple(self.p_link_ids[name] for name in links)
                             for links in matcher.p_links]
        self.region_roots = matcher.region_roots
        self._node_compat: dict[int, bool] = {}    # (p_idx << 24) | label id
        self._link_compat: dict[tuple, bool] = {}  # (pattern link, host link)

    def _compat(self, p_idx, lid):
        key = (p_idx << 24) | lid
        cached = self._node_compat.get(key)
        if cached is None:
            cached = self._label_ok(self.p_labels[p_idx], _REVERSE[lid])
            self._node_compat[key] = cached
        return cached

    def exists(self, state: PackedState):
        labels = state.labels
        children = state.children
        parent = state.parent
        region = state.region
        node_links = state.node_links
        label_nodes = state.label_nodes

        # per-state link compatibility against pattern links, by local id
        link_names = state.link_names
        nplinks = len(self.p_link_names)
        link_ok_tab = []
        lcomp = self._link_compat
        for pl in range(nplinks):
            row = []
            pname = self.p_link_names[pl]
            for hname in link_names:
                key = (pname, hname)
                cached = lcomp.get(key)
                if cached is None:
                    cached = self._link_ok(pname, hname)
                    lcomp[key] = cached
                row.append(cached)
            link_ok_tab.append(row)

        root_cands: dict[int, list] = {}

        def candidates_for(p_idx):
            found = root_cands.get(p_idx)
            if found is None:
                found = []
                for lid, indices in label_nodes.items():
                    if self._compat(p_idx, lid):
                        found.extend(indices)
                root_cands[p_idx] = found
            return found

        # plan: regions cheapest first, roots then DFS children
        plan = []
        region_cost = []
        for rid, roots in self.region_roots.items():
            costs = sorted((len(candidates_for(r)), r) for r in roots)
            region_cost.append((costs[0][0], rid, [r for _, r in costs]))
        region_cost.sort()
        for _, rid, roots in region_cost:
            first = True
            for root in roots:
                plan.append((0 if first else 1, root, roots[0]))
                first = False
                stack = list(reversed(self.p_children[root]))
                while stack:
                    node = stack.pop()
                    plan.append((2, node, self.p_parents[node]))
                    stack.extend(reversed(self.p_children[node]))

        total = len(plan)
        node_map = [-1] * len(self.p_nodes)
        used = set()
        link_map = [-1] * nplinks
        used_links = set()
        p_node_links = self.p_node_links

        def with_links(pending, h, step):
            if not pending:
                return assign(step)
            head = pending[0]
            rest = pending[1:]
            row = link_ok_tab[head]
            for hlink in node_links[h]:
                if hlink in used_links or not row[hlink]:
                    continue
                used_links.add(hlink)
                link_map[head] = hlink
                if with_links(rest, h, step):
                    return True
                link_map[head] = -1
                used_links.discard(hlink)
            return False

        def assign(step):
            if step == total:
                return True
            kind, p, anchor = plan[step]
            if kind == 0:
                cands = candidates_for(p)
            elif kind == 1:
                first_h = node_map[anchor]
                fp = parent[first_h]
                if fp is not None:
                    cands = children[fp]
                else:
                    cands = state.region_roots[region[first_h]]
            else:
                cands = children[node_map[anchor]]
            pls = p_node_links[p]
            for h in cands:
                if h in used:
                    continue
                if kind != 0 and not self._compat(p, labels[h]):
                    continue
                pending = None
                if pls:
                    hlinks = node_links[h]
                    ok = True
                    for pl in pls:
                        mapped = link_map[pl]
                        if mapped < 0:
                            if pending is None:
                                pending = [pl]
                            else:
                                pending.append(pl)
                        elif mapped not in hlinks:
                            ok = False
                            break
                    if not ok:
                        continue
                node_map[p] = h
                used.add(h)
                if pending:
                    if with_links(pending, h, step + 1):
                        return True
                else:
                    if assign(step + 1):
                        return True
                node_map[p] = -1
                used.discard(h)
            return False

        return assign(0)
