"""Place-and-link terms used for system states and pre/post-conditions.

Grammar (whitespace-insensitive)::

    term     := region ('||' region)*
    region   := factor ('|' factor)*
    factor   := name link-set? ('.' factor)? | '(' region ')'
    link-set := '{' name (',' name)* '}'

'.' binds tighter than '|', which binds tighter than '||'.  A node holds a
label, an optional set of link names (hyperedges shared with other nodes),
and child nodes.  '|' joins siblings under one parent (or one region);
'||' separates regions, which carry no co-location constraint.
"""

from __future__ import annotations

import re
from itertools import permutations

from .errors import TermSyntaxError, UnknownLabelError

_TOKEN = re.compile(r"\s*(\|\||[A-Za-z_]\w*|[{}(),.|])")
_NAME = re.compile(r"[A-Za-z_]\w*$")

# Above this many sibling orderings the canonical form falls back to the
# refined deterministic order; only pathologically symmetric terms hit it.
_ARRANGEMENT_CAP = 40320


class Node:
    """One place-graph node. Immutable once built."""

    __slots__ = ("label", "links", "children", "_sig0")

    def __init__(self, label, links=(), children=()):
        self.label = label
        self.links = tuple(links)
        self.children = tuple(children)
        self._sig0 = None

    def with_parts(self, label=None, links=None, children=None):
        return Node(
            self.label if label is None else label,
            self.links if links is None else links,
            self.children if children is None else children,
        )

    def __repr__(self):
        return f"Node({self.label!r}, links={self.links!r}, children={len(self.children)})"


class BigraphTerm:
    """A forest of regions plus the hyperedges induced by link annotations."""

    __slots__ = ("regions", "_nodes", "_parents", "_region_of", "_links", "_labels",
                 "_key", "_children", "_label_index", "_linksets", "_links_sorted")

    def __init__(self, regions):
        self.regions = tuple(tuple(trees) for trees in regions)
        self._nodes = None
        self._parents = None
        self._region_of = None
        self._links = None
        self._labels = None
        self._key = None
        self._children = None
        self._label_index = None
        self._linksets = None
        self._links_sorted = None

    def _index(self):
        if self._nodes is not None:
            return
        nodes, parents, region_of = [], [], []

        def walk(node, parent, region):
            idx = len(nodes)
            nodes.append(node)
            parents.append(parent)
            region_of.append(region)
            for child in node.children:
                walk(child, idx, region)

        for rid, trees in enumerate(self.regions):
            for tree in trees:
                walk(tree, None, rid)
        links: dict[str, list[int]] = {}
        for idx, node in enumerate(nodes):
            for link in node.links:
                links.setdefault(link, []).append(idx)
        self._nodes = tuple(nodes)
        self._parents = tuple(parents)
        self._region_of = tuple(region_of)
        self._links = {name: tuple(members) for name, members in links.items()}

    @property
    def nodes(self):
        self._index()
        return self._nodes

    @property
    def parents(self):
        self._index()
        return self._parents

    @property
    def region_of(self):
        self._index()
        return self._region_of

    @property
    def links(self):
        self._index()
        return self._links

    @property
    def children_of(self):
        if self._children is None:
            self._index()
            children = [[] for _ in self._nodes]
            for idx, parent in enumerate(self._parents):
                if parent is not None:
                    children[parent].append(idx)
            self._children = tuple(tuple(c) for c in children)
        return self._children

    def label_index(self):
        if self._label_index is None:
            index: dict[str, list[int]] = {}
            for idx, node in enumerate(self.nodes):
                index.setdefault(node.label, []).append(idx)
            self._label_index = {k: tuple(v) for k, v in index.items()}
        return self._label_index

    def link_views(self):
        """Per-node (frozenset of links, sorted link tuple), cached."""
        if self._linksets is None:
            self._linksets = tuple(frozenset(n.links) for n in self.nodes)
            self._links_sorted = tuple(tuple(sorted(n.links)) for n in self.nodes)
        return self._linksets, self._links_sorted

    def labels(self):
        if self._labels is None:
            self._labels = frozenset(n.label for n in self.nodes)
        return self._labels

    def node_count(self):
        return len(self.nodes)

    def key(self):
        if self._key is None:
            self._key = canonical_key(self)
        return self._key

    def __repr__(self):
        return f"BigraphTerm({term_to_text(self)!r})"


# ---------------------------------------------------------------------------
# parsing


class _Parser:
    def __init__(self, text):
        self.text = text
        self.pos = 0
        self.tokens = []
        pos = 0
        while pos < len(text):
            match = _TOKEN.match(text, pos)
            if match is None:
                stripped = text[pos:].lstrip()
                at = len(text) - len(stripped)
                raise TermSyntaxError(f"unexpected character {text[at]!r}", at)
            if match.group(1):
                self.tokens.append((match.group(1), match.start(1)))
            pos = match.end()

    def peek(self):
        if self.pos < len(self.tokens):
            return self.tokens[self.pos][0]
        return None

    def next(self):
        token = self.tokens[self.pos]
        self.pos += 1
        return token

    def expect(self, want):
        if self.peek() != want:
            got, at = (self.tokens[self.pos] if self.pos < len(self.tokens)
                       else ("end of input", len(self.text)))
            raise TermSyntaxError(f"expected {want!r}, found {got!r}", at)
        return self.next()

    def at_end(self):
        return self.pos >= len(self.tokens)

    def parse_term(self):
        regions = [self.parse_region()]
        while self.peek() == "||":
            self.next()
            regions.append(self.parse_region())
        return regions

    def parse_region(self):
        trees = list(self.parse_factor())
        while self.peek() == "|":
            self.next()
            trees.extend(self.parse_factor())
        return trees

    def parse_factor(self):
        """Returns a list of trees ('(' groups splice into their context)."""
        token = self.peek()
        if token == "(":
            _, at = self.next()
            inner = self.parse_term()
            self.expect(")")
            if len(inner) != 1:
                raise TermSyntaxError("'||' cannot appear inside a group", at)
            return inner[0]
        if token is None or not _NAME.match(token):
            got, at = (self.tokens[self.pos] if self.pos < len(self.tokens)
                       else ("end of input", len(self.text)))
            raise TermSyntaxError(f"expected a name, found {got!r}", at)
        name, _ = self.next()
        links = ()
        if self.peek() == "{":
            links = self.parse_links()
        children = ()
        if self.peek() == ".":
            self.next()
            children = tuple(self.parse_factor())
        return [Node(name, links, children)]

    def parse_links(self):
        self.expect("{")
        names = []
        while True:
            token, at = self.next() if not self.at_end() else (None, len(self.text))
            if token is None or not _NAME.match(token):
                raise TermSyntaxError("expected a link name", at)
            if token in names:
                raise TermSyntaxError(f"duplicate link {token!r} on one node", at)
            names.append(token)
            if self.peek() == ",":
                self.next()
                continue
            self.expect("}")
            return tuple(names)


def parse_term(text, taxonomy=None, known_names=None):
    """Parse term text. When a taxonomy and/or a set of known names is given,
    every node label must resolve against them (types allow a trailing
    numeric suffix, so Room1 resolves via Room)."""
    parser = _Parser(text)
    regions = parser.parse_term()
    if not parser.at_end():
        token, at = parser.tokens[parser.pos]
        raise TermSyntaxError(f"trailing input {token!r}", at)
    term = BigraphTerm(regions)
    if taxonomy is not None or known_names is not None:
        known = known_names or ()
        for node in term.nodes:
            if node.label in known:
                continue
            if taxonomy is not None and taxonomy.resolve_slot(node.label):
                continue
            raise UnknownLabelError(
                f"label {node.label!r} is neither a known name nor a taxonomy type")
    return term


# ---------------------------------------------------------------------------
# serialization


def _render_node(node):
    text = node.label
    if node.links:
        # keep declaration order so a text round-trip rebuilds the exact
        # same structures (search heuristics then behave identically)
        text += "{" + ",".join(node.links) + "}"
    if len(node.children) == 1:
        text += "." + _render_child(node.children[0])
    elif node.children:
        text += ".(" + " | ".join(_render_child(c) for c in node.children) + ")"
    return text


def _render_child(node):
    rendered = _render_node(node)
    return rendered


def term_to_text(term):
    parts = []
    for trees in term.regions:
        rendered = []
        for tree in trees:
            body = _render_node(tree)
            if tree.children and len(trees) > 1:
                body = "(" + body + ")"
            rendered.append(body)
        parts.append(" | ".join(rendered))
    return " || ".join(parts)


# ---------------------------------------------------------------------------
# canonical form


def _sig0(node):
    """Structural signature ignoring link identities (cached on the node)."""
    if node._sig0 is None:
        inner = "\x02".join(sorted(_sig0(c) for c in node.children))
        node._sig0 = f"{node.label}\x01{len(node.links)}\x01{inner}"
    return node._sig0


def _refined_sigs(term):
    """Two refinement rounds mixing link-membership profiles into signatures.

    Signatures are keyed by node index; used only to sort siblings and to
    group genuinely ambiguous ones for permutation search.
    """
    nodes = term.nodes
    sig = {idx: _sig0(node) for idx, node in enumerate(nodes)}
    children_of = [[] for _ in nodes]
    for idx, parent in enumerate(term.parents):
        if parent is not None:
            children_of[parent].append(idx)
    order = sorted(range(len(nodes)), key=lambda i: -_depth(term, i))
    for _ in range(2):
        link_sig = {
            name: "\x03".join(sorted(sig[m] for m in members))
            for name, members in term.links.items()
        }
        new_sig = {}
        for idx in order:
            node = nodes[idx]
            links = "\x04".join(sorted(link_sig[l] for l in node.links))
            inner = "\x02".join(sorted(new_sig[c] for c in children_of[idx]))
            new_sig[idx] = f"{node.label}\x01{links}\x01{inner}"
        sig = new_sig
    return sig


def _depth(term, idx):
    depth = 0
    parent = term.parents[idx]
    while parent is not None:
        depth += 1
        parent = term.parents[parent]
    return depth


def _arrangements(items, sig_of, budget):
    """Yield orderings of ``items``: groups sorted by signature, permutations
    only inside groups whose members share a signature. When the group
    permutation count exceeds the budget, a single deterministic order is
    produced instead."""
    groups: dict[str, list] = {}
    for item in items:
        groups.setdefault(sig_of(item), []).append(item)
    keys = sorted(groups)
    count = 1
    for group in groups.values():
        for k in range(2, len(group) + 1):
            count *= k
        if count > budget:
            yield [item for key in keys for item in groups[key]]
            return

    def product(i):
        if i == len(keys):
            yield []
            return
        group = groups[keys[i]]
        perms = [list(group)] if len(group) == 1 else permutations(group)
        for head in perms:
            for tail in product(i + 1):
                yield list(head) + tail

    yield from product(0)


class _Tie(Exception):
    pass


def _arrange_strict(term):
    """Deterministic arrangement for tie-free terms; raises _Tie when two
    siblings (or regions) share a structural signature. Empty regions are
    dropped (they carry no structure)."""

    def build(node):
        if not node.children:
            return (node, [])
        decorated = sorted(((_sig0(c), c) for c in node.children), key=lambda p: p[0])
        for (a, _), (b, _) in zip(decorated, decorated[1:]):
            if a == b:
                raise _Tie
        return (node, [build(c) for _, c in decorated])

    regions = []
    for trees in term.regions:
        if not trees:
            continue
        decorated = sorted(((_sig0(t), t) for t in trees), key=lambda p: p[0])
        for (a, _), (b, _) in zip(decorated, decorated[1:]):
            if a == b:
                raise _Tie
        regions.append(("\x05".join(sig for sig, _ in decorated),
                        [build(t) for _, t in decorated]))
    regions.sort(key=lambda p: p[0])
    for (a, _), (b, _) in zip(regions, regions[1:]):
        if a == b:
            raise _Tie
    return [arranged for _, arranged in regions]


def canonical_key(term):
    """A string equal across terms that differ only by sibling order, region
    order, and link renaming.

    Once a node ordering is fixed, link identities are derived from the
    sorted positions of their member nodes, so no search over link names is
    needed. The only search space is permutations of siblings/regions whose
    refined structural signatures tie; terms with all-distinct labels (every
    state explored by the transition engine) take the search-free fast path.
    """
    term._index()
    try:
        return _render_with_links(_arrange_strict(term))
    except _Tie:
        pass

    sig = _refined_sigs(term)
    node_index = {id(node): idx for idx, node in enumerate(term.nodes)}

    def node_sig(node):
        return sig[node_index[id(node)]]

    def region_sig(trees):
        return "\x05".join(sorted(node_sig(t) for t in trees))

    budget = _ARRANGEMENT_CAP
    rendered_cap = _ARRANGEMENT_CAP
    best = None
    seen = 0
    populated = [trees for trees in term.regions if trees]
    for region_order in _arrangements(populated, region_sig, budget):
        for arranged in _arranged_variants(region_order, node_sig, budget):
            rendered = _render_with_links(arranged)
            if best is None or rendered < best:
                best = rendered
            seen += 1
            if seen >= rendered_cap:
                return best
    return best


def _arranged_variants(region_order, node_sig, budget):
    """Yield every admissible arrangement (regions already ordered) as nested
    (node, arranged-children) structures."""

    def expand_one(node):
        for child_order in _arrangements(list(node.children), node_sig, budget):
            for arranged_children in expand_list(child_order):
                yield (node, arranged_children)

    def expand_list(nodes):
        if not nodes:
            yield []
            return
        head, *rest = nodes
        for arranged_head in expand_one(head):
            for arranged_rest in expand_list(rest):
                yield [arranged_head] + arranged_rest

    def region_variants(trees):
        for root_order in _arrangements(list(trees), node_sig, budget):
            yield from expand_list(root_order)

    def all_regions(idx):
        if idx == len(region_order):
            yield []
            return
        for variant in region_variants(region_order[idx]):
            for tail in all_regions(idx + 1):
                yield [variant] + tail

    yield from all_regions(0)


def _render_with_links(arranged_regions):
    # one pass assigns traversal positions and gathers link memberships;
    # link identities are the ranks of their sorted member-position lists
    member_sets: dict[str, list[int]] = {}
    counter = [0]

    def number(entry):
        pos = counter[0]
        counter[0] = pos + 1
        node, children = entry
        for link in node.links:
            bucket = member_sets.get(link)
            if bucket is None:
                member_sets[link] = [pos]
            else:
                bucket.append(pos)
        for child in children:
            number(child)

    for region in arranged_regions:
        for entry in region:
            number(entry)

    ranked = sorted(member_sets, key=lambda name: member_sets[name])
    link_id = {name: rank for rank, name in enumerate(ranked)}

    out = []
    append = out.append

    def render(entry):
        node, children = entry
        append(node.label)
        links = node.links
        if links:
            append("{" + ",".join(map(str, sorted(link_id[l] for l in links))) + "}")
        if children:
            append("(")
            for i, child in enumerate(children):
                if i:
                    append(",")
                render(child)
            append(")")

    for i, region in enumerate(arranged_regions):
        if i:
            append("\x06")
        for j, entry in enumerate(region):
            if j:
                append("|")
            render(entry)
    return "".join(out)


# ---------------------------------------------------------------------------
# substitution


def substitute(term, label_map=None, link_map=None):
    """Rewrite labels and/or link names; unknown entries stay untouched."""
    label_map = label_map or {}
    link_map = link_map or {}

    def rebuild(node):
        children = tuple(rebuild(c) for c in node.children)
        label = label_map.get(node.label, node.label)
        links = tuple(link_map.get(l, l) for l in node.links)
        if label == node.label and links == node.links and children == node.children:
            return node
        return Node(label, links, children)

    return BigraphTerm([[rebuild(t) for t in trees] for trees in term.regions])
