"""Apply action rules to states: replace a matched pre-condition occurrence
with the rule's post-condition.

The correspondence between pre and post is by node label (labels are unique
within a rule's conditions). For every embedding of the pre-condition:

* matched nodes keep their identity (name, unmatched children, unmatched
  links); links matched by the pre are removed and links listed in the post
  are (re-)added through the embedding's link map,
* post links absent from the pre get fresh, globally unique names,
* nodes whose label disappears in the post are deleted with their remaining
  children promoted to the deleted node's position,
* nodes whose label is new in the post are created,
* post region i occupies the host context of pre region i; extra post
  regions become new host regions.

Everything outside the matched occurrence is untouched.
"""

from __future__ import annotations

from .matching import Matcher, MatchMode
from .terms import BigraphTerm, Node


class PreparedRule:
    """A rule with parsed conditions and a compiled pre-matcher, reusable
    across many states."""

    def __init__(self, rule, pre_term, post_term, matcher):
        self.rule = rule
        self.pre_term = pre_term
        self.post_term = post_term
        self.matcher = matcher
        self.pre_label_to_idx = {}
        for idx, node in enumerate(pre_term.nodes):
            if node.label in self.pre_label_to_idx:
                raise ValueError(
                    f"rule {rule.name!r}: duplicate label {node.label!r} in pre-condition")
            self.pre_label_to_idx[node.label] = idx
        post_labels = [n.label for n in post_term.nodes]
        if len(set(post_labels)) != len(post_labels):
            raise ValueError(f"rule {rule.name!r}: duplicate label in post-condition")

    def successors(self, state, host_types=None, host_link_types=None):
        found = self.matcher.embeddings(state, host_types=host_types,
                                        host_link_types=host_link_types)
        return [(emb, _apply(state, self, emb)) for emb in found]


def prepare_rule(rule, pre_term, post_term, taxonomy, pattern_types, pattern_link_types):
    matcher = Matcher(pre_term, MatchMode.TYPE_SUBSUME, taxonomy=taxonomy,
                      pattern_types=pattern_types,
                      pattern_link_types=pattern_link_types)
    return PreparedRule(rule, pre_term, post_term, matcher)


def rewrite(state, rule, mode=MatchMode.TYPE_SUBSUME, *, taxonomy=None,
            pattern_types=None, host_types=None,
            pattern_link_types=None, host_link_types=None,
            pre_term=None, post_term=None):
    """One successor state per embedding of the rule's pre-condition.

    ``rule`` needs ``name``, ``pre`` and ``post`` attributes (term text);
    parsed terms may be passed to skip re-parsing.
    """
    from .terms import parse_term

    pre_term = pre_term if pre_term is not None else parse_term(rule.pre)
    post_term = post_term if post_term is not None else parse_term(rule.post)
    matcher = Matcher(pre_term, mode, taxonomy=taxonomy,
                      pattern_types=pattern_types,
                      pattern_link_types=pattern_link_types)
    prepared = PreparedRule(rule, pre_term, post_term, matcher)
    return prepared.successors(state, host_types=host_types,
                               host_link_types=host_link_types)


_REGION = "region"


def _apply(state, prepared, emb):
    pre = prepared.pre_term
    post = prepared.post_term
    state._index()
    nodes = state.nodes
    n = len(nodes)

    labels = [node.label for node in nodes]
    links = [list(node.links) for node in nodes]
    parent_key = []
    for idx in range(n):
        parent = state.parents[idx]
        parent_key.append(parent if parent is not None else (_REGION, state.region_of[idx]))
    children: dict[object, list[int]] = {(_REGION, rid): [] for rid in range(len(state.regions))}
    for idx in range(n):
        children.setdefault(idx, [])
    for idx in range(n):
        children[parent_key[idx]].append(idx)

    link_map = emb.link_map()
    pre_labels = set(prepared.pre_label_to_idx)
    post_label_nodes = {node.label: i for i, node in enumerate(post.nodes)}
    image = {label: emb.nodes[pidx] for label, pidx in prepared.pre_label_to_idx.items()}

    # fresh names for post links absent from the pre, unique within the state
    existing_links = set(state.links)
    fresh: dict[str, str] = {}
    post_link_names = []
    for node in post.nodes:
        for link in node.links:
            if link not in post_link_names:
                post_link_names.append(link)
    pre_link_names = {l for node in pre.nodes for l in node.links}
    for name in post_link_names:
        if name in pre_link_names:
            continue  # bound by the embedding's link map
        counter = 1
        while f"{name}_{counter}" in existing_links:
            counter += 1
        fresh[name] = f"{name}_{counter}"
        existing_links.add(fresh[name])

    def mapped_link(name):
        if name in link_map:
            return link_map[name]
        return fresh[name]

    # strip matched links off matched nodes
    for label, pidx in prepared.pre_label_to_idx.items():
        h = image[label]
        matched = {link_map[l] for l in pre.nodes[pidx].links}
        links[h] = [l for l in links[h] if l not in matched]

    # host context of each pre region: the shared sibling key of its roots
    pre_context = {}
    for idx, parent in enumerate(pre.parents):
        if parent is None:
            rid = pre.region_of[idx]
            if rid not in pre_context:
                pre_context[rid] = parent_key[image[pre.nodes[idx].label]]

    new_regions = len(state.regions)

    def context_for(post_rid):
        nonlocal new_regions
        if post_rid in pre_context:
            return pre_context[post_rid]
        key = (_REGION, new_regions)
        children[key] = []
        new_regions += 1
        pre_context[post_rid] = key
        return key

    # realize the post structure: survivors move/keep, new labels are created
    labels_arr = labels
    created: dict[str, int] = {}

    def target_of(post_idx):
        label = post.nodes[post_idx].label
        if label in pre_labels:
            return image[label]
        if label not in created:
            idx = len(labels_arr)
            labels_arr.append(label)
            links.append([])
            parent_key.append(None)
            children[idx] = []
            created[label] = idx
        return created[label]

    post_order = list(range(len(post.nodes)))  # preorder: parents first
    for post_idx in post_order:
        node = post.nodes[post_idx]
        target = target_of(post_idx)
        post_parent = post.parents[post_idx]
        if post_parent is None:
            new_key = context_for(post.region_of[post_idx])
        else:
            new_key = target_of(post_parent)
        old_key = parent_key[target] if target < n else None
        if old_key != new_key:
            if old_key is not None:
                children[old_key].remove(target)
            children[new_key].append(target)
            parent_key[target] = new_key
        # (re-)attach post-declared links
        for link in node.links:
            resolved = mapped_link(link)
            if resolved not in links[target]:
                links[target].append(resolved)

    # deletions: pre-only labels vanish, children promote to their position
    for label in sorted(pre_labels - set(post_label_nodes)):
        target = image[label]
        key = parent_key[target]
        slot = children[key].index(target)
        promoted = children[target]
        children[key][slot:slot + 1] = promoted
        for child in promoted:
            parent_key[child] = key
        children[target] = []
        parent_key[target] = None
        labels_arr[target] = None  # mark dead

    # rebuild, sharing untouched subtrees with the original state
    def build(idx):
        kids = tuple(build(c) for c in children[idx])
        link_tuple = tuple(links[idx])
        if idx < n:
            original = nodes[idx]
            if (original.label == labels_arr[idx] and original.links == link_tuple
                    and len(kids) == len(original.children)
                    and all(a is b for a, b in zip(kids, original.children))):
                return original
        return Node(labels_arr[idx], link_tuple, kids)

    regions_out = []
    for rid in range(new_regions):
        key = (_REGION, rid)
        roots = [build(i) for i in children.get(key, ()) if labels_arr[i] is not None]
        regions_out.append(roots)
    return BigraphTerm(regions_out)
