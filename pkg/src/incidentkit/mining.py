"""Closed frequent sequence mining over action-name sequences.

PrefixSpan-style projection enumerates frequent subsequences; a pattern is
closed when no strict supersequence has the same support. Supports are
absolute sequence counts (one per trace, regardless of repeats inside it).
"""

from __future__ import annotations


def is_subsequence(small, big):
    it = iter(big)
    return all(any(x == y for y in it) for x in small)


def frequent_sequences(sequences, min_support=2):
    """All (pattern, support) with support >= min_support, via recursive
    database projection. Patterns are tuples of items."""
    sequences = [tuple(s) for s in sequences]
    results = {}

    def project(projection, prefix):
        # projection: list of (sequence index, start offset)
        counts = {}
        for sid, offset in projection:
            seen = set()
            for item in sequences[sid][offset:]:
                if item not in seen:
                    seen.add(item)
                    counts[item] = counts.get(item, 0) + 1
        for item, support in sorted(counts.items()):
            if support < min_support:
                continue
            pattern = prefix + (item,)
            results[pattern] = support
            nxt = []
            for sid, offset in projection:
                seq = sequences[sid]
                for pos in range(offset, len(seq)):
                    if seq[pos] == item:
                        nxt.append((sid, pos + 1))
                        break
            project(nxt, pattern)

    project([(sid, 0) for sid in range(len(sequences))], ())
    return results


def closed_frequent_sequences(sequences, min_support=2):
    """Frequent patterns with no equally-supported strict supersequence,
    sorted longest first then lexicographically."""
    frequent = frequent_sequences(sequences, min_support)
    closed = []
    for pattern, support in frequent.items():
        dominated = any(
            other != pattern and support == other_support
            and len(other) > len(pattern) and is_subsequence(pattern, other)
            for other, other_support in frequent.items()
        )
        if not dominated:
            closed.append((pattern, support))
    closed.sort(key=lambda ps: (-len(ps[0]), ps[0]))
    return closed
