"""Independent reference implementations used as test oracles.

These re-implement the documented rules directly (and differently) from the
production code, so agreement between the two is meaningful evidence.
"""

from __future__ import annotations

import math

ORACLE_SEPARATORS = ["\n\n", "\n", ". ", " "]


def oracle_fragments(text: str, chunk_size: int, level: int = 0) -> list[str]:
    """Atomic fragments, separators kept with the preceding piece."""
    if len(text) <= chunk_size:
        return [text] if text else []
    if level == len(ORACLE_SEPARATORS):
        return list(text)
    sep = ORACLE_SEPARATORS[level]
    pieces = []
    remaining = text
    while remaining:
        idx = remaining.find(sep)
        if idx == -1:
            head, remaining = remaining, ""
        else:
            head, remaining = remaining[: idx + len(sep)], remaining[idx + len(sep) :]
        if len(head) <= chunk_size:
            pieces.append(head)
        else:
            pieces.extend(oracle_fragments(head, chunk_size, level + 1))
    return pieces


def oracle_split_spans(text: str, chunk_size: int, overlap: int) -> list[tuple[int, int]]:
    """Greedy packing of fragments into chunks with overlap-based restart."""
    fragments = oracle_fragments(text, chunk_size, 0)
    starts = []
    pos = 0
    for frag in fragments:
        starts.append(pos)
        pos += len(frag)
    ends = [s + len(f) for s, f in zip(starts, fragments)]

    spans = []
    i = 0
    while i < len(fragments):
        j = i
        while j + 1 < len(fragments) and ends[j + 1] - starts[i] <= chunk_size:
            j += 1
        spans.append((starts[i], ends[j]))
        if j == len(fragments) - 1:
            break
        restart = j + 1
        for t in range(i + 1, j + 1):
            if ends[j] - starts[t] <= overlap:
                restart = t
                break
        i = restart
    return spans


def oracle_top_k(entries, query, k):
    """Brute-force cosine top-k over (key, vector, payload) entries.

    ``key`` is the (doc_id, chunk_index) tie-break tuple. Returns the payload
    list in ranked order.
    """

    def cosine(a, b):
        num = sum(x * y for x, y in zip(a, b))
        da = math.sqrt(sum(x * x for x in a))
        db = math.sqrt(sum(y * y for y in b))
        return num / (da * db) if da and db else 0.0

    scored = [(cosine(vec, query), key, payload) for key, vec, payload in entries]
    scored.sort(key=lambda t: (-t[0], t[1]))
    return [(payload, sim) for sim, _, payload in scored[:k]]


def oracle_group_match(records, target_index: int, preferences, target_severity: str,
                       grade_index_of, severity_of, compatible):
    """Linear-scan filter + rank for group matching."""
    rows = []
    for record in records:
        gi = grade_index_of(record)
        if gi is None or abs(gi - target_index) > 2:
            continue
        if preferences and record.disorders:
            ok = all(
                any(compatible(p, d) for d in record.disorders) for p in preferences
            )
            if not ok:
                continue
        rows.append(
            (
                abs(gi - target_index),
                0 if severity_of(record) == target_severity else 1,
                record.case_id,
                record,
            )
        )
    rows.sort(key=lambda t: t[:3])
    return [r for *_, r in rows]
