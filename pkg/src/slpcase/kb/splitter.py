"""Recursive character splitter with overlap and exact source spans.

Splitting happens in two stages:

1. The text is cut into *atomic fragments* by trying separators in order
   ("\\n\\n", "\\n", ". ", " ", then single characters). A fragment longer
   than ``chunk_size`` is re-split with the next separator, so every atomic
   fragment fits in a chunk. Separators stay attached to the preceding
   fragment, which makes fragment spans tile the source text exactly.
2. Fragments are greedily packed into chunks of at most ``chunk_size``
   characters. The next chunk restarts at the earliest fragment that keeps
   at most ``overlap`` characters of shared text with the chunk just
   emitted, so adjacent chunks overlap by roughly ``overlap`` characters
   wherever a split occurred.

Because chunks are unions of contiguous fragment spans, every source
character is covered by at least one chunk.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..errors import EmptyDocument, InvalidParameters

SEPARATORS = ("\n\n", "\n", ". ", " ")

DEFAULT_CHUNK_SIZE = 1200
DEFAULT_OVERLAP = 200


@dataclass(frozen=True)
class Chunk:
    doc_id: str
    chunk_index: int
    text: str
    char_span: tuple[int, int]


def _fragment_spans(text: str, start: int, chunk_size: int, level: int) -> list[tuple[int, int]]:
    """Spans of atomic fragments of ``text`` (offset by ``start``), each ≤ chunk_size."""
    if len(text) <= chunk_size:
        return [(start, start + len(text))] if text else []
    if level >= len(SEPARATORS):
        # character level: single-character fragments
        return [(start + i, start + i + 1) for i in range(len(text))]
    sep = SEPARATORS[level]
    spans: list[tuple[int, int]] = []
    pos = 0
    while pos < len(text):
        cut = text.find(sep, pos)
        end = len(text) if cut == -1 else cut + len(sep)
        piece = text[pos:end]
        if len(piece) <= chunk_size:
            spans.append((start + pos, start + end))
        else:
            spans.extend(_fragment_spans(piece, start + pos, chunk_size, level + 1))
        pos = end
    return spans


def split_spans(text: str, chunk_size: int, overlap: int) -> list[tuple[int, int]]:
    """Chunk boundary offsets [start, end) into ``text``."""
    frags = _fragment_spans(text, 0, chunk_size, 0)
    chunks: list[tuple[int, int]] = []
    i = 0
    n = len(frags)
    while i < n:
        j = i
        while j + 1 < n and frags[j + 1][1] - frags[i][0] <= chunk_size:
            j += 1
        chunks.append((frags[i][0], frags[j][1]))
        if j == n - 1:
            break
        # restart at the earliest fragment that keeps ≤ overlap shared chars
        next_i = j + 1
        for t in range(i + 1, j + 1):
            if frags[j][1] - frags[t][0] <= overlap:
                next_i = t
                break
        i = next_i
    return chunks


def split_text(
    text: str,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
    overlap: int = DEFAULT_OVERLAP,
) -> list[str]:
    return [text[a:b] for a, b in split_spans(text, chunk_size, overlap)]


def ingest_document(
    doc,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
    overlap: int = DEFAULT_OVERLAP,
) -> list[Chunk]:
    """Split a source document into chunks carrying exact character spans."""
    if not doc.text:
        raise EmptyDocument(f"document {doc.doc_id!r} has no text")
    if not 0 <= overlap < chunk_size:
        raise InvalidParameters(
            f"overlap ({overlap}) must satisfy 0 <= overlap < chunk_size ({chunk_size})"
        )
    return [
        Chunk(doc_id=doc.doc_id, chunk_index=i, text=doc.text[a:b], char_span=(a, b))
        for i, (a, b) in enumerate(split_spans(doc.text, chunk_size, overlap))
    ]
