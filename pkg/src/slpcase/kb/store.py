"""Flat in-process vector index with exact cosine top-k and file persistence.

Exact search is cheap at corpus scale (a few thousand chunks) and makes
retrieval results testable against a brute-force oracle. Readers may run
concurrently; indexing is exclusive-writer.
"""

from __future__ import annotations

import json
import threading
from dataclasses import dataclass

import numpy as np

from ..errors import DimensionMismatch, StorageIO
from .embeddings import EmbeddedChunk
from .splitter import Chunk


@dataclass(frozen=True)
class RetrievalResult:
    embedded_chunk: EmbeddedChunk
    similarity: float


class VectorStore:
    def __init__(self, dimension: int):
        self.dimension = dimension
        self._vectors = np.empty((0, dimension), dtype=np.float64)
        self._records: list[EmbeddedChunk] = []
        self._by_id: dict[str, int] = {}
        self._write_lock = threading.Lock()

    def __len__(self) -> int:
        return len(self._records)

    def add(self, chunks: list[EmbeddedChunk]) -> None:
        if not chunks:
            return
        with self._write_lock:
            vectors = np.stack([c.vector for c in chunks])
            if vectors.shape[1] != self.dimension:
                raise DimensionMismatch(
                    f"chunk dimension {vectors.shape[1]} != store dimension {self.dimension}"
                )
            norms = np.linalg.norm(vectors, axis=1)
            if np.any(norms == 0):
                raise DimensionMismatch("zero-norm vector cannot be indexed")
            base = len(self._records)
            self._vectors = np.vstack([self._vectors, vectors])
            self._records.extend(chunks)
            for offset, chunk in enumerate(chunks):
                self._by_id[chunk.chunk_id] = base + offset

    def get(self, chunk_id: str) -> EmbeddedChunk | None:
        idx = self._by_id.get(chunk_id)
        return self._records[idx] if idx is not None else None

    def retrieve(
        self,
        query_vector: np.ndarray,
        k: int = 10,
        metadata_filter: dict | None = None,
    ) -> list[RetrievalResult]:
        """Exact cosine top-k, ties broken by (doc_id, chunk_index) ascending.

        An empty store (or an all-filtered one) returns an empty list.
        """
        if k < 1:
            raise ValueError("k must be >= 1")
        query_vector = np.asarray(query_vector, dtype=np.float64)
        if query_vector.shape != (self.dimension,):
            raise DimensionMismatch(
                f"query dimension {query_vector.shape} != store dimension {self.dimension}"
            )
        if not self._records:
            return []
        qnorm = np.linalg.norm(query_vector)
        if qnorm == 0:
            sims = np.zeros(len(self._records))
        else:
            norms = np.linalg.norm(self._vectors, axis=1)
            sims = (self._vectors @ query_vector) / (norms * qnorm)
        candidates = [
            (record, float(sims[i]))
            for i, record in enumerate(self._records)
            if _matches(record.metadata, metadata_filter)
        ]
        candidates.sort(
            key=lambda item: (-item[1], item[0].chunk.doc_id, item[0].chunk.chunk_index)
        )
        return [RetrievalResult(rec, sim) for rec, sim in candidates[:k]]

    # --- persistence ---------------------------------------------------------

    def save(self, path: str) -> None:
        records = [
            {
                "doc_id": c.chunk.doc_id,
                "chunk_index": c.chunk.chunk_index,
                "text": c.chunk.text,
                "char_span": list(c.chunk.char_span),
                "metadata": c.metadata,
            }
            for c in self._records
        ]
        try:
            with open(path, "wb") as fh:
                np.savez_compressed(
                    fh,
                    dimension=np.array([self.dimension]),
                    vectors=self._vectors,
                    records=np.array(json.dumps(records)),
                )
        except OSError as exc:
            raise StorageIO(f"cannot write vector store to {path}: {exc}") from exc

    @classmethod
    def load(cls, path: str) -> "VectorStore":
        try:
            with np.load(path, allow_pickle=False) as data:
                dimension = int(data["dimension"][0])
                vectors = data["vectors"]
                records = json.loads(str(data["records"]))
        except (OSError, KeyError, ValueError) as exc:
            raise StorageIO(f"cannot read vector store from {path}: {exc}") from exc
        store = cls(dimension)
        chunks = [
            EmbeddedChunk(
                chunk=Chunk(
                    doc_id=rec["doc_id"],
                    chunk_index=rec["chunk_index"],
                    text=rec["text"],
                    char_span=tuple(rec["char_span"]),
                ),
                vector=vectors[i],
                metadata=rec["metadata"],
            )
            for i, rec in enumerate(records)
        ]
        store.add(chunks)
        return store


def _matches(metadata: dict, metadata_filter: dict | None) -> bool:
    if not metadata_filter:
        return True
    return all(metadata.get(key) == value for key, value in metadata_filter.items())
