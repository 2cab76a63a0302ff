"""Embedding adapters: a remote HTTP embedder for production and a
deterministic hash-to-unit-vector embedder for provider-free tests."""

from __future__ import annotations

import hashlib
import os
from dataclasses import dataclass, field
from typing import Protocol

import numpy as np

from ..errors import DimensionMismatch, ProviderError
from .splitter import Chunk

DEFAULT_DIMENSION = 1536


class EmbedderAdapter(Protocol):
    dimension: int

    def embed_texts(self, texts: list[str]) -> np.ndarray: ...


@dataclass(frozen=True)
class EmbeddedChunk:
    chunk: Chunk
    vector: np.ndarray
    metadata: dict

    @property
    def chunk_id(self) -> str:
        return f"{self.chunk.doc_id}:{self.chunk.chunk_index}"


class HashEmbedder:
    """Maps text to a unit vector seeded by its SHA-256 digest.

    Identical text always embeds to the identical vector, which keeps the
    whole pipeline reproducible without any provider.
    """

    def __init__(self, dimension: int = DEFAULT_DIMENSION):
        self.dimension = dimension

    def embed_texts(self, texts: list[str]) -> np.ndarray:
        out = np.empty((len(texts), self.dimension), dtype=np.float64)
        for i, text in enumerate(texts):
            seed = int.from_bytes(hashlib.sha256(text.encode()).digest()[:8], "big")
            vec = np.random.default_rng(seed).standard_normal(self.dimension)
            out[i] = vec / np.linalg.norm(vec)
        return out


class RemoteEmbedder:
    """OpenAI-style HTTP embedding endpoint (POST {input, model})."""

    def __init__(
        self,
        endpoint: str,
        model: str,
        auth_env_var: str = "EMBEDDING_API_KEY",
        dimension: int = DEFAULT_DIMENSION,
        timeout: float = 60.0,
    ):
        self.endpoint = endpoint
        self.model = model
        self.auth_env_var = auth_env_var
        self.dimension = dimension
        self.timeout = timeout

    def embed_texts(self, texts: list[str]) -> np.ndarray:
        import httpx

        headers = {}
        key = os.environ.get(self.auth_env_var)
        if key:
            headers["Authorization"] = f"Bearer {key}"
        try:
            resp = httpx.post(
                self.endpoint,
                json={"input": texts, "model": self.model},
                headers=headers,
                timeout=self.timeout,
            )
            resp.raise_for_status()
        except httpx.HTTPError as exc:
            raise ProviderError(f"embedding provider unreachable: {exc}") from exc
        data = resp.json()["data"]
        vectors = np.array([row["embedding"] for row in data], dtype=np.float64)
        if vectors.ndim != 2 or vectors.shape[1] != self.dimension:
            raise DimensionMismatch(
                f"provider returned dimension {vectors.shape}, expected {self.dimension}"
            )
        return vectors


def embed_chunks(
    chunks: list[Chunk],
    embedder: EmbedderAdapter,
    metadata: dict | None = None,
    per_doc_metadata: dict[str, dict] | None = None,
) -> list[EmbeddedChunk]:
    """One vector per chunk, order preserved; metadata copied per document."""
    if not chunks:
        return []
    vectors = embedder.embed_texts([c.text for c in chunks])
    if vectors.shape != (len(chunks), embedder.dimension):
        raise DimensionMismatch(
            f"expected {(len(chunks), embedder.dimension)}, got {vectors.shape}"
        )
    out = []
    for chunk, vec in zip(chunks, vectors):
        meta = dict(metadata or {})
        if per_doc_metadata and chunk.doc_id in per_doc_metadata:
            meta.update(per_doc_metadata[chunk.doc_id])
        out.append(EmbeddedChunk(chunk=chunk, vector=vec, metadata=meta))
    return out
