from .splitter import Chunk, ingest_document, split_text
from .embeddings import EmbeddedChunk, EmbedderAdapter, HashEmbedder, RemoteEmbedder, embed_chunks
from .store import RetrievalResult, VectorStore
from .pipeline import (
    KnowledgeQuery,
    SourceDocument,
    build_knowledge_base,
    build_query,
    format_context,
    load_manifest,
)

__all__ = [
    "Chunk",
    "EmbeddedChunk",
    "EmbedderAdapter",
    "HashEmbedder",
    "RemoteEmbedder",
    "KnowledgeQuery",
    "RetrievalResult",
    "SourceDocument",
    "VectorStore",
    "build_knowledge_base",
    "build_query",
    "embed_chunks",
    "format_context",
    "ingest_document",
    "load_manifest",
    "split_text",
]
