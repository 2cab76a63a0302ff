"""Knowledge-base assembly: manifest loading, query construction, and
retrieved-context formatting."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from ..errors import InvalidParameters
from ..taxonomy import DisorderType, GradeLevel
from .embeddings import EmbedderAdapter, embed_chunks
from .splitter import DEFAULT_CHUNK_SIZE, DEFAULT_OVERLAP, ingest_document
from .store import RetrievalResult, VectorStore

COLLECTIONS = (
    "clinical_guidelines",
    "developmental_milestones",
    "iep_exemplars",
    "school_policy",
)


@dataclass(frozen=True)
class SourceDocument:
    doc_id: str
    collection: str
    text: str
    source_type: str = ""
    date: str | None = None

    def __post_init__(self):
        if self.collection not in COLLECTIONS:
            raise InvalidParameters(
                f"collection must be one of {COLLECTIONS}, got {self.collection!r}"
            )
        if not self.text:
            raise InvalidParameters(f"document {self.doc_id!r} has empty text")


@dataclass
class KnowledgeQuery:
    disorders: list[DisorderType]
    grade: GradeLevel
    population_spec: str = ""
    k: int = 10
    metadata_filter: dict | None = None


def build_query(req: KnowledgeQuery) -> str:
    """Deterministic query text: disorder display names, grade, population spec."""
    if not req.disorders:
        raise InvalidParameters("query requires at least one disorder")
    parts = [d.display_name for d in req.disorders]
    parts.append(req.grade.display_name)
    if req.population_spec:
        parts.append(req.population_spec)
    return " ".join(parts).strip()


def format_context(results: list[RetrievalResult]) -> str:
    """Concatenate chunks, each preceded by a one-line metadata header."""
    blocks = []
    for r in results:
        chunk = r.embedded_chunk.chunk
        collection = r.embedded_chunk.metadata.get("collection", "")
        header = f"[{collection} | {chunk.doc_id} | {chunk.chunk_index}]"
        blocks.append(f"{header}\n{chunk.text}")
    return "\n\n".join(blocks)


def load_manifest(manifest_path: str | Path) -> list[SourceDocument]:
    """Read a JSON-lines manifest: one {path, collection, source_type, date}
    record per line; paths resolve relative to the manifest file."""
    manifest_path = Path(manifest_path)
    docs = []
    for line in manifest_path.read_text().splitlines():
        line = line.strip()
        if not line:
            continue
        record = json.loads(line)
        doc_path = manifest_path.parent / record["path"]
        docs.append(
            SourceDocument(
                doc_id=record.get("doc_id", Path(record["path"]).stem),
                collection=record["collection"],
                source_type=record.get("source_type", ""),
                date=record.get("date"),
                text=doc_path.read_text(),
            )
        )
    return docs


def build_knowledge_base(
    docs: list[SourceDocument],
    embedder: EmbedderAdapter,
    chunk_size: int = DEFAULT_CHUNK_SIZE,
    overlap: int = DEFAULT_OVERLAP,
) -> VectorStore:
    store = VectorStore(embedder.dimension)
    for doc in docs:
        chunks = ingest_document(doc, chunk_size=chunk_size, overlap=overlap)
        meta = {
            "collection": doc.collection,
            "source_type": doc.source_type,
            "doc_id": doc.doc_id,
            "date": doc.date,
        }
        store.add(embed_chunks(chunks, embedder, metadata=meta))
    return store


def retrieve_for_query(
    store: VectorStore, embedder: EmbedderAdapter, req: KnowledgeQuery
) -> list[RetrievalResult]:
    query_text = build_query(req)
    query_vector = embedder.embed_texts([query_text])[0]
    return store.retrieve(query_vector, k=req.k, metadata_filter=req.metadata_filter)
