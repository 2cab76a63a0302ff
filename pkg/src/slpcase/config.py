"""Application configuration: store path, template and corpus locations,
provider declarations, worker counts, and rubric thresholds.

Secrets never live in the config file; providers reference environment
variable names only.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .gateway import DEFAULT_CONCURRENCY_CAP, Gateway, ModelSpec
from .kb.embeddings import HashEmbedder
from .kb.pipeline import build_knowledge_base, load_manifest
from .orchestrator import Pipeline
from .prompts import TemplateLibrary

FIXTURE_MODEL = ModelSpec(provider_kind="fixture", model_id="fixture-1", model_class="premium")


@dataclass
class AppConfig:
    store_path: str = "slpcase.db"
    template_dir: str | None = None
    corpus_manifest: str | None = None
    embedding_dimension: int = 1536
    workers: int = 4
    concurrency_cap: int = DEFAULT_CONCURRENCY_CAP
    providers: list[ModelSpec] = field(default_factory=lambda: [FIXTURE_MODEL])

    @classmethod
    def load(cls, path: str | Path) -> "AppConfig":
        data = json.loads(Path(path).read_text())
        providers = [ModelSpec(**p) for p in data.pop("providers", [])]
        config = cls(**data, providers=providers or [FIXTURE_MODEL])
        return config

    def resolve_model(self, name: str | None) -> ModelSpec:
        if name is None:
            return self.providers[0]
        for spec in self.providers:
            if spec.name == name or spec.model_id == name:
                return spec
        raise KeyError(f"no configured provider named {name!r}")


def bundled_corpus_manifest() -> Path:
    return Path(str(resources.files("slpcase") / "assets" / "corpus" / "manifest.jsonl"))


def build_pipeline(config: AppConfig | None = None) -> Pipeline:
    """Assemble the generation pipeline from configuration.

    Without a corpus manifest the small bundled corpus is indexed, which is
    enough for fixture-provider runs and tests.
    """
    config = config or AppConfig()
    embedder = HashEmbedder(dimension=config.embedding_dimension)
    manifest = config.corpus_manifest or bundled_corpus_manifest()
    store = build_knowledge_base(load_manifest(manifest), embedder)
    return Pipeline(
        store=store,
        embedder=embedder,
        gateway=Gateway(concurrency_cap=config.concurrency_cap),
        templates=TemplateLibrary(config.template_dir),
    )
