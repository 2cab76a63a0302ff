"""Dual-prompt template loading and rendering.

Two templates ship as asset files: a comprehensive one for premium
commercial models and a focused one for smaller open-source models.
Template bodies are checksum-verified at load time; a mismatch logs a
warning (templates are editable assets) rather than failing.

Substitution is restricted to the four declared placeholder names, so the
literal JSON braces inside the template prose are never touched.
"""

from __future__ import annotations

import hashlib
import json
import logging
import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .errors import UnknownModelClass, UnresolvedPlaceholder

logger = logging.getLogger(__name__)

PLACEHOLDERS = ("disorders", "grade", "population_spec", "context")

MODEL_CLASSES = ("premium", "focused")


@dataclass(frozen=True)
class PromptTemplate:
    template_id: str
    model_class: str
    body: str


@dataclass(frozen=True)
class RenderedPrompt:
    text: str
    template_id: str
    placeholder_bindings: dict


def _default_template_dir() -> Path:
    return Path(str(resources.files("slpcase") / "assets" / "templates"))


class TemplateLibrary:
    def __init__(self, template_dir: str | Path | None = None):
        self.template_dir = Path(template_dir) if template_dir else _default_template_dir()
        self._templates: dict[str, PromptTemplate] = {}
        self._load()

    def _load(self) -> None:
        manifest = json.loads((self.template_dir / "manifest.json").read_text())
        for template_id, entry in manifest["templates"].items():
            body = (self.template_dir / entry["file"]).read_text()
            digest = hashlib.sha256(body.encode()).hexdigest()
            if digest != entry.get("sha256"):
                logger.warning(
                    "template %s checksum mismatch (modified asset?): %s != %s",
                    template_id,
                    digest,
                    entry.get("sha256"),
                )
            for name in PLACEHOLDERS:
                count = body.count("{%s}" % name)
                if count != 1:
                    raise UnresolvedPlaceholder(
                        f"template {template_id} must contain {{{name}}} exactly once, "
                        f"found {count}"
                    )
            self._templates[template_id] = PromptTemplate(
                template_id=template_id,
                model_class=entry["model_class"],
                body=body,
            )

    def select_template(self, model_class: str) -> PromptTemplate:
        for template in self._templates.values():
            if template.model_class == model_class:
                return template
        raise UnknownModelClass(
            f"unknown model class {model_class!r}; known: {MODEL_CLASSES}"
        )

    def get(self, template_id: str) -> PromptTemplate:
        if template_id not in self._templates:
            raise UnknownModelClass(f"unknown template {template_id!r}")
        return self._templates[template_id]


def render(template: PromptTemplate, bindings: dict[str, str]) -> RenderedPrompt:
    """Substitute the four declared placeholders; any missing binding is an error.

    ``population_spec`` and ``context`` may be empty strings but must be bound.
    """
    missing = [name for name in PLACEHOLDERS if name not in bindings]
    if missing:
        raise UnresolvedPlaceholder(f"missing bindings: {missing}")
    text = template.body
    for name in PLACEHOLDERS:
        text = re.sub(r"\{%s\}" % name, lambda _m: str(bindings[name]), text, count=1)
    return RenderedPrompt(
        text=text,
        template_id=template.template_id,
        placeholder_bindings={name: str(bindings[name]) for name in PLACEHOLDERS},
    )
