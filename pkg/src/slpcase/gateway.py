"""Uniform completion interface over remote APIs, local runtimes, and the
deterministic fixture provider, plus structured-payload extraction.

Transient failures (rate limits, timeouts, 5xx) are retried with exponential
backoff, at most three attempts. Authentication failures are never retried.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import threading
import time
from dataclasses import dataclass

from .casefile import REQUIRED_TOP_LEVEL_KEYS
from .errors import AuthFailure, ProviderError, ProviderTimeout, RateLimited
from .fixture import FixtureProvider
from .prompts import RenderedPrompt

logger = logging.getLogger(__name__)

MAX_ATTEMPTS = 3
BACKOFF_BASE_SECONDS = 0.5
DEFAULT_TIMEOUT_SECONDS = 120.0
DEFAULT_MAX_OUTPUT_TOKENS = 8192
DEFAULT_CONCURRENCY_CAP = 4

PROVIDER_KINDS = ("remote_api", "local_runtime", "fixture")


@dataclass
class ModelSpec:
    provider_kind: str
    model_id: str
    model_class: str = "premium"
    temperature: float = 0.7
    max_output_tokens: int = DEFAULT_MAX_OUTPUT_TOKENS
    endpoint: str = ""
    auth_env_var: str = ""
    name: str = ""
    timeout: float = DEFAULT_TIMEOUT_SECONDS

    def __post_init__(self):
        if self.provider_kind not in PROVIDER_KINDS:
            raise ValueError(f"provider_kind must be one of {PROVIDER_KINDS}")
        if not 0.0 <= self.temperature <= 2.0:
            raise ValueError(f"temperature {self.temperature} outside [0, 2]")
        if not self.name:
            self.name = self.model_id


@dataclass
class RawCompletion:
    text: str
    model_id: str
    latency_ms: float
    token_usage: dict | None = None


@dataclass
class ExtractionOutcome:
    status: str  # ok | structural_incomplete | not_json
    payload: dict | None = None
    diagnostics: str = ""


def request_digest(model_id: str, temperature: float, prompt_text: str) -> str:
    blob = f"{model_id}\x00{temperature}\x00{prompt_text}".encode()
    return hashlib.sha256(blob).hexdigest()


class Gateway:
    """Resolves a ModelSpec to a provider adapter and applies the retry policy."""

    def __init__(
        self,
        fixture: FixtureProvider | None = None,
        concurrency_cap: int = DEFAULT_CONCURRENCY_CAP,
        sleep=time.sleep,
    ):
        self.fixture = fixture or FixtureProvider()
        self._sleep = sleep
        self._semaphores: dict[str, threading.Semaphore] = {}
        self._sem_lock = threading.Lock()
        self.concurrency_cap = concurrency_cap

    def _semaphore(self, provider_name: str) -> threading.Semaphore:
        with self._sem_lock:
            if provider_name not in self._semaphores:
                self._semaphores[provider_name] = threading.Semaphore(self.concurrency_cap)
            return self._semaphores[provider_name]

    def complete(self, spec: ModelSpec, prompt: RenderedPrompt | str) -> RawCompletion:
        prompt_text = prompt.text if isinstance(prompt, RenderedPrompt) else prompt
        if not prompt_text:
            raise ValueError("prompt must be non-empty")
        digest = request_digest(spec.model_id, spec.temperature, prompt_text)
        last_exc: Exception | None = None
        with self._semaphore(spec.name):
            for attempt in range(MAX_ATTEMPTS):
                started = time.monotonic()
                try:
                    text = self._dispatch(spec, prompt_text, digest)
                    latency = (time.monotonic() - started) * 1000.0
                    return RawCompletion(text=text, model_id=spec.model_id, latency_ms=latency)
                except AuthFailure:
                    raise
                except (RateLimited, ProviderTimeout, ProviderError) as exc:
                    last_exc = exc
                    if attempt + 1 < MAX_ATTEMPTS:
                        delay = BACKOFF_BASE_SECONDS * (2**attempt)
                        logger.warning(
                            "provider %s attempt %d failed (%s); retrying in %.1fs",
                            spec.name, attempt + 1, exc, delay,
                        )
                        self._sleep(delay)
        raise ProviderError(
            f"provider {spec.name} failed after {MAX_ATTEMPTS} attempts: {last_exc}"
        )

    def _dispatch(self, spec: ModelSpec, prompt_text: str, digest: str) -> str:
        if spec.provider_kind == "fixture":
            return self.fixture.complete(prompt_text, digest)
        if spec.provider_kind == "remote_api":
            return self._remote_api(spec, prompt_text)
        return self._local_runtime(spec, prompt_text)

    def _remote_api(self, spec: ModelSpec, prompt_text: str) -> str:
        """OpenAI-compatible chat completion endpoint."""
        import httpx

        headers = {}
        if spec.auth_env_var:
            key = os.environ.get(spec.auth_env_var)
            if not key:
                raise AuthFailure(f"environment variable {spec.auth_env_var} not set")
            headers["Authorization"] = f"Bearer {key}"
        body = {
            "model": spec.model_id,
            "messages": [{"role": "user", "content": prompt_text}],
            "temperature": spec.temperature,
            "max_tokens": spec.max_output_tokens,
        }
        try:
            resp = httpx.post(spec.endpoint, json=body, headers=headers, timeout=spec.timeout)
        except httpx.TimeoutException as exc:
            raise ProviderTimeout(f"{spec.name} timed out: {exc}") from exc
        except httpx.HTTPError as exc:
            raise ProviderError(f"{spec.name} unreachable: {exc}") from exc
        if resp.status_code in (401, 403):
            raise AuthFailure(f"{spec.name} rejected credentials ({resp.status_code})")
        if resp.status_code == 429:
            raise RateLimited(f"{spec.name} rate limited")
        if resp.status_code >= 400:
            raise ProviderError(f"{spec.name} returned {resp.status_code}: {resp.text[:200]}")
        data = resp.json()
        try:
            return data["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError) as exc:
            raise ProviderError(f"{spec.name} response missing completion text") from exc

    def _local_runtime(self, spec: ModelSpec, prompt_text: str) -> str:
        """Ollama-style generate endpoint."""
        import httpx

        body = {
            "model": spec.model_id,
            "prompt": prompt_text,
            "stream": False,
            "options": {"temperature": spec.temperature},
        }
        try:
            resp = httpx.post(spec.endpoint, json=body, timeout=spec.timeout)
        except httpx.TimeoutException as exc:
            raise ProviderTimeout(f"{spec.name} timed out: {exc}") from exc
        except httpx.HTTPError as exc:
            raise ProviderError(f"{spec.name} unreachable: {exc}") from exc
        if resp.status_code >= 400:
            raise ProviderError(f"{spec.name} returned {resp.status_code}")
        data = resp.json()
        if "response" not in data:
            raise ProviderError(f"{spec.name} response missing 'response' field")
        return data["response"]


# --- structured payload extraction -------------------------------------------


def _find_balanced_object(text: str) -> str | None:
    """Slice of the first balanced top-level JSON object, string-aware."""
    start = text.find("{")
    if start == -1:
        return None
    depth = 0
    in_string = False
    escaped = False
    for i in range(start, len(text)):
        ch = text[i]
        if in_string:
            if escaped:
                escaped = False
            elif ch == "\\":
                escaped = True
            elif ch == '"':
                in_string = False
            continue
        if ch == '"':
            in_string = True
        elif ch == "{":
            depth += 1
        elif ch == "}":
            depth -= 1
            if depth == 0:
                return text[start : i + 1]
    return None


def _strip_fences(text: str) -> str:
    stripped = text.strip()
    if "```" in stripped:
        # keep whatever sits between the first pair of fences
        parts = stripped.split("```")
        if len(parts) >= 3:
            inner = parts[1]
            if inner.startswith(("json", "JSON")):
                inner = inner[4:]
            return inner.strip()
    return stripped


def extract_json(raw: RawCompletion | str) -> ExtractionOutcome:
    """Parse the outermost balanced JSON object out of model output.

    Exactly one conservative repair pass is applied (code-fence stripping and
    prose trimming); the bytes inside the balanced object are never altered.
    """
    text = raw.text if isinstance(raw, RawCompletion) else raw
    payload = None
    try:
        payload = json.loads(text)
    except (json.JSONDecodeError, TypeError):
        candidate = _find_balanced_object(_strip_fences(text))
        if candidate is None:
            return ExtractionOutcome(status="not_json", diagnostics="no balanced JSON object found")
        try:
            payload = json.loads(candidate)
        except json.JSONDecodeError as exc:
            return ExtractionOutcome(status="not_json", diagnostics=f"parse failure: {exc}")
    if not isinstance(payload, dict):
        return ExtractionOutcome(status="not_json", diagnostics="top-level value is not an object")
    missing = [k for k in REQUIRED_TOP_LEVEL_KEYS if k not in payload]
    if missing:
        return ExtractionOutcome(
            status="structural_incomplete",
            payload=payload,
            diagnostics=f"missing required keys: {missing}",
        )
    return ExtractionOutcome(status="ok", payload=payload)
