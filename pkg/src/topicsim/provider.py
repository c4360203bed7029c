"""Text-completion provider: live HTTP, deterministic mock, replay cache.

Every request is content-addressed by a digest over all of its fields,
which drives both the mock's determinism and the record/replay cache.
Output parsing helpers live here too; they are total functions that
either return a value or raise ParseError, never anything else.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import re
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import requests

logger = logging.getLogger(__name__)

REQUEST_TAGS = (
    "perceive",
    "decide",
    "reflect_emotion",
    "reflect_sc",
    "reflect_summary",
    "reflect_opinion",
    "attack",
    "judge",
    "distill",
    "censor",
)

# Stable generation settings per request family: generative calls keep
# some variety, scoring calls stay cold.
TAG_TEMPERATURES = {
    "judge": 0.0,
    "censor": 0.0,
}
DEFAULT_TEMPERATURE = 0.7


class ProviderError(Exception):
    """Completion could not be obtained after all retries."""


class ParseError(ValueError):
    """Model output did not contain the expected token."""


def stable_u64(*parts) -> int:
    """64-bit hash of the stringified parts; stable across processes."""
    joined = "\x1f".join(str(p) for p in parts)
    digest = hashlib.sha256(joined.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


@dataclass(frozen=True)
class CompletionRequest:
    system_text: str
    user_text: str
    temperature: float = DEFAULT_TEMPERATURE
    seed: int = 0
    tag: str = "decide"

    def __post_init__(self):
        if not self.user_text:
            raise ValueError("user_text must be non-empty")
        if self.tag not in REQUEST_TAGS:
            raise ValueError(f"unknown request tag {self.tag!r}")

    def digest(self) -> str:
        payload = "\x1f".join(
            (self.system_text, self.user_text, repr(self.temperature), str(self.seed), self.tag)
        )
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()

    def bump_seed(self) -> "CompletionRequest":
        """Fresh request for a retry after a bad parse."""
        return CompletionRequest(
            system_text=self.system_text,
            user_text=self.user_text,
            temperature=self.temperature,
            seed=self.seed + 1,
            tag=self.tag,
        )


@dataclass
class ProviderConfig:
    backend: str = "mock"  # mock | live | replay
    endpoint: str = ""
    model: str = ""
    credential_env: str = ""
    timeout: float = 30.0
    max_retries: int = 3
    backoff_base: float = 0.5
    mock_script: str = "default"
    cache_path: str | None = None
    fallback: str = "mock"  # backend used on replay cache misses

    def validate(self) -> None:
        if self.backend not in ("mock", "live", "replay"):
            raise ValueError(f"unknown provider backend {self.backend!r}")
        if self.backend == "live" and not (self.endpoint and self.credential_env):
            raise ValueError("live backend requires endpoint and credential_env")
        if self.backend == "replay" and not self.cache_path:
            raise ValueError("replay backend requires cache_path")


@dataclass
class MockRule:
    """One clause of a scripted mock: first matching rule answers.

    ``respond`` may be a literal string or a callable taking the full
    request, so scripts can read the prompt and compute a reply.
    """

    respond: str | Callable[[CompletionRequest], str]
    tag: str | None = None
    contains: str | None = None

    def matches(self, request: CompletionRequest) -> bool:
        if self.tag is not None and request.tag != self.tag:
            return False
        if self.contains is not None and self.contains not in request.user_text:
            return False
        return True

    def answer(self, request: CompletionRequest) -> str:
        if callable(self.respond):
            return self.respond(request)
        return self.respond


class MockBackend:
    """Deterministic scripted backend: output is a pure function of the
    request digest and the rule table."""

    def __init__(self, rules: list[MockRule]):
        self.rules = rules
        self.calls_by_tag: dict[str, int] = {}
        self.call_count = 0

    def complete(self, request: CompletionRequest) -> str:
        self.call_count += 1
        self.calls_by_tag[request.tag] = self.calls_by_tag.get(request.tag, 0) + 1
        for rule in self.rules:
            if rule.matches(request):
                return rule.answer(request)
        raise ProviderError(f"mock script has no rule for tag {request.tag!r}")


class LiveBackend:
    """Chat-completion HTTP backend with exponential backoff retries."""

    def __init__(self, config: ProviderConfig):
        self.config = config
        self.call_count = 0

    def complete(self, request: CompletionRequest) -> str:
        cfg = self.config
        key = os.environ.get(cfg.credential_env, "")
        if not key:
            raise ProviderError(f"credential env var {cfg.credential_env!r} is empty")
        body = {
            "model": cfg.model,
            "messages": [
                {"role": "system", "content": request.system_text},
                {"role": "user", "content": request.user_text},
            ],
            "temperature": request.temperature,
            "seed": request.seed,
        }
        last_error: Exception | None = None
        for attempt in range(cfg.max_retries + 1):
            if attempt:
                time.sleep(cfg.backoff_base * 2 ** (attempt - 1))
            try:
                self.call_count += 1
                resp = requests.post(
                    cfg.endpoint,
                    json=body,
                    headers={"Authorization": f"Bearer {key}"},
                    timeout=cfg.timeout,
                )
                resp.raise_for_status()
                return resp.json()["choices"][0]["message"]["content"]
            except (requests.RequestException, KeyError, ValueError) as exc:
                last_error = exc
                logger.warning("completion attempt %d failed: %s", attempt + 1, exc)
        raise ProviderError(f"live backend exhausted retries: {last_error}")


class ReplayBackend:
    """Content-addressed cache over another backend.

    Hits return the stored text without touching the inner backend;
    misses fall through and append to the cache file (JSON lines of
    digest/request/response), so a recorded run can be replayed
    byte-for-byte and audited offline.
    """

    def __init__(self, cache_path: str | Path, inner):
        self.cache_path = Path(cache_path)
        self.inner = inner
        self._cache: dict[str, str] = {}
        if self.cache_path.exists():
            with self.cache_path.open(encoding="utf-8") as fh:
                for line in fh:
                    if not line.strip():
                        continue
                    entry = json.loads(line)
                    self._cache[entry["digest"]] = entry["response"]

    def complete(self, request: CompletionRequest) -> str:
        digest = request.digest()
        if digest in self._cache:
            return self._cache[digest]
        text = self.inner.complete(request)
        self._cache[digest] = text
        entry = {
            "digest": digest,
            "request": {
                "system_text": request.system_text,
                "user_text": request.user_text,
                "temperature": request.temperature,
                "seed": request.seed,
                "tag": request.tag,
            },
            "response": text,
        }
        self.cache_path.parent.mkdir(parents=True, exist_ok=True)
        with self.cache_path.open("a", encoding="utf-8") as fh:
            fh.write(json.dumps(entry, ensure_ascii=False) + "\n")
        return text


class Provider:
    """Facade the rest of the package talks to."""

    def __init__(self, backend):
        self.backend = backend

    def complete(self, request: CompletionRequest) -> str:
        return self.backend.complete(request)

    @classmethod
    def from_config(cls, config: ProviderConfig) -> "Provider":
        config.validate()
        return cls(_build_backend(config.backend, config))


def _build_backend(name: str, config: ProviderConfig):
    if name == "mock":
        from .mockscript import build_script

        return MockBackend(build_script(config.mock_script))
    if name == "live":
        return LiveBackend(config)
    if name == "replay":
        inner = _build_backend(config.fallback, config)
        return ReplayBackend(config.cache_path, inner)
    raise ValueError(f"unknown provider backend {name!r}")


class RequestSeeder:
    """Per-actor seed source: the n-th request of a given tag always
    gets the same seed, independent of what other actors do."""

    def __init__(self, root: int):
        self.root = root
        self._counts: dict[str, int] = {}

    def next(self, tag: str) -> int:
        n = self._counts.get(tag, 0)
        self._counts[tag] = n + 1
        return stable_u64("request", self.root, tag, n)


# --- output parsing -------------------------------------------------------

_INT_RE = re.compile(r"[-+]?\d+")
_NUMBER_RE = re.compile(r"([-+]?(?:\d+\.?\d*|\.\d+))\s*(%?)")


def parse_choice(text: str, n_options: int) -> int:
    """First integer token, valid iff within [0, n_options)."""
    if n_options < 1:
        raise ValueError("n_options must be >= 1")
    match = _INT_RE.search(text.strip())
    if not match:
        raise ParseError(f"no integer in {text!r}")
    value = int(match.group())
    if not 0 <= value < n_options:
        raise ParseError(f"choice {value} outside [0, {n_options})")
    return value


def parse_fraction(text: str) -> float:
    """Read a percentage or bare number and clamp it into [0, 1].

    "35%" -> 0.35; a bare value in [0, 1] is taken verbatim; a bare
    value in (1, 100] is treated as a percentage.
    """
    match = _NUMBER_RE.search(text)
    if not match:
        raise ParseError(f"no number in {text!r}")
    value = float(match.group(1))
    if match.group(2) == "%" or value > 1.0:
        value /= 100.0
    return min(1.0, max(0.0, value))


def parse_score_100(text: str) -> float:
    """First integer token on the 0-100 judge scale, normalized and clamped."""
    match = _INT_RE.search(text.strip())
    if not match:
        raise ParseError(f"no integer in {text!r}")
    return min(1.0, max(0.0, int(match.group()) / 100.0))
