"""Prompt construction and completion providers.

Two providers ship built in: an HTTP chat-completion client (bearer-token
JSON POST) and a deterministic offline mock selected by the ``mock:`` URL
scheme, so every pipeline above this module runs credential-free in tests.
``complete`` owns the retry/backoff policy and a process-wide cap on
concurrent in-flight calls per endpoint.
"""

from __future__ import annotations

import hashlib
import os
import random
import re
import threading
import time
from dataclasses import dataclass, field
from urllib.parse import parse_qs, urlparse

import httpx

from .errors import (
    CountOutOfRange,
    CredentialMissing,
    EmptyPage,
    PageOutOfRange,
    ProviderRejected,
    ProviderTimeout,
    UnsupportedKind,
)
from .ingest import PageText
from .qa_parser import QAPair, render_canonical
from .taxonomy import (
    ANSWER_MARKER,
    MAX_QUESTIONS_PER_PAGE,
    MIN_QUESTIONS_PER_PAGE,
    QuestionKind,
)


@dataclass(frozen=True)
class GenerationRequest:
    """What to generate: kind, per-page count, and an optional page subset."""

    kind: QuestionKind
    questions_per_page: int
    page_range: frozenset[int] | None = None  # None means all pages

    def __post_init__(self):
        if not self.kind.generation_supported:
            raise UnsupportedKind(
                f"{self.kind.name} questions cannot be generated; "
                f"use Comprehension or Analysis"
            )
        n = self.questions_per_page
        if not isinstance(n, int) or isinstance(n, bool) or \
                not MIN_QUESTIONS_PER_PAGE <= n <= MAX_QUESTIONS_PER_PAGE:
            raise CountOutOfRange(
                f"questions_per_page must be in "
                f"[{MIN_QUESTIONS_PER_PAGE}, {MAX_QUESTIONS_PER_PAGE}], got {n!r}"
            )
        if self.page_range is not None:
            object.__setattr__(self, "page_range", frozenset(self.page_range))
            if not self.page_range:
                raise PageOutOfRange("page_range must not be empty")

    def resolve_pages(self, page_count: int) -> list[int]:
        """Ascending page indices for a document; PageOutOfRange if invalid."""
        if self.page_range is None:
            return list(range(page_count))
        bad = [i for i in self.page_range if not 0 <= i < page_count]
        if bad:
            raise PageOutOfRange(
                f"pages {sorted(bad)} outside [0, {page_count})"
            )
        return sorted(self.page_range)


@dataclass(frozen=True)
class ProviderConfig:
    endpoint_url: str
    model_id: str = "gpt-3.5-turbo"
    credential_ref: str = ""  # env var NAME holding the key; never the key itself
    timeout: float = 60.0
    max_retries: int = 3
    max_parallel_calls: int = 2
    temperature: float = 0.7
    backoff_base: float = 1.0

    def __post_init__(self):
        if self.timeout <= 0:
            raise ValueError("timeout must be > 0")
        if self.max_retries < 0:
            raise ValueError("max_retries must be >= 0")
        if self.max_parallel_calls < 1:
            raise ValueError("max_parallel_calls must be >= 1")


@dataclass
class RawCompletion:
    text: str
    provider_meta: dict = field(default_factory=dict)


# --- prompt templates ----------------------------------------------------------

_PREFIX_ARTICLES = {"A": "an", "C": "a"}


def build_prompt(page: PageText, kind: QuestionKind, n: int) -> str:
    """The generation prompt for one page.

    Comprehension and analysis share one shape; analysis adds a trailing
    instruction steering questions beyond the text itself.
    """
    if not kind.generation_supported or not kind.label_prefix:
        raise UnsupportedKind(f"cannot build a prompt for {kind.name} questions")
    if not isinstance(n, int) or isinstance(n, bool) or \
            not MIN_QUESTIONS_PER_PAGE <= n <= MAX_QUESTIONS_PER_PAGE:
        raise CountOutOfRange(
            f"question count must be in "
            f"[{MIN_QUESTIONS_PER_PAGE}, {MAX_QUESTIONS_PER_PAGE}], got {n!r}"
        )
    if not page.text.strip():
        raise EmptyPage(f"page {page.page_index} has no extractable text")
    prefix = kind.label_prefix
    article = _PREFIX_ARTICLES.get(prefix, "a")
    prompt = (
        f"Write {n} {kind.name.lower()} questions followed by answers to the "
        f"questions on a new line about the following research article: "
        f"{page.text}. Number these questions with {article} {prefix} "
        f"(like {prefix}1, {prefix}2, etc) and output each question to a new "
        f"line. Output an answer preceded with '{ANSWER_MARKER}' to a new "
        f"line after each question."
    )
    if kind.name == "Analysis":
        prompt += (
            " These questions should force the reader to reflect and expand "
            "beyond the scope of the article."
        )
    return prompt


# --- providers -----------------------------------------------------------------

_PROMPT_HEAD_RE = re.compile(r"^Write (\d+) (comprehension|analysis) questions")

_MOCK_WORDS = (
    "archive basalt cadence delta ember fjord garnet harbor isotope jasper "
    "kelp lattice meridian nebula obsidian prism quartz rhythm sediment "
    "tundra umbra vertex willow xenon yarrow zephyr atlas breccia chroma "
    "dynamo estuary flux glacier horizon inlet juniper krill lumen mantle "
    "nadir orbit pumice quasar reef summit talus updraft vortex wavelet"
).split()


class MockProvider:
    """Deterministic offline provider.

    Output is a canonical question/answer block derived from a hash of the
    prompt. Rig options ride on the endpoint URL query string:

    - ``delay_ms=N``           sleep N ms per call
    - ``fail_if_contains=S``   reject prompts containing substring S
    - ``repeat_questions=1``   same questions for every page (dedup fodder)
    """

    def __init__(self, endpoint_url: str = "mock:"):
        query = parse_qs(urlparse(endpoint_url).query)
        self.delay_ms = int(query.get("delay_ms", ["0"])[0])
        self.fail_if_contains = query.get("fail_if_contains", [None])[0]
        self.repeat_questions = query.get("repeat_questions", ["0"])[0] not in ("0", "", "false")

    def complete_once(self, prompt: str) -> tuple[str, dict]:
        if self.delay_ms:
            time.sleep(self.delay_ms / 1000.0)
        if self.fail_if_contains and self.fail_if_contains in prompt:
            raise ProviderRejected(
                f"mock provider rigged to fail (matched {self.fail_if_contains!r})"
            )
        m = _PROMPT_HEAD_RE.match(prompt)
        n = int(m.group(1)) if m else 3
        prefix = "A" if (m and m.group(2) == "analysis") else "C"
        pairs = []
        for i in range(1, n + 1):
            seed_input = f"{i}" if self.repeat_questions else f"{prompt}\x1f{i}"
            digest = hashlib.sha256(seed_input.encode("utf-8")).digest()
            # Hex-suffixed words keep distinct questions far below any sane
            # dedup threshold while reading like prose.
            w = [
                f"{_MOCK_WORDS[digest[j] % len(_MOCK_WORDS)]}{digest[j + 4]:02x}"
                for j in range(4)
            ]
            pairs.append(QAPair(
                label=f"{prefix}{i}",
                question_text=f"How does {w[0]} relate to {w[1]} near {w[2]} in this passage?",
                answer_text=f"The passage ties {w[0]} to {w[1]}, with {w[3]} setting the context.",
            ))
        meta = {"model": "mock", "prompt_sha256": hashlib.sha256(prompt.encode()).hexdigest()[:12]}
        return render_canonical(pairs), meta


class HttpProvider:
    """Chat-completion client: JSON POST with bearer-token auth."""

    def __init__(self, config: ProviderConfig):
        self.config = config
        self._client = httpx.Client(timeout=config.timeout)

    def _api_key(self) -> str | None:
        ref = self.config.credential_ref
        if not ref:
            return None
        key = os.environ.get(ref)
        if not key:
            raise CredentialMissing(
                f"environment variable {ref} is not set; it must hold the API key"
            )
        return key

    def complete_once(self, prompt: str) -> tuple[str, dict]:
        headers = {"Content-Type": "application/json"}
        key = self._api_key()
        if key:
            headers["Authorization"] = f"Bearer {key}"
        body = {
            "model": self.config.model_id,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": self.config.temperature,
        }
        started = time.monotonic()
        try:
            response = self._client.post(self.config.endpoint_url, json=body, headers=headers)
        except httpx.TimeoutException as exc:
            raise _Transient(f"request timed out after {self.config.timeout}s") from exc
        except httpx.HTTPError as exc:
            raise _Transient(f"transport error: {exc.__class__.__name__}") from exc
        latency_ms = (time.monotonic() - started) * 1000.0
        if response.status_code == 429 or response.status_code >= 500:
            raise _Transient(f"provider returned HTTP {response.status_code}")
        if response.status_code >= 400:
            raise ProviderRejected(
                f"provider returned HTTP {response.status_code}",
                status=response.status_code,
            )
        try:
            payload = response.json()
            text = payload["choices"][0]["message"]["content"]
        except (ValueError, LookupError, TypeError) as exc:
            raise ProviderRejected(f"malformed provider response: {exc}") from exc
        if not isinstance(text, str):
            raise ProviderRejected("provider response content is not a string")
        meta = {"model": payload.get("model", self.config.model_id), "latency_ms": latency_ms}
        usage = payload.get("usage")
        if isinstance(usage, dict):
            meta["usage"] = usage
        return text, meta


class _Transient(Exception):
    """Internal marker for retryable failures (timeouts, 429, 5xx)."""


def make_provider(config: ProviderConfig):
    if urlparse(config.endpoint_url).scheme == "mock":
        return MockProvider(config.endpoint_url)
    return HttpProvider(config)


# Process-wide in-flight caps, one semaphore per (endpoint, limit).
_limiters: dict[tuple[str, int], threading.BoundedSemaphore] = {}
_limiters_lock = threading.Lock()


def _limiter(config: ProviderConfig) -> threading.BoundedSemaphore:
    key = (config.endpoint_url, config.max_parallel_calls)
    with _limiters_lock:
        limiter = _limiters.get(key)
        if limiter is None:
            limiter = threading.BoundedSemaphore(config.max_parallel_calls)
            _limiters[key] = limiter
        return limiter


def _backoff_delay(attempt: int, base: float) -> float:
    # Equal jitter: half deterministic doubling, half uniform. Successive
    # delays never shrink, so "backoff increased" is observable.
    window = base * (2 ** attempt)
    return window / 2 + random.uniform(0, window / 2)


def complete(prompt: str, config: ProviderConfig, provider=None) -> RawCompletion:
    """Run one prompt through the provider with retry and backoff.

    Transient failures (timeout, HTTP 429/5xx) are retried up to
    config.max_retries times with jittered exponential backoff; hard
    rejections are raised immediately and never retried.
    """
    if provider is None:
        provider = make_provider(config)
    limiter = _limiter(config)
    delays: list[float] = []
    last: Exception | None = None
    with limiter:
        for attempt in range(config.max_retries + 1):
            try:
                text, meta = provider.complete_once(prompt)
                meta = dict(meta)
                meta["attempts"] = attempt + 1
                meta["backoff_delays"] = delays
                return RawCompletion(text=text, provider_meta=meta)
            except _Transient as exc:
                last = exc
                if attempt == config.max_retries:
                    break
                delay = _backoff_delay(attempt, config.backoff_base)
                delays.append(delay)
                time.sleep(delay)
    raise ProviderTimeout(
        f"provider failed after {config.max_retries + 1} attempts: {last}",
        attempts=config.max_retries + 1,
    )
