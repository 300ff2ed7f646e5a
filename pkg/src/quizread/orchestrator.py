"""Per-page generation pipeline: prompt → complete → parse → dedup.

Provider calls for the pages of a job may overlap (bounded by the provider
config), but pages are finalized strictly in ascending order so the
dedup-accepted pool, and therefore the output, is deterministic for a given
provider. Each page's failure stays inside its own PageResult.
"""

from __future__ import annotations

import time
import uuid
from concurrent.futures import Future, ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator

from .dedup import DedupConfig, DroppedQuestion, filter_repeats
from .errors import JobRejected, QuizreadError
from .ingest import DEFAULT_PAGE_CHAR_BUDGET, PageText, SourceDocument, truncated_page
from .prompting import (
    GenerationRequest,
    ProviderConfig,
    RawCompletion,
    build_prompt,
    complete,
    make_provider,
)
from .qa_parser import PageQuestionSet, QAPair, page_entry, parse_qa
from .store import DocumentStore


class JobStatus(str, Enum):
    Running = "running"
    Completed = "completed"
    Failed = "failed"
    PartiallyCompleted = "partially_completed"


class PageStatus(str, Enum):
    Pending = "pending"
    Done = "done"
    Errored = "errored"


@dataclass
class GenerationJob:
    job_id: str
    document_id: str
    request: GenerationRequest
    status: JobStatus = JobStatus.Running
    per_page_status: dict[int, PageStatus] = field(default_factory=dict)


@dataclass
class PageError:
    code: str
    message: str


@dataclass
class PageResult:
    page_index: int
    outcome: PageQuestionSet | PageError
    dropped: list[DroppedQuestion] = field(default_factory=list)
    latency_ms: float = 0.0

    @property
    def ok(self) -> bool:
        return isinstance(self.outcome, PageQuestionSet)


def page_result_payload(result: PageResult) -> dict:
    """JSON-friendly shape of a PageResult for the event stream and CLI."""
    payload: dict = {
        "page_index": result.page_index,
        "status": "ok" if result.ok else "error",
        "latency_ms": round(result.latency_ms, 1),
        "dropped": [
            {
                "label": d.pair.label,
                "question": d.pair.question_text,
                "matched_label": d.matched.label,
                "matched_question": d.matched.question_text,
                "score": round(d.score, 4),
            }
            for d in result.dropped
        ],
    }
    if result.ok:
        payload["set"] = page_entry(result.outcome)
        payload["error"] = None
    else:
        payload["set"] = None
        payload["error"] = {"code": result.outcome.code, "message": result.outcome.message}
    return payload


class JobExecution:
    """A validated, not-yet-run job. Iterate results() to drive it."""

    def __init__(
        self,
        job: GenerationJob,
        document: SourceDocument,
        pages: list[PageText],
        request: GenerationRequest,
        provider_config: ProviderConfig,
        dedup_config: DedupConfig,
        *,
        store: DocumentStore | None,
        provider,
        strict_parse: bool,
        page_char_budget: int,
        accepted_seed: list[QAPair],
    ):
        self.job = job
        self._document = document
        self._pages = {p.page_index: p for p in pages}
        self._request = request
        self._provider_config = provider_config
        self._dedup_config = dedup_config
        self._store = store
        self._provider = provider
        self._strict_parse = strict_parse
        self._budget = page_char_budget
        self._accepted_seed = accepted_seed

    def results(self) -> Iterator[PageResult]:
        """Yield one PageResult per requested page, ascending, as finalized.

        On exhaustion the job's final status is set and, when a store was
        given, successful pages are persisted (merged by page+kind).
        """
        job = self.job
        indices = list(job.per_page_status)
        accepted: list[QAPair] = list(self._accepted_seed)
        successes: list[PageQuestionSet] = []
        workers = max(1, min(self._provider_config.max_parallel_calls, len(indices) or 1))
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures: dict[int, Future | None] = {}
            for index in indices:
                page = self._pages[index]
                if page.text.strip():
                    prompt = build_prompt(
                        truncated_page(page, self._budget), self._request.kind,
                        self._request.questions_per_page,
                    )
                    futures[index] = pool.submit(self._timed_complete, prompt)
                else:
                    futures[index] = None  # empty page: no provider call
            for index in indices:
                result = self._finalize_page(index, futures[index], accepted)
                job.per_page_status[index] = (
                    PageStatus.Done if result.ok else PageStatus.Errored
                )
                if result.ok:
                    successes.append(result.outcome)
                    accepted.extend(result.outcome.pairs)
                yield result
        done = sum(1 for s in job.per_page_status.values() if s is PageStatus.Done)
        errored = sum(1 for s in job.per_page_status.values() if s is PageStatus.Errored)
        if errored == 0:
            job.status = JobStatus.Completed
        elif done == 0:
            job.status = JobStatus.Failed
        else:
            job.status = JobStatus.PartiallyCompleted
        if self._store is not None and successes:
            self._store.merge_results(self._document, successes)

    def _timed_complete(self, prompt: str) -> tuple[RawCompletion, float]:
        started = time.monotonic()
        raw = complete(prompt, self._provider_config, provider=self._provider)
        return raw, (time.monotonic() - started) * 1000.0

    def _finalize_page(
        self, index: int, future: Future | None, accepted: list[QAPair]
    ) -> PageResult:
        if future is None:
            return PageResult(
                page_index=index,
                outcome=PageError("EmptyPage", f"page {index} has no extractable text"),
            )
        started = time.monotonic()
        try:
            raw, call_ms = future.result()
        except QuizreadError as exc:
            return PageResult(
                page_index=index,
                outcome=PageError(exc.code, str(exc)),
                latency_ms=(time.monotonic() - started) * 1000.0,
            )
        try:
            parsed = parse_qa(
                raw.text,
                self._request.kind,
                self._request.questions_per_page,
                strict=self._strict_parse,
                page_index=index,
            )
        except QuizreadError as exc:
            return PageResult(
                page_index=index,
                outcome=PageError(exc.code, str(exc)),
                latency_ms=call_ms,
            )
        kept, dropped = filter_repeats(parsed, accepted, self._dedup_config)
        return PageResult(page_index=index, outcome=kept, dropped=dropped, latency_ms=call_ms)


def start_job(
    document: SourceDocument,
    pages: list[PageText],
    request: GenerationRequest,
    provider_config: ProviderConfig,
    dedup_config: DedupConfig | None = None,
    *,
    store: DocumentStore | None = None,
    provider=None,
    strict_parse: bool = False,
    page_char_budget: int = DEFAULT_PAGE_CHAR_BUDGET,
    accepted_seed: list[QAPair] | None = None,
) -> JobExecution:
    """Validate a request against a document and return a runnable job.

    Raises JobRejected when the request does not fit the document.
    """
    try:
        indices = request.resolve_pages(document.page_count)
    except QuizreadError as exc:
        raise JobRejected(f"request invalid for document {document.id}: {exc}") from exc
    by_index = {p.page_index: p for p in pages}
    missing = [i for i in indices if i not in by_index]
    if missing:
        raise JobRejected(f"pages {missing} missing from extraction")
    job = GenerationJob(
        job_id=uuid.uuid4().hex[:12],
        document_id=document.id,
        request=request,
        per_page_status={i: PageStatus.Pending for i in indices},
    )
    if provider is None:
        provider = make_provider(provider_config)
    return JobExecution(
        job, document, [by_index[i] for i in indices], request, provider_config,
        dedup_config or DedupConfig(), store=store, provider=provider,
        strict_parse=strict_parse, page_char_budget=page_char_budget,
        accepted_seed=list(accepted_seed or []),
    )


def run_job(
    document: SourceDocument,
    pages: list[PageText],
    request: GenerationRequest,
    provider_config: ProviderConfig,
    dedup_config: DedupConfig | None = None,
    **kwargs,
) -> tuple[GenerationJob, list[PageResult]]:
    """Convenience wrapper: run a whole job eagerly and return everything."""
    execution = start_job(document, pages, request, provider_config, dedup_config, **kwargs)
    results = list(execution.results())
    return execution.job, results


def regenerate_page(
    document: SourceDocument,
    page: PageText,
    request: GenerationRequest,
    provider_config: ProviderConfig,
    dedup_config: DedupConfig | None = None,
    accepted: list[QAPair] | None = None,
    *,
    store: DocumentStore | None = None,
    **kwargs,
) -> PageResult:
    """Re-run one page; on success replaces the stored (page, kind) set.

    ``accepted`` should hold the question pairs from all *other* pages so
    dedup still applies job-wide. A failed regeneration leaves any stored
    set untouched.
    """
    single = GenerationRequest(
        kind=request.kind,
        questions_per_page=request.questions_per_page,
        page_range=frozenset({page.page_index}),
    )
    execution = start_job(
        document, [page], single, provider_config, dedup_config,
        store=None, accepted_seed=list(accepted or []), **kwargs,
    )
    results = list(execution.results())
    result = results[0]
    if result.ok and store is not None:
        store.merge_results(document, [result.outcome])
    return result


def save_results(store: DocumentStore, document: SourceDocument, sets: list[PageQuestionSet]):
    """Persist a full sidecar (atomic replace)."""
    return store.save_results(document, sets)


def load_results(store: DocumentStore, key: str) -> list[PageQuestionSet]:
    """Load stored sets by document id or content hash; NotFound if unknown."""
    return store.load_results(key)
