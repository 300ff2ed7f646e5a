"""HTTP surface: upload, generation jobs, SSE progress, stored questions.

All failures leave through one ApiError envelope:
``{"http_status": int, "code": str, "message": str}``. Progressive results
are server-sent events named "page" (one per finalized page) and "done"
(final job status); reconnecting clients get already-finalized pages
replayed first.
"""

from __future__ import annotations

import json
import os
import threading
from pathlib import Path

from fastapi import FastAPI, Request, UploadFile, File
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, Response, StreamingResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .config import AppConfig
from .errors import JobAlreadyRunning, NotFound, QuizreadError
from .ingest import SourceDocument
from .orchestrator import JobExecution, page_result_payload, start_job
from .prompting import GenerationRequest
from .qa_parser import page_entry
from .store import DocumentStore
from .taxonomy import kind_from_name

_ERROR_STATUS = {
    "UnreadableDocument": 415,
    "DocumentTooLarge": 413,
    "EncryptedDocument": 422,
    "EmptyDocument": 422,
    "NotFound": 404,
    "JobAlreadyRunning": 409,
    "CountOutOfRange": 400,
    "UnsupportedKind": 400,
    "PageOutOfRange": 400,
    "JobRejected": 400,
    "EmptyPage": 400,
    "InvalidSidecar": 500,
    "StorageFailure": 500,
    "CredentialMissing": 500,
}


def _error_response(status: int, code: str, message: str) -> JSONResponse:
    return JSONResponse(
        status_code=status,
        content={"http_status": status, "code": code, "message": message},
    )


class JobHandle:
    """Append-only event log for one job plus subscriber wakeups."""

    def __init__(self, execution: JobExecution):
        self.execution = execution
        self.job = execution.job
        self._events: list[dict] = []
        self._done = False
        self._cond = threading.Condition()

    def append(self, payload: dict) -> None:
        with self._cond:
            self._events.append(payload)
            self._cond.notify_all()

    def finish(self) -> None:
        with self._cond:
            self._done = True
            self._cond.notify_all()

    def status_payload(self) -> dict:
        return {
            "job_id": self.job.job_id,
            "document_id": self.job.document_id,
            "status": self.job.status.value,
            "per_page_status": {
                str(i): s.value for i, s in sorted(self.job.per_page_status.items())
            },
        }

    def subscribe(self):
        """Yield ("page", payload) for every finalized page exactly once
        (replay then live), then ("done", status)."""
        sent = 0
        while True:
            with self._cond:
                while len(self._events) == sent and not self._done:
                    self._cond.wait(timeout=30.0)
                batch = self._events[sent:]
                done = self._done
            for payload in batch:
                yield "page", payload
            sent += len(batch)
            if done and sent == len(self._events):
                yield "done", self.status_payload()
                return


class JobManager:
    """One active job per document; finished handles stay for replay."""

    def __init__(self, store: DocumentStore, config: AppConfig, provider=None):
        self.store = store
        self.config = config
        self.provider = provider
        self._lock = threading.Lock()
        self._active: set[str] = set()
        self._handles: dict[str, JobHandle] = {}

    def start(self, document: SourceDocument, pages, request: GenerationRequest) -> JobHandle:
        with self._lock:
            if document.id in self._active:
                raise JobAlreadyRunning(
                    f"a job is already running for document {document.id}"
                )
            execution = start_job(
                document, pages, request,
                self.config.provider_config(), self.config.dedup_config(),
                store=self.store, provider=self.provider,
                strict_parse=self.config.strict_parse,
                page_char_budget=self.config.page_char_budget,
            )
            handle = JobHandle(execution)
            self._active.add(document.id)
            self._handles[handle.job.job_id] = handle
        thread = threading.Thread(
            target=self._run, args=(handle, document.id), daemon=True
        )
        thread.start()
        return handle

    def get(self, job_id: str) -> JobHandle:
        handle = self._handles.get(job_id)
        if handle is None:
            raise NotFound(f"unknown job {job_id!r}")
        return handle

    def _run(self, handle: JobHandle, document_id: str) -> None:
        try:
            for result in handle.execution.results():
                handle.append(page_result_payload(result))
        except Exception:
            from .orchestrator import JobStatus

            handle.job.status = JobStatus.Failed
        finally:
            with self._lock:
                self._active.discard(document_id)
            handle.finish()


class JobBody(BaseModel):
    kind: str
    questions_per_page: int
    pages: list[int] | None = None


def create_app(
    config: AppConfig | None = None,
    store: DocumentStore | None = None,
    provider=None,
) -> FastAPI:
    config = config or AppConfig()
    store = store or DocumentStore(config.storage_dir, max_bytes=config.max_upload_bytes)
    jobs = JobManager(store, config, provider=provider)

    app = FastAPI(title="quizread", version="0.1.0")
    app.state.config = config
    app.state.store = store
    app.state.jobs = jobs
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    @app.exception_handler(QuizreadError)
    async def quizread_error_handler(_request: Request, exc: QuizreadError):
        status = _ERROR_STATUS.get(exc.code, 500)
        return _error_response(status, exc.code, str(exc))

    @app.exception_handler(RequestValidationError)
    async def validation_error_handler(_request: Request, exc: RequestValidationError):
        return _error_response(400, "InvalidRequest", str(exc.errors()[:3]))

    @app.post("/api/documents")
    def upload_document(file: UploadFile = File(...)):
        data = file.file.read()
        document, _pages, created = store.put_document(data, file.filename or "upload.pdf")
        body = {
            "document_id": document.id,
            "filename": document.filename,
            "page_count": document.page_count,
        }
        return JSONResponse(status_code=201 if created else 200, content=body)

    @app.post("/api/documents/{document_id}/jobs", status_code=202)
    def create_job(document_id: str, body: JobBody):
        document = store.get_document(document_id)
        kind = kind_from_name(body.kind)
        request = GenerationRequest(
            kind=kind,
            questions_per_page=body.questions_per_page,
            page_range=frozenset(body.pages) if body.pages is not None else None,
        )
        handle = jobs.start(document, store.pages(document_id), request)
        return {"job_id": handle.job.job_id}

    @app.get("/api/jobs/{job_id}")
    def job_status(job_id: str):
        return jobs.get(job_id).status_payload()

    @app.get("/api/jobs/{job_id}/events")
    def job_events(job_id: str):
        handle = jobs.get(job_id)

        def stream():
            for name, payload in handle.subscribe():
                yield f"event: {name}\ndata: {json.dumps(payload, ensure_ascii=False)}\n\n"

        return StreamingResponse(
            stream(),
            media_type="text/event-stream",
            headers={"Cache-Control": "no-cache", "X-Accel-Buffering": "no"},
        )

    @app.get("/api/documents/{document_id}/questions")
    def get_questions(document_id: str, page: int | None = None, kind: str | None = None):
        document = store.get_document(document_id)
        sets = store.load_results(document_id)
        if page is not None:
            from .errors import PageOutOfRange

            if not 0 <= page < document.page_count:
                raise PageOutOfRange(
                    f"page {page} outside [0, {document.page_count})"
                )
            sets = [s for s in sets if s.page_index == page]
        if kind is not None:
            wanted = kind_from_name(kind)
            sets = [s for s in sets if s.kind.name == wanted.name]
        return {
            "document": {
                "document_id": document.id,
                "filename": document.filename,
                "page_count": document.page_count,
                "content_hash": document.content_hash,
            },
            "pages": [page_entry(s) for s in sets],
        }

    @app.api_route("/api/documents/{document_id}/file", methods=["GET", "HEAD"])
    def get_file(document_id: str, request: Request):
        document = store.get_document(document_id)
        data = store.pdf_bytes(document_id)
        headers = {
            "Content-Disposition": f'inline; filename="{document.filename}"',
            "Content-Length": str(len(data)),
        }
        if request.method == "HEAD":
            return Response(content=b"", media_type="application/pdf", headers=headers)
        return Response(content=data, media_type="application/pdf", headers=headers)

    ui_dir = os.environ.get("QUIZREAD_UI_DIR", "frontend/dist")
    if Path(ui_dir).is_dir():
        app.mount("/ui", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
