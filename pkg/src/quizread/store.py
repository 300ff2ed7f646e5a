"""Filesystem document store, keyed by content hash.

Layout: ``<root>/<content_hash>/document.pdf`` plus ``meta.json`` and the
``questions.quiz.json`` sidecar. All writes go through write-temp-then-rename
so readers never observe a half-written file.
"""

from __future__ import annotations

import json
import os
import tempfile
import threading
from pathlib import Path

from .errors import NotFound, StorageFailure
from .ingest import PageText, SourceDocument, extract_document
from .qa_parser import PageQuestionSet, parse_sidecar, serialize_sidecar

_PDF_NAME = "document.pdf"
_META_NAME = "meta.json"
_SIDECAR_NAME = "questions.quiz.json"


class DocumentStore:
    def __init__(self, root: str | Path, *, max_bytes: int | None = None):
        self.root = Path(root)
        self.max_bytes = max_bytes
        self._lock = threading.RLock()  # reentrant: merge holds it across save
        self._ids: dict[str, str] = {}  # document id -> content_hash
        self._pages: dict[str, list[PageText]] = {}
        try:
            self.root.mkdir(parents=True, exist_ok=True)
        except OSError as exc:
            raise StorageFailure(f"cannot create store root {self.root}: {exc}") from exc
        self._scan()

    def _scan(self) -> None:
        for meta_path in self.root.glob(f"*/{_META_NAME}"):
            try:
                meta = json.loads(meta_path.read_text("utf-8"))
                self._ids[meta["id"]] = meta["content_hash"]
            except (OSError, ValueError, KeyError):
                continue  # skip damaged entries; they can be re-uploaded

    # -- documents -------------------------------------------------------------

    def put_document(self, pdf_bytes: bytes, filename: str) -> tuple[SourceDocument, list[PageText], bool]:
        """Ingest and persist; idempotent by content hash.

        Returns (document, pages, created) where created is False when the
        same bytes were uploaded before.
        """
        kwargs = {"max_bytes": self.max_bytes} if self.max_bytes else {}
        document, pages = extract_document(pdf_bytes, filename, **kwargs)
        with self._lock:
            existing = self._ids.get(document.id)
            if existing == document.content_hash and self._dir(document.content_hash).exists():
                self._pages.setdefault(document.content_hash, pages)
                return self._load_meta(document.content_hash), self._pages[document.content_hash], False
            directory = self._dir(document.content_hash)
            try:
                directory.mkdir(parents=True, exist_ok=True)
                _atomic_write_bytes(directory / _PDF_NAME, pdf_bytes)
                meta = {
                    "id": document.id,
                    "filename": document.filename,
                    "byte_size": document.byte_size,
                    "page_count": document.page_count,
                    "content_hash": document.content_hash,
                }
                _atomic_write_bytes(
                    directory / _META_NAME,
                    json.dumps(meta, indent=2, sort_keys=True).encode("utf-8"),
                )
            except OSError as exc:
                raise StorageFailure(f"cannot persist document: {exc}") from exc
            self._ids[document.id] = document.content_hash
            self._pages[document.content_hash] = pages
        return document, pages, True

    def _dir(self, content_hash: str) -> Path:
        return self.root / content_hash

    def _resolve_hash(self, key: str) -> str:
        """Accepts a document id or a full content hash."""
        if key in self._ids:
            return self._ids[key]
        if (self.root / key / _META_NAME).exists():
            return key
        raise NotFound(f"unknown document {key!r}")

    def _load_meta(self, content_hash: str) -> SourceDocument:
        meta_path = self._dir(content_hash) / _META_NAME
        try:
            meta = json.loads(meta_path.read_text("utf-8"))
        except (OSError, ValueError) as exc:
            raise NotFound(f"document metadata unreadable: {exc}") from exc
        return SourceDocument(
            id=meta["id"],
            filename=meta["filename"],
            byte_size=meta["byte_size"],
            page_count=meta["page_count"],
            content_hash=meta["content_hash"],
        )

    def get_document(self, key: str) -> SourceDocument:
        return self._load_meta(self._resolve_hash(key))

    def pdf_bytes(self, key: str) -> bytes:
        path = self._dir(self._resolve_hash(key)) / _PDF_NAME
        try:
            return path.read_bytes()
        except OSError as exc:
            raise NotFound(f"stored PDF missing: {exc}") from exc

    def pages(self, key: str) -> list[PageText]:
        """Extracted pages, re-derived from stored bytes on first access."""
        content_hash = self._resolve_hash(key)
        with self._lock:
            cached = self._pages.get(content_hash)
        if cached is not None:
            return cached
        document, pages = extract_document(
            self.pdf_bytes(content_hash), self._load_meta(content_hash).filename,
            **({"max_bytes": self.max_bytes} if self.max_bytes else {}),
        )
        with self._lock:
            self._pages[content_hash] = pages
        return pages

    # -- sidecars ---------------------------------------------------------------

    def save_results(self, document: SourceDocument, sets: list[PageQuestionSet]) -> Path:
        """Atomically persist the full sidecar for a document."""
        text = serialize_sidecar(document, sets)
        path = self._dir(document.content_hash) / _SIDECAR_NAME
        if not path.parent.exists():
            raise NotFound(f"document {document.id} not in store")
        try:
            with self._lock:
                _atomic_write_bytes(path, text.encode("utf-8"))
        except OSError as exc:
            raise StorageFailure(f"cannot write sidecar: {exc}") from exc
        return path

    def load_results(self, key: str) -> list[PageQuestionSet]:
        """Stored question sets; empty list when nothing was generated yet."""
        content_hash = self._resolve_hash(key)
        path = self._dir(content_hash) / _SIDECAR_NAME
        if not path.exists():
            return []
        try:
            text = path.read_text("utf-8")
        except OSError as exc:
            raise StorageFailure(f"cannot read sidecar: {exc}") from exc
        _, sets = parse_sidecar(text)
        return sets

    def merge_results(
        self, document: SourceDocument, new_sets: list[PageQuestionSet]
    ) -> list[PageQuestionSet]:
        """Replace stored sets keyed by (page_index, kind) and persist."""
        with self._lock:
            merged = {
                (s.page_index, s.kind.name): s for s in self._load_unlocked(document)
            }
            for qset in new_sets:
                merged[(qset.page_index, qset.kind.name)] = qset
            ordered = [merged[k] for k in sorted(merged)]
            self.save_results(document, ordered)
        return ordered

    def _load_unlocked(self, document: SourceDocument) -> list[PageQuestionSet]:
        path = self._dir(document.content_hash) / _SIDECAR_NAME
        if not path.exists():
            return []
        _, sets = parse_sidecar(path.read_text("utf-8"))
        return sets


def _atomic_write_bytes(path: Path, data: bytes) -> None:
    fd, tmp_name = tempfile.mkstemp(dir=str(path.parent), prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(data)
        os.replace(tmp_name, path)
    finally:
        if os.path.exists(tmp_name):
            os.unlink(tmp_name)
