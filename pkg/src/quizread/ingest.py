"""PDF ingestion: validate bytes, extract per-page text, normalize it.

Whitespace runs are collapsed to single spaces and lines joined, so page
text is a flat string ready for prompt interpolation. Image-only pages
yield empty text with has_text_layer=False rather than failing the
document; OCR is out of scope.
"""

from __future__ import annotations

import dataclasses
import hashlib
import re
from dataclasses import dataclass

from .errors import DocumentTooLarge, PageOutOfRange, UnreadableDocument
from .pdf import PdfDocument, extract_page_text

DEFAULT_MAX_UPLOAD_BYTES = 50 * 1024 * 1024
DEFAULT_PAGE_CHAR_BUDGET = 12_000

_WS_RE = re.compile(r"\s+")


@dataclass(frozen=True)
class SourceDocument:
    """An ingested PDF. ``id`` is derived from the content hash, so the same
    bytes always map to the same document."""

    id: str
    filename: str
    byte_size: int
    page_count: int
    content_hash: str


@dataclass(frozen=True)
class PageText:
    page_index: int
    text: str
    char_count: int
    has_text_layer: bool


def normalize_text(text: str) -> str:
    """Collapse all whitespace runs to single spaces and trim the ends."""
    return _WS_RE.sub(" ", text).strip()


def extract_document(
    pdf_bytes: bytes,
    filename: str,
    *,
    max_bytes: int = DEFAULT_MAX_UPLOAD_BYTES,
) -> tuple[SourceDocument, list[PageText]]:
    """Parse ``pdf_bytes`` and return document metadata plus one PageText per
    physical page, in page order.

    Raises UnreadableDocument, EncryptedDocument, EmptyDocument, or
    DocumentTooLarge.
    """
    if not pdf_bytes:
        raise UnreadableDocument("empty input")
    if len(pdf_bytes) > max_bytes:
        raise DocumentTooLarge(
            f"document is {len(pdf_bytes)} bytes; limit is {max_bytes}"
        )
    doc = PdfDocument.from_bytes(pdf_bytes)
    pages: list[PageText] = []
    for index, page in enumerate(doc.pages()):
        try:
            text = normalize_text(extract_page_text(doc, page))
        except UnreadableDocument:
            text = ""  # one damaged content stream should not sink the document
        pages.append(
            PageText(
                page_index=index,
                text=text,
                char_count=len(text),
                has_text_layer=bool(text),
            )
        )
    content_hash = hashlib.sha256(pdf_bytes).hexdigest()
    document = SourceDocument(
        id=content_hash[:16],
        filename=filename,
        byte_size=len(pdf_bytes),
        page_count=len(pages),
        content_hash=content_hash,
    )
    return document, pages


def page_text(pages: list[PageText], index: int) -> PageText:
    """The PageText with page_index == index; PageOutOfRange otherwise."""
    if not isinstance(index, int) or not 0 <= index < len(pages):
        raise PageOutOfRange(f"page {index} outside [0, {len(pages)})")
    for page in pages:
        if page.page_index == index:
            return page
    raise PageOutOfRange(f"page {index} missing from page list")


def truncated_page(page: PageText, budget: int = DEFAULT_PAGE_CHAR_BUDGET) -> PageText:
    """Copy of ``page`` cut to ``budget`` characters (provider context cap)."""
    if budget <= 0 or page.char_count <= budget:
        return page
    text = page.text[:budget].rstrip()
    return dataclasses.replace(page, text=text, char_count=len(text))
