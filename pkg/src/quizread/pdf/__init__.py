"""Minimal PDF reading stack: file structure, filters, per-page text."""

from .document import PdfDocument
from .text import extract_page_text

__all__ = ["PdfDocument", "extract_page_text"]
