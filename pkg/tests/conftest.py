"""Shared fixtures: synthetic PDFs built with reportlab.

Every text fixture page k carries the literal marker "PAGE-k" so tests can
assert page order and page/question co-location.
"""

from __future__ import annotations

import io

import pytest
from PIL import Image
from reportlab.lib.pagesizes import letter
from reportlab.pdfgen import canvas

PAGE_PROSE = [
    "Tidal estuaries mix fresh river water with salt water twice a day.",
    "Basalt columns form when thick lava flows cool slowly and contract.",
    "Glacial moraines record the furthest advance of an ice sheet.",
    "Karst caves grow as groundwater dissolves limestone along fractures.",
    "Alluvial fans spread sediment where canyon streams lose their slope.",
    "Oxbow lakes remain after a meander is cut off from the channel.",
    "Drumlins align with the direction an ice sheet once travelled.",
    "Deltas build seaward wherever rivers drop more sediment than waves remove.",
    "Atolls ring the drowned summits of extinct volcanic islands.",
    "Loess plains formed from dust lifted off ice-age outwash surfaces.",
]


def make_text_pdf(num_pages: int, *, seed_text: str = "") -> bytes:
    """A PDF whose page k shows "PAGE-k" plus a few lines of prose."""
    buf = io.BytesIO()
    pdf = canvas.Canvas(buf, pagesize=letter)
    for k in range(num_pages):
        text = pdf.beginText(72, 720)
        text.textLine(f"PAGE-{k} of this fixture document.")
        text.textLine(PAGE_PROSE[k % len(PAGE_PROSE)])
        text.textLine(f"Section {k + 1} discusses figure {k + 1} in detail. {seed_text}")
        pdf.drawText(text)
        pdf.showPage()
    pdf.save()
    return buf.getvalue()


def make_mixed_pdf() -> bytes:
    """Three pages: text, image-only (rasterized), text."""
    buf = io.BytesIO()
    pdf = canvas.Canvas(buf, pagesize=letter)

    text = pdf.beginText(72, 720)
    text.textLine("PAGE-0 has a text layer.")
    pdf.drawText(text)
    pdf.showPage()

    image = Image.new("RGB", (64, 64), (200, 40, 40))
    image_buf = io.BytesIO()
    image.save(image_buf, format="PNG")
    image_buf.seek(0)
    from reportlab.lib.utils import ImageReader

    pdf.drawImage(ImageReader(image_buf), 72, 500, width=128, height=128)
    pdf.showPage()

    text = pdf.beginText(72, 720)
    text.textLine("PAGE-2 has a text layer again.")
    pdf.drawText(text)
    pdf.showPage()
    pdf.save()
    return buf.getvalue()


def make_encrypted_pdf() -> bytes:
    buf = io.BytesIO()
    pdf = canvas.Canvas(buf, pagesize=letter, encrypt="hunter2")
    text = pdf.beginText(72, 720)
    text.textLine("PAGE-0 behind a password.")
    pdf.drawText(text)
    pdf.showPage()
    pdf.save()
    return buf.getvalue()


def make_zero_page_pdf() -> bytes:
    """Hand-assembled well-formed PDF whose page tree has no pages."""
    objects = [
        b"1 0 obj\n<< /Type /Catalog /Pages 2 0 R >>\nendobj\n",
        b"2 0 obj\n<< /Type /Pages /Kids [] /Count 0 >>\nendobj\n",
    ]
    out = bytearray(b"%PDF-1.4\n")
    offsets = []
    for obj in objects:
        offsets.append(len(out))
        out += obj
    xref_at = len(out)
    out += b"xref\n0 3\n0000000000 65535 f \n"
    for off in offsets:
        out += f"{off:010d} 00000 n \n".encode()
    out += b"trailer\n<< /Size 3 /Root 1 0 R >>\nstartxref\n"
    out += str(xref_at).encode() + b"\n%%EOF\n"
    return bytes(out)


@pytest.fixture(scope="session")
def pdf3() -> bytes:
    return make_text_pdf(3)


@pytest.fixture(scope="session")
def pdf4() -> bytes:
    return make_text_pdf(4)


@pytest.fixture(scope="session")
def pdf5() -> bytes:
    return make_text_pdf(5)


@pytest.fixture(scope="session")
def pdf_mixed() -> bytes:
    return make_mixed_pdf()


@pytest.fixture(scope="session")
def pdf_encrypted() -> bytes:
    return make_encrypted_pdf()


@pytest.fixture(scope="session")
def pdf_zero_pages() -> bytes:
    return make_zero_page_pdf()


@pytest.fixture()
def pdf3_path(tmp_path, pdf3):
    path = tmp_path / "fixture3.pdf"
    path.write_bytes(pdf3)
    return path
