"""Per-page text extraction from content streams.

Interprets the text-showing operators (Tj, TJ, ', ") in content-stream
order, decoding string arguments through each font's ToUnicode CMap or
simple encoding. Positioning operators become line/word separators; no
geometric reordering is attempted.
"""

from __future__ import annotations

from .encodings import BASE_ENCODINGS, STANDARD, WIN_ANSI, glyph_to_unicode
from .document import PdfDocument
from .lexer import Keyword, Lexer, Name, StreamObject, read_object

# TJ adjustments are thousandths of an em; gaps this wide read as word breaks.
_TJ_SPACE_THRESHOLD = -120

_TEXT_SHOW_OPS = {b"Tj", b"TJ", b"'", b'"'}


class FontDecoder:
    """Maps a font's string arguments to unicode text."""

    def __init__(self, doc: PdfDocument, font: dict):
        self.two_byte = False
        self.to_unicode: dict[int, str] = {}
        self.simple: dict[int, str] = {}
        subtype = font.get("Subtype")
        if subtype == Name("Type0"):
            self.two_byte = True
        cmap = doc.resolve(font.get("ToUnicode"))
        if isinstance(cmap, StreamObject):
            try:
                width = _parse_tounicode(doc.stream_bytes(cmap), self.to_unicode)
                if width == 1:
                    self.two_byte = False
            except Exception:
                self.to_unicode.clear()
        if not self.two_byte:
            self.simple = _simple_encoding_map(doc, font)

    def decode(self, raw: bytes) -> str:
        if self.two_byte:
            out = []
            for i in range(0, len(raw) - 1, 2):
                code = (raw[i] << 8) | raw[i + 1]
                out.append(self.to_unicode.get(code, ""))
            return "".join(out)
        out = []
        for code in raw:
            if code in self.to_unicode:
                out.append(self.to_unicode[code])
            elif code in self.simple:
                out.append(self.simple[code])
            else:
                out.append(chr(code))
        return "".join(out)


_LATIN_FALLBACK = {code: chr(code) for code in range(256)}


def _simple_encoding_map(doc: PdfDocument, font: dict) -> dict[int, str]:
    subtype = font.get("Subtype")
    default = STANDARD if subtype == Name("Type1") else WIN_ANSI
    encoding = doc.resolve(font.get("Encoding"))
    if isinstance(encoding, Name):
        return BASE_ENCODINGS.get(str(encoding), default)
    if isinstance(encoding, dict):
        base = doc.resolve(encoding.get("BaseEncoding"))
        table = dict(BASE_ENCODINGS.get(str(base), default)) if base else dict(default)
        differences = doc.resolve(encoding.get("Differences"))
        if isinstance(differences, list):
            code = 0
            for item in differences:
                item = doc.resolve(item)
                if isinstance(item, (int, float)):
                    code = int(item)
                elif isinstance(item, Name):
                    mapped = glyph_to_unicode(str(item))
                    if mapped:
                        table[code] = mapped
                    else:
                        table.pop(code, None)
                    code += 1
        return table
    return default if encoding is None else _LATIN_FALLBACK


def _parse_tounicode(data: bytes, out: dict[int, str]) -> int:
    """Fill ``out`` with code → text pairs; returns detected code width."""
    lex = Lexer(data, 0)
    width = 2
    width_seen = False
    while True:
        token = lex.next_token()
        if token is None:
            return width
        if not isinstance(token, Keyword):
            continue
        kw = token.value
        if kw == b"begincodespacerange":
            while True:
                t = lex.next_token()
                if t is None or (isinstance(t, Keyword) and t.value == b"endcodespacerange"):
                    break
                if isinstance(t, bytes) and t and not width_seen:
                    width = max(1, len(t))
                    width_seen = True
        elif kw == b"beginbfchar":
            while True:
                src = lex.next_token()
                if src is None or (isinstance(src, Keyword) and src.value == b"endbfchar"):
                    break
                dst = lex.next_token()
                if isinstance(src, bytes) and isinstance(dst, bytes):
                    out[int.from_bytes(src, "big")] = _utf16(dst)
        elif kw == b"beginbfrange":
            while True:
                lo = lex.next_token()
                if lo is None or (isinstance(lo, Keyword) and lo.value == b"endbfrange"):
                    break
                hi = lex.next_token()
                dst = lex.next_token()
                if isinstance(dst, Keyword) and dst.value == b"[":
                    seq = []
                    while True:
                        item = lex.next_token()
                        if item is None or (isinstance(item, Keyword) and item.value == b"]"):
                            break
                        seq.append(item)
                    if isinstance(lo, bytes) and isinstance(hi, bytes):
                        base = int.from_bytes(lo, "big")
                        for i, item in enumerate(seq):
                            if isinstance(item, bytes):
                                out[base + i] = _utf16(item)
                elif isinstance(lo, bytes) and isinstance(hi, bytes) and isinstance(dst, bytes):
                    lo_i = int.from_bytes(lo, "big")
                    hi_i = min(int.from_bytes(hi, "big"), lo_i + 65535)
                    dst_i = int.from_bytes(dst, "big") if dst else 0
                    text = _utf16(dst)
                    if len(dst) <= 2 or len(text) == 1:
                        for k in range(hi_i - lo_i + 1):
                            out[lo_i + k] = chr(dst_i + k) if dst_i + k <= 0x10FFFF else ""
                    else:
                        # Multi-char destination: increment the final unit.
                        for k in range(hi_i - lo_i + 1):
                            out[lo_i + k] = text[:-1] + chr(ord(text[-1]) + k)
        elif kw == b"endcmap":
            return width


def _utf16(raw: bytes) -> str:
    if not raw:
        return ""
    if len(raw) % 2:
        raw += b"\x00"
    try:
        return raw.decode("utf-16-be")
    except UnicodeDecodeError:
        return ""


class _TextRun:
    """Accumulates extracted fragments with line-break bookkeeping."""

    def __init__(self):
        self.parts: list[str] = []

    def show(self, text: str) -> None:
        if text:
            self.parts.append(text)

    def space(self) -> None:
        if self.parts and not self.parts[-1].endswith((" ", "\n")):
            self.parts.append(" ")

    def newline(self) -> None:
        if self.parts and not self.parts[-1].endswith("\n"):
            self.parts.append("\n")

    def text(self) -> str:
        return "".join(self.parts)


def extract_page_text(doc: PdfDocument, page: dict) -> str:
    """Text of one page dictionary, in content order with \\n line breaks."""
    content = _page_content(doc, page)
    if not content:
        return ""
    resources = doc.resolve(page.get("Resources")) or {}
    run = _TextRun()
    _run_content(doc, content, resources, run, depth=0)
    return run.text()


def _page_content(doc: PdfDocument, page: dict) -> bytes:
    contents = doc.resolve(page.get("Contents"))
    if contents is None:
        return b""
    if isinstance(contents, list):
        return b"\n".join(doc.stream_bytes(part) for part in contents)
    return doc.stream_bytes(contents)


def _run_content(doc: PdfDocument, content: bytes, resources: dict, run: _TextRun, depth: int) -> None:
    if depth > 8:
        return
    fonts_dict = doc.resolve(resources.get("Font")) or {}
    xobjects = doc.resolve(resources.get("XObject")) or {}
    decoders: dict[str, FontDecoder] = {}

    def decoder_for(name) -> FontDecoder | None:
        key = str(name)
        if key not in decoders:
            font = doc.resolve(fonts_dict.get(key)) if isinstance(fonts_dict, dict) else None
            decoders[key] = FontDecoder(doc, font) if isinstance(font, dict) else FontDecoder(doc, {})
        return decoders[key]

    lex = Lexer(content, 0)
    operands: list = []
    current: FontDecoder | None = None
    gs_stack: list[FontDecoder | None] = []
    last_ty: float | None = None
    while True:
        token = lex.next_token()
        if token is None:
            break
        if not isinstance(token, Keyword):
            operands.append(token)
            if len(operands) > 64:
                del operands[:-64]
            continue
        op = token.value
        if op == b"<<":
            lex.pos -= 2
            operands.append(read_object(lex))
            continue
        if op == b"[":
            lex.pos -= 1
            operands.append(read_object(lex))
            continue
        if op == b"BI":
            _skip_inline_image(lex)
            operands.clear()
            continue
        if op == b"Tf" and len(operands) >= 2 and isinstance(operands[-2], Name):
            current = decoder_for(operands[-2])
        elif op == b"q":
            gs_stack.append(current)
        elif op == b"Q":
            if gs_stack:
                current = gs_stack.pop()
        elif op == b"BT":
            last_ty = None
            run.newline()
        elif op in _TEXT_SHOW_OPS:
            _show(op, operands, current, run)
        elif op in (b"Td", b"TD") and len(operands) >= 2:
            tx, ty = operands[-2], operands[-1]
            if isinstance(ty, (int, float)) and ty != 0:
                run.newline()
            elif isinstance(tx, (int, float)) and tx != 0:
                run.space()
        elif op == b"T*":
            run.newline()
        elif op == b"Tm" and len(operands) >= 6:
            ty = operands[-1]
            if isinstance(ty, (int, float)):
                if last_ty is not None and ty != last_ty:
                    run.newline()
                elif last_ty is not None:
                    run.space()
                last_ty = float(ty)
        elif op == b"Do" and operands and isinstance(operands[-1], Name):
            target = doc.resolve(xobjects.get(str(operands[-1]))) if isinstance(xobjects, dict) else None
            if isinstance(target, StreamObject) and target.dictionary.get("Subtype") == Name("Form"):
                inner_res = doc.resolve(target.dictionary.get("Resources")) or resources
                _run_content(doc, doc.stream_bytes(target), inner_res, run, depth + 1)
        operands.clear()


def _show(op: bytes, operands: list, decoder: FontDecoder | None, run: _TextRun) -> None:
    decoder = decoder or _IDENTITY_DECODER
    if op == b"Tj" and operands and isinstance(operands[-1], bytes):
        run.show(decoder.decode(operands[-1]))
    elif op == b"'" and operands and isinstance(operands[-1], bytes):
        run.newline()
        run.show(decoder.decode(operands[-1]))
    elif op == b'"' and operands and isinstance(operands[-1], bytes):
        run.newline()
        run.show(decoder.decode(operands[-1]))
    elif op == b"TJ" and operands and isinstance(operands[-1], list):
        for item in operands[-1]:
            if isinstance(item, bytes):
                run.show(decoder.decode(item))
            elif isinstance(item, (int, float)) and item <= _TJ_SPACE_THRESHOLD:
                run.space()


def _skip_inline_image(lex: Lexer) -> None:
    # BI ... ID <binary> EI — scan for the EI delimiter.
    end = lex.data.find(b"EI", lex.pos)
    while end != -1:
        after = lex.data[end + 2 : end + 3]
        if not after or not after.isalnum():
            lex.pos = end + 2
            return
        end = lex.data.find(b"EI", end + 2)
    lex.pos = len(lex.data)


class _IdentityDecoder(FontDecoder):
    def __init__(self):  # no font dict; latin-1 passthrough
        self.two_byte = False
        self.to_unicode = {}
        self.simple = {}


_IDENTITY_DECODER = _IdentityDecoder()
