"""PDF file structure: cross-reference parsing, object loading, page tree.

Handles classic xref tables, xref streams (PDF 1.5+), hybrid files,
incremental updates, and object streams. A last-resort repair scan
rebuilds the object map for files with broken cross-reference data.
"""

from __future__ import annotations

import re

from ..errors import EmptyDocument, EncryptedDocument, UnreadableDocument
from .filters import decode_stream
from .lexer import Keyword, Lexer, Name, Ref, StreamObject, read_object

_OBJ_RE = re.compile(rb"(\d{1,10})\s+(\d{1,5})\s+obj\b")
_INHERITABLE = ("Resources", "MediaBox", "CropBox", "Rotate")
_MAX_PAGES = 50_000


class PdfDocument:
    """Parsed PDF: object access plus an ordered page list."""

    def __init__(self, data: bytes):
        self.data = data
        # object number -> ("file", offset) or ("objstm", stream_num, index)
        self._xref: dict[int, tuple] = {}
        self.trailer: dict = {}
        self._cache: dict[int, object] = {}
        self._objstm_cache: dict[int, dict[int, object]] = {}
        self._load()

    # -- construction ---------------------------------------------------------

    @classmethod
    def from_bytes(cls, data: bytes) -> "PdfDocument":
        if not data or b"%PDF-" not in data[:1024]:
            raise UnreadableDocument("missing %PDF header")
        return cls(data)

    def _load(self) -> None:
        try:
            self._load_xref_chain()
        except (EncryptedDocument, EmptyDocument):
            raise
        except Exception:
            self._xref.clear()
            self.trailer = {}
        if not self._xref or "Root" not in self.trailer:
            self._repair_scan()
        if "Encrypt" in self.trailer:
            raise EncryptedDocument("document is password-protected")
        if "Root" not in self.trailer:
            raise UnreadableDocument("no document catalog")

    def _load_xref_chain(self) -> None:
        tail = self.data[-2048:]
        idx = tail.rfind(b"startxref")
        if idx == -1:
            raise UnreadableDocument("startxref not found")
        lex = Lexer(tail, idx + len(b"startxref"))
        offset = lex.next_token()
        if not isinstance(offset, int):
            raise UnreadableDocument("bad startxref offset")
        seen: set[int] = set()
        while offset is not None and 0 <= offset < len(self.data) and offset not in seen:
            seen.add(offset)
            lex = Lexer(self.data, offset)
            lex.skip_whitespace()
            if self.data[lex.pos : lex.pos + 4] == b"xref":
                trailer = self._parse_xref_table(lex)
            else:
                trailer = self._parse_xref_stream(offset)
            for key in ("Root", "Info", "Encrypt", "ID"):
                if key in trailer and key not in self.trailer:
                    self.trailer[key] = trailer[key]
            # Hybrid files keep extra entries in an xref stream.
            xref_stm = trailer.get("XRefStm")
            if isinstance(xref_stm, int) and xref_stm not in seen:
                seen.add(xref_stm)
                self._parse_xref_stream(xref_stm)
            offset = trailer.get("Prev")
            if not isinstance(offset, int):
                offset = None

    def _parse_xref_table(self, lex: Lexer) -> dict:
        lex.pos += 4  # consume "xref"
        while True:
            lex.skip_whitespace()
            if self.data[lex.pos : lex.pos + 7] == b"trailer":
                lex.pos += 7
                trailer = read_object(lex)
                return trailer if isinstance(trailer, dict) else {}
            start = lex.next_token()
            count = lex.next_token()
            if not isinstance(start, int) or not isinstance(count, int):
                raise UnreadableDocument("malformed xref subsection header")
            lex.skip_whitespace()
            for i in range(count):
                entry = self.data[lex.pos : lex.pos + 20]
                m = re.match(rb"(\d{10})\s+(\d{5})\s+([nf])", entry)
                if not m:
                    raise UnreadableDocument("malformed xref entry")
                if m.group(3) == b"n":
                    num = start + i
                    if num not in self._xref:
                        self._xref[num] = ("file", int(m.group(1)))
                lex.pos += len(m.group(0))
                while lex.pos < len(self.data) and self.data[lex.pos] in b" \r\n":
                    lex.pos += 1

    def _parse_xref_stream(self, offset: int) -> dict:
        obj = self._parse_object_at(offset)
        if not isinstance(obj, StreamObject):
            raise UnreadableDocument("expected xref stream")
        info = obj.dictionary
        data = decode_stream(obj.raw, info, self.resolve)
        widths = [int(w) for w in self.resolve(info.get("W", []))]
        if len(widths) < 3:
            raise UnreadableDocument("bad xref stream /W")
        size = int(self.resolve(info.get("Size", 0)) or 0)
        index = self.resolve(info.get("Index")) or [0, size]
        entry_len = sum(widths)
        pos = 0
        for section in range(0, len(index) - 1, 2):
            start, count = int(index[section]), int(index[section + 1])
            for i in range(count):
                if pos + entry_len > len(data):
                    break
                fields = []
                for w in widths:
                    fields.append(int.from_bytes(data[pos : pos + w], "big") if w else None)
                    pos += w
                ftype = fields[0] if widths[0] else 1
                num = start + i
                if num in self._xref:
                    continue
                if ftype == 1:
                    self._xref[num] = ("file", fields[1])
                elif ftype == 2:
                    self._xref[num] = ("objstm", fields[1], fields[2])
        return info

    def _repair_scan(self) -> None:
        """Rebuild the object map by scanning for ``N G obj`` markers."""
        self._xref.clear()
        self._cache.clear()
        for m in _OBJ_RE.finditer(self.data):
            # Later occurrences win: incremental updates append newer objects.
            self._xref[int(m.group(1))] = ("file", m.start())
        if "Root" in self.trailer or not self._xref:
            return
        # Recover the catalog from a trailer dict anywhere, else by type scan.
        for m in re.finditer(rb"trailer", self.data):
            lex = Lexer(self.data, m.end())
            obj = read_object(lex)
            if isinstance(obj, dict) and "Root" in obj:
                if "Encrypt" in obj and "Encrypt" not in self.trailer:
                    self.trailer["Encrypt"] = obj["Encrypt"]
                self.trailer["Root"] = obj["Root"]
                return
        for num in sorted(self._xref):
            try:
                obj = self.get_object(num)
            except UnreadableDocument:
                continue
            inner = obj.dictionary if isinstance(obj, StreamObject) else obj
            if isinstance(inner, dict) and inner.get("Type") == Name("Catalog"):
                self.trailer["Root"] = Ref(num, 0)
                return

    # -- object access ----------------------------------------------------------

    def resolve(self, obj, _depth: int = 0):
        """Dereference Refs (recursively, with a cycle guard)."""
        while isinstance(obj, Ref):
            if _depth > 32:
                raise UnreadableDocument("reference cycle")
            obj = self.get_object(obj.num, obj.gen)
            _depth += 1
        return obj

    def get_object(self, num: int, gen: int = 0):
        if num in self._cache:
            return self._cache[num]
        entry = self._xref.get(num)
        if entry is None:
            return None
        if entry[0] == "file":
            obj = self._parse_object_at(entry[1], expect_num=num)
        else:
            obj = self._object_from_stream(entry[1], entry[2], num)
        self._cache[num] = obj
        return obj

    def _parse_object_at(self, offset: int, expect_num: int | None = None):
        if not 0 <= offset < len(self.data):
            raise UnreadableDocument("object offset out of bounds")
        lex = Lexer(self.data, offset)
        num = lex.next_token()
        gen = lex.next_token()
        kw = lex.next_token()
        if not (isinstance(num, int) and isinstance(gen, int)
                and isinstance(kw, Keyword) and kw.value == b"obj"):
            # Off-by-a-little offsets are common in the wild; resync nearby.
            window = self.data[max(0, offset - 64) : offset + 1024]
            m = _OBJ_RE.search(window)
            if not m:
                raise UnreadableDocument("object header not found")
            lex = Lexer(self.data, max(0, offset - 64) + m.end())
            num = int(m.group(1))
        if expect_num is not None and num != expect_num:
            pass  # trust the xref's intent; content matters more than the label
        obj = read_object(lex)
        lex.skip_whitespace()
        if isinstance(obj, dict) and self.data[lex.pos : lex.pos + 6] == b"stream":
            return self._read_stream_payload(lex, obj)
        return obj

    def _read_stream_payload(self, lex: Lexer, dictionary: dict) -> StreamObject:
        pos = lex.pos + 6
        if self.data[pos : pos + 2] == b"\r\n":
            pos += 2
        elif self.data[pos : pos + 1] in (b"\n", b"\r"):
            pos += 1
        length = self.resolve(dictionary.get("Length"))
        raw = None
        if isinstance(length, int) and 0 <= length <= len(self.data) - pos:
            raw = self.data[pos : pos + length]
            tail = self.data[pos + length : pos + length + 20]
            if b"endstream" not in tail:
                raw = None  # /Length lied; fall through to the scan
        if raw is None:
            end = self.data.find(b"endstream", pos)
            if end == -1:
                raise UnreadableDocument("unterminated stream")
            raw = self.data[pos:end].rstrip(b"\r\n")
        return StreamObject(dictionary, raw)

    def _object_from_stream(self, stream_num: int, index: int, want_num: int):
        objects = self._objstm_cache.get(stream_num)
        if objects is None:
            objects = self._parse_object_stream(stream_num)
            self._objstm_cache[stream_num] = objects
        return objects.get(want_num)

    def _parse_object_stream(self, stream_num: int) -> dict[int, object]:
        container = self.get_object(stream_num)
        if not isinstance(container, StreamObject):
            raise UnreadableDocument("object stream missing")
        info = container.dictionary
        data = decode_stream(container.raw, info, self.resolve)
        count = int(self.resolve(info.get("N", 0)) or 0)
        first = int(self.resolve(info.get("First", 0)) or 0)
        header = Lexer(data, 0)
        pairs = []
        for _ in range(count):
            num = header.next_token()
            off = header.next_token()
            if not isinstance(num, int) or not isinstance(off, int):
                break
            pairs.append((num, off))
        out: dict[int, object] = {}
        for num, off in pairs:
            out[num] = read_object(Lexer(data, first + off))
        return out

    # -- pages -----------------------------------------------------------------

    def pages(self) -> list[dict]:
        """Ordered page dictionaries with inheritable attributes resolved."""
        catalog = self.resolve(self.trailer.get("Root"))
        if not isinstance(catalog, dict):
            raise UnreadableDocument("catalog unreadable")
        root = self.resolve(catalog.get("Pages"))
        leaves: list[dict] = []
        if isinstance(root, dict):
            self._walk_pages(root, {}, leaves, set(), 0)
        if not leaves:
            # Repair path: some damaged files lose the tree but keep Page objects.
            for num in sorted(self._xref):
                try:
                    obj = self.get_object(num)
                except UnreadableDocument:
                    continue
                if isinstance(obj, dict) and obj.get("Type") == Name("Page"):
                    leaves.append(dict(obj))
        if not leaves:
            raise EmptyDocument("document has no pages")
        return leaves

    def _walk_pages(self, node: dict, inherited: dict, out: list, seen: set, depth: int) -> None:
        if depth > 64 or len(out) >= _MAX_PAGES:
            return
        passed = dict(inherited)
        for key in _INHERITABLE:
            if key in node:
                passed[key] = node[key]
        node_type = node.get("Type")
        kids = self.resolve(node.get("Kids"))
        if node_type == Name("Page") or (kids is None and "Contents" in node):
            page = dict(passed)
            page.update(node)
            out.append(page)
            return
        if not isinstance(kids, list):
            return
        for kid in kids:
            marker = kid if isinstance(kid, Ref) else None
            if marker is not None:
                if (marker.num, marker.gen) in seen:
                    continue
                seen.add((marker.num, marker.gen))
            resolved = self.resolve(kid)
            if isinstance(resolved, dict):
                self._walk_pages(resolved, passed, out, seen, depth + 1)

    def stream_bytes(self, obj) -> bytes:
        """Fully decoded payload of a stream object (or b'' otherwise)."""
        obj = self.resolve(obj)
        if not isinstance(obj, StreamObject):
            return b""
        return decode_stream(obj.raw, obj.dictionary, self.resolve)
