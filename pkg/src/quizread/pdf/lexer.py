"""Tokenizer and object reader for PDF syntax.

One lexer serves both the file-level object graph and page content streams;
the two differ only in which keywords the caller treats as operators.
"""

from __future__ import annotations

from dataclasses import dataclass

WHITESPACE = b"\x00\t\n\x0c\r "
DELIMITERS = b"()<>[]{}/%"


class Name(str):
    """A PDF name object (/Foo). Subclass of str so dict keys stay ergonomic."""

    __slots__ = ()


@dataclass(frozen=True)
class Ref:
    """Indirect object reference (``N G R``)."""

    num: int
    gen: int


@dataclass(frozen=True)
class Keyword:
    """Bare keyword token: operators, obj/endobj/stream markers, etc."""

    value: bytes


@dataclass
class StreamObject:
    """Stream dictionary plus its raw (still encoded) payload bytes."""

    dictionary: dict
    raw: bytes


_ESCAPES = {
    ord("n"): b"\n",
    ord("r"): b"\r",
    ord("t"): b"\t",
    ord("b"): b"\b",
    ord("f"): b"\f",
    ord("("): b"(",
    ord(")"): b")",
    ord("\\"): b"\\",
}


def _is_regular(byte: int) -> bool:
    return byte not in WHITESPACE and byte not in DELIMITERS


class Lexer:
    """Single-pass reader over a bytes buffer with a movable position."""

    def __init__(self, data: bytes, pos: int = 0):
        self.data = data
        self.pos = pos

    def at_end(self) -> bool:
        return self.pos >= len(self.data)

    def skip_whitespace(self) -> None:
        data, n = self.data, len(self.data)
        while self.pos < n:
            c = data[self.pos]
            if c in WHITESPACE:
                self.pos += 1
            elif c == 0x25:  # '%' comment runs to end of line
                eol = data.find(b"\n", self.pos)
                eol2 = data.find(b"\r", self.pos)
                if eol == -1 or (eol2 != -1 and eol2 < eol):
                    eol = eol2
                self.pos = n if eol == -1 else eol + 1
            else:
                return

    def peek_byte(self) -> int:
        return self.data[self.pos] if self.pos < len(self.data) else -1

    # -- token level --------------------------------------------------------

    def next_token(self):
        """Return the next token, or None at end of input.

        Token kinds: int, float, bool, None (null), bytes (string literal or
        hex string), Name, Keyword, and the single-character structural
        Keywords ``[ ] << >> { }``.
        """
        self.skip_whitespace()
        if self.at_end():
            return None
        data = self.data
        c = data[self.pos]
        if c == 0x2F:  # '/'
            return self._read_name()
        if c == 0x28:  # '('
            return self._read_literal_string()
        if c == 0x3C:  # '<'
            if data[self.pos : self.pos + 2] == b"<<":
                self.pos += 2
                return Keyword(b"<<")
            return self._read_hex_string()
        if c == 0x3E:  # '>'
            if data[self.pos : self.pos + 2] == b">>":
                self.pos += 2
                return Keyword(b">>")
            self.pos += 1  # stray '>' — skip
            return self.next_token()
        if c in b"[]{}":
            self.pos += 1
            return Keyword(bytes([c]))
        if c in b"+-.0123456789":
            return self._read_number()
        if c == 0x29:  # stray ')' — tolerate
            self.pos += 1
            return self.next_token()
        return self._read_keyword()

    def _read_name(self) -> Name:
        data = self.data
        self.pos += 1  # consume '/'
        out = bytearray()
        while self.pos < len(data):
            c = data[self.pos]
            if not _is_regular(c):
                break
            if c == 0x23 and self.pos + 2 < len(data):  # '#' hex escape
                try:
                    out.append(int(data[self.pos + 1 : self.pos + 3], 16))
                    self.pos += 3
                    continue
                except ValueError:
                    pass
            out.append(c)
            self.pos += 1
        return Name(out.decode("latin-1"))

    def _read_literal_string(self) -> bytes:
        data = self.data
        self.pos += 1  # consume '('
        out = bytearray()
        depth = 1
        n = len(data)
        while self.pos < n:
            c = data[self.pos]
            if c == 0x5C:  # backslash
                self.pos += 1
                if self.pos >= n:
                    break
                e = data[self.pos]
                if e in _ESCAPES:
                    out += _ESCAPES[e]
                    self.pos += 1
                elif 0x30 <= e <= 0x37:  # octal, up to 3 digits
                    digits = bytearray()
                    while self.pos < n and len(digits) < 3 and 0x30 <= data[self.pos] <= 0x37:
                        digits.append(data[self.pos])
                        self.pos += 1
                    out.append(int(digits, 8) & 0xFF)
                elif e in b"\r\n":  # line continuation
                    self.pos += 1
                    if e == 0x0D and self.pos < n and data[self.pos] == 0x0A:
                        self.pos += 1
                else:
                    out.append(e)
                    self.pos += 1
            elif c == 0x28:
                depth += 1
                out.append(c)
                self.pos += 1
            elif c == 0x29:
                depth -= 1
                self.pos += 1
                if depth == 0:
                    break
                out.append(c)
            else:
                out.append(c)
                self.pos += 1
        return bytes(out)

    def _read_hex_string(self) -> bytes:
        data = self.data
        self.pos += 1  # consume '<'
        digits = bytearray()
        n = len(data)
        while self.pos < n:
            c = data[self.pos]
            self.pos += 1
            if c == 0x3E:  # '>'
                break
            if c in b"0123456789abcdefABCDEF":
                digits.append(c)
        if len(digits) % 2:
            digits.append(0x30)
        return bytes.fromhex(digits.decode("ascii"))

    def _read_number(self):
        data = self.data
        start = self.pos
        n = len(data)
        self.pos += 1
        while self.pos < n and data[self.pos] in b"0123456789.+-eE":
            self.pos += 1
        text = data[start : self.pos]
        try:
            if b"." in text or b"e" in text or b"E" in text:
                return float(text)
            return int(text)
        except ValueError:
            try:
                return float(text.rstrip(b".+-eE") or b"0")
            except ValueError:
                return 0

    def _read_keyword(self) -> Keyword:
        data = self.data
        start = self.pos
        n = len(data)
        while self.pos < n and _is_regular(data[self.pos]):
            self.pos += 1
        if self.pos == start:  # lone delimiter we don't handle — skip it
            self.pos += 1
        return Keyword(data[start : self.pos])


def read_object(lex: Lexer):
    """Read one complete object (resolving ``N G R`` reference triples).

    Returns python values: int, float, bool, None, bytes, Name, Ref,
    list, dict, or Keyword for bare keywords the caller must interpret.
    """
    token = lex.next_token()
    return _continue_object(lex, token)


def _continue_object(lex: Lexer, token):
    if token is None:
        return None
    if isinstance(token, Keyword):
        if token.value == b"<<":
            return _read_dict_body(lex)
        if token.value == b"[":
            return _read_array_body(lex)
        if token.value == b"true":
            return True
        if token.value == b"false":
            return False
        if token.value == b"null":
            return None
        return token
    if isinstance(token, int):
        # Possible "N G R" reference: look ahead non-destructively.
        save = lex.pos
        second = lex.next_token()
        if isinstance(second, int):
            third = lex.next_token()
            if isinstance(third, Keyword) and third.value == b"R":
                return Ref(token, second)
        lex.pos = save
        return token
    return token


def _read_dict_body(lex: Lexer) -> dict:
    out: dict = {}
    while True:
        token = lex.next_token()
        if token is None or (isinstance(token, Keyword) and token.value == b">>"):
            return out
        if not isinstance(token, Name):
            continue  # tolerate junk keys
        out[str(token)] = read_object(lex)


def _read_array_body(lex: Lexer) -> list:
    out = []
    while True:
        token = lex.next_token()
        if token is None or (isinstance(token, Keyword) and token.value == b"]"):
            return out
        out.append(_continue_object(lex, token))
