"""Stream filter decoders: Flate, LZW, ASCIIHex, ASCII85, RunLength.

Image-only codecs (DCT, JPX, CCITT, JBIG2) are deliberately not decoded;
streams using them carry no text.
"""

from __future__ import annotations

import base64
import zlib

from ..errors import UnreadableDocument

IMAGE_FILTERS = {"DCTDecode", "JPXDecode", "CCITTFaxDecode", "JBIG2Decode", "DCT", "CCF"}

_FILTER_ALIASES = {
    "Fl": "FlateDecode",
    "LZW": "LZWDecode",
    "AHx": "ASCIIHexDecode",
    "A85": "ASCII85Decode",
    "RL": "RunLengthDecode",
}


def decode_stream(raw: bytes, dictionary: dict, resolve) -> bytes:
    """Apply the stream's /Filter chain to ``raw``.

    ``resolve`` dereferences indirect objects (for /DecodeParms etc.).
    Raises UnreadableDocument on undecodable text-bearing filters.
    """
    filters = resolve(dictionary.get("Filter"))
    if filters is None:
        return raw
    if not isinstance(filters, list):
        filters = [filters]
    parms = resolve(dictionary.get("DecodeParms") or dictionary.get("DP"))
    if not isinstance(parms, list):
        parms = [parms] * len(filters)
    data = raw
    for name, parm in zip(filters, parms):
        name = _FILTER_ALIASES.get(str(resolve(name)), str(resolve(name)))
        parm = resolve(parm) or {}
        if name == "FlateDecode":
            data = _apply_predictor(_flate(data), parm, resolve)
        elif name == "LZWDecode":
            data = _apply_predictor(_lzw(data, int(resolve(parm.get("EarlyChange", 1)) or 1)), parm, resolve)
        elif name == "ASCIIHexDecode":
            data = _ascii_hex(data)
        elif name == "ASCII85Decode":
            data = _ascii85(data)
        elif name == "RunLengthDecode":
            data = _run_length(data)
        elif name in IMAGE_FILTERS:
            return b""  # image payload; nothing textual downstream
        elif name == "Crypt":
            raise UnreadableDocument("unsupported Crypt filter")
        else:
            raise UnreadableDocument(f"unsupported stream filter {name}")
    return data


def _flate(data: bytes) -> bytes:
    try:
        return zlib.decompress(data)
    except zlib.error:
        # Salvage what a truncated/trailing-garbage stream still yields.
        d = zlib.decompressobj()
        try:
            return d.decompress(data)
        except zlib.error as exc:
            raise UnreadableDocument(f"bad Flate stream: {exc}") from exc


def _lzw(data: bytes, early_change: int = 1) -> bytes:
    out = bytearray()
    table: list[bytes] = [bytes([i]) for i in range(256)] + [b"", b""]
    width = 9
    prev: bytes | None = None
    accum = 0
    nbits = 0
    for byte in data:
        accum = (accum << 8) | byte
        nbits += 8
        while nbits >= width:
            code = (accum >> (nbits - width)) & ((1 << width) - 1)
            nbits -= width
            if code == 256:  # clear table
                table = [bytes([i]) for i in range(256)] + [b"", b""]
                width = 9
                prev = None
                continue
            if code == 257:  # end of data
                return bytes(out)
            if prev is None:
                entry = table[code]
            elif code < len(table):
                entry = table[code]
                table.append(prev + entry[:1])
            else:
                entry = prev + prev[:1]
                table.append(entry)
            out += entry
            prev = entry
            if len(table) + early_change - 1 >= (1 << width) and width < 12:
                width += 1
    return bytes(out)


def _ascii_hex(data: bytes) -> bytes:
    end = data.find(b">")
    if end != -1:
        data = data[:end]
    digits = bytes(c for c in data if c in b"0123456789abcdefABCDEF")
    if len(digits) % 2:
        digits += b"0"
    return bytes.fromhex(digits.decode("ascii"))


def _ascii85(data: bytes) -> bytes:
    body = data.strip()
    if body.endswith(b"~>"):
        body = body[:-2]
    if body.startswith(b"<~"):
        body = body[2:]
    try:
        return base64.a85decode(b"<~" + body + b"~>", adobe=True)
    except ValueError as exc:
        raise UnreadableDocument(f"bad ASCII85 stream: {exc}") from exc


def _run_length(data: bytes) -> bytes:
    out = bytearray()
    i = 0
    n = len(data)
    while i < n:
        length = data[i]
        i += 1
        if length == 128:
            break
        if length < 128:
            out += data[i : i + length + 1]
            i += length + 1
        else:
            if i < n:
                out += bytes([data[i]]) * (257 - length)
                i += 1
    return bytes(out)


def _apply_predictor(data: bytes, parm: dict, resolve) -> bytes:
    predictor = int(resolve(parm.get("Predictor", 1)) or 1)
    if predictor <= 1:
        return data
    colors = int(resolve(parm.get("Colors", 1)) or 1)
    bpc = int(resolve(parm.get("BitsPerComponent", 8)) or 8)
    columns = int(resolve(parm.get("Columns", 1)) or 1)
    sample_bytes = max(1, (colors * bpc + 7) // 8)
    row_len = (columns * colors * bpc + 7) // 8
    if predictor == 2:  # TIFF horizontal differencing (8-bit only)
        if bpc != 8:
            return data
        out = bytearray(data)
        for row_start in range(0, len(out), row_len):
            for i in range(row_start + sample_bytes, min(row_start + row_len, len(out))):
                out[i] = (out[i] + out[i - sample_bytes]) & 0xFF
        return bytes(out)
    # PNG predictors: each row prefixed with a filter-type byte.
    out = bytearray()
    prev_row = bytearray(row_len)
    pos = 0
    while pos + 1 <= len(data):
        ftype = data[pos]
        row = bytearray(data[pos + 1 : pos + 1 + row_len])
        pos += 1 + row_len
        if ftype == 1:  # Sub
            for i in range(sample_bytes, len(row)):
                row[i] = (row[i] + row[i - sample_bytes]) & 0xFF
        elif ftype == 2:  # Up
            for i in range(len(row)):
                row[i] = (row[i] + prev_row[i]) & 0xFF
        elif ftype == 3:  # Average
            for i in range(len(row)):
                left = row[i - sample_bytes] if i >= sample_bytes else 0
                row[i] = (row[i] + ((left + prev_row[i]) >> 1)) & 0xFF
        elif ftype == 4:  # Paeth
            for i in range(len(row)):
                left = row[i - sample_bytes] if i >= sample_bytes else 0
                up = prev_row[i]
                up_left = prev_row[i - sample_bytes] if i >= sample_bytes else 0
                p = left + up - up_left
                pa, pb, pc = abs(p - left), abs(p - up), abs(p - up_left)
                if pa <= pb and pa <= pc:
                    pred = left
                elif pb <= pc:
                    pred = up
                else:
                    pred = up_left
                row[i] = (row[i] + pred) & 0xFF
        out += row
        prev_row = row
    return bytes(out)
