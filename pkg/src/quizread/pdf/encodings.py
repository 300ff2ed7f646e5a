"""Character encoding tables for simple (single-byte) fonts.

WinAnsi and MacRoman piggyback on the cp1252 / mac_roman codecs; Standard
encoding and the glyph-name table are spelled out since the stdlib has no
equivalent.
"""

from __future__ import annotations

import re


def _codec_table(codec: str) -> dict[int, str]:
    table: dict[int, str] = {}
    for code in range(256):
        try:
            table[code] = bytes([code]).decode(codec)
        except UnicodeDecodeError:
            pass
    return table


WIN_ANSI: dict[int, str] = _codec_table("cp1252")
MAC_ROMAN: dict[int, str] = _codec_table("mac_roman")

# Adobe StandardEncoding: ASCII range except quote glyphs, plus the upper set.
STANDARD: dict[int, str] = {code: chr(code) for code in range(32, 127)}
STANDARD[0x27] = "’"  # quoteright
STANDARD[0x60] = "‘"  # quoteleft
STANDARD.update({
    161: "¡", 162: "¢", 163: "£", 164: "⁄", 165: "¥",
    166: "ƒ", 167: "§", 168: "¤", 169: "'", 170: "“",
    171: "«", 172: "‹", 173: "›", 174: "ﬁ", 175: "ﬂ",
    177: "–", 178: "†", 179: "‡", 180: "·", 182: "¶",
    183: "•", 184: "‚", 185: "„", 186: "”", 187: "»",
    188: "…", 189: "‰", 191: "¿", 193: "`", 194: "´",
    195: "ˆ", 196: "˜", 197: "¯", 198: "˘", 199: "˙",
    200: "¨", 202: "˚", 203: "¸", 205: "˝", 206: "˛",
    207: "ˇ", 208: "—", 225: "Æ", 227: "ª", 232: "Ł",
    233: "Ø", 234: "Œ", 235: "º", 241: "æ", 245: "ı",
    248: "ł", 249: "ø", 250: "œ", 251: "ß",
})

BASE_ENCODINGS = {
    "WinAnsiEncoding": WIN_ANSI,
    "MacRomanEncoding": MAC_ROMAN,
    "StandardEncoding": STANDARD,
    "MacExpertEncoding": STANDARD,  # expert sets carry no prose; best effort
    "PDFDocEncoding": WIN_ANSI,
}

_ASCII_NAMES = {
    "space": " ", "exclam": "!", "quotedbl": '"', "numbersign": "#",
    "dollar": "$", "percent": "%", "ampersand": "&", "quotesingle": "'",
    "parenleft": "(", "parenright": ")", "asterisk": "*", "plus": "+",
    "comma": ",", "hyphen": "-", "period": ".", "slash": "/",
    "zero": "0", "one": "1", "two": "2", "three": "3", "four": "4",
    "five": "5", "six": "6", "seven": "7", "eight": "8", "nine": "9",
    "colon": ":", "semicolon": ";", "less": "<", "equal": "=",
    "greater": ">", "question": "?", "at": "@", "bracketleft": "[",
    "backslash": "\\", "bracketright": "]", "asciicircum": "^",
    "underscore": "_", "grave": "`", "braceleft": "{", "bar": "|",
    "braceright": "}", "asciitilde": "~",
}

_LATIN_NAMES = {
    # punctuation / typographic
    "quoteleft": "‘", "quoteright": "’", "quotedblleft": "“",
    "quotedblright": "”", "quotesinglbase": "‚", "quotedblbase": "„",
    "endash": "–", "emdash": "—", "bullet": "•",
    "ellipsis": "…", "dagger": "†", "daggerdbl": "‡",
    "perthousand": "‰", "guillemotleft": "«", "guillemotright": "»",
    "guilsinglleft": "‹", "guilsinglright": "›",
    "exclamdown": "¡", "questiondown": "¿", "periodcentered": "·",
    "fraction": "⁄", "florin": "ƒ", "section": "§",
    "paragraph": "¶", "copyright": "©", "registered": "®",
    "trademark": "™", "degree": "°", "plusminus": "±",
    "minus": "−", "multiply": "×", "divide": "÷",
    "logicalnot": "¬", "brokenbar": "¦", "mu": "µ",
    "onequarter": "¼", "onehalf": "½", "threequarters": "¾",
    "onesuperior": "¹", "twosuperior": "²", "threesuperior": "³",
    "ordfeminine": "ª", "ordmasculine": "º",
    "cent": "¢", "sterling": "£", "currency": "¤",
    "yen": "¥", "Euro": "€", "euro": "€",
    # ligatures & special letters
    "fi": "ﬁ", "fl": "ﬂ", "ff": "ﬀ", "ffi": "ﬃ", "ffl": "ﬄ",
    "AE": "Æ", "ae": "æ", "OE": "Œ", "oe": "œ",
    "Oslash": "Ø", "oslash": "ø", "Lslash": "Ł", "lslash": "ł",
    "Thorn": "Þ", "thorn": "þ", "Eth": "Ð", "eth": "ð",
    "germandbls": "ß", "dotlessi": "ı",
    # accents
    "acute": "´", "circumflex": "ˆ", "tilde": "˜",
    "macron": "¯", "breve": "˘", "dotaccent": "˙",
    "dieresis": "¨", "ring": "˚", "cedilla": "¸",
    "hungarumlaut": "˝", "ogonek": "˛", "caron": "ˇ",
}


def _accented() -> dict[str, str]:
    # Names like "Aacute"/"ccedilla" follow letter+accent composition.
    table = {}
    combos = {
        "grave": "̀", "acute": "́", "circumflex": "̂",
        "tilde": "̃", "macron": "̄", "breve": "̆",
        "dotaccent": "̇", "dieresis": "̈", "ring": "̊",
        "hungarumlaut": "̋", "caron": "̌", "cedilla": "̧",
        "ogonek": "̨",
    }
    import unicodedata

    for letter in "ACDEGILNORSTUYZacdegilnorstuyz":
        for accent, mark in combos.items():
            composed = unicodedata.normalize("NFC", letter + mark)
            if len(composed) == 1:
                table[letter + accent] = composed
    return table


_GREEK = {
    name: chr(code)
    for name, code in [
        ("Alpha", 0x391), ("Beta", 0x392), ("Gamma", 0x393), ("Delta", 0x394),
        ("Epsilon", 0x395), ("Zeta", 0x396), ("Eta", 0x397), ("Theta", 0x398),
        ("Iota", 0x399), ("Kappa", 0x39A), ("Lambda", 0x39B), ("Mu", 0x39C),
        ("Nu", 0x39D), ("Xi", 0x39E), ("Omicron", 0x39F), ("Pi", 0x3A0),
        ("Rho", 0x3A1), ("Sigma", 0x3A3), ("Tau", 0x3A4), ("Upsilon", 0x3A5),
        ("Phi", 0x3A6), ("Chi", 0x3A7), ("Psi", 0x3A8), ("Omega", 0x3A9),
        ("alpha", 0x3B1), ("beta", 0x3B2), ("gamma", 0x3B3), ("delta", 0x3B4),
        ("epsilon", 0x3B5), ("zeta", 0x3B6), ("eta", 0x3B7), ("theta", 0x3B8),
        ("iota", 0x3B9), ("kappa", 0x3BA), ("lambda", 0x3BB), ("nu", 0x3BD),
        ("xi", 0x3BE), ("omicron", 0x3BF), ("pi", 0x3C0), ("rho", 0x3C1),
        ("sigma", 0x3C3), ("sigma1", 0x3C2), ("tau", 0x3C4), ("upsilon", 0x3C5),
        ("phi", 0x3C6), ("chi", 0x3C7), ("psi", 0x3C8), ("omega", 0x3C9),
    ]
}

GLYPH_TO_UNICODE: dict[str, str] = {}
GLYPH_TO_UNICODE.update(_ASCII_NAMES)
GLYPH_TO_UNICODE.update({c: c for c in "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz"})
GLYPH_TO_UNICODE.update(_LATIN_NAMES)
GLYPH_TO_UNICODE.update(_accented())
GLYPH_TO_UNICODE.update(_GREEK)

_UNI_RE = re.compile(r"^uni([0-9A-Fa-f]{4})")
_U_RE = re.compile(r"^u([0-9A-Fa-f]{4,6})$")


def glyph_to_unicode(name: str) -> str:
    """Best-effort glyph-name → text mapping; unknown names yield ''."""
    if name in GLYPH_TO_UNICODE:
        return GLYPH_TO_UNICODE[name]
    m = _UNI_RE.match(name)
    if m:
        return chr(int(m.group(1), 16))
    m = _U_RE.match(name)
    if m:
        code = int(m.group(1), 16)
        if code <= 0x10FFFF:
            return chr(code)
    # "Xsmall", "A.alt", "one.oldstyle" style variants: map the stem.
    stem = name.split(".")[0]
    if stem != name and stem in GLYPH_TO_UNICODE:
        return GLYPH_TO_UNICODE[stem]
    return ""
