"""Normalization, tokenization and sentence handling for Bengali-script text.

All functions here are pure.  Offsets in :class:`Token.char_span` are code
point offsets into the string handed to :func:`tokenize`.
"""

from __future__ import annotations

import enum
import re
import unicodedata
from dataclasses import dataclass

from .errors import TextEncodingError

ZWNJ = "‌"
ZWJ = "‍"
_JOINERS = ZWNJ + ZWJ

DANDA = "।"
DOUBLE_DANDA = "॥"
TERMINATORS = frozenset({DANDA, DOUBLE_DANDA, "?", "!", "."})

_BENGALI_BLOCK = range(0x0980, 0x0A00)
_BENGALI_DIGITS = range(0x09E6, 0x09F0)

_WS_RE = re.compile(r"\s+")


class Script(enum.Enum):
    BENGALI = "Bengali"
    LATIN = "Latin"
    DIGIT = "Digit"
    PUNCT = "Punct"
    OTHER = "Other"


class SentenceType(enum.Enum):
    DECLARATIVE = "Declarative"
    INTERROGATIVE = "Interrogative"
    EXCLAMATORY = "Exclamatory"
    IMPERATIVE = "Imperative"
    UNKNOWN = "Unknown"


SENTENCE_TYPES = tuple(SentenceType)


@dataclass(frozen=True)
class Token:
    surface: str
    normalized: str
    script: Script
    char_span: tuple[int, int]

    @property
    def is_punct(self) -> bool:
        return self.script is Script.PUNCT


def _decode(raw) -> str:
    if isinstance(raw, (bytes, bytearray)):
        try:
            return bytes(raw).decode("utf-8")
        except UnicodeDecodeError as exc:
            raise TextEncodingError(exc.start) from None
    try:
        raw.encode("utf-8")
    except UnicodeEncodeError as exc:
        offset = len(raw[: exc.start].encode("utf-8", "surrogatepass"))
        raise TextEncodingError(offset, "unencodable code point") from None
    return raw


def _is_boundary_char(ch: str) -> bool:
    return ch == " " or unicodedata.category(ch)[0] in "PS"


def _strip_boundary_joiners(text: str) -> str:
    # Joiners survive only when both neighbours are word characters.
    out = []
    n = len(text)
    for i, ch in enumerate(text):
        if ch in _JOINERS:
            j = i - 1
            while j >= 0 and text[j] in _JOINERS:
                j -= 1
            k = i + 1
            while k < n and text[k] in _JOINERS:
                k += 1
            if j < 0 or k >= n or _is_boundary_char(text[j]) or _is_boundary_char(text[k]):
                continue
        out.append(ch)
    return "".join(out)


def normalize(raw: str | bytes) -> str:
    """Canonically compose ``raw``, collapse whitespace and trim it.

    Zero-width (non-)joiners are kept inside words and dropped where they
    touch whitespace, punctuation or either end of the text.

    Raises
    ------
    TextEncodingError
        If ``raw`` is not valid UTF-8; the error carries the byte offset.
    """
    text = unicodedata.normalize("NFC", _decode(raw))
    text = _WS_RE.sub(" ", text).strip(" ")
    text = _strip_boundary_joiners(text)
    # Dropping joiners can expose new spaces at the edges.
    return _WS_RE.sub(" ", text).strip(" ")


def char_script(ch: str) -> Script | None:
    """Script class of one code point; ``None`` for joiners (no vote)."""
    if ch in _JOINERS:
        return None
    cp = ord(ch)
    cat = unicodedata.category(ch)
    if cat[0] == "P":
        return Script.PUNCT
    if cp in _BENGALI_DIGITS or cat == "Nd":
        return Script.DIGIT
    if cp in _BENGALI_BLOCK:
        return Script.BENGALI
    if cat[0] == "L" and "LATIN" in unicodedata.name(ch, ""):
        return Script.LATIN
    return Script.OTHER


_SCRIPT_PRIORITY = (Script.BENGALI, Script.LATIN, Script.DIGIT, Script.PUNCT, Script.OTHER)


def _dominant_script(surface: str) -> Script:
    counts = dict.fromkeys(_SCRIPT_PRIORITY, 0)
    for ch in surface:
        s = char_script(ch)
        if s is not None:
            counts[s] += 1
    best = max(_SCRIPT_PRIORITY, key=lambda s: counts[s])
    return best if counts[best] else Script.OTHER


def make_token(surface: str, start: int) -> Token:
    script = _dominant_script(surface)
    norm = unicodedata.normalize("NFC", surface)
    if script is Script.LATIN:
        norm = norm.lower()
    return Token(surface, norm, script, (start, start + len(surface)))


def tokenize(text: str) -> list[Token]:
    """Split normalized text into word and single-character punctuation tokens.

    Words are only broken at whitespace and punctuation/symbol characters,
    never inside a grapheme cluster.
    """
    tokens: list[Token] = []
    start = None
    for i, ch in enumerate(text):
        if ch.isspace():
            if start is not None:
                tokens.append(make_token(text[start:i], start))
                start = None
        elif unicodedata.category(ch)[0] in "PS":
            if start is not None:
                tokens.append(make_token(text[start:i], start))
                start = None
            tokens.append(make_token(ch, i))
        elif start is None:
            start = i
    if start is not None:
        tokens.append(make_token(text[start:], start))
    return tokens


def split_sentences(text: str) -> list[str]:
    """Split on danda, '?', '!' and '.', keeping terminators attached.

    A Latin period only ends a sentence when followed by whitespace or the
    end of text, so decimals like ``3.5`` stay intact.
    """
    sentences = []
    buf_start = 0
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch in TERMINATORS:
            j = i
            while j < n and text[j] in TERMINATORS:
                j += 1
            if ch == "." and j - i == 1 and j < n and not text[j].isspace():
                i = j
                continue
            piece = text[buf_start:j].strip()
            if piece:
                sentences.append(piece)
            buf_start = i = j
        else:
            i += 1
    tail = text[buf_start:].strip()
    if tail:
        sentences.append(tail)
    return sentences


_CLOSERS = frozenset("\"'’”)]}»")

_TERMINAL_TYPES = {
    "?": SentenceType.INTERROGATIVE,
    "!": SentenceType.EXCLAMATORY,
    DANDA: SentenceType.DECLARATIVE,
    DOUBLE_DANDA: SentenceType.DECLARATIVE,
    ".": SentenceType.DECLARATIVE,
}


def detect_sentence_type(tokens: list[Token]) -> SentenceType:
    """Sentence type from terminal punctuation (closing quotes are skipped).

    Imperatives carry no punctuation cue and come back as ``UNKNOWN``.
    """
    i = len(tokens) - 1
    while i >= 0 and tokens[i].is_punct and tokens[i].surface in _CLOSERS:
        i -= 1
    if i < 0 or not tokens[i].is_punct:
        return SentenceType.UNKNOWN
    return _TERMINAL_TYPES.get(tokens[i].surface, SentenceType.UNKNOWN)
