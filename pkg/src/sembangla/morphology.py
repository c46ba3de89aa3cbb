"""Root-verb extraction by suffix stripping, word-class tagging and
query-level grammatical analysis.

The suffix inventory lives in a TSV file (``tense<TAB>person<TAB>suffix``);
the packaged default covers ten tense subtypes.  Verb detection is a
pluggable predicate so an external POS tagger can replace the built-in
position/suffix heuristic.
"""

from __future__ import annotations

import enum
import unicodedata
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Callable, Iterable, Sequence

from .errors import DataError, LoadError
from .text import SentenceType, Token, detect_sentence_type, normalize


class Tense(enum.Enum):
    SIMPLE_PRESENT = "SimplePresent"
    PRESENT_CONTINUOUS = "PresentContinuous"
    PRESENT_PERFECT = "PresentPerfect"
    SIMPLE_PAST = "SimplePast"
    PAST_CONTINUOUS = "PastContinuous"
    PAST_PERFECT = "PastPerfect"
    HABITUAL_PAST = "HabitualPast"
    SIMPLE_FUTURE = "SimpleFuture"
    FUTURE_CONTINUOUS = "FutureContinuous"
    FUTURE_PERFECT = "FuturePerfect"


class Person(enum.Enum):
    FIRST = "First"
    SECOND = "Second"
    THIRD = "Third"


class WordKind(enum.Enum):
    FUNCTION = "FunctionWord"
    CONTENT = "ContentWord"


TENSES = tuple(Tense)
PERSONS = tuple(Person)
GENDER_NEUTRAL = 0.0
OBJECT_MARKERS = ("কে", "টি")


@dataclass(frozen=True)
class SuffixEntry:
    suffix: str
    tense: Tense
    person: Person | None = None


@dataclass(frozen=True)
class VerbAnalysis:
    root: str
    suffix: str
    tense: Tense
    person: Person | None = None

    @property
    def surface(self) -> str:
        return self.root + self.suffix


@dataclass(frozen=True)
class WordClassTag:
    token_index: int
    kind: WordKind


class SuffixTable:
    """Immutable suffix inventory with longest-first lookup order."""

    def __init__(self, entries: Iterable[SuffixEntry]):
        self.entries: tuple[SuffixEntry, ...] = tuple(entries)
        if not self.entries:
            raise LoadError("suffix table is empty")
        by_suffix: dict[str, list[SuffixEntry]] = {}
        seen = set()
        for e in self.entries:
            if not e.suffix:
                raise LoadError("empty suffix in table")
            if (e.suffix, e.tense) in seen:
                raise LoadError(f"duplicate suffix {e.suffix!r} for {e.tense.value}")
            seen.add((e.suffix, e.tense))
            by_suffix.setdefault(e.suffix, []).append(e)
        self._by_suffix = by_suffix
        # Stable sort keeps file order among equal lengths.
        self._ordered = sorted(by_suffix, key=len, reverse=True)

    def __len__(self):
        return len(self.entries)

    def __contains__(self, suffix):
        return suffix in self._by_suffix

    def lookup(self, suffix: str) -> list[SuffixEntry]:
        return list(self._by_suffix.get(suffix, ()))

    @property
    def tenses(self) -> set[Tense]:
        return {e.tense for e in self.entries}

    @property
    def suffixes_longest_first(self) -> list[str]:
        return list(self._ordered)

    def to_tsv(self) -> str:
        lines = []
        for e in self.entries:
            person = e.person.value if e.person else ""
            lines.append(f"{e.tense.value}\t{person}\t{e.suffix}")
        return "\n".join(lines) + "\n"


def parse_suffix_table(text: str, source: str = "<string>") -> SuffixTable:
    entries = []
    seen = set()
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        parts = line.rstrip("\r\n").split("\t")
        if len(parts) != 3:
            raise LoadError(f"{source}:{lineno}: expected 3 tab-separated fields")
        tense_s, person_s, suffix = (p.strip() for p in parts)
        try:
            tense = Tense(tense_s)
            person = Person(person_s) if person_s else None
        except ValueError as exc:
            raise LoadError(f"{source}:{lineno}: {exc}") from None
        suffix = normalize(suffix)
        if not suffix:
            raise LoadError(f"{source}:{lineno}: empty suffix")
        if (suffix, tense) in seen:
            raise LoadError(f"{source}:{lineno}: duplicate row {suffix!r} / {tense.value}")
        seen.add((suffix, tense))
        entries.append(SuffixEntry(suffix, tense, person))
    if not entries:
        raise LoadError(f"{source}: no suffix rows")
    return SuffixTable(entries)


def _read_resource(name: str) -> str:
    return resources.files("sembangla.data").joinpath(name).read_text(encoding="utf-8")


def load_suffix_table(source: str | Path | None = None) -> SuffixTable:
    """Load a suffix TSV; ``None`` loads the packaged default."""
    if source is None:
        return parse_suffix_table(_read_resource("suffixes.tsv"), "suffixes.tsv")
    path = Path(source)
    try:
        text = path.read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as exc:
        raise LoadError(f"{path}: {exc}") from None
    return parse_suffix_table(text, str(path))


def load_lexicon(source: str | Path | None = None) -> frozenset[str]:
    """One word per line, '#' comments.  ``None`` loads the packaged list."""
    if source is None:
        text = _read_resource("function_words.txt")
    else:
        try:
            text = Path(source).read_text(encoding="utf-8")
        except (OSError, UnicodeDecodeError) as exc:
            raise LoadError(f"{source}: {exc}") from None
    words = set()
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            words.add(normalize(line))
    return frozenset(words)


def _starts_cluster(ch: str) -> bool:
    return unicodedata.category(ch)[0] != "M" and ch not in "‌‍"


def extract_root_verb(word: str, table: SuffixTable) -> VerbAnalysis | None:
    """Strip the longest table suffix that leaves a non-empty root.

    The root must begin a grapheme cluster, so a bare vowel sign is never
    accepted as a root.  Returns ``None`` when nothing matches.
    """
    for suffix in table.suffixes_longest_first:
        if len(suffix) < len(word) and word.endswith(suffix):
            root = word[: -len(suffix)]
            if _starts_cluster(root[0]):
                entry = table.lookup(suffix)[0]
                return VerbAnalysis(root, suffix, entry.tense, entry.person)
    return None


def tag_function_words(tokens: Sequence[Token], lexicon: frozenset[str]) -> list[WordClassTag]:
    tags = []
    for i, tok in enumerate(tokens):
        if tok.is_punct or tok.normalized in lexicon:
            kind = WordKind.FUNCTION
        else:
            kind = WordKind.CONTENT
        tags.append(WordClassTag(i, kind))
    return tags


# (tokens, tags, table) -> per-token verb-candidate flags
VerbTagger = Callable[[Sequence[Token], Sequence[WordClassTag], SuffixTable], list[bool]]


def suffix_shape_tagger(tokens, tags, table) -> list[bool]:
    """Default verb gate: the last content word, or any content word with
    a matching table suffix."""
    content = [t.token_index for t in tags if t.kind is WordKind.CONTENT]
    last = content[-1] if content else -1
    flags = []
    for tag in tags:
        if tag.kind is not WordKind.CONTENT:
            flags.append(False)
            continue
        word = tokens[tag.token_index].normalized
        flags.append(tag.token_index == last or extract_root_verb(word, table) is not None)
    return flags


@dataclass(frozen=True)
class QueryAnalysis:
    sentence_type: SentenceType
    verbs: tuple[tuple[int, VerbAnalysis], ...]
    tense: Tense | None
    person: Person | None
    fw_count: int
    cw_count: int
    subject_count: int
    object_count: int
    tags: tuple[WordClassTag, ...] = field(default=(), repr=False)
    gender: float = GENDER_NEUTRAL

    @property
    def main_verb(self) -> VerbAnalysis | None:
        return self.verbs[-1][1] if self.verbs else None

    @property
    def main_verb_index(self) -> int | None:
        return self.verbs[-1][0] if self.verbs else None


def analyze_query(
    tokens: Sequence[Token],
    table: SuffixTable,
    lexicon: frozenset[str],
    tagger: VerbTagger = suffix_shape_tagger,
) -> QueryAnalysis:
    if not tokens:
        raise DataError("cannot analyze an empty token list")
    tags = tag_function_words(tokens, lexicon)
    flags = tagger(tokens, tags, table)
    verbs = []
    for i, is_verb in enumerate(flags):
        if is_verb:
            va = extract_root_verb(tokens[i].normalized, table)
            if va is not None:
                verbs.append((i, va))
    main_idx = verbs[-1][0] if verbs else len(tokens)
    subjects = objects = 0
    for tag in tags[:main_idx]:
        if tag.kind is not WordKind.CONTENT:
            continue
        word = tokens[tag.token_index].normalized
        if any(word.endswith(m) and len(word) > len(m) for m in OBJECT_MARKERS):
            objects += 1
        else:
            subjects += 1
    fw = sum(t.kind is WordKind.FUNCTION for t in tags)
    main = verbs[-1][1] if verbs else None
    return QueryAnalysis(
        sentence_type=detect_sentence_type(list(tokens)),
        verbs=tuple(verbs),
        tense=main.tense if main else None,
        person=main.person if main else None,
        fw_count=fw,
        cw_count=len(tags) - fw,
        subject_count=subjects,
        object_count=objects,
        tags=tuple(tags),
    )


def reduce_word(word: str, table: SuffixTable) -> str:
    """Root of ``word`` when it parses as an inflected verb, else ``word``."""
    va = extract_root_verb(word, table)
    return va.root if va else word
