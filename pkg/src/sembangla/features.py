"""TF-IDF vocabularies, feature vectors and synonym-based query expansion.

A :class:`FeatureVector` has two parts: a sparse, L2-normalized TF-IDF
block over the vocabulary and a fixed-order block of grammatical
meta-features (see :data:`DENSE_FEATURES`).
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import DataError, LoadError
from .morphology import PERSONS, TENSES, QueryAnalysis
from .text import SENTENCE_TYPES, Token, normalize, tokenize

DENSE_FEATURES = (
    ["length_tokens", "dimensionality", "entropy_bits", "fw_count", "cw_count",
     "subject_count", "object_count"]
    + [f"tense={t.value}" for t in TENSES]
    + [f"person={p.value}" for p in PERSONS]
    + [f"type={s.value}" for s in SENTENCE_TYPES]
    + ["gender"]
)
N_DENSE = len(DENSE_FEATURES)
SCHEMA_VERSION = f"fv1-d{N_DENSE}"


def terms_of(tokens) -> list[str]:
    """Index terms of a token sequence: normalized forms minus punctuation.

    Accepts raw text, a list of :class:`Token` or a list of plain strings.
    """
    if isinstance(tokens, str):
        tokens = tokenize(normalize(tokens))
    out = []
    for t in tokens:
        if isinstance(t, Token):
            if not t.is_punct:
                out.append(t.normalized)
        else:
            out.append(t)
    return out


class Vocabulary:
    def __init__(self, df: dict[str, int], total_documents: int):
        self.total_documents = int(total_documents)
        self.terms: list[str] = sorted(df)
        self.term_ids = {t: i for i, t in enumerate(self.terms)}
        self.df = np.array([df[t] for t in self.terms], dtype=np.int64)
        self.idf = np.log((1.0 + self.total_documents) / (1.0 + self.df)) + 1.0

    def __len__(self):
        return len(self.terms)

    def __contains__(self, term):
        return term in self.term_ids

    def doc_freq(self, term: str) -> int:
        i = self.term_ids.get(term)
        return 0 if i is None else int(self.df[i])

    def idf_of(self, term: str) -> float:
        df = self.doc_freq(term)
        return math.log((1.0 + self.total_documents) / (1.0 + df)) + 1.0

    def __eq__(self, other):
        return (
            isinstance(other, Vocabulary)
            and self.total_documents == other.total_documents
            and self.terms == other.terms
            and np.array_equal(self.df, other.df)
        )


def build_vocabulary(corpus: Sequence) -> Vocabulary:
    if len(corpus) == 0:
        raise DataError("cannot build a vocabulary from an empty corpus")
    df: Counter = Counter()
    for sentence in corpus:
        df.update(set(terms_of(sentence)))
    return Vocabulary(dict(df), len(corpus))


@dataclass(eq=False)
class FeatureVector:
    ids: np.ndarray       # int64, strictly increasing
    weights: np.ndarray   # float64, L2-normalized
    counts: np.ndarray    # int64 raw term counts aligned with ids
    dense: np.ndarray     # float64, DENSE_FEATURES order
    schema: str = SCHEMA_VERSION

    def __eq__(self, other):
        return (
            isinstance(other, FeatureVector)
            and self.schema == other.schema
            and np.array_equal(self.ids, other.ids)
            and np.array_equal(self.weights, other.weights)
            and np.array_equal(self.counts, other.counts)
            and np.array_equal(self.dense, other.dense)
        )

    @property
    def sparse(self) -> list[tuple[int, float]]:
        return list(zip(self.ids.tolist(), self.weights.tolist()))


def entropy(tokens) -> float:
    """Shannon entropy in bits of the term distribution of ``tokens``."""
    terms = terms_of(tokens)
    if not terms:
        raise DataError("entropy of an empty token list is undefined")
    n = len(terms)
    h = 0.0
    for c in Counter(terms).values():
        p = c / n
        h -= p * math.log2(p)
    return h


def _dense_block(terms: list[str], analysis: QueryAnalysis | None) -> np.ndarray:
    d = np.zeros(N_DENSE)
    d[0] = len(terms)
    d[1] = len(set(terms))
    d[2] = entropy(terms) if terms else 0.0
    if analysis is not None:
        d[3:7] = (analysis.fw_count, analysis.cw_count,
                  analysis.subject_count, analysis.object_count)
        off = 7
        if analysis.tense is not None:
            d[off + TENSES.index(analysis.tense)] = 1.0
        off += len(TENSES)
        if analysis.person is not None:
            d[off + PERSONS.index(analysis.person)] = 1.0
        off += len(PERSONS)
        d[off + SENTENCE_TYPES.index(analysis.sentence_type)] = 1.0
        d[-1] = analysis.gender
    return d


def vectorize(tokens, vocab: Vocabulary, analysis: QueryAnalysis | None = None) -> FeatureVector:
    """TF-IDF (raw tf, smoothed idf, L2-normalized) plus meta-features.

    Out-of-vocabulary terms are left out of the sparse block but still
    count towards length, dimensionality and entropy.
    """
    terms = terms_of(tokens)
    counts = Counter(t for t in terms if t in vocab.term_ids)
    ids = np.array(sorted(vocab.term_ids[t] for t in counts), dtype=np.int64)
    tf = np.array([counts[vocab.terms[i]] for i in ids], dtype=np.int64)
    w = tf * vocab.idf[ids] if len(ids) else np.zeros(0)
    norm = math.sqrt(float(np.dot(w, w)))
    if norm > 0:
        w = w / norm
    return FeatureVector(ids, w.astype(np.float64), tf, _dense_block(terms, analysis))


class SynonymLexicon:
    """word -> ordered synonyms; self-references are dropped on load."""

    def __init__(self, entries: dict[str, Sequence[str]] | None = None):
        self.entries: dict[str, tuple[str, ...]] = {}
        for word, syns in (entries or {}).items():
            kept = tuple(s for s in syns if s and s != word)
            if kept:
                self.entries[word] = kept

    def __len__(self):
        return len(self.entries)

    def get(self, word: str) -> tuple[str, ...]:
        return self.entries.get(word, ())

    @classmethod
    def parse(cls, text: str, source: str = "<string>") -> "SynonymLexicon":
        entries: dict[str, list[str]] = {}
        for lineno, line in enumerate(text.splitlines(), 1):
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 2:
                raise LoadError(f"{source}:{lineno}: expected word<TAB>syn1,syn2,...")
            word = normalize(parts[0])
            syns = [normalize(s) for s in parts[1].split(",")]
            entries.setdefault(word, []).extend(s for s in syns if s)
        return cls(entries)

    @classmethod
    def load(cls, path: str | Path | None) -> "SynonymLexicon":
        if path is None:
            return cls()
        try:
            text = Path(path).read_text(encoding="utf-8")
        except (OSError, UnicodeDecodeError) as exc:
            raise LoadError(f"{path}: {exc}") from None
        return cls.parse(text, str(path))

    def to_tsv(self) -> str:
        return "".join(f"{w}\t{','.join(s)}\n" for w, s in self.entries.items())


def expand_query(
    tokens: Iterable[Token], synonyms: SynonymLexicon, vocab: Vocabulary
) -> tuple[list[Token], list[tuple[str, str]]]:
    """Swap out-of-vocabulary words for their most frequent known synonym.

    Returns the new token list and the ``(original, replacement)`` pairs.
    """
    out, replaced = [], []
    for tok in tokens:
        if tok.is_punct or vocab.doc_freq(tok.normalized) > 0:
            out.append(tok)
            continue
        best, best_df = None, 0
        for syn in synonyms.get(tok.normalized):
            df = vocab.doc_freq(syn)
            if df > best_df:
                best, best_df = syn, df
        if best is None:
            out.append(tok)
        else:
            out.append(Token(best, best, tok.script, tok.char_span))
            replaced.append((tok.normalized, best))
    return out, replaced
