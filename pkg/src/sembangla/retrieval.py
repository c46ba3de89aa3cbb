"""Repository ingestion, the category tree, inverted indexing, sentence
hits and answer composition."""

from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import CorpusError, LoadError
from .features import FeatureVector, Vocabulary, build_vocabulary, vectorize
from .morphology import QueryAnalysis, SuffixTable, WordKind, analyze_query, reduce_word
from .text import SentenceType, Token, normalize, tokenize

DEFAULT_TOP_CATEGORIES = (
    "art & culture", "economics", "entertainment", "literature",
    "politics", "sports", "tourism",
)
NO_HIT_NOTICE = "কোনো মিল পাওয়া যায়নি।"
NO_ANSWER_NOTICE = "দুঃখিত, এই প্রশ্নের উত্তর খুঁজে পাওয়া যায়নি।"

Path_ = tuple[str, ...]


class CategoryTree:
    """Taxonomy materialized from the category paths of a corpus.

    Sentences live only at leaves; a path may not be both a leaf with
    sentences and the parent of another path.
    """

    def __init__(self):
        self._children: dict[Path_, set[str]] = defaultdict(set)
        self._sentences: dict[Path_, list[str]] = defaultdict(list)

    def add(self, path: Sequence[str], sentence_id: str) -> None:
        path = tuple(path)
        for i in range(len(path)):
            self._children[path[:i]].add(path[i])
        self._sentences[path].append(sentence_id)

    def validate(self) -> None:
        for path in self._sentences:
            if self._children.get(path):
                raise CorpusError(
                    f"category {'/'.join(path)!r} holds sentences and has subcategories"
                )

    def children(self, path: Sequence[str] = ()) -> list[str]:
        return sorted(self._children.get(tuple(path), ()))

    def is_leaf(self, path) -> bool:
        return not self._children.get(tuple(path))

    def nodes(self) -> list[Path_]:
        """Every node, breadth-first, children sorted."""
        out, frontier = [], [()]
        while frontier:
            out.extend(frontier)
            frontier = [p + (c,) for p in frontier for c in self.children(p)]
        return out

    def internal_nodes(self, min_children: int = 2) -> list[Path_]:
        return [p for p in self.nodes() if len(self.children(p)) >= min_children]

    def leaves(self, under: Sequence[str] = ()) -> list[Path_]:
        under = tuple(under)
        return [p for p in self.nodes() if self.is_leaf(p) and p[: len(under)] == under]

    def sentence_ids(self, path: Sequence[str]) -> list[str]:
        return list(self._sentences.get(tuple(path), ()))

    def sentences_under(self, path: Sequence[str]) -> list[str]:
        out = []
        for leaf in self.leaves(path):
            out.extend(self._sentences.get(leaf, ()))
        return out

    def __eq__(self, other):
        return (isinstance(other, CategoryTree)
                and {k: v for k, v in self._children.items() if v}
                == {k: v for k, v in other._children.items() if v}
                and {k: sorted(v) for k, v in self._sentences.items() if v}
                == {k: sorted(v) for k, v in other._sentences.items() if v})


def node_key(path: Sequence[str]) -> str:
    return "/".join(path) if path else "<root>"


@dataclass
class SentenceRecord:
    id: str
    category_path: Path_
    raw_text: str
    tokens: list[Token]
    analysis: QueryAnalysis
    features: FeatureVector | None = None


@dataclass
class Corpus:
    tree: CategoryTree
    records: list[SentenceRecord]
    vocab: Vocabulary

    def __iter__(self):
        yield self.tree
        yield self.records

    def by_id(self) -> dict[str, SentenceRecord]:
        return {r.id: r for r in self.records}


def load_category_map(path: str | Path | None) -> dict[str, Path_]:
    """``source_label<TAB>class/subclass`` lines; labels are joined paths."""
    if path is None:
        return {}
    out = {}
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except (OSError, UnicodeDecodeError) as exc:
        raise LoadError(f"{path}: {exc}") from None
    for lineno, line in enumerate(lines, 1):
        if not line.strip() or line.startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise LoadError(f"{path}:{lineno}: expected source<TAB>target/path")
        out[parts[0].strip()] = tuple(p.strip() for p in parts[1].split("/") if p.strip())
    return out


def read_jsonl(path: str | Path) -> list[dict]:
    rows = []
    try:
        fh = open(path, encoding="utf-8")
    except OSError as exc:
        raise CorpusError(f"{path}: {exc}") from None
    with fh:
        try:
            for lineno, line in enumerate(fh, 1):
                if not line.strip():
                    continue
                try:
                    obj = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise CorpusError(f"{path}:{lineno}: invalid JSON ({exc.msg})") from None
                if not isinstance(obj, dict):
                    raise CorpusError(f"{path}:{lineno}: record is not an object")
                for key in ("id", "category_path", "text"):
                    if key not in obj:
                        raise CorpusError(f"{path}:{lineno}: record missing {key!r}")
                cp = obj["category_path"]
                if isinstance(cp, str):
                    cp = [p for p in cp.split("/") if p]
                if not cp or not all(isinstance(c, str) and c.strip() for c in cp):
                    raise CorpusError(f"{path}:{lineno}: category_path must be a non-empty list of names")
                if not isinstance(obj["text"], str):
                    raise CorpusError(f"{path}:{lineno}: text must be a string")
                rows.append({"id": str(obj["id"]), "category_path": [c.strip() for c in cp],
                             "text": obj["text"], "_line": lineno})
        except UnicodeDecodeError as exc:
            raise CorpusError(f"{path}: invalid UTF-8 at byte offset {exc.start}") from None
    return rows


def read_directory(root: str | Path) -> list[dict]:
    root = Path(root)
    rows = []
    for f in sorted(root.rglob("*.txt")):
        rel = f.relative_to(root)
        cats = list(rel.parts[:-1])
        if not cats:
            raise CorpusError(f"{f}: sentence files must sit inside a category directory")
        try:
            lines = f.read_text(encoding="utf-8").splitlines()
        except UnicodeDecodeError as exc:
            raise CorpusError(f"{f}: invalid UTF-8 at byte offset {exc.start}") from None
        for lineno, line in enumerate(lines, 1):
            if line.strip():
                rows.append({"id": f"{rel.as_posix()}:{lineno}", "category_path": cats,
                             "text": line, "_line": lineno})
    return rows


def build_corpus(rows: Iterable[dict], table: SuffixTable, lexicon: frozenset[str],
                 category_map: dict[str, Path_] | None = None, source: str = "<corpus>") -> Corpus:
    """Normalize, analyze and vectorize labeled rows into a :class:`Corpus`."""
    category_map = category_map or {}
    tree = CategoryTree()
    records: list[SentenceRecord] = []
    seen: set[str] = set()
    for row in rows:
        where = f"{source}:{row.get('_line', '?')}"
        rid = row["id"]
        if rid in seen:
            raise CorpusError(f"{where}: duplicate id {rid!r}")
        seen.add(rid)
        path = tuple(row["category_path"])
        path = category_map.get("/".join(path), path)
        text = normalize(row["text"])
        tokens = tokenize(text)
        if not tokens:
            raise CorpusError(f"{where}: empty sentence")
        analysis = analyze_query(tokens, table, lexicon)
        records.append(SentenceRecord(rid, path, text, tokens, analysis))
        tree.add(path, rid)
    if not records:
        raise CorpusError(f"{source}: corpus is empty")
    tree.validate()
    vocab = build_vocabulary([r.tokens for r in records])
    for r in records:
        r.features = vectorize(r.tokens, vocab, r.analysis)
    return Corpus(tree, records, vocab)


def ingest_corpus(source: str | Path, table: SuffixTable, lexicon: frozenset[str],
                  category_map: dict[str, Path_] | None = None) -> Corpus:
    """Ingest a labeled JSONL file or a ``<class>/<subclass>/<file>.txt`` tree."""
    p = Path(source)
    if p.is_dir():
        rows = read_directory(p)
    elif p.exists():
        rows = read_jsonl(p)
    else:
        raise CorpusError(f"{p}: no such corpus file or directory")
    return build_corpus(rows, table, lexicon, category_map, str(p))


class InvertedIndex:
    """term id -> postings ``(sentence id, tf, weight)`` sorted by sentence id."""

    def __init__(self, sentence_ids: list[str], leaf_of: list[Path_],
                 offsets: np.ndarray, docs: np.ndarray, tfs: np.ndarray, weights: np.ndarray):
        self.sentence_ids = sentence_ids      # sorted ascending
        self.leaf_of = leaf_of
        self.offsets = offsets
        self.docs = docs
        self.tfs = tfs
        self.weights = weights
        self._pos = {s: i for i, s in enumerate(sentence_ids)}
        counts: dict[Path_, int] = defaultdict(int)
        for leaf in leaf_of:
            counts[leaf] += 1
        self.leaf_counts = dict(counts)

    @property
    def total_documents(self) -> int:
        return len(self.sentence_ids)

    def postings(self, term_id: int) -> list[tuple[str, int]]:
        if term_id < 0 or term_id + 1 >= len(self.offsets):
            return []
        a, b = self.offsets[term_id], self.offsets[term_id + 1]
        return [(self.sentence_ids[d], int(t)) for d, t in zip(self.docs[a:b], self.tfs[a:b])]

    def leaf_postings(self, term_id: int, leaf: Sequence[str]) -> list[tuple[str, int]]:
        leaf = tuple(leaf)
        return [(s, tf) for s, tf in self.postings(term_id) if self.leaf_of[self._pos[s]] == leaf]

    def position(self, sentence_id: str) -> int:
        return self._pos[sentence_id]

    def __eq__(self, other):
        return (isinstance(other, InvertedIndex)
                and self.sentence_ids == other.sentence_ids
                and self.leaf_of == other.leaf_of
                and all(np.array_equal(getattr(self, a), getattr(other, a))
                        for a in ("offsets", "docs", "tfs", "weights")))


def build_index(records: Sequence[SentenceRecord], vocab: Vocabulary) -> InvertedIndex:
    ordered = sorted(records, key=lambda r: r.id)
    per_term: list[list[tuple[int, int, float]]] = [[] for _ in range(len(vocab))]
    for d, rec in enumerate(ordered):
        fv = rec.features
        for tid, tf, w in zip(fv.ids.tolist(), fv.counts.tolist(), fv.weights.tolist()):
            per_term[tid].append((d, tf, w))
    offsets = np.zeros(len(vocab) + 1, dtype=np.int64)
    docs, tfs, weights = [], [], []
    for t, plist in enumerate(per_term):
        offsets[t + 1] = offsets[t] + len(plist)
        for d, tf, w in plist:
            docs.append(d)
            tfs.append(tf)
            weights.append(w)
    return InvertedIndex([r.id for r in ordered], [r.category_path for r in ordered], offsets,
                         np.array(docs, dtype=np.int64), np.array(tfs, dtype=np.int64),
                         np.array(weights, dtype=np.float64))


@dataclass
class HitList:
    hits: list[tuple[str, float]]
    notice: str | None = None

    def __iter__(self):
        return iter(self.hits)

    def __len__(self):
        return len(self.hits)

    @property
    def ids(self) -> list[str]:
        return [h[0] for h in self.hits]


def candidate_mask(index: InvertedIndex, paths: Sequence[Sequence[str]]) -> np.ndarray:
    prefixes = [tuple(p) for p in paths]
    return np.array([any(leaf[: len(p)] == p for p in prefixes) for leaf in index.leaf_of])


def hit_sentences(query_vector: FeatureVector, paths: Sequence[Sequence[str]],
                  index: InvertedIndex, top_n: int = 5) -> HitList:
    """Cosine-ranked sentences from the leaves under the routed paths."""
    if top_n < 1:
        raise ValueError("top_n must be at least 1")
    allowed = candidate_mask(index, paths)
    scores = np.zeros(index.total_documents)
    for tid, qw in zip(query_vector.ids.tolist(), query_vector.weights.tolist()):
        a, b = index.offsets[tid], index.offsets[tid + 1]
        np.add.at(scores, index.docs[a:b], qw * index.weights[a:b])
    scores = np.where(allowed, np.minimum(scores, 1.0), 0.0)
    cand = np.flatnonzero(scores > 0)
    # sentence ids are already ascending, so a stable sort breaks ties by id
    order = cand[np.argsort(-scores[cand], kind="stable")][:top_n]
    hits = [(index.sentence_ids[d], float(scores[d])) for d in order]
    return HitList(hits, None if hits else NO_HIT_NOTICE)


@dataclass(frozen=True)
class KBRow:
    subject: str
    relation: str
    object: str
    sentence_id: str


class KnowledgeBase:
    def __init__(self, rows: Iterable[KBRow] = ()):
        self.rows = list(rows)

    def __len__(self):
        return len(self.rows)

    @classmethod
    def parse(cls, text: str, source: str = "<kb>", known_ids: set[str] | None = None):
        rows = []
        for lineno, line in enumerate(text.splitlines(), 1):
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 4:
                raise LoadError(f"{source}:{lineno}: expected subject, relation, object, sentence_id")
            s, r, o, sid = (normalize(p) for p in parts)
            if known_ids is not None and sid not in known_ids:
                raise LoadError(f"{source}:{lineno}: unknown sentence id {sid!r}")
            rows.append(KBRow(s, r, o, sid))
        return cls(rows)

    @classmethod
    def load(cls, path: str | Path | None, known_ids: set[str] | None = None):
        if path is None:
            return cls()
        try:
            text = Path(path).read_text(encoding="utf-8")
        except (OSError, UnicodeDecodeError) as exc:
            raise LoadError(f"{path}: {exc}") from None
        return cls.parse(text, str(path), known_ids)

    def to_tsv(self) -> str:
        return "".join(f"{r.subject}\t{r.relation}\t{r.object}\t{r.sentence_id}\n" for r in self.rows)


@dataclass
class Answer:
    text: str
    supporting_ids: list[str]
    paths: list[Path_]
    trace: dict = field(default_factory=dict)
    kb_row: KBRow | None = None
    no_answer: bool = False

    def to_dict(self) -> dict:
        return {
            "text": self.text,
            "supporting_ids": self.supporting_ids,
            "paths": [list(p) for p in self.paths],
            "kb_row": None if self.kb_row is None else list(
                (self.kb_row.subject, self.kb_row.relation, self.kb_row.object,
                 self.kb_row.sentence_id)),
            "no_answer": self.no_answer,
            "trace": self.trace,
        }


def _reduced_terms(words: Iterable[str], table: SuffixTable) -> set[str]:
    out = set()
    for w in words:
        out.add(w)
        out.add(reduce_word(w, table))
    return out


def _field_terms(text: str, table: SuffixTable) -> set[str]:
    return _reduced_terms((t.normalized for t in tokenize(text) if not t.is_punct), table)


def match_kb(tokens: Sequence[Token], analysis: QueryAnalysis, hits: HitList,
             kb: KnowledgeBase, table: SuffixTable) -> KBRow | None:
    """Best KB row whose source sentence was hit and whose subject or
    relation shares a (root-reduced) content term with the query."""
    content = [tokens[t.token_index].normalized for t in analysis.tags
               if t.kind is WordKind.CONTENT]
    q = _reduced_terms(content, table)
    rank = {sid: i for i, sid in enumerate(hits.ids)}
    best, best_key = None, None
    for order, row in enumerate(kb.rows):
        if row.sentence_id not in rank:
            continue
        score = len(q & _field_terms(row.subject, table)) + len(q & _field_terms(row.relation, table))
        if score == 0:
            continue
        key = (-score, rank[row.sentence_id], order)
        if best_key is None or key < best_key:
            best, best_key = row, key
    return best


def extract_answer(tokens: Sequence[Token], analysis: QueryAnalysis, hits: HitList,
                   kb: KnowledgeBase, texts: dict[str, str], table: SuffixTable,
                   threshold: float = 0.2) -> Answer:
    """Compose the answer from a KB row or from the ranked hit sentences.

    ``texts`` maps sentence ids to their text.
    """
    if not hits.hits:
        return Answer(NO_ANSWER_NOTICE, [], [], no_answer=True)
    if analysis.sentence_type is SentenceType.INTERROGATIVE:
        row = match_kb(tokens, analysis, hits, kb, table)
        if row is not None:
            return Answer(f"{row.object}: {texts[row.sentence_id]}", [row.sentence_id], [],
                          kb_row=row)
    chosen = [sid for sid, score in hits.hits if score >= threshold] or [hits.hits[0][0]]
    return Answer(" ".join(texts[sid] for sid in chosen), chosen, [])
