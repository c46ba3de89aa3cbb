"""The end-to-end question answering pipeline.

An :class:`Engine` owns the linguistic resources, the ingested corpus, its
inverted index and one set of four classifiers per category-tree node that
has at least two children.  A query is normalized, expanded with synonyms,
analyzed, vectorized, routed down the tree by ensemble vote and answered
from the sentences under the routed leaves.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .classifiers import KINDS, Dataset, FeatureMatrix, train_all, train_classifier
from .config import EngineConfig
from .ensemble import EnsembleConfig, Prediction, Source, route_recursive, vote
from .errors import DataError, StateError, UsageError
from .evaluation import cross_validate, split_evaluate
from .features import SynonymLexicon, expand_query, vectorize
from .morphology import SuffixTable, analyze_query, load_lexicon, load_suffix_table
from .retrieval import (
    Answer,
    Corpus,
    InvertedIndex,
    KnowledgeBase,
    build_index,
    extract_answer,
    hit_sentences,
    ingest_corpus,
    load_category_map,
    node_key,
)
from .text import normalize, tokenize

Path_ = tuple[str, ...]


def corpus_hash(corpus: Corpus) -> str:
    h = hashlib.sha256()
    for r in sorted(corpus.records, key=lambda r: r.id):
        for part in (r.id, "/".join(r.category_path), r.raw_text):
            h.update(part.encode("utf-8"))
            h.update(b"\x00")
    return h.hexdigest()


@dataclass
class Resources:
    table: SuffixTable
    lexicon: frozenset[str]
    synonyms: SynonymLexicon = field(default_factory=SynonymLexicon)
    kb: KnowledgeBase = field(default_factory=KnowledgeBase)

    @classmethod
    def load(cls, suffixes=None, function_words=None, synonyms=None) -> "Resources":
        return cls(load_suffix_table(suffixes), load_lexicon(function_words),
                   SynonymLexicon.load(synonyms))


class EnsemblePredictor:
    """Four classifiers voting as one predictor for the evaluation harness.

    ``predict`` returns the single winner's index or -1 when the vote is
    ambiguous or all-NULL; ``predict_proba`` is the normalized vote weight.
    """

    def __init__(self, models: dict, config: EnsembleConfig):
        self.models = models
        self.config = config
        self.categories = models[KINDS[0]].categories

    def outcomes(self, X: FeatureMatrix):
        probas = {k: np.atleast_2d(self.models[k].predict_proba(X)) for k in KINDS}
        out = []
        for r in range(X.n_rows):
            preds = []
            for k in KINDS:
                p = probas[k][r]
                j = int(np.argmax(p))
                cat = self.categories[j] if p[j] >= self.config.null_proba_floor else None
                preds.append(Prediction(cat, Source(k)))
            out.append(vote(preds, self.config))
        return out

    def predict_proba(self, X: FeatureMatrix) -> np.ndarray:
        K = len(self.categories)
        P = np.zeros((X.n_rows, K))
        for r, o in enumerate(self.outcomes(X)):
            for c, w in o.weights.items():
                P[r, self.categories.index(c)] = w
            tot = P[r].sum()
            P[r] = P[r] / tot if tot > 0 else 1.0 / K
        return P

    def predict(self, X: FeatureMatrix) -> np.ndarray:
        idx = [self.categories.index(o.single) if o.single is not None else -1
               for o in self.outcomes(X)]
        return np.array(idx, dtype=np.int64)


@dataclass
class PreparedQuery:
    text: str
    tokens: list
    expansion: list[tuple[str, str]]
    analysis: object
    vector: object


class Engine:
    def __init__(self, corpus: Corpus, resources: Resources, config: EngineConfig | None = None,
                 models: dict[Path_, dict] | None = None, index: InvertedIndex | None = None):
        self.corpus = corpus
        self.resources = resources
        self.config = config or EngineConfig()
        self.models: dict[Path_, dict] = models or {}
        self.index = index if index is not None else build_index(corpus.records, corpus.vocab)
        self._texts = {r.id: r.raw_text for r in corpus.records}

    # -- construction -------------------------------------------------------

    @classmethod
    def ingest(cls, source, config: EngineConfig | None = None, *, suffixes=None,
               function_words=None, synonyms=None, kb=None, category_map=None) -> "Engine":
        config = config or EngineConfig()
        p = config.paths
        res = Resources.load(suffixes or p.suffixes, function_words or p.function_words,
                             synonyms or p.synonyms)
        corpus = ingest_corpus(source, res.table, res.lexicon,
                               load_category_map(category_map or p.category_map))
        res.kb = KnowledgeBase.load(kb or p.kb, known_ids={r.id for r in corpus.records})
        return cls(corpus, res, config)

    @property
    def tree(self):
        return self.corpus.tree

    @property
    def vocab(self):
        return self.corpus.vocab

    @property
    def corpus_hash(self) -> str:
        return corpus_hash(self.corpus)

    @property
    def ensemble_config(self) -> EnsembleConfig:
        e = self.config.ensemble
        return EnsembleConfig(e.weight, e.win_threshold, e.null_floor)

    # -- training -----------------------------------------------------------

    def trainable_nodes(self) -> list[Path_]:
        return self.tree.internal_nodes(min_children=2)

    def node_dataset(self, path=()) -> Dataset:
        """Sentences under ``path`` labeled by the child they descend from.

        Rows keep corpus order, so an unshuffled split takes a prefix of
        the input file.
        """
        path = tuple(path)
        kids = self.tree.children(path)
        if len(kids) < 2:
            raise DataError(f"node {node_key(path)} has fewer than two children")
        index = {c: i for i, c in enumerate(kids)}
        rows = [r for r in self.corpus.records if r.category_path[: len(path)] == path
                and len(r.category_path) > len(path)]
        X = FeatureMatrix.stack([r.features for r in rows], len(self.vocab))
        return Dataset(X, [index[r.category_path[len(path)]] for r in rows], kids)

    def train(self, progress: Callable[[Path_, str], None] | None = None) -> None:
        hp = self.config.classifier_hyperparams()
        models = {}
        for path in self.trainable_nodes():
            data = self.node_dataset(path)
            models[path] = {}
            for kind in KINDS:
                if progress is not None:
                    progress(path, kind)
                models[path][kind] = train_classifier(kind, data, **hp[kind])
        self.models = models

    @property
    def trained(self) -> bool:
        return bool(self.models) or not self.trainable_nodes()

    # -- querying -----------------------------------------------------------

    def prepare(self, text: str) -> PreparedQuery:
        norm = normalize(text)
        tokens = tokenize(norm)
        if not tokens:
            raise UsageError("query is empty")
        expanded, replaced = expand_query(tokens, self.resources.synonyms, self.vocab)
        analysis = analyze_query(expanded, self.resources.table, self.resources.lexicon)
        return PreparedQuery(norm, expanded, replaced, analysis,
                             vectorize(expanded, self.vocab, analysis))

    def route(self, vector):
        if not self.trained:
            raise StateError("state has no trained models; run train first")
        return route_recursive(vector, self.tree, self.models, self.ensemble_config)

    def query(self, text: str) -> Answer:
        q = self.prepare(text)
        routing = self.route(q.vector)
        hits = hit_sentences(q.vector, routing.paths, self.index, self.config.retrieval.top_n)
        answer = extract_answer(q.tokens, q.analysis, hits, self.resources.kb, self._texts,
                                self.resources.table, self.config.retrieval.answer_threshold)
        answer.paths = list(routing.paths)
        leaf_of = {r.id: r.category_path for r in self.corpus.records}
        mv = q.analysis.main_verb
        answer.trace = {
            "query": q.text,
            "sentence_type": q.analysis.sentence_type.value,
            "main_verb": None if mv is None else {
                "surface": mv.surface, "root": mv.root, "suffix": mv.suffix,
                "tense": mv.tense.value, "person": mv.person.value if mv.person else None},
            "expansion": [list(p) for p in q.expansion],
            "routing": routing.to_dict(),
            "hits": [{"id": sid, "score": score, "leaf": list(leaf_of[sid])}
                     for sid, score in hits.hits],
            "hit_leaves": sorted({"/".join(leaf_of[sid]) for sid in hits.ids}),
            "notice": hits.notice,
        }
        return answer

    def rank(self, text: str) -> list[tuple[str, float]]:
        q = self.prepare(text)
        routing = self.route(q.vector)
        return hit_sentences(q.vector, routing.paths, self.index, self.config.retrieval.top_n).hits

    # -- evaluation ---------------------------------------------------------

    def train_fn(self, kind: str):
        hp = self.config.classifier_hyperparams()
        if kind == "ensemble":
            ens = self.ensemble_config
            return lambda data: EnsemblePredictor(train_all(data, hp), ens)
        if kind not in KINDS:
            raise UsageError(f"unknown classifier {kind!r}")
        return lambda data: train_classifier(kind, data, **hp[kind])

    def evaluate(self, kind: str = "ensemble", node=(), kfold: int | None = None,
                 split: float | None = None, seed: int | None = None,
                 shuffle: bool | None = None):
        """Returns ``(report, predictions)``; cross-validation by default."""
        ev = self.config.eval
        seed = ev.seed if seed is None else seed
        data = self.node_dataset(node)
        fn = self.train_fn(kind)
        if split is not None:
            return split_evaluate(fn, data, split, seed, ev.shuffle if shuffle is None else shuffle)
        report, _, preds = cross_validate(fn, data, kfold or ev.k, seed)
        return report, preds
