"""Saving and loading engine state.

Every ``.bin`` and ``.model`` file is one container::

    uint32 format version (big-endian)
    uint32 crc32 of everything after this field
    uint32 length of the JSON metadata
    JSON metadata (UTF-8), including an ``__arrays__`` table
    raw little-endian array bytes, back to back

Arrays round-trip bit for bit, so a reloaded engine reproduces rankings
and probabilities exactly.  ``manifest.json`` records the format version,
feature schema, corpus hash and the trained nodes.
"""

from __future__ import annotations

import json
import shutil
import struct
import zlib
from pathlib import Path
from urllib.parse import quote

import numpy as np

from .classifiers import KINDS, MODEL_CLASSES
from .config import EngineConfig
from .engine import Engine, Resources
from .errors import SchemaMismatchError, StateError
from .features import SCHEMA_VERSION, SynonymLexicon, Vocabulary
from .morphology import parse_suffix_table
from .retrieval import InvertedIndex, KnowledgeBase, build_corpus, node_key

FORMAT_VERSION = 1
_HEAD = struct.Struct(">III")


def _json_default(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def write_blob(path: Path, meta: dict, arrays: dict[str, np.ndarray] | None = None,
               version: int = FORMAT_VERSION) -> None:
    table, chunks, offset = [], [], 0
    for name in sorted(arrays or {}):
        a = np.asarray(arrays[name])
        a = np.ascontiguousarray(a, dtype=a.dtype.newbyteorder("<"))
        raw = a.tobytes()
        table.append([name, a.dtype.str, list(a.shape), offset, len(raw)])
        chunks.append(raw)
        offset += len(raw)
    meta = dict(meta, __arrays__=table)
    mj = json.dumps(meta, ensure_ascii=False, sort_keys=True, default=_json_default).encode("utf-8")
    body = struct.pack(">I", len(mj)) + mj + b"".join(chunks)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(struct.pack(">II", version, zlib.crc32(body)) + body)


def read_blob(path: Path) -> tuple[dict, dict[str, np.ndarray]]:
    try:
        data = path.read_bytes()
    except OSError as exc:
        raise StateError(f"{path}: {exc.strerror or exc}") from None
    if len(data) < _HEAD.size:
        raise StateError(f"{path}: file is truncated")
    version, crc, mlen = _HEAD.unpack_from(data)
    if version != FORMAT_VERSION:
        raise StateError(f"{path}: format version {version} does not match "
                         f"supported version {FORMAT_VERSION}")
    if zlib.crc32(data[8:]) != crc:
        raise StateError(f"{path}: checksum mismatch, file is corrupted")
    try:
        meta = json.loads(data[12:12 + mlen].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError):
        raise StateError(f"{path}: unreadable metadata") from None
    base = 12 + mlen
    arrays = {}
    for name, dtype, shape, off, n in meta.pop("__arrays__", []):
        raw = data[base + off: base + off + n]
        if len(raw) != n:
            raise StateError(f"{path}: array {name!r} is truncated")
        arrays[name] = np.frombuffer(raw, dtype=np.dtype(dtype)).reshape(shape).copy()
    return meta, arrays


def node_dirname(path) -> str:
    return quote(node_key(path), safe="")


def save_state(engine: Engine, directory: str | Path) -> Path:
    d = Path(directory)
    if d.exists() and not d.is_dir():
        raise StateError(f"{d}: exists and is not a directory")
    if (d / "models").is_dir() and (d / "manifest.json").is_file():
        shutil.rmtree(d / "models")  # stale models from an earlier save
    d.mkdir(parents=True, exist_ok=True)
    corpus, res = engine.corpus, engine.resources

    write_blob(d / "resources.bin", {
        "suffixes": res.table.to_tsv(),
        "function_words": sorted(res.lexicon),
        "synonyms": res.synonyms.to_tsv(),
        "kb": res.kb.to_tsv(),
    })
    write_blob(d / "corpus.bin", {
        "records": [[r.id, list(r.category_path), r.raw_text] for r in corpus.records],
    })
    vocab = engine.vocab
    write_blob(d / "vocab.bin", {"terms": vocab.terms, "total_documents": vocab.total_documents},
               {"df": vocab.df})
    ix = engine.index
    write_blob(d / "index.bin", {"sentence_ids": ix.sentence_ids,
                                 "leaf_of": [list(p) for p in ix.leaf_of]},
               {"offsets": ix.offsets, "docs": ix.docs, "tfs": ix.tfs, "weights": ix.weights})

    nodes = []
    for path in sorted(engine.models, key=lambda p: (len(p), p)):
        nodes.append(list(path))
        for kind, model in engine.models[path].items():
            meta, arrays = model.get_state()
            write_blob(d / "models" / node_dirname(path) / f"{kind}.model", meta, arrays)

    manifest = {
        "format_version": FORMAT_VERSION,
        "schema_version": SCHEMA_VERSION,
        "corpus_hash": engine.corpus_hash,
        "n_sentences": len(corpus.records),
        "trained": bool(engine.models),
        "nodes": nodes,
        "kinds": list(KINDS),
        "config": engine.config.to_dict(),
    }
    (d / "manifest.json").write_text(
        json.dumps(manifest, ensure_ascii=False, indent=2, sort_keys=True) + "\n",
        encoding="utf-8")
    return d


def _config_from(saved: dict) -> EngineConfig:
    cfg = EngineConfig()
    for section, values in saved.items():
        sec = getattr(cfg, section, None)
        if sec is None:
            continue
        for key, value in values.items():
            if hasattr(sec, key):
                setattr(sec, key, value)
    return cfg


def read_manifest(directory: str | Path) -> dict:
    d = Path(directory)
    mpath = d / "manifest.json"
    if not d.is_dir():
        raise StateError(f"{d}: state directory does not exist")
    try:
        manifest = json.loads(mpath.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise StateError(f"{mpath}: missing manifest") from None
    except (OSError, UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise StateError(f"{mpath}: unreadable manifest ({exc})") from None
    version = manifest.get("format_version")
    if version != FORMAT_VERSION:
        raise StateError(f"{mpath}: state format version {version} does not match "
                         f"supported version {FORMAT_VERSION}")
    if manifest.get("schema_version") != SCHEMA_VERSION:
        raise SchemaMismatchError(
            f"{mpath}: feature schema {manifest.get('schema_version')!r} does not match "
            f"{SCHEMA_VERSION!r}")
    return manifest


def load_state(directory: str | Path, config: EngineConfig | None = None) -> Engine:
    """Rebuild an :class:`Engine` saved by :func:`save_state`.

    ``config`` replaces the configuration stored in the manifest.
    """
    d = Path(directory)
    manifest = read_manifest(d)
    rmeta, _ = read_blob(d / "resources.bin")
    table = parse_suffix_table(rmeta["suffixes"], str(d / "resources.bin"))
    lexicon = frozenset(rmeta["function_words"])
    synonyms = SynonymLexicon.parse(rmeta["synonyms"], str(d / "resources.bin"))

    cmeta, _ = read_blob(d / "corpus.bin")
    rows = [{"id": i, "category_path": p, "text": t, "_line": n}
            for n, (i, p, t) in enumerate(cmeta["records"], 1)]
    corpus = build_corpus(rows, table, lexicon, source=str(d / "corpus.bin"))
    kb = KnowledgeBase.parse(rmeta["kb"], str(d / "resources.bin"),
                             known_ids={r.id for r in corpus.records})

    vmeta, varr = read_blob(d / "vocab.bin")
    vocab = Vocabulary(dict(zip(vmeta["terms"], varr["df"].tolist())), vmeta["total_documents"])
    if vocab != corpus.vocab:
        raise StateError(f"{d / 'vocab.bin'}: vocabulary does not match the stored corpus")
    imeta, iarr = read_blob(d / "index.bin")
    index = InvertedIndex(imeta["sentence_ids"], [tuple(p) for p in imeta["leaf_of"]],
                          iarr["offsets"], iarr["docs"], iarr["tfs"], iarr["weights"])

    models = {}
    for node in manifest.get("nodes", []):
        path = tuple(node)
        models[path] = {}
        for kind in manifest.get("kinds", KINDS):
            f = d / "models" / node_dirname(path) / f"{kind}.model"
            if not f.is_file():
                raise StateError(f"missing {kind} model for node {node_key(path)} ({f})")
            meta, arrays = read_blob(f)
            if meta.get("schema") != SCHEMA_VERSION:
                raise SchemaMismatchError(f"{f}: model schema {meta.get('schema')!r} does not "
                                          f"match {SCHEMA_VERSION!r}")
            try:
                models[path][kind] = MODEL_CLASSES[meta["kind"]].from_state(meta, arrays)
            except (KeyError, ValueError, TypeError) as exc:
                raise StateError(f"{f}: malformed model ({exc})") from None

    engine = Engine(corpus, Resources(table, lexicon, synonyms, kb),
                    config or _config_from(manifest.get("config", {})), models, index)
    if engine.corpus_hash != manifest.get("corpus_hash"):
        raise StateError(f"{d / 'corpus.bin'}: corpus hash does not match the manifest")
    return engine
