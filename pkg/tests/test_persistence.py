import json
import shutil

import numpy as np
import pytest

from sembangla.classifiers import FeatureMatrix
from sembangla.errors import SchemaMismatchError, StateError
from sembangla.persistence import (
    FORMAT_VERSION,
    load_state,
    node_dirname,
    read_blob,
    save_state,
    write_blob,
)


def random_queries(engine, n=100, seed=0):
    rng = np.random.default_rng(seed)
    terms = engine.vocab.terms
    return [" ".join(rng.choice(terms, size=rng.integers(1, 7))) for _ in range(n)]


@pytest.fixture(scope="module")
def saved(trained_qa, tmp_path_factory):
    d = tmp_path_factory.mktemp("state")
    save_state(trained_qa, d)
    return d


def test_round_trip_predictions_and_rankings(trained_qa, saved):
    loaded = load_state(saved)
    assert loaded.corpus_hash == trained_qa.corpus_hash
    assert loaded.index == trained_qa.index
    queries = random_queries(trained_qa)
    X = FeatureMatrix.stack([trained_qa.prepare(q).vector for q in queries], len(trained_qa.vocab))
    for path, models in trained_qa.models.items():
        for kind, model in models.items():
            assert np.array_equal(model.predict_proba(X), loaded.models[path][kind].predict_proba(X))
    for q in queries:
        assert loaded.rank(q) == trained_qa.rank(q)


def test_blob_round_trip(tmp_path):
    a = {"w": np.arange(6, dtype=np.float64).reshape(2, 3), "i": np.array([3, 1], dtype=np.int64)}
    write_blob(tmp_path / "x.bin", {"name": "ক"}, a)
    meta, arrays = read_blob(tmp_path / "x.bin")
    assert meta["name"] == "ক"
    for k in a:
        assert np.array_equal(arrays[k], a[k]) and arrays[k].dtype == a[k].dtype


def test_blob_version_refused(tmp_path):
    write_blob(tmp_path / "x.bin", {}, version=FORMAT_VERSION + 1)
    with pytest.raises(StateError, match=f"version {FORMAT_VERSION + 1}.*version {FORMAT_VERSION}"):
        read_blob(tmp_path / "x.bin")


def copy_state(saved, tmp_path):
    d = tmp_path / "s"
    shutil.copytree(saved, d)
    return d


def test_manifest_version_bump_refused(saved, tmp_path):
    d = copy_state(saved, tmp_path)
    m = json.loads((d / "manifest.json").read_text())
    m["format_version"] = FORMAT_VERSION + 1
    (d / "manifest.json").write_text(json.dumps(m))
    with pytest.raises(StateError, match=str(FORMAT_VERSION + 1)):
        load_state(d)


def test_schema_mismatch(saved, tmp_path):
    d = copy_state(saved, tmp_path)
    m = json.loads((d / "manifest.json").read_text())
    m["schema_version"] = "fv0"
    (d / "manifest.json").write_text(json.dumps(m))
    with pytest.raises(SchemaMismatchError):
        load_state(d)


def test_missing_node_file_names_node(saved, tmp_path):
    d = copy_state(saved, tmp_path)
    (d / "models" / node_dirname(("sports",)) / "svm.model").unlink()
    with pytest.raises(StateError, match="node sports"):
        load_state(d)


def test_corrupted_file_named(saved, tmp_path):
    d = copy_state(saved, tmp_path)
    f = d / "index.bin"
    raw = bytearray(f.read_bytes())
    raw[-1] ^= 0xFF
    f.write_bytes(bytes(raw))
    with pytest.raises(StateError, match=r"index\.bin.*corrupted"):
        load_state(d)


def test_truncated_file_named(saved, tmp_path):
    d = copy_state(saved, tmp_path)
    f = d / "vocab.bin"
    f.write_bytes(f.read_bytes()[:6])
    with pytest.raises(StateError, match=r"vocab\.bin"):
        load_state(d)


def test_missing_state_dir(tmp_path):
    with pytest.raises(StateError):
        load_state(tmp_path / "nope")


def test_resave_is_byte_identical(trained_qa, saved, tmp_path):
    d = tmp_path / "again"
    save_state(load_state(saved), d)
    for f in sorted(p.relative_to(saved) for p in saved.rglob("*") if p.is_file()):
        assert (d / f).read_bytes() == (saved / f).read_bytes(), f
