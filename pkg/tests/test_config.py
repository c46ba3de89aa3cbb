import pytest

from sembangla.config import EngineConfig, load_config
from sembangla.errors import UsageError


def test_defaults():
    cfg = load_config()
    assert cfg.ensemble.weight == 0.25 and cfg.ensemble.win_threshold == 0.5
    assert cfg.eval.k == 10 and cfg.retrieval.top_n == 5


def test_file_then_overrides(tmp_path):
    f = tmp_path / "engine.ini"
    f.write_text("[ensemble]\nnull_floor = 0.4\n[tree]\nprune = no\n[mlp]\nhidden = 8\n",
                 encoding="utf-8")
    cfg = load_config(f, ["ensemble.null_floor=0.3", "eval.k=5"])
    assert cfg.ensemble.null_floor == 0.3
    assert cfg.tree.prune is False and cfg.eval.k == 5
    assert cfg.classifier_hyperparams()["mlp"]["hidden"] == 8


def test_base_not_mutated():
    base = EngineConfig()
    cfg = load_config(overrides=["svm.C=2"], base=base)
    assert cfg.svm.C == 2.0 and base.svm.C == 1.0


@pytest.mark.parametrize("override", [
    "nope.k=1", "eval.nope=1", "eval.k=x", "tree.prune=maybe", "missing_equals",
    "ensemble.weight=0.3", "eval.k=1", "retrieval.top_n=0", "tree.confidence=0.7",
])
def test_rejected(override):
    with pytest.raises(UsageError):
        load_config(overrides=[override])


def test_unreadable_file(tmp_path):
    with pytest.raises(UsageError):
        load_config(tmp_path / "absent.ini")


def test_round_trip_dict():
    cfg = load_config(overrides=["retrieval.answer_threshold=0.5"])
    assert cfg.to_dict()["retrieval"]["answer_threshold"] == 0.5
