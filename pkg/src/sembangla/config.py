"""Engine configuration: an INI-style file plus ``section.key=value`` overrides."""

from __future__ import annotations

import configparser
import copy
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

from .errors import UsageError


@dataclass
class PathsConfig:
    corpus: str | None = None
    suffixes: str | None = None
    function_words: str | None = None
    synonyms: str | None = None
    kb: str | None = None
    category_map: str | None = None
    state: str | None = None


@dataclass
class EnsembleSection:
    weight: float = 0.25
    win_threshold: float = 0.50
    null_floor: float = 0.25


@dataclass
class NBSection:
    alpha: float = 1.0


@dataclass
class SVMSection:
    C: float = 1.0
    tol: float = 1e-3
    max_passes: int = 10
    seed: int = 1


@dataclass
class TreeSection:
    min_leaf: int = 2
    confidence: float = 0.25
    prune: bool = True


@dataclass
class MLPSection:
    hidden: str = "auto"
    lr: float = 0.3
    momentum: float = 0.2
    epochs: int = 500
    top_k: int = 500
    seed: int = 42


@dataclass
class EvalSection:
    k: int = 10
    seed: int = 1
    pct: float = 66.0
    shuffle: bool = True


@dataclass
class RetrievalSection:
    top_n: int = 5
    answer_threshold: float = 0.2


@dataclass
class EngineConfig:
    paths: PathsConfig = field(default_factory=PathsConfig)
    ensemble: EnsembleSection = field(default_factory=EnsembleSection)
    nb: NBSection = field(default_factory=NBSection)
    svm: SVMSection = field(default_factory=SVMSection)
    tree: TreeSection = field(default_factory=TreeSection)
    mlp: MLPSection = field(default_factory=MLPSection)
    eval: EvalSection = field(default_factory=EvalSection)
    retrieval: RetrievalSection = field(default_factory=RetrievalSection)

    def set(self, dotted: str, value: str) -> None:
        section, _, key = dotted.partition(".")
        sec = getattr(self, section, None)
        if sec is None or not key or key not in {f.name for f in fields(sec)}:
            raise UsageError(f"unknown config key {dotted!r}")
        current = next(f for f in fields(sec) if f.name == key)
        setattr(sec, key, _coerce(dotted, current.type, value))

    def validate(self) -> None:
        e = self.ensemble
        if abs(4 * e.weight - 1.0) > 1e-12:
            raise UsageError("ensemble.weight must be 0.25 (four equal voters)")
        if not 0 <= e.win_threshold < 1 or not 0 <= e.null_floor <= 1:
            raise UsageError("ensemble thresholds must lie in [0, 1]")
        if self.nb.alpha <= 0 or self.svm.C <= 0:
            raise UsageError("nb.alpha and svm.C must be positive")
        if not 0 < self.tree.confidence <= 0.5 or self.tree.min_leaf < 1:
            raise UsageError("tree.confidence must lie in (0, 0.5] and tree.min_leaf >= 1")
        if self.mlp.top_k < 1 or self.mlp.epochs < 1:
            raise UsageError("mlp.top_k and mlp.epochs must be at least 1")
        if self.eval.k < 2 or not 0 < self.eval.pct <= 100:
            raise UsageError("eval.k must be >= 2 and eval.pct in (0, 100]")
        if self.retrieval.top_n < 1:
            raise UsageError("retrieval.top_n must be at least 1")

    def classifier_hyperparams(self) -> dict:
        mlp = asdict(self.mlp)
        if mlp["hidden"] != "auto":
            mlp["hidden"] = int(mlp["hidden"])
        return {"nb": asdict(self.nb), "svm": asdict(self.svm),
                "tree": asdict(self.tree), "mlp": mlp}

    def to_dict(self) -> dict:
        return asdict(self)


def _coerce(key, typ, value):
    typ = str(typ)
    try:
        if "bool" in typ:
            v = str(value).strip().lower()
            if v in ("1", "true", "yes", "on"):
                return True
            if v in ("0", "false", "no", "off"):
                return False
            raise ValueError(value)
        if typ == "int":
            return int(value)
        if typ == "float":
            return float(value)
    except ValueError:
        raise UsageError(f"bad value {value!r} for {key}") from None
    return None if value in ("", None) else str(value)


def load_config(path: str | Path | None = None, overrides: list[str] | None = None,
                base: EngineConfig | None = None) -> EngineConfig:
    """Defaults (or ``base``), then the INI file, then ``key=value`` overrides."""
    cfg = copy.deepcopy(base) if base is not None else EngineConfig()
    if path is not None:
        parser = configparser.ConfigParser()
        parser.optionxform = str
        try:
            with open(path, encoding="utf-8") as fh:
                parser.read_file(fh)
        except (OSError, configparser.Error) as exc:
            raise UsageError(f"cannot read config {path}: {exc}") from None
        for section in parser.sections():
            for key, value in parser.items(section):
                cfg.set(f"{section}.{key}", value)
    for item in overrides or []:
        key, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"override {item!r} is not key=value")
        cfg.set(key.strip(), value.strip())
    cfg.validate()
    return cfg
