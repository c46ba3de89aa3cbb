"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 data or format error, 3 internal
invariant violation.  Every failure prints one ``error[<code>]: ...`` line
to stderr.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .config import EngineConfig, load_config
from .engine import Engine
from .errors import InvariantError, SemSearchError, UsageError
from .evaluation import EvalReport
from .morphology import extract_root_verb, load_suffix_table
from .persistence import load_state, read_manifest, save_state
from .retrieval import node_key
from .synth import generate_corpus, write_jsonl
from .text import normalize

CLASSIFIER_CHOICES = ("nb", "svm", "tree", "mlp", "ensemble")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _config_parent() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--config", metavar="FILE", help="INI configuration file")
    p.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                   help="override one configuration key, e.g. ensemble.null_floor=0.3")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _config_parent()
    ap = _Parser(prog="sembangla",
                 description="Hierarchical question answering over a Bengali sentence repository.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", metavar="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("ingest", parents=[common], help="ingest a labeled corpus into a state directory")
    p.add_argument("corpus", help="JSONL file or <class>/<subclass>/<file>.txt tree")
    p.add_argument("-o", "--output", required=True, metavar="STATE")
    p.add_argument("--suffixes", help="suffix table TSV (default: packaged table)")
    p.add_argument("--function-words", help="function-word list (default: packaged list)")
    p.add_argument("--synonyms", help="synonym lexicon TSV")
    p.add_argument("--kb", help="knowledge base TSV")
    p.add_argument("--category-map", help="source-label to category-path TSV")

    p = sub.add_parser("train", parents=[common], help="train four classifiers per branching node")
    p.add_argument("-s", "--state", required=True)

    p = sub.add_parser("eval", parents=[common], help="cross-validate or split-evaluate a classifier")
    p.add_argument("-s", "--state", required=True)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--kfold", type=int, metavar="K")
    mode.add_argument("--split", type=float, metavar="PCT")
    p.add_argument("--no-shuffle", action="store_true", help="percentage split takes the prefix")
    p.add_argument("--seed", type=int)
    p.add_argument("--classifier", choices=CLASSIFIER_CHOICES, default="ensemble")
    p.add_argument("--node", default="", help="tree node to evaluate, e.g. sports (default: root)")
    p.add_argument("--json", action="store_true")
    p.add_argument("--report-dir", metavar="DIR",
                   help="write report.json, confusion.tsv, predictions.jsonl and PNG figures")

    p = sub.add_parser("query", parents=[common], help="answer one question")
    p.add_argument("-s", "--state", required=True)
    p.add_argument("text")
    p.add_argument("--trace", action="store_true")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("repl", parents=[common], help="answer questions read line by line")
    p.add_argument("-s", "--state", required=True)
    p.add_argument("--trace", action="store_true")

    p = sub.add_parser("stem", parents=[common], help="split a verb into root and suffix")
    p.add_argument("word")
    p.add_argument("--suffixes")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("synth", help="write a synthetic labeled corpus as JSONL")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--per-category", type=int, default=100)
    p.add_argument("--noise", type=float, default=0.1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--hierarchical", action="store_true")
    return ap


def _config(args, base: EngineConfig | None = None) -> EngineConfig:
    return load_config(getattr(args, "config", None), getattr(args, "overrides", []), base)


def _load(args) -> Engine:
    read_manifest(args.state)
    engine = load_state(args.state)
    engine.config = _config(args, engine.config)
    return engine


def _print(text: str = "") -> None:
    sys.stdout.write(text + "\n")


def cmd_ingest(args) -> int:
    cfg = _config(args)
    engine = Engine.ingest(args.corpus, cfg, suffixes=args.suffixes,
                           function_words=args.function_words, synonyms=args.synonyms,
                           kb=args.kb, category_map=args.category_map)
    save_state(engine, args.output)
    tree = engine.tree
    _print(f"sentences\t{len(engine.corpus.records)}")
    _print(f"categories\t{len(tree.children(()))}")
    _print(f"leaves\t{len(tree.leaves())}")
    _print(f"terms\t{len(engine.vocab)}")
    _print(f"kb_rows\t{len(engine.resources.kb)}")
    _print(f"state\t{args.output}")
    return 0


def cmd_train(args) -> int:
    engine = _load(args)
    engine.train()
    save_state(engine, args.state)
    for path in sorted(engine.models, key=lambda p: (len(p), p)):
        data = engine.node_dataset(path)
        _print(f"{node_key(path)}\t{len(data)} sentences\t{data.n_categories} children\t"
               + ",".join(engine.models[path]))
    return 0


def _write_report_dir(directory: Path, report: EvalReport, preds, title: str) -> None:
    from .plotting import plot_confusion, plot_fold_accuracy

    directory.mkdir(parents=True, exist_ok=True)
    (directory / "report.json").write_text(report.to_json() + "\n", encoding="utf-8")
    (directory / "confusion.tsv").write_text(report.confusion.to_tsv(), encoding="utf-8")
    with open(directory / "predictions.jsonl", "w", encoding="utf-8") as fh:
        for rec in sorted(preds, key=lambda r: r.index):
            fh.write(rec.to_json() + "\n")
    plot_confusion(report, directory / "confusion.png", title=title)
    if report.folds:
        plot_fold_accuracy(report, directory / "fold_accuracy.png", title=title)


def cmd_eval(args) -> int:
    engine = _load(args)
    node = tuple(p for p in args.node.split("/") if p)
    report, preds = engine.evaluate(
        args.classifier, node, kfold=args.kfold, split=args.split, seed=args.seed,
        shuffle=False if args.no_shuffle else None)
    if args.json:
        _print(report.to_json())
    else:
        mode = (f"split {args.split:g}%" if args.split is not None
                else f"{args.kfold or engine.config.eval.k}-fold cross-validation")
        _print(f"=== {args.classifier} on {node_key(node)}, {mode} ===")
        _print(report.to_text())
    if args.report_dir:
        _write_report_dir(Path(args.report_dir), report, preds,
                          f"{args.classifier} @ {node_key(node)}")
    return 0


def format_trace(trace: dict) -> str:
    lines = [f"query\t{trace['query']}", f"sentence_type\t{trace['sentence_type']}"]
    mv = trace["main_verb"]
    lines.append("main_verb\t" + ("-" if mv is None else
                                  f"{mv['surface']} = {mv['root']} + {mv['suffix']} "
                                  f"({mv['tense']}, {mv['person'] or '-'})"))
    exp = trace["expansion"]
    lines.append("expansion\t" + (", ".join(f"{a} -> {b}" for a, b in exp) if exp else "-"))
    for v in trace["routing"]["votes"]:
        weights = " ".join(f"{c}={w:.2f}" for c, w in sorted(v["weights"].items()))
        winners = ",".join(v["winners"]) or "NULL"
        lines.append(f"vote\t{node_key(v['node'])}\twinners={winners}\t{weights}"
                     f"\tnull={v['null_weight']:.2f}")
    if trace["routing"]["fallback"]:
        lines.append("fallback\twhole repository")
    lines.append("paths\t" + " | ".join(node_key(p) for p in trace["routing"]["paths"]))
    for rank, h in enumerate(trace["hits"], 1):
        lines.append(f"hit\t{rank}\t{h['score']:.6f}\t{h['id']}\t{'/'.join(h['leaf'])}")
    if trace["notice"]:
        lines.append(f"notice\t{trace['notice']}")
    lines.append("hit_leaves\t" + (" | ".join(trace["hit_leaves"]) or "-"))
    return "\n".join(lines)


def _answer(engine: Engine, text: str, trace: bool, as_json: bool = False) -> None:
    answer = engine.query(text)
    if as_json:
        d = answer.to_dict()
        if not trace:
            d.pop("trace")
        _print(json.dumps(d, ensure_ascii=False, sort_keys=True))
        return
    _print(answer.text)
    if trace:
        _print(format_trace(answer.trace))


def cmd_query(args) -> int:
    engine = _load(args)
    _answer(engine, args.text, args.trace, args.json)
    return 0


def cmd_repl(args) -> int:
    engine = _load(args)
    trace = args.trace
    interactive = sys.stdin.isatty()
    while True:
        if interactive:
            sys.stdout.write("> ")
            sys.stdout.flush()
        line = sys.stdin.readline()
        if not line:
            break
        line = line.strip()
        if not line:
            continue
        if line in (":q", ":quit", ":exit"):
            break
        if line == ":trace":
            trace = not trace
            _print(f"trace {'on' if trace else 'off'}")
            continue
        try:
            _answer(engine, line, trace)
        except UsageError as exc:
            sys.stderr.write(f"error[{exc.exit_code}]: {exc}\n")
    return 0


def cmd_stem(args) -> int:
    table = load_suffix_table(args.suffixes)
    word = normalize(args.word)
    va = extract_root_verb(word, table)
    if va is None:
        if args.json:
            _print(json.dumps({"word": word, "verb": None}, ensure_ascii=False))
        else:
            _print(f"{word}\tnot an inflected verb")
        return 0
    d = {"word": word, "root": va.root, "suffix": va.suffix, "tense": va.tense.value,
         "person": va.person.value if va.person else None}
    if args.json:
        _print(json.dumps(d, ensure_ascii=False, sort_keys=True))
    else:
        for k in ("root", "suffix", "tense", "person"):
            _print(f"{k}\t{d[k] if d[k] is not None else '-'}")
    return 0


def cmd_synth(args) -> int:
    rows = generate_corpus(args.per_category, args.noise, seed=args.seed,
                           hierarchical=args.hierarchical)
    write_jsonl(rows, args.output)
    _print(f"wrote {len(rows)} sentences to {args.output}")
    return 0


COMMANDS = {
    "ingest": cmd_ingest, "train": cmd_train, "eval": cmd_eval, "query": cmd_query,
    "repl": cmd_repl, "stem": cmd_stem, "synth": cmd_synth,
}


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return COMMANDS[args.command](args)
    except SemSearchError as exc:
        sys.stderr.write(f"error[{exc.exit_code}]: {exc}\n")
        return exc.exit_code
    except KeyboardInterrupt:
        return 130
    except Exception as exc:  # anything unexpected is an internal fault
        sys.stderr.write(f"error[{InvariantError.exit_code}]: internal error: "
                         f"{type(exc).__name__}: {exc}\n")
        return InvariantError.exit_code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
