from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from sembangla.engine import Engine
from sembangla.morphology import load_lexicon, load_suffix_table

settings.register_profile("default", max_examples=100, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

FIXTURES = Path(__file__).parent / "fixtures"
QA = FIXTURES / "qa"


@pytest.fixture(scope="session")
def table():
    return load_suffix_table()


@pytest.fixture(scope="session")
def lexicon():
    return load_lexicon()


def read_queries(path=QA / "queries.tsv"):
    out = []
    for line in path.read_text(encoding="utf-8").splitlines():
        if line.strip() and not line.startswith("#"):
            q, target = line.split("\t")
            out.append((q, target))
    return out


def qa_engine() -> Engine:
    return Engine.ingest(QA / "corpus.jsonl", kb=QA / "kb.tsv", synonyms=QA / "synonyms.tsv")


@pytest.fixture(scope="session")
def trained_qa():
    engine = qa_engine()
    engine.train()
    return engine


# acceptance criteria report: one line per criterion at the end of the run
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
