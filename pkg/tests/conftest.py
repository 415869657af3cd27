from pathlib import Path

import pytest

from asfplus import provedb
from asfplus.normalizer import Normalizer
from asfplus.parser import parse_specification

ROOT = Path(__file__).resolve().parent.parent
CORPUS = ROOT / "corpus"
FIXTURES = Path(__file__).resolve().parent / "fixtures"

# dependency order, so the first file's module is a sensible default top
CORPUS_FILES = [
    "OrdNatSequences", "OrdSequences", "OrdNaturals", "Integers", "SeqOfSeq",
    "Sequences", "Naturals", "Booleans",
]
ORDNAT_GOALS = ("irref", "trans", "total")


def corpus_files(extra=()):
    names = [CORPUS / f"{n}.asfp" for n in CORPUS_FILES] + [CORPUS / "extra" / e for e in extra]
    return [(str(p), p.read_text()) for p in names]


def corpus_spec(top=None, extra=()):
    return parse_specification(corpus_files(extra), top=top)


def proven_db(spec):
    """A ledger in which every OrdNaturals goal is recorded as proven."""
    db = provedb.ProveDb()
    norm = Normalizer(spec, db)
    for label in ORDNAT_GOALS:
        provedb.record(db, "OrdNaturals", label, norm.goal("OrdNaturals", label), "by hand", "test")
    return db


@pytest.fixture
def spec():
    return corpus_spec()


@pytest.fixture
def pdb(spec):
    return proven_db(spec)


def pytest_terminal_summary(terminalreporter):
    acceptance = __import__("sys").modules.get("test_acceptance")
    if acceptance is None or not acceptance.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(acceptance.TITLES):
        status = acceptance.RESULTS.get(n, "NOT RUN")
        terminalreporter.write_line(f"criterion {n:>2}: {status:<7} {acceptance.TITLES[n]}")
