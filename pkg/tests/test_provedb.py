import pytest
from hypothesis import given, strategies as st

from asfplus import provedb
from asfplus.errors import FormatError, UnknownGoal
from asfplus.model import App, Clause, Eq, Hidden, ModInstName, Var
from asfplus.normalizer import Normalizer


def goal(var="x", label="g", sort="NAT"):
    return Clause(label, (), (Eq(App("s", (Var(var, sort),), (sort,)), App("0", (), ())),))


def test_fingerprint_ignores_labels_and_variable_names():
    assert provedb.clause_fingerprint(goal("x", "a")) == provedb.clause_fingerprint(goal("y", "b"))
    assert provedb.clause_fingerprint(goal(sort="INT")) != provedb.clause_fingerprint(goal())


def test_user_view_strips_hidden_prefixes():
    hidden = goal(sort=Hidden(ModInstName("Naturals"), "NAT"))
    assert provedb.clause_fingerprint(provedb.user_view(hidden)) == provedb.clause_fingerprint(goal())


def test_record_and_check():
    db = provedb.ProveDb()
    provedb.record(db, "M", "g", goal(), "notes.txt", "M:0", timestamp="2020-01-01T00:00:00+00:00")
    assert provedb.is_proven(db, "M", "g", goal("z"))
    assert not provedb.is_proven(db, "M", "g", goal(sort="INT"))
    assert not provedb.is_proven(db, "M", "other", goal())
    assert not provedb.is_proven(None, "M", "g", goal())


def test_record_needs_an_existing_goal():
    with pytest.raises(UnknownGoal):
        provedb.record(provedb.ProveDb(), "M", "g", None, "", "")


_field = st.text(st.characters(blacklist_categories=("Cc", "Cs"), blacklist_characters="\t#"),
                 min_size=1, max_size=8).filter(lambda s: s.strip() == s)


@given(st.lists(st.tuples(_field, _field, _field), max_size=5))
def test_dump_and_parse_round_trip(rows):
    db = provedb.ProveDb()
    for module, label, ref in rows:
        provedb.record(db, module, label, goal(), ref, "top:1", timestamp="t")
    assert provedb.parse(provedb.dumps(db)).records == db.records


@pytest.mark.parametrize("line", ["M\tg\tabc\tr\ts\tt", "M\tg\tonly-three", "\t".join(["M", "g", "0" * 63 + "g", "", "", ""])])
def test_malformed_lines_are_rejected(line):
    with pytest.raises(FormatError):
        provedb.parse(line, "db")


def test_comments_and_blank_lines_are_skipped():
    assert len(provedb.parse("# header\n\n")) == 0


def test_load_missing_file_is_empty(tmp_path):
    assert len(provedb.load(str(tmp_path / "none.provedb"))) == 0


def test_store_and_load(tmp_path):
    db = provedb.record(provedb.ProveDb(), "M", "g", goal(), "r", "s", timestamp="t")
    path = str(tmp_path / "x.provedb")
    provedb.store(db, path)
    assert provedb.load(path).records == db.records


def test_default_path(monkeypatch):
    monkeypatch.delenv(provedb.ENV_VAR, raising=False)
    assert provedb.default_path("dir/spec.asfp") == "dir/spec.provedb"
    assert provedb.default_path(None) is None
    monkeypatch.setenv(provedb.ENV_VAR, "/tmp/elsewhere")
    assert provedb.default_path("dir/spec.asfp") == "/tmp/elsewhere"


def test_validate_finds_stale_and_missing_records(spec):
    norm = Normalizer(spec)
    db = provedb.ProveDb()
    provedb.record(db, "OrdNaturals", "irref", norm.goal("OrdNaturals", "irref"), "", "", timestamp="t")
    provedb.record(db, "OrdNaturals", "trans", norm.goal("OrdNaturals", "irref"), "", "", timestamp="t")
    db.records[("OrdNaturals", "gone")] = db.records[("OrdNaturals", "irref")]._replace(label="gone")
    stale = {rec.label: why for rec, why in provedb.validate(db, norm.goal)}
    assert set(stale) == {"trans", "gone"}
    assert "changed" in stale["trans"] and "no longer" in stale["gone"]


def test_spec_fingerprint_depends_on_text():
    a = provedb.spec_fingerprint("Top", ["module A { }"])
    assert a.startswith("Top:") and len(a) == len("Top:") + 16
    assert a != provedb.spec_fingerprint("Top", ["module B { }"])
