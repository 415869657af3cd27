"""End-to-end acceptance checks, one test per criterion.

Each test records its outcome in ``RESULTS``; the terminal summary hook in
conftest prints one PASS/FAIL line per criterion after the run. Running this
file directly prints the same lines.
"""

import dataclasses
import functools
import itertools
import random
import re

import pytest

from asfplus import provedb
from asfplus.cli import main
from asfplus.diagram import emit_dot, structure_tree
from asfplus.errors import AsfError, NameClash, SemanticError
from asfplus.macros import expand_module
from asfplus.model import ModInstName, canonical, render_module, resolve_module, user_part
from asfplus.normalizer import Normalizer
from asfplus.parser import AsfSpec, parse_module, parse_specification
from asfplus.printer import print_module

from conftest import CORPUS, FIXTURES, corpus_files, corpus_spec, proven_db
from hierarchies import as_dict, random_hierarchy, spec_text, violations

RESULTS: dict = {}
TITLES = {
    1: "golden normal form of OrdNatSequences",
    2: "macro expansion of Booleans",
    3: "name clash detection in CopyDemo",
    4: "dependency function of OrdNatSequences",
    5: "semantic conditions gated by the proof ledger",
    6: "self-binding in SeqOfSeq",
    7: "import-order invariance",
    8: "agreement with the identification oracle",
    9: "print/parse round trip",
    10: "diagram nesting equals the reduced dependency relation",
}


def criterion(n):
    def wrap(fn):
        @functools.wraps(fn)
        def run(*args, **kwargs):
            try:
                fn(*args, **kwargs)
            except BaseException:
                RESULTS[n] = "FAIL"
                raise
            RESULTS[n] = "PASS"
        return run
    return wrap


def ns(text):
    m = re.fullmatch(r"(\w+)(?:\[(.*)\])?", text)
    return ModInstName(m.group(1), tuple(m.group(2).split(",")) if m.group(2) else ())


def _nf(spec, name, db=None):
    return Normalizer(spec, db).nf(name)


def _fingerprint(nf):
    return canonical(nf.module), nf.originf, nf.depf


# --------------------------------------------------------------------------- 1


@criterion(1)
def test_golden_normal_form(spec, pdb):
    result = _nf(spec, "OrdNatSequences", pdb)
    golden = (FIXTURES / "OrdNatSequences.nf.asfp").read_text()
    expected = resolve_module(parse_module(golden, allow_hidden=True, fixity=spec.fixity))
    assert canonical(render_module(result.module, spec.abbrevs)) == canonical(expected)

    text = print_module(result.module, abbrevs=spec.abbrevs)
    for hidden in ("Bo-and", "Nat-+", "OSeq-seq1", "ONat-geq"):
        assert hidden in text
    greater = [d for sig in result.module.signatures() for d, _ in sig.decls()
               if user_part(d.name) == "greater"]
    assert len(greater) == 2 and len({d.sortv for d in greater}) == 2
    assert "macro-equation" in text


# --------------------------------------------------------------------------- 2

BOOLEANS_EXPANDED = """
module Booleans
short  Bo
{
   add signature
   {  public:
         sorts BOOL
         constructors true, false : -> BOOL
         non-constructors and, or : BOOL # BOOL -> BOOL
      private:
         non-constructors not : BOOL -> BOOL  }
   variables
   {  non-constructors x,y : -> BOOL  }
   equations
   {
      [me-and1] and(true, y) = y
      [me-and2] and(false, y) = false
      [me-not1] not(true) = false
      [me-not2] not(false) = true
      [e1] or(x, y) = not(and(not(x), not(y)))
   }
}
"""


@criterion(2)
def test_macro_expansion_of_booleans(spec):
    expanded, labels = expand_module(spec.modules["Booleans"])
    assert labels == ["me-and1", "me-and2", "me-not1", "me-not2"]
    assert canonical(expanded) == canonical(parse_module(BOOLEANS_EXPANDED, allow_hidden=True))


# --------------------------------------------------------------------------- 3

THIRD_IMPORT = "   import exABC      {  public: C  }\n"


def _copydemo(text):
    return parse_specification([("copydemo.asfp", text)], top="CopyDemo")


@criterion(3)
def test_copydemo_conflicts():
    text = (CORPUS / "extra" / "copydemo.asfp").read_text()
    assert THIRD_IMPORT in text and "B renamed to Bnew" in text

    with pytest.raises(NameClash) as err:
        _nf(_copydemo(text), "CopyDemo")
    assert "sort C" in str(err.value)

    _nf(_copydemo(text.replace(THIRD_IMPORT, "")), "CopyDemo")

    with pytest.raises(NameClash):
        _nf(_copydemo(text.replace("B renamed to Bnew", "B renamed to B")), "CopyDemo")


# --------------------------------------------------------------------------- 4

LISTED_DEPF = {
    "Booleans": {"Naturals", "OrdNaturals", "OrdSequences[ONSeq]", "OrdNatSequences"},
    "Naturals": {"OrdNaturals", "OrdSequences[ONSeq]", "OrdNatSequences"},
    "OrdSequences[ONSeq]": {"OrdNatSequences"},
    "OrdNatSequences": set(),
}


@criterion(4)
def test_dependency_function_matches_listing(spec, pdb):
    depf = _nf(spec, "OrdNatSequences", pdb).depf
    expected = {ns(k): {ns(v) for v in vs} for k, vs in LISTED_DEPF.items()}
    assert {k: set(v) for k, v in depf.items()} == expected


# --------------------------------------------------------------------------- 5


@criterion(5)
def test_semantic_gating(tmp_path, capsys):
    files = [p for p, _ in corpus_files()]
    db = str(tmp_path / "proofs.provedb")
    out = str(tmp_path / "out.asfp")

    with pytest.raises(SemanticError) as err:
        _nf(corpus_spec(), "OrdNatSequences", provedb.ProveDb())
    labels = sorted(re.search(r"\[(\w+)\]", e.message).group(1) for e in err.value.errors)
    assert labels == ["irref", "total", "trans"]

    assert main(["normalize", "--provedb", db, "-o", out, *files]) == 1
    assert capsys.readouterr().err.count("E-SEM") == 3

    for label in ("irref", "trans", "total"):
        assert main(["prove", "record", "--provedb", db, "--module", "OrdNaturals",
                     "--label", label, "--ref", "manual", *files]) == 0
    assert main(["normalize", "--provedb", db, "-o", out, *files]) == 0
    assert "module OrdNatSequences.nf" in open(out).read()


# --------------------------------------------------------------------------- 6


@criterion(6)
def test_self_binding(spec):
    result = _nf(spec, "SeqOfSeq")
    sorts = {user_part(s) for sig in result.module.signatures() for s in sig.sorts}
    assert {"SEQ", "SEQ1"} <= sorts
    cons = {(tuple(map(user_part, d.sortv)), user_part(t.target))
            for sig in result.module.signatures() for d, t in sig.decls() if user_part(d.name) == "cons"}
    assert cons == {(("ITEMpar", "SEQ"), "SEQ"), (("SEQ", "SEQ1"), "SEQ1")}


# --------------------------------------------------------------------------- 7


def _with_imports(spec, name, imports):
    modules = dict(spec.modules)
    modules[name] = dataclasses.replace(modules[name], imports=tuple(imports))
    return AsfSpec(modules, spec.top, spec.abbrevs, spec.fixity, spec.sources)


def _is_use_import(imp):
    return imp.inst is None and not imp.renaming and not imp.blocks


def _outcome(text, top):
    try:
        return _fingerprint(Normalizer(parse_specification([text])).nf(top))
    except AsfError:
        return "rejected"


@criterion(7)
def test_import_order_invariance(spec, pdb):
    for name, mod in spec.modules.items():
        base = _fingerprint(_nf(spec, name, pdb))
        for perm in itertools.islice(itertools.permutations(mod.imports), 1, 24):
            assert _fingerprint(_nf(_with_imports(spec, name, perm), name, pdb)) == base, name
        for i, imp in enumerate(mod.imports):
            if _is_use_import(imp):
                doubled = list(mod.imports[:i + 1]) + [imp] + list(mod.imports[i + 1:])
                assert _fingerprint(_nf(_with_imports(spec, name, doubled), name, pdb)) == base, name

    rng = random.Random(20240607)
    for _ in range(200):
        mods = random_hierarchy(rng, copies=True)
        top = mods[-1].name
        base = _outcome(spec_text(mods), top)
        orders = {m.name: rng.sample(range(len(m.imports)), len(m.imports)) for m in mods}
        assert _outcome(spec_text(mods, orders), top) == base
        uses = [i for i in mods[-1].imports if i.inst is None]
        if uses:
            mods[-1].imports.append(rng.choice(uses))
            assert _outcome(spec_text(mods), top) == base


# --------------------------------------------------------------------------- 8


@criterion(8)
def test_oracle_agreement():
    rng = random.Random(8)
    seen = set()
    for _ in range(500):
        mods = random_hierarchy(rng, max_modules=4)
        top = mods[-1].name
        expected = violations(as_dict(mods), top)
        try:
            Normalizer(parse_specification([spec_text(mods)])).nf(top)
            got = None
        except AsfError as e:
            got = e.kind
        if expected:
            assert got in expected, spec_text(mods)
        else:
            assert got is None, spec_text(mods)
        seen.add(got)
    assert {None, "NameClash", "ExportabilityConflict"} <= seen


# --------------------------------------------------------------------------- 9


def _nf_round_trip(module, spec):
    text = print_module(module, abbrevs=spec.abbrevs)
    back = resolve_module(parse_module(text, allow_hidden=True, fixity=spec.fixity))
    return canonical(back) == canonical(render_module(module, spec.abbrevs))


@criterion(9)
def test_round_trip(spec, pdb):
    for mod in spec.modules.values():
        again = parse_module(print_module(mod), fixity=spec.fixity)
        assert canonical(again) == canonical(mod), mod.name

    for name in spec.modules:
        assert _nf_round_trip(_nf(spec, name, pdb).module, spec), name

    rng = random.Random(9)
    for _ in range(100):
        mods = random_hierarchy(rng, copies=True)
        gen = parse_specification([spec_text(mods)])
        try:
            result = Normalizer(gen).nf(mods[-1].name)
        except AsfError:
            continue
        assert _nf_round_trip(result.module, gen)

    naturals = _nf(spec, "Naturals").module
    text = print_module(naturals, disambiguate=True, abbrevs=spec.abbrevs)
    assert "+[NAT,NAT]" in text
    back = resolve_module(parse_module(text, allow_hidden=True, fixity=spec.fixity))
    assert canonical(back) == canonical(render_module(naturals, spec.abbrevs))


# -------------------------------------------------------------------------- 10


def dot_nesting(dot: str) -> set:
    """(outer, inner) label pairs of directly nested clusters."""
    stack, pairs = [], set()
    for line in dot.splitlines():
        line = line.strip()
        if line.startswith("subgraph "):
            stack.append(None)
        elif line.startswith("label=") and stack:
            label = line[len('label="'):-2]
            stack[-1] = label
            if len(stack) > 1:
                pairs.add((stack[-2], label))
        elif line == "}" and stack:
            stack.pop()
    return pairs


def reduced_edges(depf) -> set:
    """Edges x -> n (x depends on n) not implied by a longer path."""
    succ = {n: set() for n in depf}
    for n, dependents in depf.items():
        for x in dependents:
            succ[x].add(n)

    def reachable(a, b, skip):
        todo, seen = [c for c in succ[a] if (a, c) != skip], set()
        while todo:
            c = todo.pop()
            if c == b:
                return True
            if c not in seen:
                seen.add(c)
                todo.extend(succ[c])
        return False

    return {(str(x), str(n)) for x in succ for n in succ[x] if not reachable(x, n, (x, n))}


@criterion(10)
def test_diagram_nesting(spec, pdb):
    for name in ("Naturals", "Integers", "OrdNatSequences"):
        result = _nf(spec, name, pdb)
        nesting = dot_nesting(emit_dot(structure_tree(result)))
        assert nesting == reduced_edges(result.depf), name
    chain = ["OrdNatSequences", "OrdSequences[ONSeq]", "OrdNaturals", "Naturals", "Booleans"]
    ons = dot_nesting(emit_dot(structure_tree(_nf(spec, "OrdNatSequences", pdb))))
    assert ons == set(zip(chain, chain[1:]))


if __name__ == "__main__":
    import sys
    sys.exit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
