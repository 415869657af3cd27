import pytest
from hypothesis import given, settings, strategies as st

from asfplus.errors import DuplicateInstanceName, DuplicateShortName, LexError, ParseError
from asfplus.lexer import lex
from asfplus.model import App, BindingBlock, Var, canonical, render_module, resolve_module
from asfplus.normalizer import Normalizer
from asfplus.parser import parse_module, parse_specification
from asfplus.printer import print_module

from conftest import corpus_spec


def texts(source, **kw):
    return [t.text for t in lex(source, **kw)][:-1]


def test_lexer_splits_operators_and_labels():
    assert texts("x + s(0) --> [a1] _+_ : NAT # NAT -> NAT") == [
        "x", "+", "s", "(", "0", ")", "-->", "[", "a1", "]",
        "_", "+", "_", ":", "NAT", "#", "NAT", "->", "NAT",
    ]


def test_lexer_skips_comments():
    assert texts("a /* b */ c") == ["a", "c"]


def test_hyphen_needs_hidden_mode():
    with pytest.raises(LexError):
        lex("Bo-x")
    assert texts("Bo-and OSeq[ONSeq]-seq1", allow_hidden=True) == ["Bo-and", "OSeq[ONSeq]-seq1"]


def test_binding_import_is_parsed_into_its_parts(spec):
    imp = spec.modules["OrdNatSequences"].imports[0]
    assert (imp.module, imp.inst) == ("OrdSequences", "ONSeq")
    assert imp.renaming == {"SEQ": "NSEQ", "nil": "Nnil"}
    assert imp.blocks == (BindingBlock({"ITEMpar": "NAT", "ordpar": "greater"}, "OrdNaturals"),)
    assert imp.visibility["cons"] == "public"


def test_passthrough_tuple_and_actual_parameters(spec):
    sos = spec.modules["SeqOfSeq"]
    first, second = sos.imports
    assert first.blocks[0].act_params == (("ITEMpar",),)
    assert second.passthrough == (("ITEMpar",),)
    assert sos.header == (("ITEMpar",),)


def test_copy_of_renames_to_itself():
    spec = corpus_spec(extra=["nat3.asfp"])
    imp = spec.modules["Nat3"].imports[0]
    assert imp.renaming == {"NAT": "NAT"} and imp.inst == "Nat3"


def test_duplicate_short_names_are_rejected():
    with pytest.raises(DuplicateShortName):
        parse_specification(["module A short X { }", "module B short X { }"])


def test_duplicate_instance_names_are_rejected():
    src = "module A { } module B { import A[I] import A[I] }"
    with pytest.raises(DuplicateInstanceName):
        parse_specification([src])


def test_parse_error_reports_position():
    with pytest.raises(ParseError) as err:
        parse_specification([("bad.asfp", "module A {\n  import }")])
    assert err.value.pos[0] == "bad.asfp" and err.value.pos[1] == 2


INFIX = """
module P
{
   add signature { public: sorts N  constructors 0 : -> N
                   non-constructors _+_, _*_ : N # N -> N }
   variables { x, y, z : -> N }
   equations { [e1] x + y * z = x }
}
"""


def test_infix_operators_associate_to_the_left():
    eq = parse_module(INFIX).equations[0]
    lhs = eq.eq.lhs
    assert isinstance(lhs, App) and lhs.name == "*"
    assert lhs.args[0].name == "+" and isinstance(lhs.args[1], Var)


def test_every_corpus_module_round_trips(spec):
    for mod in spec.modules.values():
        assert canonical(parse_module(print_module(mod), fixity=spec.fixity)) == canonical(mod)


def test_disambiguated_printing(spec):
    module = Normalizer(spec).nf("Naturals").module
    text = print_module(module, disambiguate=True, abbrevs=spec.abbrevs)
    assert "+[NAT,NAT]" in text and "true[]" in text
    back = resolve_module(parse_module(text, allow_hidden=True, fixity=spec.fixity))
    assert canonical(back) == canonical(render_module(module, spec.abbrevs))


_names = st.sampled_from(["f", "g", "h"])


@st.composite
def terms(draw, depth=3):
    if depth == 0 or draw(st.booleans()):
        return draw(st.sampled_from(["x", "y", "c"]))
    return f"{draw(_names)}({draw(terms(depth - 1))}, {draw(terms(depth - 1))})"


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(terms(), terms()), min_size=1, max_size=4))
def test_generated_equations_round_trip(pairs):
    eqs = "\n".join(f"[e{i}] {a} = {b}" for i, (a, b) in enumerate(pairs))
    src = f"""module G {{
   add signature {{ public: sorts S constructors c : -> S  non-constructors f, g, h : S # S -> S }}
   variables {{ x, y : -> S }}
   equations {{ {eqs} }}
}}"""
    mod = parse_module(src)
    assert canonical(parse_module(print_module(mod))) == canonical(mod)
