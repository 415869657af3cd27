import itertools

import pytest
from hypothesis import given, settings, strategies as st

from asfplus.errors import DuplicateLabel, ExpansionError
from asfplus.macros import expand_module
from asfplus.model import App, Var, user_part
from asfplus.parser import parse_module
from asfplus.printer import print_module


def render(t):
    if isinstance(t, Var):
        return user_part(t.name)
    args = ", ".join(render(a) for a in t.args)
    return f"{user_part(t.name)}({args})" if t.args else user_part(t.name)


def expanded(spec, name):
    module, _ = expand_module(spec.modules[name])
    return [e for e in module.equations if str(e.label).startswith("me-")]


def test_naturals_plus_and_eq(spec):
    eqs = {e.label: e for e in expanded(spec, "Naturals")}
    assert sorted(eqs) == ["me-+1", "me-+2", "me-eq1", "me-eq2"]
    assert render(eqs["me-+2"].eq.lhs) == "+(x, s(u))"
    assert render(eqs["me-+2"].eq.rhs) == "s(+(x, u))"
    assert eqs["me-eq1"].pos and not eqs["me-eq1"].neg
    assert eqs["me-eq2"].neg and not eqs["me-eq2"].pos


def test_lexicographic_order_expands_to_five(spec):
    eqs = expanded(spec, "OrdSequences")
    assert [e.label for e in eqs] == [f"me-greater{i}" for i in range(1, 6)]
    assert [(len(e.pos), len(e.neg)) for e in eqs] == [(0, 0), (0, 0), (1, 0), (1, 1), (0, 2)]
    assert "unless" in print_module(expand_module(spec.modules["OrdSequences"])[0])


def test_user_label_collision_is_reported(spec):
    src = print_module(spec.modules["Booleans"]).replace("[e1]", "[me-not2]")
    with pytest.raises(DuplicateLabel):
        expand_module(parse_module(src, allow_hidden=True))


BAD_MATCH = """
module B
{
   add signature { public: sorts S constructors c, d : -> S  non-constructors f : S -> S }
   variables { x, z : -> S }
   equations { macro-equation f(x) { case { ( z @ c ) : c } } }
}
"""


def test_match_variable_must_occur_in_head():
    with pytest.raises(ExpansionError):
        expand_module(parse_module(BAD_MATCH))


# generated decision trees over two boolean arguments

@st.composite
def trees(draw, free=("x", "y")):
    if not free or draw(st.booleans()):
        return draw(st.sampled_from(["true", "false", *free]))
    var = draw(st.sampled_from(free))
    rest = tuple(v for v in free if v != var)
    return (var, draw(trees(rest)), draw(trees(rest)))


def tree_text(t):
    if isinstance(t, str):
        return t
    var, yes, no = t
    return f"case {{ ( {var} @ true ) : {tree_text(yes)}  ( {var} @ false ) : {tree_text(no)} }}"


def evaluate(t, env):
    while not isinstance(t, str):
        var, yes, no = t
        t = yes if env[var] == "true" else no
    return env.get(t, t)


def leaves(t):
    return 1 if isinstance(t, str) else leaves(t[1]) + leaves(t[2])


def matches(pattern, value, env):
    if isinstance(pattern, Var):
        env[user_part(pattern.name)] = value
        return True
    return not pattern.args and user_part(pattern.name) == value


def instantiate(term, env):
    return env[user_part(term.name)] if isinstance(term, Var) else user_part(term.name)


@settings(max_examples=80, deadline=None)
@given(trees())
def test_expansion_agrees_with_the_decision_tree(tree):
    src = f"""module T
{{
   add signature {{ public: sorts BOOL constructors true, false : -> BOOL
                   non-constructors f : BOOL # BOOL -> BOOL }}
   variables {{ x, y : -> BOOL }}
   equations {{ macro-equation f(x, y) {{ {tree_text(tree)} }} }}
}}"""
    eqs = expand_module(parse_module(src))[0].equations
    assert len(eqs) == leaves(tree)
    for a, b in itertools.product(["true", "false"], repeat=2):
        fired = []
        for e in eqs:
            env = {}
            if all(matches(p, v, env) for p, v in zip(e.eq.lhs.args, (a, b))):
                fired.append(instantiate(e.eq.rhs, env))
        assert fired == [evaluate(tree, {"x": a, "y": b})]
