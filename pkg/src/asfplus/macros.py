"""Expansion of macro-equations into conditional equations."""

from __future__ import annotations

from dataclasses import replace

from .errors import DuplicateLabel, ExpansionError
from .model import (
    App, Case, Eq, Equation, Leaf, Match, MacroEquation, Module, Var, render_plain,
    substitute, term_vars, user_part,
)


def _subst_eq(e: Eq, s) -> Eq:
    return Eq(substitute(e.lhs, s), substitute(e.rhs, s), e.bare)


def _paths(body, head, subst, pos, neg):
    """Yield (subst, positive, negative, leaf term) for every leaf of ``body``."""
    if isinstance(body, Leaf):
        yield subst, pos, neg, body.term
        return
    if isinstance(body, Case):
        for conds, sub in body.branches:
            s, p = _apply_conds(conds, head, subst, pos)
            yield from _paths(sub, head, s, p, neg)
        return
    if body.orelse is not None:
        if len(body.conds) != 1 or isinstance(body.conds[0], Match):
            raise ExpansionError("if with else needs exactly one equation condition")
        yield from _paths(body.then, head, subst, pos + body.conds, neg)
        yield from _paths(body.orelse, head, subst, pos, neg + body.conds)
        return
    s, p = _apply_conds(body.conds, head, subst, pos)
    yield from _paths(body.then, head, s, p, neg)


def _apply_conds(conds, head, subst, pos):
    for c in conds:
        if isinstance(c, Match):
            if not isinstance(c.var, Var):
                raise ExpansionError("match conditions must test a variable")
            pending = term_vars(substitute(head, subst))
            if c.var.name not in pending:
                raise ExpansionError(
                    f"match variable {render_plain(c.var.name)} does not occur in the left-hand side "
                    f"{render_plain(head.name)}(...)")
            step = {c.var.name: c.pattern}
            subst = {k: substitute(v, step) for k, v in subst.items()}
            subst[c.var.name] = c.pattern
        else:
            pos = pos + (c,)
    return subst, pos


def expand_macro(me: MacroEquation, start: int = 1) -> list:
    """Expand one macro-equation. Labels are numbered from ``start``."""
    if not isinstance(me.head, App):
        raise ExpansionError("macro head must be a function application")
    out = []
    base = f"me-{user_part(me.head.name)}"
    for k, (s, pos, neg, leaf) in enumerate(_paths(me.body, me.head, {}, (), ()), start):
        out.append(Equation(
            f"{base}{k}",
            Eq(substitute(me.head, s), substitute(leaf, s)),
            tuple(_subst_eq(c, s) for c in pos),
            tuple(_subst_eq(c, s) for c in neg),
        ))
    return out


def expand_module(m: Module):
    """Replace every macro-equation of ``m``. Returns (module, generated labels)."""
    user_labels = {e.label for e in m.equations if isinstance(e, Equation)}
    user_labels |= {g.label for g in m.goals}
    counters: dict = {}
    generated: list = []
    out = []
    for e in m.equations:
        if not isinstance(e, MacroEquation):
            out.append(e)
            continue
        key = user_part(e.head.name) if isinstance(e.head, App) else None
        expanded = expand_macro(e, counters.get(key, 0) + 1)
        counters[key] = counters.get(key, 0) + len(expanded)
        for x in expanded:
            if x.label in user_labels:
                raise DuplicateLabel(f"generated label {x.label} collides with a user label", names=[x.label])
            generated.append(x.label)
        out += expanded
    return replace(m, equations=tuple(out)), generated
