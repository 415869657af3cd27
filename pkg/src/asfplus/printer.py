"""Concrete-syntax rendering of modules."""

from __future__ import annotations

from typing import Mapping, Optional

from .model import (
    App, Case, Clause, Eq, Hidden, Leaf, Match, MacroEquation, Module, Signature,
    Var, hidden_namespaces, render_module,
)

IND = "   "


class _Printer:
    def __init__(self, module: Module, disambiguate: bool):
        self.disambiguate = disambiguate
        self.fixity: dict = {}
        for sig in module.signatures():
            for key, decl in sig.decls():
                if decl.fixity != "plain":
                    self.fixity.setdefault(key.name, decl.fixity)

    def fix_of(self, t: App) -> str:
        f = self.fixity.get(t.name, t.fix)
        if f == "infix" and len(t.args) == 2:
            return "infix"
        if f == "prefix" and len(t.args) == 1:
            return "prefix"
        return "plain"

    def fname(self, t: App) -> str:
        if self.disambiguate and t.sortv is not None:
            return f"{t.name}[{','.join(t.sortv)}]"
        return t.name

    def term(self, t, *, right_operand: bool = False) -> str:
        if isinstance(t, Var):
            return t.name
        if self.fix_of(t) == "infix":
            left = self.term(t.args[0])
            right = self.term(t.args[1], right_operand=True)
            text = f"{left} {self.fname(t)} {right}"
            return f"({text})" if right_operand else text
        if not t.args:
            return self.fname(t)
        return f"{self.fname(t)}({', '.join(self.term(a) for a in t.args)})"

    def eq(self, e: Eq) -> str:
        if e.bare and isinstance(e.rhs, App) and e.rhs.name == "true" and not e.rhs.args:
            return self.term(e.lhs)
        return f"{self.term(e.lhs)} = {self.term(e.rhs)}"

    def cond(self, c) -> str:
        if isinstance(c, Match):
            return f"{self.term(c.var)} @ {self.term(c.pattern)}"
        return self.eq(c)

    def head(self, t) -> str:
        text = self.term(t)
        return f"({text})" if isinstance(t, App) and self.fix_of(t) == "infix" else text


def _decl_name(name: str, fixity: str) -> str:
    if fixity == "infix":
        return f"_ {name} _"
    if fixity == "prefix":
        return f"{name} _"
    return name


def _signature_lines(sig: Signature, depth: int) -> list:
    pad = IND * depth
    out = []
    if sig.sorts:
        out += [f"{pad}sorts", f"{pad}{IND}{', '.join(sig.sorts)}"]
    for word, decls in (("constructors", sig.cons), ("non-constructors", sig.noncons)):
        if not decls:
            continue
        out.append(f"{pad}{word}")
        groups: dict = {}
        for key, decl in decls.items():
            profile = (key.sortv, decl.target)
            groups.setdefault(profile, []).append(_decl_name(key.name, decl.fixity))
        for (sortv, target), names in groups.items():
            args = " # ".join(sortv)
            arrow = f"{args} -> {target}" if args else f"-> {target}"
            out.append(f"{pad}{IND}{', '.join(names)} : {arrow}")
    return out


def _clause_lines(p: _Printer, c: Clause, depth: int) -> list:
    pad = IND * depth
    ante = ", ".join(p.eq(e) for e in c.ante)
    succ = ", ".join(p.eq(e) for e in c.succ)
    first = f"{pad}[{c.label}] {ante}".rstrip()
    return [first, f"{pad}{IND}-->{(' ' + succ) if succ else ''}"]


def _body_lines(p: _Printer, b, depth: int) -> list:
    pad = IND * depth
    if isinstance(b, Leaf):
        return [pad + p.term(b.term)]
    if isinstance(b, Case):
        out = [f"{pad}case", f"{pad}{{"]
        for conds, sub in b.branches:
            out.append(f"{pad}{IND}( {', '.join(p.cond(c) for c in conds)} ) :")
            out += _body_lines(p, sub, depth + 2)
        out.append(f"{pad}}}")
        return out
    out = [f"{pad}if ( {', '.join(p.cond(c) for c in b.conds)} )"]
    out += _body_lines(p, b.then, depth + 1)
    if b.orelse is not None:
        out.append(f"{pad}else")
        out += _body_lines(p, b.orelse, depth + 1)
    return out


def _equation_lines(p: _Printer, e, depth: int) -> list:
    pad = IND * depth
    if isinstance(e, MacroEquation):
        return ([f"{pad}macro-equation {p.head(e.head)}", f"{pad}{{"]
                + _body_lines(p, e.body, depth + 1) + [f"{pad}}}"])
    line = f"{pad}[{e.label}] {p.eq(e.eq)}"
    if e.pos:
        line += " if " + ", ".join(p.eq(c) for c in e.pos)
    if e.neg:
        line += " unless " + ", ".join(p.eq(c) for c in e.neg)
    return [line]


def _import_lines(imp, depth: int) -> list:
    pad = IND * depth
    head = f"{pad}import {imp.module}" + (f"[{imp.inst}]" if imp.inst else "")
    blocks = []
    for names in imp.passthrough:
        blocks.append("(" + ", ".join(_with_ren(n, imp.renaming) for n in names) + ")")
    for b in imp.blocks:
        inner = ", ".join(f"{k} bound to {v}" for k, v in b.binding.items())
        act = "".join(f"({', '.join(t)})" for t in b.act_params)
        blocks.append(f"({inner}) of {b.act_module}" + (f" <{act}>" if act else ""))
    if blocks:
        head += " <" + " ".join(blocks) + ">"
    parts = []
    for level in ("public", "private"):
        names = [_with_ren(n, imp.renaming) for n, v in imp.visibility.items() if v == level]
        if names:
            parts.append(f"{level}: {', '.join(names)}")
    if parts:
        head += " {  " + "  ".join(parts) + "  }"
    return [head]


def _with_ren(name, renaming) -> str:
    if name in renaming:
        new = renaming[name]
        return f"copy of {name}" if new == name else f"{name} renamed to {new}"
    return name


def print_module(module: Module, disambiguate: bool = False, abbrevs: Optional[Mapping] = None) -> str:
    """Render ``module`` as source text.

    Structural hidden names are first turned into ``Prefix-name`` text.
    """
    m = render_module(module, abbrevs) if _has_hidden(module) else module
    p = _Printer(m, disambiguate)
    out = [f"module {m.name}" + ("" if not m.header else
                                 " <" + "".join(f"({', '.join(t)})" for t in m.header) + ">")]
    if m.short and m.short != m.name:
        out.append(f"short  {m.short}")
    out.append("{")
    for imp in m.imports:
        out += _import_lines(imp, 1)
    if m.params or not m.public.is_empty() or not m.private.is_empty():
        out += [f"{IND}add signature", f"{IND}{{"]
        if m.params:
            out.append(f"{IND * 2}parameters:")
            for block in m.params:
                out.append(f"{IND * 3}(")
                out += _signature_lines(block.sig, 4)
                if block.conditions:
                    out.append(f"{IND * 4}conditions")
                    for c in block.conditions:
                        out += _clause_lines(p, c, 5)
                out.append(f"{IND * 3})")
        for word, sig in (("public", m.public), ("private", m.private)):
            if not sig.is_empty():
                out.append(f"{IND * 2}{word}:")
                out += _signature_lines(sig, 3)
        out.append(f"{IND}}}")
    if m.cons_vars or m.noncons_vars:
        out += [f"{IND}variables", f"{IND}{{"]
        for word, vs in (("constructors", m.cons_vars), ("non-constructors", m.noncons_vars)):
            if not vs:
                continue
            out.append(f"{IND * 2}{word}")
            by_sort: dict = {}
            for v, s in vs.items():
                by_sort.setdefault(s, []).append(v)
            for s, names in by_sort.items():
                out.append(f"{IND * 3}{', '.join(names)} : -> {s}")
        out.append(f"{IND}}}")
    if m.equations:
        out += [f"{IND}equations", f"{IND}{{"]
        for e in m.equations:
            out += _equation_lines(p, e, 2)
        out.append(f"{IND}}}")
    if m.goals:
        out += [f"{IND}goals", f"{IND}{{"]
        for g in m.goals:
            out += _clause_lines(p, g, 2)
        out.append(f"{IND}}}")
    out.append(f"}} /* {m.name} */")
    return "\n".join(out) + "\n"


def _has_hidden(module: Module) -> bool:
    return bool(hidden_namespaces(module))


def render_name(name, abbrevs: Optional[Mapping] = None) -> str:
    if isinstance(name, Hidden):
        return f"{(abbrevs or {}).get(name.namespace.module, name.namespace.module)}-{name.uname}"
    return name

