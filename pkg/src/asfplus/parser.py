"""Recursive-descent parser producing :class:`Module` values."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Optional

from . import lexer as lx
from .errors import (
    DuplicateInstanceName, DuplicateModuleName, DuplicateShortName, ParseError, SpecError,
)
from .model import (
    App, BindingBlock, Case, Clause, DName, Eq, Equation, If, ImportDecl, Leaf, Match,
    MacroEquation, Module, OpDecl, ParamBlock, Signature, Var, bare_eq,
)

INFIX, PREFIX, PLAIN = "infix", "prefix", "plain"
_NAME_KINDS = (lx.IDENT, lx.FUNCSYM)
_SECTION_WORDS = ("public", "private", "parameters")


@dataclass
class AsfSpec:
    modules: dict = field(default_factory=dict)
    top: Optional[str] = None
    abbrevs: dict = field(default_factory=dict)
    fixity: dict = field(default_factory=dict)
    sources: dict = field(default_factory=dict)


def scan_fixity(tokens: list) -> dict:
    """Collect ``_ f _`` (infix) and ``f _`` (prefix) declaration forms."""
    fix = {}
    for k, t in enumerate(tokens):
        if t.kind not in _NAME_KINDS:
            continue
        before = tokens[k - 1] if k else None
        after = tokens[k + 1] if k + 1 < len(tokens) else None
        if before is not None and before.kind == lx.UNDERSCORE and after is not None and after.kind == lx.UNDERSCORE:
            fix[t.text] = INFIX
        elif after is not None and after.kind == lx.UNDERSCORE and (before is None or before.kind != lx.UNDERSCORE):
            follow = tokens[k + 2] if k + 2 < len(tokens) else None
            if follow is not None and follow.kind in (lx.COMMA, lx.COLON):
                fix.setdefault(t.text, PREFIX)
    return fix


class Parser:
    def __init__(self, tokens: list, fixity: dict, filename: Optional[str] = None):
        self.toks = tokens
        self.k = 0
        self.fixity = fixity
        self.filename = filename
        self.case_depth = 0

    # ------------------------------------------------------------ tokens

    @property
    def tok(self) -> lx.Token:
        return self.toks[self.k]

    def peek(self, d: int = 1) -> lx.Token:
        return self.toks[min(self.k + d, len(self.toks) - 1)]

    def pos(self, t: Optional[lx.Token] = None):
        t = t or self.tok
        return (self.filename, t.line, t.col)

    def error(self, msg: str, expected=()) -> ParseError:
        shown = self.tok.text or "end of input"
        return ParseError(f"{msg}, found {shown!r}", pos=self.pos(), expected=expected)

    def advance(self) -> lx.Token:
        t = self.tok
        if t.kind != lx.EOF:
            self.k += 1
        return t

    def at(self, text: str) -> bool:
        return self.tok.text == text and self.tok.kind != lx.EOF

    def at_word(self, word: str) -> bool:
        return self.tok.kind in _NAME_KINDS + (lx.KEYWORD,) and self.tok.text == word

    def accept(self, text: str) -> bool:
        if self.at(text):
            self.advance()
            return True
        return False

    def expect(self, text: str) -> lx.Token:
        if not self.at(text):
            raise self.error(f"expected {text!r}", expected=[text])
        return self.advance()

    def name(self, what: str = "name") -> str:
        if self.tok.kind not in _NAME_KINDS:
            raise self.error(f"expected {what}", expected=[what])
        return self.advance().text

    def at_section(self) -> bool:
        return self.tok.text in _SECTION_WORDS and self.peek().kind == lx.COLON

    # ---------------------------------------------------------- modules

    def specification(self) -> list:
        mods = []
        while self.tok.kind != lx.EOF:
            mods.append(self.module())
        return mods

    def module(self) -> Module:
        start = self.tok
        if not self.at_word("module"):
            raise self.error("expected 'module'", expected=["module"])
        self.advance()
        name = self.name("module name")
        header = self.param_listing() if self.at("<") else ()
        short = None
        if self.at_word("short"):
            self.advance()
            short = self.name("short module name")
        self.expect("{")
        imports = []
        while self.at_word("import"):
            imports.append(self.import_decl())
        params, public, private = (), Signature(), Signature()
        cons_vars, noncons_vars, equations, goals = {}, {}, (), ()
        while not self.at("}"):
            if self.at_word("add"):
                params, public, private = self.add_signature(params, public, private)
            elif self.at_word("variables"):
                cv, nv = self.variables()
                cons_vars.update(cv)
                noncons_vars.update(nv)
            elif self.at_word("equations"):
                equations += self.equations()
            elif self.at_word("goals"):
                goals += self.goals()
            else:
                raise self.error("expected a module section",
                                 expected=["add signature", "variables", "equations", "goals", "}"])
        self.expect("}")
        mod = Module(name=name, imports=tuple(imports), params=params, public=public, private=private,
                     cons_vars=cons_vars, noncons_vars=noncons_vars, equations=equations, goals=goals,
                     short=short, header=header, pos=self.pos(start))
        return bind_variables(mod)

    def param_listing(self) -> tuple:
        self.expect("<")
        blocks = []
        while self.at("("):
            self.advance()
            names = [self.ref_name()]
            while self.accept(","):
                names.append(self.ref_name())
            self.expect(")")
            blocks.append(tuple(names))
        if not blocks:
            raise self.error("expected a parameter tuple", expected=["("])
        self.expect(">")
        return tuple(blocks)

    def ref_name(self) -> str:
        """A sort or function name as written in lists, tolerating fixity markers."""
        while self.tok.kind == lx.UNDERSCORE:
            self.advance()
        n = self.name()
        while self.tok.kind == lx.UNDERSCORE:
            self.advance()
        return n

    # ---------------------------------------------------------- imports

    def import_decl(self) -> ImportDecl:
        start = self.advance()
        module = self.name("module name")
        inst = None
        if self.at("[") and self.tok.offset == self.toks[self.k - 1].end:
            self.advance()
            inst = self.name("instance name")
            self.expect("]")
        renaming: dict = {}
        blocks, passthrough = [], []
        if self.at("<"):
            self.advance()
            while self.at("("):
                self.ext_block(renaming, blocks, passthrough)
            if not blocks and not passthrough:
                raise self.error("expected a parameter tuple", expected=["("])
            self.expect(">")
        visibility: dict = {}
        if self.at("{"):
            self.advance()
            while not self.at("}"):
                if self.at_word("public") or self.at_word("private"):
                    level = self.advance().text
                    self.expect(":")
                    self.name_list(level, visibility, renaming)
                    self.accept(";")
                else:
                    raise self.error("expected 'public:' or 'private:'", expected=["public:", "private:", "}"])
            self.expect("}")
        return ImportDecl(module, inst, visibility, renaming, tuple(blocks), tuple(passthrough),
                          pos=self.pos(start))

    def ext_block(self, renaming, blocks, passthrough) -> None:
        self.expect("(")
        if self.peek().text == "bound" and self.tok.kind in _NAME_KINDS + (lx.UNDERSCORE,):
            binding = {}
            while True:
                formal = self.ref_name()
                self.expect("bound")
                if not self.at_word("to"):
                    raise self.error("expected 'to'", expected=["to"])
                self.advance()
                if formal in binding:
                    raise ParseError(f"parameter {formal} bound twice", pos=self.pos())
                binding[formal] = self.ref_name()
                if not self.accept(","):
                    break
            self.expect(")")
            if not self.at_word("of"):
                raise self.error("expected 'of'", expected=["of"])
            self.advance()
            act = self.name("module name")
            act_params = self.param_listing() if self.at("<") else ()
            blocks.append(BindingBlock(binding, act, act_params))
            return
        names = []
        while True:
            names.append(self.name_with_ren(renaming))
            if not self.accept(","):
                break
        self.expect(")")
        passthrough.append(tuple(names))

    def name_with_ren(self, renaming: dict) -> str:
        if self.at_word("copy") and self.peek().text == "of":
            self.advance()
            self.advance()
            n = self.ref_name()
            renaming[n] = n
            return n
        n = self.ref_name()
        if self.at("renamed"):
            self.advance()
            if not self.at_word("to"):
                raise self.error("expected 'to'", expected=["to"])
            self.advance()
            renaming[n] = self.ref_name()
        return n

    def name_list(self, level: str, visibility: dict, renaming: dict) -> None:
        while True:
            n = self.name_with_ren(renaming)
            if n in visibility and visibility[n] != level:
                raise ParseError(f"{n} listed both public and private", pos=self.pos())
            visibility[n] = level
            if not self.accept(","):
                break

    # -------------------------------------------------------- signature

    def add_signature(self, params, public, private):
        self.advance()
        if not self.at_word("signature"):
            raise self.error("expected 'signature'", expected=["signature"])
        self.advance()
        self.expect("{")
        params, pub_parts, pri_parts = list(params), [public], [private]
        while not self.at("}"):
            if not self.at_section():
                raise self.error("expected 'parameters:', 'public:' or 'private:'",
                                 expected=["parameters:", "public:", "private:"])
            section = self.advance().text
            self.expect(":")
            if section == "parameters":
                while self.at("("):
                    params.append(self.para_block())
            elif section == "public":
                pub_parts.append(self.signature())
            else:
                pri_parts.append(self.signature())
        self.expect("}")
        return tuple(params), _merge_sigs(pub_parts, self), _merge_sigs(pri_parts, self)

    def para_block(self) -> ParamBlock:
        self.expect("(")
        sig = self.signature()
        conds = []
        if self.at_word("conditions"):
            self.advance()
            while self.at("["):
                conds.append(self.clause())
        self.expect(")")
        return ParamBlock(sig, tuple(conds))

    def signature(self) -> Signature:
        sorts, cons, noncons = [], {}, {}
        while True:
            if self.at("sorts"):
                self.advance()
                sorts.append(self.name("sort name"))
                while self.accept(","):
                    sorts.append(self.name("sort name"))
            elif self.at("constructors"):
                self.advance()
                self.func_decs(cons)
            elif self.at("non-constructors"):
                self.advance()
                self.func_decs(noncons)
            else:
                break
        dup = set(cons) & set(noncons)
        if dup:
            raise SpecError(f"{next(iter(dup)).name} declared as constructor and non-constructor", pos=self.pos())
        return Signature(tuple(dict.fromkeys(sorts)), cons, noncons)

    def at_decl_start(self) -> bool:
        if self.tok.kind == lx.UNDERSCORE:
            return True
        if self.tok.kind not in _NAME_KINDS or self.at_section():
            return False
        return not (self.tok.text == "conditions" and self.peek().text == "[")

    def func_decs(self, into: dict) -> None:
        first = True
        while first or self.at_decl_start():
            first = False
            start = self.pos()
            names = [self.ext_func_name()]
            while self.accept(","):
                names.append(self.ext_func_name())
            self.expect(":")
            argsorts = []
            if not self.at("->"):
                argsorts.append(self.name("sort name"))
                while self.accept("#"):
                    argsorts.append(self.name("sort name"))
            self.expect("->")
            target = self.name("sort name")
            for n, fix in names:
                if fix == INFIX and len(argsorts) != 2:
                    raise ParseError(f"infix operator {n} needs two arguments", pos=start)
                if fix == PREFIX and len(argsorts) != 1:
                    raise ParseError(f"prefix operator {n} needs one argument", pos=start)
                key = DName(n, tuple(argsorts))
                if key in into:
                    raise SpecError(f"duplicate declaration of {n}", pos=start, names=[key])
                into[key] = OpDecl(target, fix)

    def ext_func_name(self):
        if self.tok.kind == lx.UNDERSCORE:
            self.advance()
            n = self.name("function name")
            if self.tok.kind != lx.UNDERSCORE:
                raise self.error("expected '_' after infix operator", expected=["_"])
            self.advance()
            return n, INFIX
        n = self.name("function name")
        if self.tok.kind == lx.UNDERSCORE:
            self.advance()
            return n, PREFIX
        return n, PLAIN

    # -------------------------------------------------------- variables

    def variables(self):
        self.advance()
        self.expect("{")
        cons, noncons = {}, {}
        target = cons
        while not self.at("}"):
            if self.at("constructors"):
                self.advance()
                target = cons
                continue
            if self.at("non-constructors"):
                self.advance()
                target = noncons
                continue
            start = self.pos()
            names = [self.name("variable name")]
            while self.accept(","):
                names.append(self.name("variable name"))
            self.expect(":")
            self.expect("->")
            sort = self.name("sort name")
            for n in names:
                if n in cons or n in noncons:
                    raise SpecError(f"variable {n} declared twice", pos=start, names=[n])
                target[n] = sort
        self.expect("}")
        return cons, noncons

    # -------------------------------------------------------- equations

    def equations(self) -> tuple:
        self.advance()
        self.expect("{")
        out = []
        while not self.at("}"):
            if self.at("macro-equation"):
                out.append(self.macro_equation())
            elif self.at("["):
                out.append(self.equation())
            else:
                raise self.error("expected an equation", expected=["[", "macro-equation", "}"])
        self.expect("}")
        return tuple(out)

    def label(self) -> str:
        self.expect("[")
        lab = self.name("label")
        self.expect("]")
        return lab

    def equation(self) -> Equation:
        lab = self.label()
        eq = self.eq()
        pos, neg = [], []
        if self.at("if"):
            self.advance()
            pos = self.eq_list()
        if self.at_word("unless"):
            self.advance()
            neg = self.eq_list()
        return Equation(lab, eq, tuple(pos), tuple(neg))

    def eq_list(self) -> list:
        out = [self.eq()]
        while self.accept(","):
            out.append(self.eq())
        return out

    def eq(self) -> Eq:
        lhs = self.term()
        if self.accept("="):
            return Eq(lhs, self.term())
        return bare_eq(lhs)

    def macro_equation(self) -> MacroEquation:
        self.advance()
        head = self.term()
        self.expect("{")
        body = self.mbody()
        self.expect("}")
        return MacroEquation(head, body)

    def mbody(self):
        if self.at("case"):
            self.advance()
            self.expect("{")
            branches = []
            self.case_depth += 1
            try:
                while not self.at("}"):
                    self.expect("(")
                    conds = self.mconds()
                    self.expect(")")
                    self.expect(":")
                    branches.append((conds, self.mbody()))
            finally:
                self.case_depth -= 1
            self.expect("}")
            if not branches:
                raise self.error("empty case")
            return Case(tuple(branches))
        if self.at("if"):
            self.advance()
            self.expect("(")
            conds = self.mconds()
            self.expect(")")
            then = self.mbody()
            orelse = None
            if self.at("else"):
                self.advance()
                orelse = self.mbody()
            return If(conds, then, orelse)
        return Leaf(self.term())

    def mconds(self) -> tuple:
        out = [self.mcond()]
        while self.accept(","):
            out.append(self.mcond())
        return tuple(out)

    def mcond(self):
        lhs = self.term()
        if self.accept("@"):
            return Match(lhs, self.term())
        if self.accept("="):
            return Eq(lhs, self.term())
        return bare_eq(lhs)

    # ------------------------------------------------------------ goals

    def goals(self) -> tuple:
        self.advance()
        self.expect("{")
        out = []
        while not self.at("}"):
            out.append(self.clause())
        self.expect("}")
        return tuple(out)

    def clause(self) -> Clause:
        lab = self.label()
        ante = [] if self.at("-->") else self.eq_list()
        self.expect("-->")
        succ = []
        if self.at_term_start():
            succ = self.eq_list()
        return Clause(lab, tuple(ante), tuple(succ))

    # ------------------------------------------------------------ terms

    def at_term_start(self) -> bool:
        return self.tok.kind in _NAME_KINDS or self.at("(")

    def term(self):
        t = self.primary()
        while self.tok.kind in _NAME_KINDS and self.fixity.get(self.tok.text) == INFIX:
            op_tok = self.advance()
            sortv = self.annotation(op_tok)
            t = App(op_tok.text, (t, self.primary()), sortv, INFIX)
        return t

    def annotation(self, name_tok):
        if self.at("[") and self.tok.offset == name_tok.end:
            self.advance()
            sorts = []
            if not self.at("]"):
                sorts.append(self.name("sort name"))
                while self.accept(","):
                    sorts.append(self.name("sort name"))
            self.expect("]")
            return tuple(sorts)
        return None

    def primary(self):
        if self.at("("):
            self.advance()
            t = self.term()
            self.expect(")")
            return t
        if self.tok.kind not in _NAME_KINDS:
            raise self.error("expected a term", expected=["term"])
        name_tok = self.advance()
        sortv = self.annotation(name_tok)
        last = self.toks[self.k - 1]
        adjacent = self.tok.offset == last.end
        if self.at("(") and (adjacent or not self.case_depth):
            self.advance()
            args = [self.term()]
            while self.accept(","):
                args.append(self.term())
            self.expect(")")
            return App(name_tok.text, tuple(args), sortv, self.fixity.get(name_tok.text, PLAIN))
        if self.fixity.get(name_tok.text) == PREFIX and self.at_term_start():
            return App(name_tok.text, (self.primary(),), sortv, PREFIX)
        return App(name_tok.text, (), sortv)


def _merge_sigs(parts, parser) -> Signature:
    sorts, cons, noncons = [], {}, {}
    for p in parts:
        sorts.extend(p.sorts)
        for src, dst in ((p.cons, cons), (p.noncons, noncons)):
            for k, v in src.items():
                if k in cons or k in noncons:
                    raise SpecError(f"duplicate declaration of {k.name}", pos=parser.pos(), names=[k])
                dst[k] = v
    return Signature(tuple(dict.fromkeys(sorts)), cons, noncons)


# -------------------------------------------------------- variable binding


def _bind_term(t, vs):
    if isinstance(t, Var):
        return t
    if not t.args and t.sortv is None and t.name in vs:
        return Var(t.name, vs[t.name])
    return App(t.name, tuple(_bind_term(a, vs) for a in t.args), t.sortv, t.fix)


def _bind_eq(e, vs):
    return Eq(_bind_term(e.lhs, vs), _bind_term(e.rhs, vs), e.bare)


def _bind_cond(c, vs):
    if isinstance(c, Match):
        return Match(_bind_term(c.var, vs), _bind_term(c.pattern, vs))
    return _bind_eq(c, vs)


def _bind_body(b, vs):
    if isinstance(b, Leaf):
        return Leaf(_bind_term(b.term, vs))
    if isinstance(b, Case):
        return Case(tuple((tuple(_bind_cond(c, vs) for c in conds), _bind_body(sub, vs))
                          for conds, sub in b.branches))
    return If(tuple(_bind_cond(c, vs) for c in b.conds), _bind_body(b.then, vs),
              None if b.orelse is None else _bind_body(b.orelse, vs))


def _bind_clause(c, vs):
    return Clause(c.label, tuple(_bind_eq(e, vs) for e in c.ante), tuple(_bind_eq(e, vs) for e in c.succ))


def bind_variables(m: Module) -> Module:
    """Turn nullary applications of declared variable names into variables."""
    vs = m.var_sorts()
    if not vs:
        return m
    eqs = []
    for e in m.equations:
        if isinstance(e, MacroEquation):
            eqs.append(MacroEquation(_bind_term(e.head, vs), _bind_body(e.body, vs)))
        else:
            eqs.append(Equation(e.label, _bind_eq(e.eq, vs), tuple(_bind_eq(c, vs) for c in e.pos),
                                tuple(_bind_eq(c, vs) for c in e.neg)))
    return replace(
        m,
        params=tuple(ParamBlock(p.sig, tuple(_bind_clause(c, vs) for c in p.conditions)) for p in m.params),
        equations=tuple(eqs),
        goals=tuple(_bind_clause(g, vs) for g in m.goals),
    )


# ----------------------------------------------------------- entry points


def _is_hidden_file(filename: Optional[str]) -> bool:
    return bool(filename) and filename.endswith(".nf.asfp")


def parse_module(text: str, *, fixity: Optional[dict] = None, allow_hidden: Optional[bool] = None,
                 filename: Optional[str] = None) -> Module:
    """Parse exactly one module."""
    hidden = _is_hidden_file(filename) if allow_hidden is None else allow_hidden
    toks = lx.lex(text, allow_hidden=hidden, filename=filename)
    fix = dict(scan_fixity(toks))
    if fixity:
        fix.update(fixity)
    p = Parser(toks, fix, filename)
    mod = p.module()
    if p.tok.kind != lx.EOF:
        raise p.error("expected end of input")
    return mod


def parse_specification(files: Iterable, *, top: Optional[str] = None,
                        allow_hidden: Optional[bool] = None) -> AsfSpec:
    """Parse ``files`` (pairs of filename and text, or bare texts) into one specification."""
    lexed = []
    for item in files:
        filename, text = item if isinstance(item, tuple) else (None, item)
        hidden = _is_hidden_file(filename) if allow_hidden is None else allow_hidden
        lexed.append((filename, text, lx.lex(text, allow_hidden=hidden, filename=filename)))
    fixity: dict = {}
    for _, _, toks in lexed:
        for k, v in scan_fixity(toks).items():
            fixity.setdefault(k, v)

    spec = AsfSpec(fixity=fixity)
    shorts: dict = {}
    instances: dict = {}
    for filename, text, toks in lexed:
        parser = Parser(toks, fixity, filename)
        for mod in parser.specification():
            if mod.name in spec.modules:
                raise DuplicateModuleName(f"module {mod.name} defined twice", pos=mod.pos)
            short = mod.short or mod.name
            if short in shorts:
                raise DuplicateShortName(f"short name {short} used by {shorts[short]} and {mod.name}",
                                         pos=mod.pos)
            shorts[short] = mod.name
            for imp in mod.imports:
                if imp.inst is None:
                    continue
                if imp.inst in instances:
                    raise DuplicateInstanceName(f"instance name {imp.inst} used twice", pos=imp.pos)
                instances[imp.inst] = mod.name
            spec.modules[mod.name] = mod
            spec.abbrevs[mod.name] = short
            spec.sources[mod.name] = filename
            if spec.top is None:
                spec.top = mod.name
    if top is not None:
        if top not in spec.modules:
            raise SpecError(f"no module named {top}")
        spec.top = top
    return spec
