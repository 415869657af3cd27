"""Names, origins, terms and modules, plus the small calculus on them.

Hidden names are kept structural (``Hidden(namespace, uname)``) for the whole
pipeline and only turned into ``Short-uname`` text when a module is rendered.
That makes renaming, identification and instanciation plain tuple operations.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Mapping, NamedTuple, Optional, Union

from .errors import ExpansionError, SpecError

LABEL, VARIABLE, SORT, FUNCTION = "label", "variable", "sort", "function"
PARAMETER, PUBLIC, PRIVATE, HIDDEN = "parameter", "public", "private", "hidden"
SYMBOL_TYPES = (LABEL, VARIABLE, SORT, FUNCTION)
VISIBILITIES = (PARAMETER, PUBLIC, PRIVATE, HIDDEN)


class ModInstName(NamedTuple):
    """A namespace: a module name plus the instance tags of copying imports."""

    module: str
    instances: tuple = ()

    def __str__(self) -> str:
        if not self.instances:
            return self.module
        return f"{self.module}[{','.join(self.instances)}]"


class Hidden(NamedTuple):
    namespace: ModInstName
    uname: str

    def __str__(self) -> str:
        return f"{self.namespace}-{self.uname}"


SpecName = Union[str, Hidden]


class DName(NamedTuple):
    """A disambiguated name: the name plus its argument sort vector."""

    name: SpecName
    sortv: tuple = ()


class Origin(NamedTuple):
    uname: str
    modiname: ModInstName
    symboltype: str
    visibility: str


def spec_name(origin: Origin) -> SpecName:
    """The name an origin must carry in a consistent module."""
    if origin.visibility == HIDDEN:
        return Hidden(origin.modiname, origin.uname)
    return origin.uname


def user_part(name: SpecName) -> str:
    return name.uname if isinstance(name, Hidden) else name


def name_key(name: SpecName):
    if isinstance(name, Hidden):
        return (1, name.namespace.module, name.namespace.instances, name.uname)
    return (0, name)


def dname_key(d: DName):
    return (name_key(d.name), tuple(name_key(s) for s in d.sortv))


# --------------------------------------------------------------------- terms


@dataclass(frozen=True)
class Var:
    name: SpecName
    sort: SpecName


@dataclass(frozen=True)
class App:
    """Function application. ``sortv`` is filled in by overload resolution."""

    name: SpecName
    args: tuple = ()
    sortv: Optional[tuple] = None
    fix: str = field(default="plain", compare=False)


Term = Union[Var, App]


@dataclass(frozen=True)
class Eq:
    lhs: Term
    rhs: Term
    bare: bool = field(default=False, compare=False)


def bare_eq(term: Term) -> Eq:
    """``P(x)`` standing for ``P(x) = true``."""
    return Eq(term, App("true"), bare=True)


@dataclass(frozen=True)
class Clause:
    label: SpecName
    ante: tuple = ()
    succ: tuple = ()


@dataclass(frozen=True)
class Equation:
    label: SpecName
    eq: Eq
    pos: tuple = ()
    neg: tuple = ()


@dataclass(frozen=True)
class Match:
    var: Term
    pattern: Term


@dataclass(frozen=True)
class Leaf:
    term: Term


@dataclass(frozen=True)
class Case:
    branches: tuple  # of (conds, body)


@dataclass(frozen=True)
class If:
    conds: tuple
    then: object
    orelse: object = None


@dataclass(frozen=True)
class MacroEquation:
    head: Term
    body: object


class OpDecl(NamedTuple):
    target: SpecName
    fixity: str = "plain"


# ------------------------------------------------------------------- modules


@dataclass(frozen=True)
class Signature:
    sorts: tuple = ()
    cons: dict = field(default_factory=dict)
    noncons: dict = field(default_factory=dict)

    def decls(self):
        yield from self.cons.items()
        yield from self.noncons.items()

    def is_empty(self) -> bool:
        return not (self.sorts or self.cons or self.noncons)


@dataclass(frozen=True)
class ParamBlock:
    sig: Signature
    conditions: tuple = ()

    def names(self) -> tuple:
        return tuple(self.sig.sorts) + tuple(d.name for d, _ in self.sig.decls())


@dataclass(frozen=True)
class BindingBlock:
    binding: dict
    act_module: str
    act_params: tuple = ()


@dataclass(frozen=True)
class ImportDecl:
    module: str
    inst: Optional[str] = None
    visibility: dict = field(default_factory=dict)
    renaming: dict = field(default_factory=dict)
    blocks: tuple = ()
    passthrough: tuple = ()
    pos: object = field(default=None, compare=False)


@dataclass(frozen=True)
class Module:
    name: str = ""
    imports: tuple = ()
    params: tuple = ()
    public: Signature = field(default_factory=Signature)
    private: Signature = field(default_factory=Signature)
    cons_vars: dict = field(default_factory=dict)
    noncons_vars: dict = field(default_factory=dict)
    equations: tuple = ()
    goals: tuple = ()
    short: Optional[str] = None
    header: tuple = ()
    pos: object = field(default=None, compare=False)

    def signatures(self):
        for block in self.params:
            yield block.sig
        yield self.public
        yield self.private

    def var_sorts(self) -> dict:
        return {**self.cons_vars, **self.noncons_vars}


def ordered_union(groups: Iterable[Iterable]) -> tuple:
    out: list = []
    for group in groups:
        for item in group:
            if item not in out:
                out.append(item)
    return tuple(out)


def _merge_maps(maps: Iterable[Mapping]) -> dict:
    out: dict = {}
    for m in maps:
        for k, v in m.items():
            out.setdefault(k, v)
    return out


def signature_union(sigs: Iterable[Signature]) -> Signature:
    sigs = list(sigs)
    return Signature(
        ordered_union(s.sorts for s in sigs),
        _merge_maps(s.cons for s in sigs),
        _merge_maps(s.noncons for s in sigs),
    )


def module_union(mods: Iterable[Module]) -> Module:
    """Componentwise union; the name slot is left empty."""
    mods = list(mods)
    return Module(
        name="",
        imports=ordered_union(m.imports for m in mods),
        params=ordered_union(m.params for m in mods),
        public=signature_union(m.public for m in mods),
        private=signature_union(m.private for m in mods),
        cons_vars=_merge_maps(m.cons_vars for m in mods),
        noncons_vars=_merge_maps(m.noncons_vars for m in mods),
        equations=ordered_union(m.equations for m in mods),
        goals=ordered_union(m.goals for m in mods),
    )


def function_table(module: Module) -> dict:
    table: dict = {}
    for sig in module.signatures():
        for key, decl in sig.decls():
            table.setdefault(key, decl)
    return table


def all_sorts(module: Module) -> set:
    return {s for sig in module.signatures() for s in sig.sorts}


# ------------------------------------------------------------ name mapping


def _same(x):
    return x


def _same_func(name, sortv):
    return name


@dataclass(frozen=True)
class Renamer:
    """Per-kind name maps. ``func`` sees the name and its old sort vector."""

    sort: Callable = _same
    var: Callable = _same
    label: Callable = _same
    func: Callable = _same_func

    def sorts(self, sortv):
        return None if sortv is None else tuple(self.sort(s) for s in sortv)


def map_term(t: Term, r: Renamer) -> Term:
    if isinstance(t, Var):
        return Var(r.var(t.name), r.sort(t.sort))
    return App(r.func(t.name, t.sortv), tuple(map_term(a, r) for a in t.args), r.sorts(t.sortv), t.fix)


def map_eq(e: Eq, r: Renamer) -> Eq:
    return Eq(map_term(e.lhs, r), map_term(e.rhs, r), e.bare)


def map_clause(c: Clause, r: Renamer) -> Clause:
    return Clause(r.label(c.label), tuple(map_eq(e, r) for e in c.ante), tuple(map_eq(e, r) for e in c.succ))


def map_cond(c, r: Renamer):
    if isinstance(c, Match):
        return Match(map_term(c.var, r), map_term(c.pattern, r))
    return map_eq(c, r)


def map_body(b, r: Renamer):
    if isinstance(b, Leaf):
        return Leaf(map_term(b.term, r))
    if isinstance(b, Case):
        return Case(tuple((tuple(map_cond(c, r) for c in conds), map_body(sub, r)) for conds, sub in b.branches))
    return If(
        tuple(map_cond(c, r) for c in b.conds),
        map_body(b.then, r),
        None if b.orelse is None else map_body(b.orelse, r),
    )


def map_equation(e, r: Renamer):
    if isinstance(e, MacroEquation):
        return MacroEquation(map_term(e.head, r), map_body(e.body, r))
    return Equation(
        r.label(e.label),
        map_eq(e.eq, r),
        tuple(map_eq(c, r) for c in e.pos),
        tuple(map_eq(c, r) for c in e.neg),
    )


def _map_decls(decls: Mapping, r: Renamer) -> dict:
    out: dict = {}
    for key, decl in decls.items():
        new_key = DName(r.func(key.name, key.sortv), r.sorts(key.sortv))
        new_decl = OpDecl(r.sort(decl.target), decl.fixity)
        if new_key in out and out[new_key] != new_decl:
            raise SpecError(f"renaming produces two declarations of {render_plain(new_key.name)} "
                            f"with different target sorts", names=[new_key])
        out[new_key] = new_decl
    return out


def map_signature(sig: Signature, r: Renamer) -> Signature:
    return Signature(
        ordered_union([[r.sort(s) for s in sig.sorts]]),
        _map_decls(sig.cons, r),
        _map_decls(sig.noncons, r),
    )


def map_module(m: Module, r: Renamer) -> Module:
    def vars_(vs):
        return {r.var(v): r.sort(s) for v, s in vs.items()}

    return replace(
        m,
        params=tuple(
            ParamBlock(map_signature(p.sig, r), tuple(map_clause(c, r) for c in p.conditions)) for p in m.params
        ),
        public=map_signature(m.public, r),
        private=map_signature(m.private, r),
        cons_vars=vars_(m.cons_vars),
        noncons_vars=vars_(m.noncons_vars),
        equations=ordered_union([[map_equation(e, r) for e in m.equations]]),
        goals=ordered_union([[map_clause(g, r) for g in m.goals]]),
    )


def map_originf(of: Mapping, r: Renamer, origin_fn: Callable = _same) -> dict:
    out: dict = {}
    for key, origin in of.items():
        kind = origin.symboltype
        if kind == FUNCTION:
            name = r.func(key.name, key.sortv)
        elif kind == SORT:
            name = r.sort(key.name)
        elif kind == VARIABLE:
            name = r.var(key.name)
        else:
            name = r.label(key.name)
        new_key = DName(name, r.sorts(key.sortv))
        new_origin = origin_fn(origin)
        if new_key in out and out[new_key] != new_origin:
            raise SpecError(
                f"{render_plain(new_key.name)} would denote two different objects",
                names=[new_key],
            )
        out[new_key] = new_origin
    return out


def name_renamer(mapping: Mapping) -> Renamer:
    """Renames sorts and functions by name only (all overloads alike)."""

    def get(name):
        return mapping.get(name, name)

    return Renamer(sort=get, func=lambda name, sortv: get(name))


# ------------------------------------------------------ names and origins


def short_modinst_name(modiname: ModInstName, abbrevs: Mapping, in_use: dict) -> str:
    """Shortest unambiguous prefix for a namespace within one rendering.

    ``in_use`` maps prefixes already handed out to their namespaces and is
    updated in place.
    """
    short = abbrevs.get(modiname.module, modiname.module)
    owner = in_use.get(short)
    if owner is None or owner == modiname:
        in_use[short] = modiname
        return short
    full = f"{short}[{','.join(modiname.instances)}]"
    in_use[full] = modiname
    return full


def get_spec_name(origin: Origin, abbrevs: Mapping, in_use: dict) -> str:
    if origin.visibility != HIDDEN:
        return origin.uname
    return f"{short_modinst_name(origin.modiname, abbrevs, in_use)}-{origin.uname}"


def get_renaming(of: Mapping, symboltypes) -> dict:
    """Keys whose name differs from the one their origin prescribes."""
    out = {}
    for key, origin in of.items():
        if origin.symboltype in symboltypes:
            wanted = spec_name(origin)
            if wanted != key.name:
                out[key] = wanted
    return out


def references_same_object(d1: DName, of1: Mapping, d2: DName, of2: Mapping) -> bool:
    o1, o2 = of1.get(d1), of2.get(d2)
    if o1 is None or o2 is None or o1[:3] != o2[:3] or len(d1.sortv) != len(d2.sortv):
        return False
    return all(references_same_object(DName(a), of1, DName(b), of2) for a, b in zip(d1.sortv, d2.sortv))


class Namer:
    """Turns structural hidden names into text with minimal prefixes."""

    def __init__(self, abbrevs: Optional[Mapping] = None, namespaces: Iterable[ModInstName] = ()):
        self.abbrevs = dict(abbrevs or {})
        self.in_use: dict = {}
        self.prefix: dict = {}
        for ns in sorted(set(namespaces), key=lambda n: (len(n.instances), n.module, n.instances)):
            self.prefix[ns] = short_modinst_name(ns, self.abbrevs, self.in_use)

    def __call__(self, name: SpecName) -> str:
        if isinstance(name, Hidden):
            if name.namespace not in self.prefix:
                self.prefix[name.namespace] = short_modinst_name(name.namespace, self.abbrevs, self.in_use)
            return f"{self.prefix[name.namespace]}-{name.uname}"
        return name

    def renamer(self) -> Renamer:
        return Renamer(sort=self, var=self, label=self, func=lambda n, sv: self(n))


def render_plain(name: SpecName) -> str:
    return str(name)


def hidden_namespaces(module: Module) -> set:
    found: set = set()

    def note(name):
        if isinstance(name, Hidden):
            found.add(name.namespace)
        return name

    map_module(module, Renamer(sort=note, var=note, label=note, func=lambda n, sv: note(n)))
    return found


def render_module(module: Module, abbrevs: Optional[Mapping] = None) -> Module:
    """The module with every hidden name replaced by its printed form."""
    namer = Namer(abbrevs, hidden_namespaces(module))
    return map_module(module, namer.renamer())


# ------------------------------------------------------- sort resolution


def resolve_term(t: Term, funcs: Mapping):
    """Bottom-up overload resolution. Returns (resolved term, sort)."""
    if isinstance(t, Var):
        return t, t.sort
    args, sorts = [], []
    for a in t.args:
        ra, s = resolve_term(a, funcs)
        args.append(ra)
        sorts.append(s)
    key = DName(t.name, tuple(sorts))
    decl = funcs.get(key)
    if decl is None or (t.sortv is not None and tuple(t.sortv) != key.sortv):
        shown = ", ".join(render_plain(s) for s in sorts)
        raise SpecError(f"no declaration of {render_plain(t.name)}({shown})", names=[key])
    return App(t.name, tuple(args), key.sortv, t.fix), decl.target


def resolve_eq(e: Eq, funcs: Mapping) -> Eq:
    lhs, ls = resolve_term(e.lhs, funcs)
    try:
        rhs, rs = resolve_term(e.rhs, funcs)
    except SpecError:
        if e.bare:
            raise SpecError(f"abbreviated equation {render_plain(getattr(e.lhs, 'name', '?'))}(...) "
                            "needs a visible constant true") from None
        raise
    if ls != rs:
        what = "abbreviated equation needs true of sort" if e.bare else "equation sides differ in sort:"
        raise SpecError(f"{what} {render_plain(ls)} vs {render_plain(rs)}")
    return Eq(lhs, rhs, e.bare)


def resolve_clause(c: Clause, funcs: Mapping) -> Clause:
    return Clause(c.label, tuple(resolve_eq(e, funcs) for e in c.ante), tuple(resolve_eq(e, funcs) for e in c.succ))


def _resolve_body(b, funcs: Mapping, head_sort):
    if isinstance(b, Leaf):
        t, s = resolve_term(b.term, funcs)
        if s != head_sort:
            raise ExpansionError(
                f"macro leaf has sort {render_plain(s)}, head has {render_plain(head_sort)}")
        return Leaf(t)
    if isinstance(b, Case):
        return Case(tuple((tuple(_resolve_cond(c, funcs) for c in conds), _resolve_body(sub, funcs, head_sort))
                          for conds, sub in b.branches))
    return If(
        tuple(_resolve_cond(c, funcs) for c in b.conds),
        _resolve_body(b.then, funcs, head_sort),
        None if b.orelse is None else _resolve_body(b.orelse, funcs, head_sort),
    )


def _resolve_cond(c, funcs: Mapping):
    if isinstance(c, Match):
        if not isinstance(c.var, Var):
            raise ExpansionError(f"match condition on non-variable {render_plain(c.var.name)}")
        pattern, s = resolve_term(c.pattern, funcs)
        if s != c.var.sort:
            raise ExpansionError(
                f"pattern of sort {render_plain(s)} matched against variable "
                f"{render_plain(c.var.name)} of sort {render_plain(c.var.sort)}")
        return Match(c.var, pattern)
    return resolve_eq(c, funcs)


def resolve_equation(e, funcs: Mapping):
    if isinstance(e, MacroEquation):
        head, s = resolve_term(e.head, funcs)
        return MacroEquation(head, _resolve_body(e.body, funcs, s))
    return Equation(
        e.label,
        resolve_eq(e.eq, funcs),
        tuple(resolve_eq(c, funcs) for c in e.pos),
        tuple(resolve_eq(c, funcs) for c in e.neg),
    )


def resolve_module(m: Module, funcs: Optional[Mapping] = None) -> Module:
    """Resolve every term of ``m`` against ``funcs`` (default: its own signature)."""
    funcs = function_table(m) if funcs is None else funcs
    return replace(
        m,
        params=tuple(ParamBlock(p.sig, tuple(resolve_clause(c, funcs) for c in p.conditions)) for p in m.params),
        equations=tuple(resolve_equation(e, funcs) for e in m.equations),
        goals=tuple(resolve_clause(g, funcs) for g in m.goals),
    )


def check_sorts(m: Module, known: set) -> None:
    """Every sort used in declarations or variable blocks must be declared."""
    for sig in m.signatures():
        for key, decl in sig.decls():
            for s in key.sortv + (decl.target,):
                if s not in known:
                    raise SpecError(f"undeclared sort {render_plain(s)} in declaration of "
                                    f"{render_plain(key.name)}", names=[s])
    for v, s in m.var_sorts().items():
        if s not in known:
            raise SpecError(f"undeclared sort {render_plain(s)} for variable {render_plain(v)}", names=[s])


# ----------------------------------------------------------- term helpers


def term_vars(t: Term, acc: Optional[list] = None) -> list:
    acc = [] if acc is None else acc
    if isinstance(t, Var):
        if t.name not in acc:
            acc.append(t.name)
    else:
        for a in t.args:
            term_vars(a, acc)
    return acc


def substitute(t: Term, subst: Mapping) -> Term:
    if isinstance(t, Var):
        return subst.get(t.name, t)
    if not t.args:
        return t
    return App(t.name, tuple(substitute(a, subst) for a in t.args), t.sortv, t.fix)


def module_labels(m: Module) -> list:
    labels = [e.label for e in m.equations if isinstance(e, Equation)]
    labels += [g.label for g in m.goals]
    labels += [c.label for p in m.params for c in p.conditions]
    return labels


# -------------------------------------------------------------- canonical


def _canon_sig(sig: Signature):
    return (frozenset(sig.sorts), frozenset(sig.cons.items()), frozenset(sig.noncons.items()))


def canonical(m: Module):
    """Order-insensitive, hashable view of a module for structural equality."""
    imports = frozenset(
        (i.module, i.inst, frozenset(i.visibility.items()), frozenset(i.renaming.items()),
         frozenset((frozenset(b.binding.items()), b.act_module, b.act_params) for b in i.blocks),
         frozenset(i.passthrough))
        for i in m.imports
    )
    return (
        m.name,
        imports,
        frozenset((_canon_sig(p.sig), frozenset(p.conditions)) for p in m.params),
        _canon_sig(m.public),
        _canon_sig(m.private),
        frozenset(m.cons_vars.items()),
        frozenset(m.noncons_vars.items()),
        frozenset(m.equations),
        frozenset(m.goals),
    )
