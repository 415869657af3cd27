"""Flattening of module hierarchies into a single import-free module.

A normal form is a module together with an origin function (which object
every name denotes) and a dependency function (which namespaces depend on
which). Imports are eliminated bottom-up: the normal form of each imported
module is hidden, copied, renamed and bound as the import declaration says,
the results are merged under the identification rule, and finally merged
with the importing module itself.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, NamedTuple, Optional

from . import provedb
from .errors import (
    AsfError, ExportabilityConflict, NameClash, SemanticError, SpecError,
)
from .macros import expand_module
from .model import (
    FUNCTION, HIDDEN, LABEL, PARAMETER, PRIVATE, PUBLIC, SORT, VARIABLE,
    App, Clause, DName, Hidden, ModInstName, Module, Origin, Renamer, Signature, Var,
    all_sorts, check_sorts, function_table, get_renaming, map_clause, map_module, map_originf,
    module_labels, module_union, name_renamer, ordered_union, references_same_object,
    render_plain, resolve_module, user_part,
)
from .printer import print_module

NAME_STAGE = (LABEL, VARIABLE, SORT)
FUNCTION_STAGE = (FUNCTION,)


class BindRecord(NamedTuple):
    """One parameter binding: formal namespace, actual namespace, bound names."""

    formal: ModInstName
    actual: ModInstName
    params: tuple


@dataclass(frozen=True)
class NormalForm:
    module: Module
    originf: dict
    depf: dict = field(default_factory=dict)
    bindings: tuple = ()


# ------------------------------------------------------------ small helpers


def _describe(key: DName, origin: Origin) -> str:
    return f"{origin.symboltype} {origin.uname}"


def _param_header(module: Module) -> tuple:
    return tuple(tuple(user_part(n) for n in p.names()) for p in module.params)


def _tuple_set(tuples: Iterable) -> set:
    return {frozenset(user_part(n) for n in t) for t in tuples}


def union_originf(originfs: Iterable[Mapping]) -> dict:
    """Union of origin functions; a name with two different origins is a clash."""
    out: dict = {}
    for of in originfs:
        for key, origin in of.items():
            seen = out.get(key)
            if seen is None:
                out[key] = origin
            elif seen != origin:
                a, b = sorted([str(seen.modiname), str(origin.modiname)])
                raise NameClash(f"{origin.symboltype} {render_plain(key.name)} ({a} vs {b})",
                                names=[key])
    return out


def combine_dependencies(dfs: Iterable[Mapping]) -> dict:
    out: dict = {}
    for df in dfs:
        for n, deps in df.items():
            out[n] = out.get(n, frozenset()) | frozenset(deps)
    return out


# ------------------------------------------------------------- general form


def module_text(name: str, spec) -> Module:
    try:
        return spec.modules[name]
    except KeyError:
        raise SpecError(f"no module named {name} in the specification", names=[name]) from None


def make_gf(m: Module) -> NormalForm:
    """Origins for every name the module declares itself."""
    ns = ModInstName(m.name)
    of: dict = {}

    def add(key: DName, kind: str, visibility: str):
        if key in of:
            raise SpecError(f"{render_plain(key.name)} declared twice in module {m.name}",
                            pos=m.pos, names=[key])
        of[key] = Origin(key.name, ns, kind, visibility)

    def add_sig(sig: Signature, visibility: str):
        for s in sig.sorts:
            add(DName(s), SORT, visibility)
        for key, _ in sig.decls():
            add(key, FUNCTION, visibility)

    for block in m.params:
        add_sig(block.sig, PARAMETER)
    add_sig(m.public, PUBLIC)
    add_sig(m.private, PRIVATE)
    for v in m.var_sorts():
        add(DName(v), VARIABLE, PRIVATE)
    for label in module_labels(m):
        add(DName(label), LABEL, PRIVATE)
    return NormalForm(m, of, {})


# --------------------------------------------------------------- visibility


def make_consistent(module: Module, of: Mapping):
    """Rename so that every name matches its origin, then re-sort signatures."""
    first = get_renaming(of, NAME_STAGE)
    per_kind: dict = {SORT: {}, VARIABLE: {}, LABEL: {}}
    for key, new in first.items():
        per_kind[of[key].symboltype][key.name] = new
    r1 = Renamer(
        sort=lambda n: per_kind[SORT].get(n, n),
        var=lambda n: per_kind[VARIABLE].get(n, n),
        label=lambda n: per_kind[LABEL].get(n, n),
    )
    if first:
        module = map_module(module, r1)
        of = map_originf(of, r1)

    second = get_renaming(of, FUNCTION_STAGE)
    if second:
        r2 = Renamer(func=lambda n, sv: second.get(DName(n, sv), n))
        module = map_module(module, r2)
        of = map_originf(of, r2)

    return _arrange_signatures(module, of), dict(of)


def _arrange_signatures(module: Module, of: Mapping) -> Module:
    def is_public(key, default):
        origin = of.get(key)
        return default if origin is None else origin.visibility == PUBLIC

    sorts = {True: [], False: []}
    decls = {(True, "c"): {}, (False, "c"): {}, (True, "n"): {}, (False, "n"): {}}
    for default, sig in ((True, module.public), (False, module.private)):
        for s in sig.sorts:
            sorts[is_public(DName(s), default)].append(s)
        for key, d in sig.cons.items():
            decls[(is_public(key, default), "c")][key] = d
        for key, d in sig.noncons.items():
            decls[(is_public(key, default), "n")][key] = d

    def sig(pub):
        return Signature(ordered_union([sorts[pub]]), decls[(pub, "c")], decls[(pub, "n")])

    return replace(module, public=sig(True), private=sig(False))


def adapt_visibility(nfs: list, symboltypes) -> list:
    """Apply the identification rule pairwise and raise hidden names where needed."""
    ofs = [dict(nf.originf) for nf in nfs]
    for i in range(len(ofs)):
        for j in range(i + 1, len(ofs)):
            of_i, of_j = ofs[i], ofs[j]
            index: dict = {}
            for kj, oj in of_j.items():
                index.setdefault((oj.uname, kj.sortv), []).append(kj)
            for ki in list(of_i):
                if of_i[ki].symboltype not in symboltypes:
                    continue
                for kj in index.get((of_i[ki].uname, ki.sortv), ()):
                    oi, oj = of_i[ki], of_j[kj]
                    if oi.modiname == oj.modiname:
                        if oi.symboltype != oj.symboltype:
                            raise SpecError(
                                f"{oi.uname} of {oi.modiname} is used both as {oi.symboltype} "
                                f"and as {oj.symboltype}", names=[ki])
                        if oi.visibility == HIDDEN and oj.visibility in (PUBLIC, PRIVATE):
                            of_i[ki] = oi._replace(visibility=oj.visibility)
                        elif oj.visibility == HIDDEN and oi.visibility in (PUBLIC, PRIVATE):
                            of_j[kj] = oj._replace(visibility=oi.visibility)
                        elif oi.visibility != oj.visibility:
                            raise ExportabilityConflict(
                                f"{_describe(ki, oi)} of {oi.modiname} imported both as "
                                f"{oi.visibility} and as {oj.visibility}", names=[ki])
                    elif ki.name == kj.name:
                        a, b = sorted([str(oi.modiname), str(oj.modiname)])
                        raise NameClash(f"{oi.symboltype} {render_plain(ki.name)} ({a} vs {b})",
                                        names=[ki])
    out = []
    for nf, of in zip(nfs, ofs):
        module, of = make_consistent(nf.module, of)
        out.append(replace(nf, module=module, originf=of))
    return out


# ---------------------------------------------------------------- combining


def combine_imports(nfs: list) -> NormalForm:
    nfs = adapt_visibility(nfs, NAME_STAGE)
    nfs = adapt_visibility(nfs, FUNCTION_STAGE)
    return NormalForm(
        module_union(nf.module for nf in nfs),
        union_originf(nf.originf for nf in nfs),
        combine_dependencies(nf.depf for nf in nfs),
        ordered_union(nf.bindings for nf in nfs),
    )


def combine_with_imports(gf: NormalForm, imp: NormalForm, *, expand: bool = False) -> NormalForm:
    """Merge a module's own content with the combined normal form of its imports."""
    own = replace(gf.module, imports=())
    of = dict(gf.originf)
    if expand:
        own, labels = expand_module(own)
        ns = ModInstName(own.name)
        for label in labels:
            of[DName(label)] = Origin(label, ns, LABEL, PRIVATE)
    originf = union_originf([imp.originf, of])

    check_sorts(own, all_sorts(own) | all_sorts(imp.module))
    funcs = function_table(module_union([imp.module, own]))
    own = resolve_module(own, funcs)

    name = gf.module.name
    merged = module_union([imp.module, own])
    merged = replace(merged, name=f"{name}.nf", header=_param_header(merged), pos=gf.module.pos)
    ns = ModInstName(name)
    depf = {ns: frozenset()}
    for n, deps in imp.depf.items():
        depf[n] = frozenset(deps) | {ns}
    return NormalForm(merged, originf, depf, imp.bindings)


def combine_with_act_module(form: NormalForm, paradefmod: ModInstName, act: NormalForm) -> NormalForm:
    """Implant the actual module's normal form below the formal parameters' namespace."""
    module = module_union([act.module, form.module])
    module = replace(module, name=form.module.name, header=_param_header(module), pos=form.module.pos)
    originf = union_originf([form.originf, act.originf])
    extra = {paradefmod} | set(form.depf.get(paradefmod, ()))
    depf_act = {n: frozenset(deps) | extra for n, deps in act.depf.items()}
    depf = combine_dependencies([form.depf, depf_act])
    return NormalForm(module, originf, depf, ordered_union([act.bindings, form.bindings]))


# ------------------------------------------------------- import modifiers


def hide(nf: NormalForm, vf: Mapping) -> NormalForm:
    """Hide everything not exported; exported names get the level the import asks for."""
    exported = {o.uname for o in nf.originf.values() if o.visibility == PUBLIC}
    for uname in vf:
        if uname not in exported:
            raise SpecError(f"{uname} is not exported by {nf.module.name} and cannot be imported",
                            names=[uname])
    of = {}
    for key, o in nf.originf.items():
        if o.visibility == PRIVATE:
            o = o._replace(visibility=HIDDEN)
        elif o.visibility == PUBLIC:
            o = o._replace(visibility=vf.get(o.uname, HIDDEN))
        of[key] = o
    module, of = make_consistent(nf.module, of)
    return replace(nf, module=module, originf=of)


def instanciate_modinst_name(n: ModInstName, iname: str) -> ModInstName:
    if iname in n.instances:
        raise SpecError(f"namespace {n} is already instanciated with {iname}")
    return ModInstName(n.module, n.instances + (iname,))


def instanciate(nf: NormalForm, renaming: Mapping, blocks: Iterable, iname: str) -> NormalForm:
    """Copy the namespaces touched by renaming or binding, plus everything depending on them."""
    touched = set(renaming)
    for b in blocks:
        touched |= set(b.binding)
    toinst = {o.modiname for key, o in nf.originf.items() if key.name in touched}
    for n in list(toinst):
        toinst |= set(nf.depf.get(n, ()))
    if not toinst:
        return nf
    new = {n: instanciate_modinst_name(n, iname) for n in toinst}

    def ns(n):
        return new.get(n, n)

    def name(x):
        if isinstance(x, Hidden) and x.namespace in new:
            return Hidden(new[x.namespace], x.uname)
        return x

    r = Renamer(sort=name, var=name, label=name, func=lambda n, sv: name(n))
    return NormalForm(
        map_module(nf.module, r),
        map_originf(nf.originf, r, lambda o: o._replace(modiname=ns(o.modiname))),
        {ns(n): frozenset(ns(d) for d in deps) for n, deps in nf.depf.items()},
        tuple(BindRecord(ns(b.formal), ns(b.actual), b.params) for b in nf.bindings),
    )


def rename(nf: NormalForm, renaming: Mapping) -> NormalForm:
    """Explicit renaming of visible names."""
    if not renaming:
        return nf

    def ren(x):
        return renaming.get(x, x) if isinstance(x, str) else x

    groups: dict = {}
    for o in nf.originf.values():
        if o.visibility != HIDDEN and o.symboltype in (SORT, FUNCTION):
            groups.setdefault((o.modiname, o.symboltype, ren(o.uname)), set()).add(o.uname)
    for (modiname, kind, target), sources in groups.items():
        if len(sources) > 1:
            shown = ", ".join(sorted(sources))
            raise SpecError(f"renaming makes the {kind}s {shown} of {modiname} collapse into {target}",
                            names=sorted(sources))

    r = Renamer(sort=ren, func=lambda n, sv: ren(n))
    module = map_module(nf.module, r)
    of = map_originf(nf.originf, r,
                     lambda o: o if o.visibility == HIDDEN else o._replace(uname=ren(o.uname)))
    return replace(nf, module=module, originf=of)


# ---------------------------------------------------------------- binding


def separate_para_block(nf: NormalForm, parameters: Iterable):
    params = set(parameters)
    module = nf.module
    for k, block in enumerate(module.params):
        if {user_part(n) for n in block.names()} == params:
            break
    else:
        raise SpecError(f"{nf.module.name} has no parameter tuple ({', '.join(sorted(params))})",
                        names=sorted(params))
    paradefmod = next(o.modiname for key, o in nf.originf.items()
                      if key.name in params and o.visibility == PARAMETER)
    rest = module.params[:k] + module.params[k + 1:]
    module = replace(module, params=rest, header=_param_header(replace(module, params=rest)))
    of = {key: o for key, o in nf.originf.items() if key.name not in params}
    return replace(nf, module=module, originf=of), block, paradefmod


def _same_object_in(of_av: Mapping, key: DName, of: Mapping, kind: str) -> Optional[DName]:
    for cand, o in of_av.items():
        if o.symboltype == kind and len(cand.sortv) == len(key.sortv) \
                and references_same_object(cand, of_av, key, of):
            return cand
    return None


def get_parameter_renamings(sig_p: Signature, binding: Mapping, of_act: Mapping, of_act_av: Mapping,
                            act_funcs: Mapping) -> dict:
    """Names the formal parameters must be replaced with in the formal module."""
    ren: dict = {}
    sort_ren: dict = {}
    for sp in sig_p.sorts:
        actual = DName(binding[sp])
        if actual not in of_act or of_act[actual].symboltype != SORT:
            raise SpecError(f"parameter {sp} is bound to {binding[sp]}, which is not a sort of "
                            f"the actual module", names=[sp])
        found = _same_object_in(of_act_av, actual, of_act, SORT)
        if found is None:
            raise SpecError(f"sort {binding[sp]} is lost in the actual module", names=[sp])
        ren[sp] = found.name
        sort_ren[sp] = binding[sp]

    used = ordered_union([list(k.sortv) + [d.target] for k, d in sig_p.decls()])
    for s in used:
        if s in sig_p.sorts:
            continue
        if DName(s) not in of_act_av:
            raise SpecError(f"sort {render_plain(s)} of a function parameter does not exist in the "
                            f"actual module", names=[s])
        found = _same_object_in(of_act, DName(s), of_act_av, SORT)
        if found is None:
            raise SpecError(f"sort {render_plain(s)} of a function parameter does not exist in the "
                            f"actual module", names=[s])
        sort_ren[s] = found.name

    for key, decl in sig_p.decls():
        sortv = tuple(sort_ren.get(s, s) for s in key.sortv)
        target = sort_ren.get(decl.target, decl.target)
        actual = DName(binding[key.name], sortv)
        if actual not in of_act or of_act[actual].symboltype != FUNCTION:
            raise SpecError(
                f"parameter {render_plain(key.name)} is bound to {render_plain(binding[key.name])}, "
                f"which has no declaration with arguments ({', '.join(map(render_plain, sortv))})",
                names=[key])
        have = act_funcs.get(actual)
        if have is not None and have.target != target:
            raise SpecError(
                f"parameter {render_plain(key.name)} has target sort {render_plain(target)} but "
                f"{render_plain(actual.name)} has {render_plain(have.target)}", names=[key])
        found = _same_object_in(of_act_av, actual, of_act, FUNCTION)
        if found is None:
            raise SpecError(f"function {render_plain(actual.name)} is lost in the actual module",
                            names=[key])
        ren[key.name] = found.name
    return ren


def _match_term(g, c, sub: dict, goal_cons: set, form_cons: set) -> bool:
    if isinstance(g, Var):
        if not isinstance(c, Var) or g.sort != c.sort:
            return False
        if (g.name in goal_cons) != (c.name in form_cons):
            return False
        bound = sub.get(g.name)
        if bound is None:
            sub[g.name] = c.name
            return True
        return bound == c.name
    if not isinstance(c, App) or g.name != c.name or g.sortv != c.sortv or len(g.args) != len(c.args):
        return False
    return all(_match_term(a, b, sub, goal_cons, form_cons) for a, b in zip(g.args, c.args))


def _match_eqs(goal_eqs, cond_eqs, sub, goal_cons, form_cons):
    """Match a goal side onto a condition side, in any order."""
    if not goal_eqs:
        yield sub
        return
    first, rest = goal_eqs[0], goal_eqs[1:]
    for k, ce in enumerate(cond_eqs):
        trial = dict(sub)
        if _match_term(first.lhs, ce.lhs, trial, goal_cons, form_cons) and \
                _match_term(first.rhs, ce.rhs, trial, goal_cons, form_cons):
            yield from _match_eqs(rest, cond_eqs[:k] + cond_eqs[k + 1:], trial, goal_cons, form_cons)


def clause_instance(goal: Clause, cond: Clause, goal_cons: set, form_cons: set) -> Optional[dict]:
    """A sort-pure variable substitution taking ``goal`` onto ``cond``, labels ignored."""
    if len(goal.ante) != len(cond.ante) or len(goal.succ) != len(cond.succ):
        return None
    for sub in _match_eqs(goal.ante, cond.ante, {}, goal_cons, form_cons):
        for full in _match_eqs(goal.succ, cond.succ, sub, goal_cons, form_cons):
            return full
    return None


def check_semantic_conditions(conditions, mod_form: Module, nf_act_av: NormalForm, pdb, lookup) -> list:
    """One SemanticError per condition that no proven goal of the actual module covers."""
    errors = []
    goal_cons = set(nf_act_av.module.cons_vars)
    form_cons = set(mod_form.cons_vars)
    for cond in conditions:
        matched = []
        ok = False
        for goal in nf_act_av.module.goals:
            if clause_instance(goal, cond, goal_cons, form_cons) is None:
                continue
            origin = nf_act_av.originf.get(DName(goal.label))
            module = origin.modiname.module if origin else nf_act_av.module.name
            label = origin.uname if origin else user_part(goal.label)
            matched.append(f"[{label}] of {module}")
            source = lookup(module, label)
            if source is not None and provedb.is_proven(pdb, module, label, source):
                ok = True
                break
        if ok:
            continue
        shown = user_part(cond.label)
        if matched:
            msg = (f"condition [{shown}] is covered by goal {matched[0]}, which is not recorded as "
                   f"proven")
        else:
            msg = f"no goal of the actual module covers condition [{shown}]"
        errors.append(SemanticError(msg, names=[cond.label]))
    return errors


def bind(form: NormalForm, binding: Mapping, act: NormalForm, pdb=None, lookup=None,
         actual: Optional[ModInstName] = None) -> NormalForm:
    """Bind one parameter tuple of ``form`` to names of ``act``."""
    lookup = lookup or (lambda module, label: None)
    act_hidden = hide(act, {})
    form_rest, block, paradefmod = separate_para_block(form, binding)
    if block.conditions and act.module.params:
        raise SpecError("a parameter tuple with conditions can only be bound to a module "
                        "without unbound parameters")
    act_av, form_av = adapt_visibility([act_hidden, form_rest], NAME_STAGE)
    act_av, form_av = adapt_visibility([act_av, form_av], FUNCTION_STAGE)

    par_ren = get_parameter_renamings(block.sig, binding, act.originf, act_av.originf,
                                      function_table(act.module))
    r = name_renamer(par_ren)
    mod_form = map_module(form_av.module, r)
    of_form = map_originf(form_av.originf, r)
    conditions = [map_clause(c, r) for c in block.conditions]

    errors = check_semantic_conditions(conditions, mod_form, act_av, pdb, lookup)
    if errors:
        names = ", ".join(f"[{user_part(c.label)}]" for c in conditions
                          if any(c.label in e.names for e in errors))
        raise SemanticError(f"unproven parameter conditions {names}", errors=errors)

    result = combine_with_act_module(replace(form_av, module=mod_form, originf=of_form),
                                     paradefmod, act_av)
    actual = actual or ModInstName(act.module.name.removesuffix(".nf"))
    record = BindRecord(paradefmod, actual, tuple(sorted(binding)))
    return replace(result, bindings=result.bindings + (record,))


# ------------------------------------------------------------------ driver


class Normalizer:
    """Computes normal forms for the modules of one specification.

    Results are cached per module name; an import cycle is reported as an error.
    """

    def __init__(self, spec, pdb=None, *, expand_macros: bool = False):
        self.spec = spec
        self.pdb = pdb
        self.expand_macros = expand_macros
        self.memo: dict = {}
        self.stack: list = []

    def goal(self, module: str, label: str) -> Optional[Clause]:
        """The goal ``label`` as declared in ``module`` (names as seen there)."""
        nf = self.nf(module)
        for g in nf.module.goals:
            if g.label == label:
                return g
        return None

    def nf(self, name: str) -> NormalForm:
        if name in self.memo:
            return self.memo[name]
        if name in self.stack:
            cycle = " -> ".join(self.stack[self.stack.index(name):] + [name])
            raise SpecError(f"cyclic import: {cycle}", names=[name])
        self.stack.append(name)
        try:
            result = self._compute(name)
        finally:
            self.stack.pop()
        self.memo[name] = result
        return result

    def _compute(self, name: str) -> NormalForm:
        m = module_text(name, self.spec)
        gf = make_gf(m)
        parts = []
        for imp in m.imports:
            try:
                parts.append(self._import(imp))
            except AsfError as e:
                raise e.located(imp.pos)
        try:
            result = combine_with_imports(gf, combine_imports(parts), expand=self.expand_macros)
        except AsfError as e:
            raise e.located(m.pos)
        if _tuple_set(m.header) != _tuple_set(_param_header(result.module)):
            raise SpecError(f"module {name} lists parameters {_show_tuples(m.header)} but has "
                            f"{_show_tuples(_param_header(result.module))}", pos=m.pos)
        return result

    def _import(self, imp) -> NormalForm:
        child = self.nf(imp.module)
        listed = list(imp.passthrough) + [tuple(b.binding) for b in imp.blocks]
        have = _param_header(child.module)
        if _tuple_set(listed) != _tuple_set(have):
            raise SpecError(f"import of {imp.module} lists parameters {_show_tuples(listed)} but the "
                            f"module has {_show_tuples(have)}")
        nf = hide(child, imp.visibility)
        if imp.inst is None:
            if imp.renaming or imp.blocks:
                raise SpecError(f"import of {imp.module} renames or binds names and needs an "
                                f"instance name")
            return nf
        nf = instanciate(nf, imp.renaming, imp.blocks, imp.inst)
        nf = rename(nf, imp.renaming)
        for block in imp.blocks:
            act = self.nf(block.act_module)
            have = _param_header(act.module)
            if _tuple_set(block.act_params) != _tuple_set(have):
                raise SpecError(f"actual module {block.act_module} is listed with parameters "
                                f"{_show_tuples(block.act_params)} but has {_show_tuples(have)}")
            nf = bind(nf, block.binding, act, self.pdb, self.goal, ModInstName(block.act_module))
        return nf


def _show_tuples(tuples) -> str:
    return "<" + "".join(f"({', '.join(map(render_plain, t))})" for t in tuples) + ">" if tuples else "none"


def nf(name: str, spec, pdb=None, *, expand_macros: bool = False) -> NormalForm:
    return Normalizer(spec, pdb, expand_macros=expand_macros).nf(name)


def normal_form(spec, pdb=None, *, expand_macros: bool = False, disambiguate: bool = False):
    """Normalize the top module. Returns (printed text, normal form)."""
    result = nf(spec.top, spec, pdb, expand_macros=expand_macros)
    return print_module(result.module, disambiguate, spec.abbrevs), result
