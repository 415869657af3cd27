"""Command-line front end: ``asfplus <command> FILES...``."""

from __future__ import annotations

import argparse
import sys
from typing import Optional

from . import provedb
from .diagram import emit_ascii, emit_dot, structure_tree
from .errors import AsfError
from .macros import expand_module
from .normalizer import Normalizer
from .parser import parse_specification
from .printer import print_module


def _read_files(paths: list) -> list:
    files = []
    for path in paths:
        if path == "-":
            files.append(("<stdin>", sys.stdin.read()))
        else:
            with open(path, encoding="utf-8") as f:
                files.append((path, f.read()))
    return files


def _load_spec(args):
    files = _read_files(args.files)
    spec = parse_specification(files, top=args.top, allow_hidden=True if args.hidden_names else None)
    return spec, files


def _db_path(args) -> Optional[str]:
    if args.provedb:
        return args.provedb
    first = next((f for f in args.files if f != "-"), None)
    return provedb.default_path(first)


def _write(text: str, out: Optional[str], default: Optional[str]) -> None:
    target = out or default
    if target is None or target == "-":
        sys.stdout.write(text)
        return
    with open(target, "w", encoding="utf-8") as f:
        f.write(text)
    print(f"wrote {target}", file=sys.stderr)


def cmd_check(args) -> int:
    spec, _ = _load_spec(args)
    norm = Normalizer(spec, provedb.load(_db_path(args)), expand_macros=args.expand_macros)
    names = [args.top] if args.top else list(spec.modules)
    failed = 0
    for name in names:
        try:
            norm.nf(name)
            print(f"ok {name}")
        except AsfError as e:
            failed += 1
            print(e.diagnostic(), file=sys.stderr)
    return 1 if failed else 0


def cmd_normalize(args) -> int:
    spec, _ = _load_spec(args)
    norm = Normalizer(spec, provedb.load(_db_path(args)), expand_macros=args.expand_macros)
    result = norm.nf(spec.top)
    text = print_module(result.module, args.disambiguate, spec.abbrevs)
    _write(text, args.output, f"{spec.top}.nf.asfp")
    return 0


def cmd_expand(args) -> int:
    spec, _ = _load_spec(args)
    module, _ = expand_module(spec.modules[spec.top])
    _write(print_module(module, args.disambiguate, spec.abbrevs), args.output, "-")
    return 0


def cmd_diagram(args) -> int:
    spec, _ = _load_spec(args)
    norm = Normalizer(spec, provedb.load(_db_path(args)))
    tree = structure_tree(norm.nf(spec.top), expanded=args.expanded, names=args.names)
    if args.format == "dot":
        _write(emit_dot(tree), args.output, f"{spec.top}.dot")
    else:
        _write(emit_ascii(tree), args.output, f"{spec.top}.txt")
    return 0


def _goal_status(db, module, goal) -> str:
    rec = db.records.get((module, goal.label))
    if rec is None:
        return "unproven"
    return "proven" if provedb.is_proven(db, module, goal.label, goal) else "stale"


def cmd_goals(args) -> int:
    spec, _ = _load_spec(args)
    db = provedb.load(_db_path(args))
    norm = Normalizer(spec, db)
    names = [args.top] if args.top else list(spec.modules)
    for name in names:
        for goal in norm.nf(name).module.goals:
            if isinstance(goal.label, str):
                print(f"{name}\t[{goal.label}]\t{_goal_status(db, name, goal)}")
    return 0


def cmd_prove(args) -> int:
    spec, files = _load_spec(args)
    path = _db_path(args)
    db = provedb.load(path)
    norm = Normalizer(spec, db)
    if args.action == "list":
        for rec in db:
            print("\t".join(rec))
        return 0
    if args.action == "validate":
        def lookup(module, label):
            if module not in spec.modules:
                return None
            return norm.goal(module, label)

        stale = provedb.validate(db, lookup)
        for rec, why in stale:
            print(f"{rec.module}\t[{rec.label}]\t{why}")
        return 1 if stale else 0
    if not args.module or not args.label:
        print("prove record needs --module and --label", file=sys.stderr)
        return 2
    goal = norm.goal(args.module, args.label) if args.module in spec.modules else None
    stamp = provedb.spec_fingerprint(spec.top, [text for _, text in files])
    provedb.record(db, args.module, args.label, goal, args.ref or "", stamp)
    if path is None:
        sys.stdout.write(provedb.dumps(db))
    else:
        provedb.store(db, path)
        print(f"recorded {args.module} [{args.label}] in {path}", file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--top", help="top module (default: first module of the first file)")
    common.add_argument("--provedb", help="proof ledger (default: $ASFPLUS_PROVEDB or <file>.provedb)")
    common.add_argument("--hidden-names", action="store_true",
                        help="accept Prefix-name hidden names in the input")
    common.add_argument("-o", "--output", help="output file, '-' for stdout")
    common.add_argument("--expand-macros", action="store_true", help="expand macro-equations")
    common.add_argument("--disambiguate", action="store_true", help="print f[S1,...] for every function")

    p = argparse.ArgumentParser(prog="asfplus", description="Parse, flatten and draw modular specifications.")
    sub = p.add_subparsers(dest="command", required=True)
    made = {}
    for name, text in (("check", "normalize every module and report errors"),
                       ("normalize", "write the flattened top module"),
                       ("expand", "expand the macros of one module"),
                       ("diagram", "emit a structure diagram"),
                       ("goals", "list goals and their proof status"),
                       ("prove", "maintain the proof ledger")):
        made[name] = sub.add_parser(name, parents=[common], help=text)
    made["prove"].add_argument("action", choices=["record", "list", "validate"])
    for sp in made.values():
        sp.add_argument("files", nargs="+", help="specification files, '-' for stdin")
    d = made["diagram"]
    d.add_argument("--format", choices=["dot", "ascii"], default="dot")
    d.add_argument("--expanded", action="store_true", help="draw every dependency in every box")
    d.add_argument("--names", action="store_true", help="add public/private/hidden name columns")
    pr = made["prove"]
    pr.add_argument("--module")
    pr.add_argument("--label")
    pr.add_argument("--ref", help="where the proof can be found")
    return p


COMMANDS = {
    "check": cmd_check, "normalize": cmd_normalize, "expand": cmd_expand,
    "diagram": cmd_diagram, "goals": cmd_goals, "prove": cmd_prove,
}


def main(argv: Optional[list] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except AsfError as e:
        print(e.diagnostic(), file=sys.stderr)
        return 1
    except OSError as e:
        print(f"asfplus: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
