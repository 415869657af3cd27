"""Ledger of proven goals.

One record per line, tab separated::

    module  label  fingerprint  proof-ref  top:digest  timestamp

Lines starting with ``#`` and blank lines are ignored.
"""

from __future__ import annotations

import hashlib
import os
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Iterable, NamedTuple, Optional

from .errors import FormatError, UnknownGoal
from .model import App, Clause, Renamer, Var, map_clause, user_part

ENV_VAR = "ASFPLUS_PROVEDB"


class ProofRecord(NamedTuple):
    module: str
    label: str
    fingerprint: str
    proof_ref: str
    spec: str
    timestamp: str


@dataclass
class ProveDb:
    records: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records.values())


def user_view(clause: Clause) -> Clause:
    """The clause with every hidden name reduced to its user part."""
    def strip(name):
        return user_part(name)

    return map_clause(clause, Renamer(sort=strip, var=strip, label=strip, func=lambda n, sv: strip(n)))


def _canon_term(t, numbering: dict) -> str:
    if isinstance(t, Var):
        if t.name not in numbering:
            numbering[t.name] = len(numbering)
        return f"?{numbering[t.name]}:{t.sort}"
    assert isinstance(t, App)
    sorts = "" if t.sortv is None else "[" + ",".join(str(s) for s in t.sortv) + "]"
    return f"{t.name}{sorts}(" + ",".join(_canon_term(a, numbering) for a in t.args) + ")"


def clause_fingerprint(clause: Clause) -> str:
    """Hash of the clause body; variable names and the label do not matter."""
    numbering: dict = {}

    def side(eqs):
        return ";".join(f"{_canon_term(e.lhs, numbering)}={_canon_term(e.rhs, numbering)}" for e in eqs)

    text = side(clause.ante) + "-->" + side(clause.succ)
    return hashlib.sha256(text.encode()).hexdigest()


def spec_fingerprint(top: str, texts: Iterable[str]) -> str:
    h = hashlib.sha256()
    for t in texts:
        h.update(t.encode())
        h.update(b"\0")
    return f"{top}:{h.hexdigest()[:16]}"


def default_path(spec_path: Optional[str]) -> Optional[str]:
    env = os.environ.get(ENV_VAR)
    if env:
        return env
    if spec_path is None:
        return None
    root, ext = os.path.splitext(spec_path)
    return (root if ext == ".asfp" else spec_path) + ".provedb"


def parse(text: str, source: str = "<provedb>") -> ProveDb:
    db = ProveDb()
    for n, line in enumerate(text.splitlines(), 1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 6 or not all(parts[:3]):
            raise FormatError(f"expected 6 tab-separated fields, got {len(parts)}", pos=(source, n, 1))
        rec = ProofRecord(*parts)
        if len(rec.fingerprint) != 64 or any(c not in "0123456789abcdef" for c in rec.fingerprint):
            raise FormatError("malformed fingerprint", pos=(source, n, 1))
        db.records[(rec.module, rec.label)] = rec
    return db


def dumps(db: ProveDb) -> str:
    lines = ["# module\tlabel\tfingerprint\tproof-ref\tspec\ttimestamp"]
    for key in sorted(db.records):
        lines.append("\t".join(db.records[key]))
    return "\n".join(lines) + "\n"


def load(path: Optional[str]) -> ProveDb:
    if path is None or not os.path.exists(path):
        return ProveDb()
    with open(path, encoding="utf-8") as f:
        return parse(f.read(), path)


def store(db: ProveDb, path: str) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(dumps(db))


def is_proven(db: Optional[ProveDb], module: str, label: str, clause: Clause) -> bool:
    if db is None:
        return False
    rec = db.records.get((module, label))
    return rec is not None and rec.fingerprint == clause_fingerprint(user_view(clause))


def record(db: ProveDb, module: str, label: str, clause: Optional[Clause], proof_ref: str,
           spec: str, timestamp: Optional[str] = None) -> ProveDb:
    """Upsert a record. ``clause`` is the current goal, ``None`` if there is none."""
    if clause is None:
        raise UnknownGoal(f"module {module} has no goal [{label}]")
    ts = timestamp or datetime.now(timezone.utc).replace(microsecond=0).isoformat()
    rec = ProofRecord(module, label, clause_fingerprint(user_view(clause)), proof_ref, spec, ts)
    db.records[(module, label)] = rec
    return db


def validate(db: ProveDb, lookup) -> list:
    """Records that no longer match. ``lookup(module, label)`` returns the goal or ``None``."""
    stale = []
    for rec in db:
        goal = lookup(rec.module, rec.label)
        if goal is None:
            stale.append((rec, "goal no longer exists"))
        elif clause_fingerprint(user_view(goal)) != rec.fingerprint:
            stale.append((rec, "goal changed since the proof was recorded"))
    return stale
