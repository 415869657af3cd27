"""Structure diagrams: nested namespace boxes with parameter hexagons.

A box contains the boxes of the namespaces it depends on. By default only
the transitive reduction of the dependency relation is drawn, so a box holds
just its direct dependencies; ``expanded`` draws every dependency in every
box that has it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import networkx as nx

from .model import FUNCTION, HIDDEN, PARAMETER, PRIVATE, PUBLIC, SORT, ModInstName, user_part
from .normalizer import NormalForm


@dataclass
class Hexagon:
    params: tuple
    actual: Optional[ModInstName] = None  # set when the tuple is bound


@dataclass
class DiagramTree:
    node: ModInstName
    children: list = field(default_factory=list)
    hexagons: list = field(default_factory=list)
    columns: Optional[dict] = None

    def walk(self):
        yield self
        for c in self.children:
            yield from c.walk()


def dependency_graph(depf) -> nx.DiGraph:
    """Edge x -> n whenever namespace x depends on namespace n."""
    g = nx.DiGraph()
    g.add_nodes_from(depf)
    for n, dependents in depf.items():
        for x in dependents:
            g.add_edge(x, n)
    return g


def containment(depf, expanded: bool = False) -> nx.DiGraph:
    g = dependency_graph(depf)
    return g if expanded else nx.transitive_reduction(g)


def _appearance(nf: NormalForm) -> dict:
    order: dict = {}
    for o in nf.originf.values():
        order.setdefault(o.modiname, len(order))
    for n in nf.depf:
        order.setdefault(n, len(order))
    return order


def _columns(nf: NormalForm) -> dict:
    cols: dict = {}
    for o in nf.originf.values():
        if o.symboltype not in (SORT, FUNCTION) or o.visibility == PARAMETER:
            continue
        slot = cols.setdefault(o.modiname, {PUBLIC: [], PRIVATE: [], HIDDEN: []})
        if o.uname not in slot[o.visibility]:
            slot[o.visibility].append(o.uname)
    return cols


def structure_tree(nf: NormalForm, *, expanded: bool = False, names: bool = False) -> DiagramTree:
    graph = containment(nf.depf, expanded)
    order = _appearance(nf)
    roots = [n for n in graph if graph.in_degree(n) == 0]
    root = min(roots, key=lambda n: order.get(n, 0)) if roots else ModInstName(nf.module.name)

    hexagons: dict = {}
    for block in nf.module.params:
        params = tuple(user_part(n) for n in block.names())
        ns = next((o.modiname for k, o in nf.originf.items()
                   if o.visibility == PARAMETER and user_part(k.name) in params), root)
        hexagons.setdefault(ns, []).append(Hexagon(params))
    for b in nf.bindings:
        hexagons.setdefault(b.formal, []).append(Hexagon(b.params, b.actual))
    cols = _columns(nf) if names else None

    def build(n):
        kids = sorted(graph.successors(n), key=lambda c: order.get(c, len(order)))
        return DiagramTree(
            n, [build(c) for c in kids], list(hexagons.get(n, [])),
            None if cols is None else cols.get(n, {PUBLIC: [], PRIVATE: [], HIDDEN: []}),
        )

    return build(root)


# ---------------------------------------------------------------- emitters


def _quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def emit_dot(tree: DiagramTree) -> str:
    lines = [f"digraph {_quote(str(tree.node))} {{", "  compound=true;"]
    anchors: dict = {}
    targets: list = []
    counter = {"cluster": 0, "hex": 0}

    def box(t: DiagramTree, depth: int):
        pad = "  " * depth
        k = counter["cluster"]
        counter["cluster"] += 1
        anchor = f"anchor_{k}"
        anchors.setdefault(t.node, (anchor, f"cluster_{k}"))
        lines.append(f"{pad}subgraph {_quote(f'cluster_{k}')} {{")
        lines.append(f"{pad}  label={_quote(str(t.node))};")
        lines.append(f"{pad}  {_quote(anchor)} [shape=point, style=invis];")
        for h in t.hexagons:
            hid = f"hex_{counter['hex']}"
            counter["hex"] += 1
            lines.append(f"{pad}  {_quote(hid)} [shape=hexagon, label={_quote(', '.join(h.params))}];")
            if h.actual is not None:
                targets.append((h.actual, hid))
        if t.columns is not None:
            for level in (PUBLIC, PRIVATE, HIDDEN):
                text = f"{level}: {', '.join(t.columns[level])}"
                lines.append(f"{pad}  {_quote(f'names_{k}_{level}')} [shape=plaintext, label={_quote(text)}];")
        for c in t.children:
            box(c, depth + 1)
        lines.append(f"{pad}}}")

    box(tree, 1)
    for actual, hid in targets:
        if actual in anchors:
            anchor, cluster = anchors[actual]
            lines.append(f"  {_quote(anchor)} -> {_quote(hid)} [ltail={_quote(cluster)}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def _box_lines(t: DiagramTree) -> list:
    inner = []
    for h in t.hexagons:
        text = f"<( {', '.join(h.params)} )>"
        if h.actual is not None:
            text += f" <== {h.actual}"
        inner.append(text)
    if t.columns is not None:
        inner.append(" : ".join(f"{lvl}: {', '.join(t.columns[lvl]) or '-'}" for lvl in (PUBLIC, PRIVATE, HIDDEN)))
    for c in t.children:
        inner += _box_lines(c)
    title = f"+- {t.node} "
    width = max([len(title) - 2] + [len(s) for s in inner])
    top = title + "-" * (width + 4 - len(title) - 1) + "+"
    body = [f"| {s.ljust(width)} |" for s in inner]
    return [top] + body + ["+" + "-" * (width + 2) + "+"]


def emit_ascii(tree: DiagramTree) -> str:
    return "\n".join(_box_lines(tree)) + "\n"
