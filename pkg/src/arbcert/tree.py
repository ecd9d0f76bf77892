"""Finite event trees: nodes, adapted processes, stopping times, measures.

A node at time ``t`` is an atom of the time-``t`` sigma-field.  Node order
throughout the package is time-major, and within one time the order in
which nodes were supplied.  All deterministic tie-breaking downstream
relies on that order.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from types import MappingProxyType
from typing import Iterable, Mapping, Optional, Sequence

from .errors import (
    FamilyIncomplete,
    MultipleRoots,
    OrphanNode,
    ShortBranch,
    SubtreeTooLarge,
    TerminalNode,
    TimeOutOfRange,
    TimeSkip,
    TreeError,
    UnknownNode,
)

Process = Mapping[str, Fraction]


@dataclass(frozen=True)
class NodeSpec:
    id: str
    parent: Optional[str] = None
    time: Optional[int] = None


@dataclass(frozen=True)
class Node:
    id: str
    time: int
    parent: Optional[str]
    children: tuple[str, ...]


class EventTree:
    """Rooted tree of information atoms with horizon ``T``.

    Build instances with :func:`build_tree`; the constructor trusts its
    arguments.
    """

    __slots__ = ("horizon", "nodes", "order", "_by_time", "_index")

    def __init__(self, horizon: int, nodes: Mapping[str, Node], order: Sequence[str]):
        self.horizon = horizon
        self.nodes = MappingProxyType(dict(nodes))
        self.order = tuple(order)
        by_time: list[list[str]] = [[] for _ in range(horizon + 1)]
        for nid in self.order:
            by_time[self.nodes[nid].time].append(nid)
        self._by_time = tuple(tuple(ids) for ids in by_time)
        self._index = {nid: i for i, nid in enumerate(self.order)}

    @property
    def root(self) -> str:
        return self.order[0]

    def __len__(self):
        return len(self.order)

    def __contains__(self, nid):
        return nid in self.nodes

    def __eq__(self, other):
        if not isinstance(other, EventTree):
            return NotImplemented
        return (self.horizon, self.order, dict(self.nodes)) == (
            other.horizon, other.order, dict(other.nodes))

    def __hash__(self):
        return hash((self.horizon, self.order))

    def __repr__(self):
        return f"EventTree(T={self.horizon}, nodes={len(self.order)})"

    def node(self, nid: str) -> Node:
        try:
            return self.nodes[nid]
        except KeyError:
            raise UnknownNode(nid) from None

    def time(self, nid: str) -> int:
        return self.node(nid).time

    def index(self, nid: str) -> int:
        return self._index[nid]

    def children(self, nid: str) -> tuple[str, ...]:
        return self.node(nid).children

    def parent(self, nid: str) -> Optional[str]:
        return self.node(nid).parent

    def is_terminal(self, nid: str) -> bool:
        return not self.node(nid).children

    def terminals(self) -> tuple[str, ...]:
        return self._by_time[self.horizon]

    def nonterminals(self) -> tuple[str, ...]:
        return tuple(n for n in self.order if self.nodes[n].children)

    def atoms(self, t: int) -> tuple[str, ...]:
        return self._by_time[t]

    def path(self, nid: str) -> list[str]:
        """Nodes from the root down to ``nid`` inclusive."""
        out = []
        cur: Optional[str] = nid
        while cur is not None:
            out.append(cur)
            cur = self.nodes[cur].parent
        out.reverse()
        return out

    def ancestor_at(self, nid: str, t: int) -> str:
        cur = nid
        while self.nodes[cur].time > t:
            cur = self.nodes[cur].parent
        return cur

    def subtree(self, nid: str) -> list[str]:
        """``nid`` and all descendants, pre-order, children in tree order."""
        out = []
        stack = [nid]
        while stack:
            cur = stack.pop()
            out.append(cur)
            stack.extend(reversed(self.nodes[cur].children))
        return out

    def leaves_below(self, nid: str) -> list[str]:
        return [n for n in self.subtree(nid) if not self.nodes[n].children]

    def is_descendant(self, nid: str, ancestor: str) -> bool:
        """True when ``ancestor`` lies on the root path of ``nid`` (inclusive)."""
        cur: Optional[str] = nid
        anc_time = self.nodes[ancestor].time
        while cur is not None and self.nodes[cur].time >= anc_time:
            if cur == ancestor:
                return True
            cur = self.nodes[cur].parent
        return False


def build_tree(specs: Iterable[NodeSpec | Mapping], horizon: Optional[int] = None) -> EventTree:
    """Validate node records and assemble an :class:`EventTree`.

    Records may be :class:`NodeSpec` instances or mappings with ``id``,
    ``parent`` and optional ``time`` keys.  Missing times are derived from
    depth.  When ``horizon`` is omitted it is the largest node time.
    """
    recs: list[NodeSpec] = []
    for s in specs:
        if not isinstance(s, NodeSpec):
            s = NodeSpec(str(s["id"]), s.get("parent"), s.get("time"))
        recs.append(s)
    if not recs:
        raise TreeError("tree has no nodes")

    by_id: dict[str, NodeSpec] = {}
    for r in recs:
        if r.id in by_id:
            raise TreeError(f"duplicate node id {r.id!r}")
        by_id[r.id] = r

    roots = [r.id for r in recs if r.parent is None]
    if len(roots) > 1:
        raise MultipleRoots(f"several root nodes: {roots}")
    if not roots:
        raise OrphanNode("no root node (every node names a parent)")
    root = roots[0]

    kids: dict[str, list[str]] = {r.id: [] for r in recs}
    for r in recs:
        if r.parent is not None:
            if r.parent not in by_id:
                raise OrphanNode(f"node {r.id!r} names unknown parent {r.parent!r}")
            kids[r.parent].append(r.id)

    times: dict[str, int] = {}
    rt = by_id[root].time
    if rt not in (None, 0):
        raise TimeSkip(f"root {root!r} has time {rt}, expected 0")
    times[root] = 0
    stack = [root]
    while stack:
        cur = stack.pop()
        for c in kids[cur]:
            want = times[cur] + 1
            given = by_id[c].time
            if given is not None and given != want:
                raise TimeSkip(f"node {c!r} has time {given}, parent {cur!r} has time {times[cur]}")
            times[c] = want
            stack.append(c)
    if len(times) != len(recs):
        missing = [r.id for r in recs if r.id not in times]
        raise OrphanNode(f"nodes not connected to the root: {missing}")

    T = max(times.values()) if horizon is None else horizon
    for nid, t in times.items():
        if t > T:
            raise TimeOutOfRange(f"node {nid!r} at time {t} beyond horizon {T}")
        if not kids[nid] and t < T:
            raise ShortBranch(f"terminal node {nid!r} at time {t} < horizon {T}")

    order = sorted((r.id for r in recs), key=lambda n: times[n])  # stable: keeps input order per time
    nodes = {
        nid: Node(nid, times[nid], by_id[nid].parent, tuple(kids[nid])) for nid in order
    }
    return EventTree(T, nodes, order)


def atoms_at(tree: EventTree, t: int) -> list[str]:
    if not 0 <= t <= tree.horizon:
        raise TimeOutOfRange(f"time {t} outside 0..{tree.horizon}")
    return list(tree.atoms(t))


def succ(tree: EventTree, node: str) -> list[str]:
    kids = tree.children(node)
    if not kids:
        raise TerminalNode(f"node {node!r} is terminal")
    return list(kids)


@dataclass(frozen=True)
class StoppingTime:
    """A stopping time given by its cut: the set of exercise nodes.

    ``after`` is the ``(t, node)`` anchor: the cut lives in the subtree of
    ``node`` and every exercise time exceeds ``t``.  ``node=None`` means
    the whole tree.
    """

    cut: frozenset
    t: int
    node: Optional[str] = None

    def sorted_cut(self, tree: EventTree) -> list[str]:
        return sorted(self.cut, key=tree.index)

    def exercise_node(self, tree: EventTree, leaf: str) -> str:
        for n in tree.path(leaf):
            if n in self.cut:
                return n
        raise TreeError(f"leaf {leaf!r} not covered by cut")


def is_stopping_time(tree: EventTree, cut: Iterable[str], after: tuple[int, Optional[str]]) -> bool:
    t, anchor = after
    cut = set(cut)
    if anchor is None:
        anchor = tree.root
    if anchor not in tree.nodes:
        return False
    for n in cut:
        if n not in tree.nodes or tree.time(n) <= t or not tree.is_descendant(n, anchor):
            return False
    for leaf in tree.leaves_below(anchor):
        hits = sum(1 for n in tree.path(leaf) if n in cut)
        if hits != 1:
            return False
    return True


def enumerate_stopping_times(
    tree: EventTree, after: tuple[int, Optional[str]], max_depth: int = 4
) -> list[StoppingTime]:
    """All cuts strictly after ``t`` within the subtree of the anchor node.

    Order: a node's own singleton cut comes before combinations of its
    children's cuts; combinations follow child order lexicographically.
    """
    t, anchor = after
    if anchor is None:
        anchor = tree.root
    if tree.horizon - tree.time(anchor) > max_depth:
        raise SubtreeTooLarge(
            f"subtree of {anchor!r} has depth {tree.horizon - tree.time(anchor)} > {max_depth}")

    def cuts(n: str) -> list[tuple[str, ...]]:
        out = [(n,)] if tree.time(n) > t else []
        kids = tree.children(n)
        if kids:
            for combo in product(*(cuts(c) for c in kids)):
                out.append(tuple(x for part in combo for x in part))
        return out

    return [StoppingTime(frozenset(c), t, anchor) for c in cuts(anchor)]


@dataclass(frozen=True)
class SingleStepMeasureFamily:
    """One probability row over the children of each non-terminal node."""

    rows: Mapping[str, Mapping[str, Fraction]]

    def row(self, node: str) -> Mapping[str, Fraction]:
        return self.rows[node]


def family_problems(tree: EventTree, family: SingleStepMeasureFamily) -> list[str]:
    """Human-readable reasons why ``family`` is not a valid family on ``tree``."""
    problems = []
    for n in tree.nonterminals():
        row = family.rows.get(n)
        if row is None:
            problems.append(f"no row at node {n!r}")
            continue
        kids = set(tree.children(n))
        if set(row) - kids:
            problems.append(f"row at {n!r} weights non-children {sorted(set(row) - kids)}")
        if any(w < 0 for w in row.values()):
            problems.append(f"row at {n!r} has a negative weight")
        if sum(row.values(), Fraction(0)) != 1:
            problems.append(f"row at {n!r} sums to {sum(row.values(), Fraction(0))}")
    extra = set(family.rows) - set(tree.nonterminals())
    if extra:
        problems.append(f"rows at non-internal nodes {sorted(extra)}")
    return problems


def product_measure(tree: EventTree, family: SingleStepMeasureFamily) -> dict[str, Fraction]:
    """Terminal probabilities: products of row weights along root paths."""
    problems = family_problems(tree, family)
    if problems:
        raise FamilyIncomplete("; ".join(problems))
    out = {}
    for leaf in tree.terminals():
        p = Fraction(1)
        path = tree.path(leaf)
        for parent, child in zip(path, path[1:]):
            p *= family.rows[parent].get(child, Fraction(0))
        out[leaf] = p
    return out
