"""Deciding LOCC distinguishability of orthogonal product bases.

For every party we build the graph whose edges join states with
nonorthogonal local factors.  A disconnected graph means the states split
into groups living in mutually orthogonal local subspaces, and a projective
measurement of that party onto those subspaces separates the groups
without disturbing anything.  Splitting recursively either isolates every
state (the basis is distinguishable and the recursion *is* the protocol) or
gets stuck on a set whose graph is connected at every party: an
irreducible core, which no LOCC protocol can resolve perfectly.

Any subset of a recursively splittable set is itself recursively
splittable, so the greedy choice of split never loses a protocol.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .basis import ProductBasis, factor_to_list, require_orthogonal
from .linalg import span_basis


class ProtocolMismatchError(ValueError):
    """Raised when a protocol tree does not fit the basis it is run on."""


class _UnionFind:
    def __init__(self, items):
        self.parent = {i: i for i in items}

    def find(self, x):
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            # keep the smaller index as root so components are labelled stably
            if rb < ra:
                ra, rb = rb, ra
            self.parent[rb] = ra


@dataclass(frozen=True)
class OrthoGraph:
    party: int
    node_ids: tuple[int, ...]
    edges: frozenset[tuple[int, int]]

    def components(self) -> list[tuple[int, ...]]:
        """Connected components, each sorted, ordered by smallest member."""
        uf = _UnionFind(self.node_ids)
        for i, j in self.edges:
            uf.union(i, j)
        groups: dict[int, list[int]] = {}
        for i in self.node_ids:
            groups.setdefault(uf.find(i), []).append(i)
        return sorted((tuple(sorted(g)) for g in groups.values()), key=lambda g: g[0])

    def is_connected(self) -> bool:
        return len(self.components()) <= 1


def _check_subset(basis: ProductBasis, subset) -> tuple[int, ...]:
    subset = tuple(int(i) for i in subset)
    if not subset:
        raise ValueError("subset must be nonempty")
    if len(set(subset)) != len(subset):
        raise ValueError("subset has repeated indices")
    for i in subset:
        if not 0 <= i < len(basis):
            raise IndexError(f"state index {i} out of range")
    return subset


def party_graph(basis: ProductBasis, party: int, subset: Sequence[int] | None = None,
                tol: float | None = None) -> OrthoGraph:
    if not 0 <= party < basis.n_parties:
        raise IndexError(f"party {party} out of range")
    subset = _check_subset(basis, range(len(basis)) if subset is None else subset)
    tol = basis.tolerance if tol is None else tol
    vecs = np.array([basis.states[i].factors[party] for i in subset])
    vecs = vecs / np.linalg.norm(vecs, axis=1, keepdims=True)
    gram = np.abs(vecs.conj() @ vecs.T)
    edges = set()
    for a in range(len(subset)):
        for b in range(a + 1, len(subset)):
            if gram[a, b] >= tol:
                i, j = sorted((subset[a], subset[b]))
                edges.add((i, j))
    return OrthoGraph(party, tuple(sorted(subset)), frozenset(edges))


def find_split(basis: ProductBasis, subset: Sequence[int] | None = None,
               tol: float | None = None):
    """First party (lowest index) whose graph on ``subset`` is disconnected.

    Returns ``(party, components)`` or ``None`` when every party graph is
    connected, i.e. ``subset`` is an irreducible core.
    """
    subset = _check_subset(basis, range(len(basis)) if subset is None else subset)
    if len(subset) < 2:
        raise ValueError("need at least two states to split")
    for p in range(basis.n_parties):
        comps = party_graph(basis, p, subset, tol).components()
        if len(comps) > 1:
            return p, comps
    return None


# -- protocol trees ---------------------------------------------------------

@dataclass(frozen=True)
class Leaf:
    state: int


@dataclass(frozen=True)
class Core:
    """Unresolvable set of states; only appears in split traces."""

    states: tuple[int, ...]


@dataclass(frozen=True)
class Outcome:
    subset: tuple[int, ...]
    projector_basis: tuple[np.ndarray, ...]
    child: "Tree"


@dataclass(frozen=True)
class Node:
    party: int
    outcomes: tuple[Outcome, ...]


Tree = Union[Leaf, Node, Core]


def _build(basis: ProductBasis, subset: tuple[int, ...], tol: float) -> Tree:
    if len(subset) == 1:
        return Leaf(subset[0])
    split = find_split(basis, subset, tol)
    if split is None:
        return Core(tuple(sorted(subset)))
    party, comps = split
    outcomes = []
    for comp in comps:
        proj = span_basis(basis.locals(party, comp), tol)
        outcomes.append(Outcome(comp, tuple(proj), _build(basis, comp, tol)))
    return Node(party, tuple(outcomes))


def split_trace(basis: ProductBasis, tol: float | None = None) -> Tree:
    """Full recursive splitting, with unresolved sets left as ``Core`` leaves."""
    tol = basis.tolerance if tol is None else tol
    if not len(basis):
        raise ValueError("basis has no states")
    return _build(basis, tuple(range(len(basis))), tol)


def iter_cores(tree: Tree):
    if isinstance(tree, Core):
        yield tree
    elif isinstance(tree, Node):
        for o in tree.outcomes:
            yield from iter_cores(o.child)


def iter_paths(tree: Tree, prefix=()):
    """Yield each root-to-leaf path as a tuple of (node, outcome index)."""
    if isinstance(tree, Node):
        for k, o in enumerate(tree.outcomes):
            yield from iter_paths(o.child, prefix + ((tree, k),))
    else:
        yield prefix


def depth(tree: Tree) -> int:
    return max(len(p) for p in iter_paths(tree))


def elimination_units(tree: Tree) -> int:
    """Largest sum of (outcomes - 1) along any root-to-leaf path."""
    return max(sum(len(node.outcomes) - 1 for node, _ in p) for p in iter_paths(tree))


@dataclass(frozen=True)
class Distinguishable:
    tree: Tree
    complete: bool

    distinguishable = True


@dataclass(frozen=True)
class NotDistinguishable:
    core: tuple[int, ...]
    connectivity_witness: tuple[OrthoGraph, ...]
    trace: Tree
    complete: bool

    distinguishable = False

    @property
    def outside_theorem_scope(self) -> bool:
        # an incomplete set may be extendible, where the core tells us nothing certain
        return not self.complete


Decision = Union[Distinguishable, NotDistinguishable]


def decide(basis: ProductBasis, tol: float | None = None) -> Decision:
    report = require_orthogonal(basis if tol is None else basis.with_tolerance(tol))
    tol = basis.tolerance if tol is None else tol
    tree = split_trace(basis, tol)
    core = next(iter_cores(tree), None)
    if core is None:
        return Distinguishable(tree, report.complete)
    witness = tuple(party_graph(basis, p, core.states, tol) for p in range(basis.n_parties))
    return NotDistinguishable(core.states, witness, tree, report.complete)


@dataclass(frozen=True)
class SimulationResult:
    identified: int
    rounds: int
    outcome_path: list[int]


def _weight(projector_basis, v) -> float:
    v = v / np.linalg.norm(v)
    return float(sum(abs(np.vdot(b, v)) ** 2 for b in projector_basis))


def simulate_protocol(tree: Tree, basis: ProductBasis, hidden: int,
                      tol: float | None = None) -> SimulationResult:
    """Run the protocol with ``hidden`` as the unknown state."""
    tol = basis.tolerance if tol is None else tol
    if not 0 <= hidden < len(basis):
        raise IndexError(f"hidden state {hidden} out of range")
    state = basis.states[hidden]
    path = []
    node = tree
    while isinstance(node, Node):
        if not 0 <= node.party < basis.n_parties:
            raise ProtocolMismatchError(f"party {node.party} not in basis")
        v = state.factors[node.party]
        fired = []
        for k, o in enumerate(node.outcomes):
            if any(b.size != v.size for b in o.projector_basis):
                raise ProtocolMismatchError("projector dimension does not match party")
            if _weight(o.projector_basis, v) >= tol:
                fired.append(k)
        if len(fired) != 1:
            raise ProtocolMismatchError(
                f"state {hidden} is not confined to one outcome at party {node.party}")
        path.append(fired[0])
        node = node.outcomes[fired[0]].child
    if isinstance(node, Core):
        raise ProtocolMismatchError("protocol ends in an unresolved core")
    if node.state != hidden:
        raise ProtocolMismatchError(f"protocol identified {node.state}, hidden was {hidden}")
    return SimulationResult(node.state, len(path), path)


# -- serialization -----------------------------------------------------------

def tree_to_dict(tree: Tree) -> dict:
    if isinstance(tree, Leaf):
        return {"state": tree.state}
    if isinstance(tree, Core):
        return {"core": list(tree.states)}
    return {
        "party": tree.party,
        "outcomes": [
            {
                "subset": list(o.subset),
                "projector_basis": [factor_to_list(b) for b in o.projector_basis],
                "child": tree_to_dict(o.child),
            }
            for o in tree.outcomes
        ],
    }


def tree_from_dict(doc) -> Tree:
    if not isinstance(doc, dict):
        raise ValueError("tree node must be an object")
    if "state" in doc:
        return Leaf(int(doc["state"]))
    if "core" in doc:
        return Core(tuple(int(i) for i in doc["core"]))
    outcomes = []
    for o in doc["outcomes"]:
        proj = tuple(np.array([complex(re, im) for re, im in b]) for b in o["projector_basis"])
        outcomes.append(Outcome(tuple(int(i) for i in o["subset"]), proj,
                                tree_from_dict(o["child"])))
    return Node(int(doc["party"]), tuple(outcomes))


def graph_to_dict(g: OrthoGraph) -> dict:
    return {"party": g.party, "nodes": list(g.node_ids), "edges": sorted(list(e) for e in g.edges)}


__all__ = [
    "OrthoGraph", "Leaf", "Core", "Outcome", "Node", "Distinguishable", "NotDistinguishable",
    "SimulationResult", "ProtocolMismatchError", "party_graph", "find_split", "split_trace",
    "decide", "simulate_protocol", "depth", "elimination_units", "tree_to_dict",
    "tree_from_dict", "graph_to_dict", "iter_paths", "iter_cores",
]
