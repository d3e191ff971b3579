"""Aromatic forests: directed graphs in which every vertex has at most one
outgoing edge.

A graph is stored as a tuple of *targets*: ``targets[v]`` is the head of the
unique edge leaving ``v``, or ``None`` when ``v`` is a root.  Vertices are
0-based internally.  The external text encoding is 1-based with ``0`` for a
root, so ``"[0,1,1]"`` is the cherry: vertex 1 is the root and vertices 2 and
3 both point at it.

Every connected component is either a rooted tree (exactly one root, no
cycle) or an aromatic molecule (no root, exactly one directed cycle).  The
canonical form follows that split: trees are encoded by recursively sorted
child encodings, a molecule by the lexicographically least rotation of the
encodings of the trees hanging off its cycle, and a forest by the sorted list
of its component encodings.
"""
from __future__ import annotations

import itertools
import json
import math
from collections import Counter
from dataclasses import dataclass
from functools import cached_property, lru_cache

DEFAULT_MAX_ORDER = 7

_TREE = 0
_MOLECULE = 1


class GraphError(ValueError):
    """Malformed graph input or a violated structural precondition."""


class OrderError(ValueError):
    """Requested order lies outside the configured bounds."""


@dataclass(frozen=True)
class AromaticGraph:
    targets: tuple

    def __post_init__(self):
        targets = tuple(self.targets)
        n = len(targets)
        if n == 0:
            raise GraphError("graphs have at least one vertex")
        for v, t in enumerate(targets):
            if t is None:
                continue
            if isinstance(t, bool) or not isinstance(t, int) or not 0 <= t < n:
                raise GraphError(f"vertex {v} has invalid target {t!r}")
        object.__setattr__(self, "targets", targets)

    # -- construction -----------------------------------------------------
    @classmethod
    def from_key(cls, key):
        """Inverse of :attr:`key`: 1-based targets with 0 marking roots."""
        return cls(tuple(None if t == 0 else t - 1 for t in key))

    @classmethod
    def parse(cls, text):
        try:
            raw = json.loads(text)
        except json.JSONDecodeError as exc:
            raise GraphError(f"malformed graph encoding {text!r}") from exc
        if not isinstance(raw, list) or not all(isinstance(t, int) and not isinstance(t, bool) for t in raw):
            raise GraphError(f"graph encoding must be a list of integers, got {text!r}")
        n = len(raw)
        if any(t < 0 or t > n for t in raw):
            raise GraphError(f"graph encoding {text!r} refers to a missing vertex")
        return cls.from_key(raw)

    # -- basic structure --------------------------------------------------
    @property
    def key(self):
        """The 1-based target encoding of this labelled graph (not canonical)."""
        return tuple(0 if t is None else t + 1 for t in self.targets)

    def __len__(self):
        return len(self.targets)

    def __str__(self):
        return encode_key(self.key)

    @cached_property
    def roots(self):
        return tuple(v for v, t in enumerate(self.targets) if t is None)

    @cached_property
    def parents(self):
        """``parents[v]``: vertices with an edge into ``v``."""
        out = [[] for _ in self.targets]
        for v, t in enumerate(self.targets):
            if t is not None:
                out[t].append(v)
        return tuple(tuple(p) for p in out)

    @cached_property
    def edges(self):
        return frozenset((v, t) for v, t in enumerate(self.targets) if t is not None)

    @cached_property
    def components(self):
        """Vertex sets of the weakly connected components, in vertex order."""
        n = len(self.targets)
        link = list(range(n))

        def find(v):
            while link[v] != v:
                link[v] = link[link[v]]
                v = link[v]
            return v

        for v, t in enumerate(self.targets):
            if t is not None:
                a, b = find(v), find(t)
                if a != b:
                    link[max(a, b)] = min(a, b)
        groups = {}
        for v in range(n):
            groups.setdefault(find(v), []).append(v)
        return tuple(tuple(g) for g in groups.values())

    def is_connected(self):
        return len(self.components) == 1

    def is_tree(self):
        return self.is_connected() and len(self.roots) == 1

    def is_molecule(self):
        return self.is_connected() and not self.roots

    def is_aromatic_tree(self):
        return len(self.roots) == 1

    def cycle_count(self):
        return sum(1 for comp in self.components if not any(self.targets[v] is None for v in comp))

    # -- derived ----------------------------------------------------------
    @cached_property
    def _canonical(self):
        return _canonicalize(self)

    @property
    def canonical_key(self):
        return self._canonical[0]

    def canonical(self):
        return AromaticGraph.from_key(self._canonical[0])

    def is_isomorphic(self, other):
        return self.canonical_key == other.canonical_key


def encode_key(key):
    return "[" + ",".join(str(t) for t in key) + "]"


@lru_cache(maxsize=65536)
def canonical_key_of(key):
    """Canonical key of the graph whose (possibly non-canonical) key is given."""
    return AromaticGraph.from_key(key).canonical_key


def parse_key(text):
    return AromaticGraph.parse(text).canonical_key


def as_graph(obj):
    if isinstance(obj, AromaticGraph):
        return obj
    if isinstance(obj, str):
        return AromaticGraph.parse(obj)
    return AromaticGraph.from_key(tuple(obj))


# ---------------------------------------------------------------------------
# canonical form
# ---------------------------------------------------------------------------

def _tree_encoding(graph, v, skip=frozenset()):
    """Encoding of the subtree hanging at ``v``; ``skip`` excludes cycle edges."""
    kids = [c for c in graph.parents[v] if c not in skip]
    return tuple(sorted(_tree_encoding(graph, c, skip) for c in kids))


def _tree_layout(graph, v, skip, out):
    """Append the non-``v`` vertices of the subtree at ``v`` in canonical preorder."""
    kids = [c for c in graph.parents[v] if c not in skip]
    kids.sort(key=lambda c: _tree_encoding(graph, c, skip))
    for c in kids:
        out.append(c)
        _tree_layout(graph, c, skip, out)


def _find_cycle(graph, start):
    seen = {}
    v = start
    while v not in seen:
        seen[v] = len(seen)
        v = graph.targets[v]
    cycle = [v]
    w = graph.targets[v]
    while w != v:
        cycle.append(w)
        w = graph.targets[w]
    return cycle


def _least_rotation(seq):
    best = 0
    for i in range(1, len(seq)):
        if seq[i:] + seq[:i] < seq[best:] + seq[:best]:
            best = i
    return best


def _component_info(graph, comp):
    """Return (encoding, root_or_None, ordered vertex list) for one component."""
    root = next((v for v in comp if graph.targets[v] is None), None)
    if root is not None:
        order = []
        _tree_layout(graph, root, frozenset(), order)
        return (_TREE, _tree_encoding(graph, root)), root, order
    cycle = _find_cycle(graph, comp[0])
    on_cycle = frozenset(cycle)
    hanging = [_tree_encoding(graph, c, on_cycle) for c in cycle]
    start = _least_rotation(hanging)
    cycle = cycle[start:] + cycle[:start]
    hanging = hanging[start:] + hanging[:start]
    order = list(cycle)
    for c in cycle:
        _tree_layout(graph, c, on_cycle, order)
    return (_MOLECULE, tuple(hanging)), None, order


def _canonicalize(graph):
    infos = [_component_info(graph, comp) for comp in graph.components]
    infos.sort(key=lambda info: info[0])
    labeling = [info[1] for info in infos if info[1] is not None]
    for _, _, order in infos:
        labeling.extend(order)
    label_of = {v: i for i, v in enumerate(labeling)}
    key = tuple(
        0 if graph.targets[v] is None else label_of[graph.targets[v]] + 1
        for v in labeling
    )
    encoding = tuple(info[0] for info in infos)
    return key, tuple(labeling), encoding


def canonicalize(graph):
    """Return ``(key, labeling)``.

    ``key`` is the 1-based target tuple of the canonical representative and is
    equal for two graphs exactly when they are isomorphic.  ``labeling[i]`` is
    the vertex of ``graph`` that receives label ``i + 1``; roots are labelled
    first, so the root of a tree always gets label 1.
    """
    graph = as_graph(graph)
    key, labeling, _ = graph._canonical
    return key, labeling


def encoding(graph):
    """Structural (nested tuple) encoding; a complete isomorphism invariant."""
    return as_graph(graph)._canonical[2]


# ---------------------------------------------------------------------------
# symmetry
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _tree_symmetry(enc):
    total = 1
    for child, mult in Counter(enc).items():
        total *= math.factorial(mult) * _tree_symmetry(child) ** mult
    return total


def _component_symmetry(comp_enc):
    kind, body = comp_enc
    if kind == _TREE:
        return _tree_symmetry(body)
    period = sum(1 for r in range(len(body)) if body[r:] + body[:r] == body)
    total = period
    for hang in body:
        total *= _tree_symmetry(hang)
    return total


def symmetry(graph):
    """Size of the automorphism group of ``graph``."""
    total = 1
    for comp_enc, mult in Counter(encoding(graph)).items():
        total *= math.factorial(mult) * _component_symmetry(comp_enc) ** mult
    return total


# ---------------------------------------------------------------------------
# product and decomposition
# ---------------------------------------------------------------------------

def product(*graphs):
    """Disjoint union, with vertices of later factors shifted past earlier ones."""
    targets = []
    for g in graphs:
        g = as_graph(g)
        offset = len(targets)
        targets.extend(None if t is None else t + offset for t in g.targets)
    return AromaticGraph(tuple(targets))


def subgraph(graph, vertices):
    vertices = list(vertices)
    index = {v: i for i, v in enumerate(vertices)}
    return AromaticGraph(tuple(
        None if graph.targets[v] is None else index[graph.targets[v]] for v in vertices
    ))


def decompose(graph):
    """Split a one-root graph into ``(molecules, tree)``, both canonical.

    Molecules are returned sorted by canonical key.
    """
    graph = as_graph(graph)
    if len(graph.roots) != 1:
        raise GraphError(f"decompose needs exactly one root, got {len(graph.roots)}")
    tree = None
    molecules = []
    for comp in graph.components:
        part = subgraph(graph, comp).canonical()
        if part.roots:
            tree = part
        else:
            molecules.append(part)
    molecules.sort(key=lambda m: m.key)
    return tuple(molecules), tree


# ---------------------------------------------------------------------------
# enumeration
# ---------------------------------------------------------------------------

def _check_order(k, max_order):
    bound = DEFAULT_MAX_ORDER if max_order is None else max_order
    if not isinstance(k, int) or k < 1:
        raise OrderError(f"order must be a positive integer, got {k!r}")
    if k > bound:
        raise OrderError(f"order {k} exceeds the configured maximum {bound}")


def _build(encodings):
    """Realise a forest encoding as some labelled graph (not yet canonical)."""
    targets = []

    def add_tree(enc, target):
        v = len(targets)
        targets.append(target)
        for child in enc:
            add_tree(child, v)
        return v

    for kind, body in encodings:
        if kind == _TREE:
            add_tree(body, None)
        else:
            first = len(targets)
            length = len(body)
            cycle = list(range(first, first + length))
            for i in range(length):
                targets.append(first + (i + 1) % length)
            for v, hang in zip(cycle, body):
                for child in hang:
                    add_tree(child, v)
    return AromaticGraph(tuple(targets))


def _enc_size(enc):
    return 1 + sum(_enc_size(c) for c in enc)


@lru_cache(maxsize=None)
def _tree_encodings(k):
    """All rooted-tree encodings on ``k`` vertices."""
    if k == 1:
        return ((),)
    pool = [(s, e) for s in range(1, k) for e in _tree_encodings(s)]
    found = set()

    def extend(remaining, start, chosen):
        if remaining == 0:
            found.add(tuple(sorted(chosen)))
            return
        for i in range(start, len(pool)):
            size, enc = pool[i]
            if size <= remaining:
                chosen.append(enc)
                extend(remaining - size, i, chosen)
                chosen.pop()

    extend(k - 1, 0, [])
    return tuple(sorted(found))


def _compositions(total, parts):
    if parts == 1:
        yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


@lru_cache(maxsize=None)
def _molecule_encodings(k):
    found = set()
    for length in range(1, k + 1):
        for sizes in _compositions(k, length):
            for hangs in itertools.product(*(_tree_encodings(s) for s in sizes)):
                start = _least_rotation(list(hangs))
                found.add(hangs[start:] + hangs[:start])
    return tuple(sorted(found))


@lru_cache(maxsize=None)
def _molecule_multisets(total):
    """Sorted tuples of molecule encodings whose sizes sum to ``total``."""
    if total == 0:
        return ((),)
    pool = [(s, e) for s in range(1, total + 1) for e in _molecule_encodings(s)]
    found = []

    def extend(remaining, start, chosen):
        if remaining == 0:
            found.append(tuple(sorted(chosen)))
            return
        for i in range(start, len(pool)):
            size, enc = pool[i]
            if size <= remaining:
                chosen.append(enc)
                extend(remaining - size, i, chosen)
                chosen.pop()

    extend(total, 0, [])
    return tuple(found)


def _canonical_sorted(graphs):
    unique = {g.canonical_key: g.canonical() for g in graphs}
    return [unique[key] for key in sorted(unique)]


def enumerate_trees(k, max_order=None):
    """One canonical representative per rooted tree with ``k`` vertices."""
    _check_order(k, max_order)
    return _canonical_sorted(_build([(_TREE, e)]) for e in _tree_encodings(k))


def enumerate_molecules(k, max_order=None):
    """One canonical representative per aromatic molecule with ``k`` vertices."""
    _check_order(k, max_order)
    return _canonical_sorted(_build([(_MOLECULE, e)]) for e in _molecule_encodings(k))


def enumerate_aromatic_trees(k, max_order=None):
    """One canonical representative per one-root graph with ``k`` vertices.

    Built as (multiset of molecules) x (rooted tree) with sizes summing to k.
    """
    _check_order(k, max_order)
    graphs = []
    for tree_size in range(1, k + 1):
        for mols in _molecule_multisets(k - tree_size):
            for tree in _tree_encodings(tree_size):
                graphs.append(_build([(_TREE, tree)] + [(_MOLECULE, m) for m in mols]))
    return _canonical_sorted(graphs)


# ---------------------------------------------------------------------------
# small named graphs, handy in tests and the CLI
# ---------------------------------------------------------------------------

def bullet():
    return AromaticGraph((None,))


def chain(k):
    return AromaticGraph((None,) + tuple(range(k - 1)))


def bush(leaves):
    """A root with ``leaves`` children (the cherry is ``bush(2)``)."""
    return AromaticGraph((None,) + (0,) * leaves)


def cycle(k):
    return AromaticGraph(tuple((v + 1) % k for v in range(k)))
