"""Elementary differentials of aromatic forests on polynomial vector fields.

For a graph with vertex set V and a field f in n dimensions,

    F(gamma)[f] = sum over nu: V -> [n] of
                  prod_v  d^{|P(v)|} f^{nu(v)} / d x_{nu(P(v))}  *  prod_{roots r} e_{nu(r)}

where P(v) are the parents of v.  The root factor is kept as a commuting
monomial in the basis directions, so the result is a symmetric tensor stored
as ``{sorted root index tuple: Polynomial}``.  With no roots the only key is
``()`` (a scalar); with one root the keys are ``(i,)`` (a vector field).

Two independent algorithms are provided.  :func:`eldiff_naive` walks every
one of the n**|V| assignments; :func:`eldiff_hom` only visits graph
homomorphisms into the dependency graph of f.
"""
from __future__ import annotations

import itertools

from .graphs import as_graph
from .polyfields import Polynomial, PolyVectorField, dependency_graph

MAX_TENSOR_RANK = 2


class TensorRankError(ValueError):
    """Graphs with more than two roots are not materialised."""


class _PartialCache:
    def __init__(self, f):
        self.f = f
        self.cache = {}

    def __call__(self, component, variables):
        key = (component, variables)
        got = self.cache.get(key)
        if got is None:
            got = self.f[component].partial(variables) if variables else self.f[component]
            self.cache[key] = got
        return got


def _check_rank(graph):
    if len(graph.roots) > MAX_TENSOR_RANK:
        raise TensorRankError(
            f"graph has {len(graph.roots)} roots; only up to {MAX_TENSOR_RANK} are supported"
        )


def _accumulate(out, key, poly):
    prev = out.get(key)
    out[key] = poly if prev is None else prev + poly


def _prune(out):
    return {k: v for k, v in out.items() if not v.is_zero()}


def eldiff_naive(graph, f):
    """Sum over all vertex assignments; the trusted reference implementation."""
    graph = as_graph(graph)
    _check_rank(graph)
    n = f.dim
    k = len(graph)
    parents = graph.parents
    roots = graph.roots
    partial = _PartialCache(f)
    out = {}
    for nu in itertools.product(range(n), repeat=k):
        term = None
        for v in range(k):
            factor = partial(nu[v], tuple(sorted(nu[p] for p in parents[v])))
            if factor.is_zero():
                term = None
                break
            term = factor if term is None else term * factor
        if term is not None:
            _accumulate(out, tuple(sorted(nu[r] for r in roots)), term)
    return _prune(out)


def _search_order(graph):
    """Vertex order in which each vertex (after the first of its component)
    is adjacent to an earlier one, so edge constraints prune early."""
    k = len(graph)
    seen = [False] * k
    order = []
    for start in range(k):
        if seen[start]:
            continue
        seen[start] = True
        queue = [start]
        while queue:
            v = queue.pop(0)
            order.append(v)
            nbrs = list(graph.parents[v])
            if graph.targets[v] is not None:
                nbrs.append(graph.targets[v])
            for w in nbrs:
                if not seen[w]:
                    seen[w] = True
                    queue.append(w)
    return order


def homomorphisms(graph, edges, n):
    """Yield every map ``nu`` (a tuple indexed by vertex) sending edges of
    ``graph`` into ``edges`` (a set of ``(tail, head)`` pairs on ``range(n)``)."""
    graph = as_graph(graph)
    k = len(graph)
    succ = {j: set() for j in range(n)}
    pred = {i: set() for i in range(n)}
    for j, i in edges:
        succ[j].add(i)
        pred[i].add(j)
    order = _search_order(graph)
    nu = [None] * k

    def candidates(v):
        options = None
        t = graph.targets[v]
        if t is not None and nu[t] is not None:
            options = set(pred[nu[t]])
        for p in graph.parents[v]:
            if nu[p] is not None:
                allowed = succ[nu[p]]
                options = set(allowed) if options is None else options & allowed
        if options is None:
            options = range(n)
        if t is not None and t == v:
            options = [c for c in options if c in succ[c]]
        return sorted(options)

    def extend(pos):
        if pos == k:
            yield tuple(nu)
            return
        v = order[pos]
        for c in candidates(v):
            nu[v] = c
            yield from extend(pos + 1)
        nu[v] = None

    yield from extend(0)


def eldiff_hom(graph, f):
    """Same value as :func:`eldiff_naive`, summing only over homomorphisms
    of ``graph`` into the dependency graph of ``f``."""
    graph = as_graph(graph)
    _check_rank(graph)
    parents = graph.parents
    roots = graph.roots
    partial = _PartialCache(f)
    out = {}
    for nu in homomorphisms(graph, dependency_graph(f), f.dim):
        term = None
        for v in range(len(graph)):
            factor = partial(nu[v], tuple(sorted(nu[p] for p in parents[v])))
            if factor.is_zero():
                term = None
                break
            term = factor if term is None else term * factor
        if term is not None:
            _accumulate(out, tuple(sorted(nu[r] for r in roots)), term)
    return _prune(out)


# ---------------------------------------------------------------------------
# result shapes
# ---------------------------------------------------------------------------

def as_scalar(tensor, n):
    if any(key != () for key in tensor):
        raise ValueError("tensor is not a scalar")
    return tensor.get((), Polynomial(n))


def as_field(tensor, n):
    comps = [Polynomial(n) for _ in range(n)]
    for key, poly in tensor.items():
        if len(key) != 1:
            raise ValueError("tensor is not a vector")
        comps[key[0]] = poly
    return PolyVectorField(tuple(comps))


def tensor_product(a, b):
    """Symmetric product of two root tensors."""
    out = {}
    for ka, pa in a.items():
        for kb, pb in b.items():
            _accumulate(out, tuple(sorted(ka + kb)), pa * pb)
    return _prune(out)


def eldiff(graph, f, method="hom"):
    """Elementary differential in its natural shape.

    Zero roots give a :class:`Polynomial`, one root a :class:`PolyVectorField`
    and two roots the raw symmetric tensor dictionary.
    """
    graph = as_graph(graph)
    tensor = (eldiff_hom if method == "hom" else eldiff_naive)(graph, f)
    r = len(graph.roots)
    if r == 0:
        return as_scalar(tensor, f.dim)
    if r == 1:
        return as_field(tensor, f.dim)
    return tensor


def eldiff_series(series, f, method="hom"):
    """Linear extension of :func:`eldiff` to a series of one-root graphs."""
    n = f.dim
    comps = [Polynomial(n) for _ in range(n)]
    for key, coeff in series.items():
        graph = as_graph(key)
        if len(graph.roots) != 1:
            raise ValueError(f"series term {key} does not have exactly one root")
        value = eldiff(graph, f, method)
        for i in range(n):
            if value[i]:
                comps[i] = comps[i] + value[i] * coeff
    return PolyVectorField(tuple(comps))


def root_component(graph, f, method="hom"):
    """Component 1 (index 0) of a tree's elementary differential.

    Paired with dual fields built under the canonical labeling, index 0 is the
    coordinate attached to the root.
    """
    return eldiff(graph, f, method)[0]


__all__ = [
    "MAX_TENSOR_RANK",
    "TensorRankError",
    "eldiff",
    "eldiff_hom",
    "eldiff_naive",
    "eldiff_series",
    "homomorphisms",
    "root_component",
    "tensor_product",
    "as_field",
    "as_scalar",
]
