"""Brute-force reference implementations used only by the tests.

Nothing here calls the package's canonical forms, enumerators, symmetry
counts or polynomial calculus, so agreement is evidence rather than
tautology.
"""
import itertools
from collections import Counter, defaultdict
from fractions import Fraction

import networkx as nx
import sympy


def key_to_targets(key):
    """1-based external key (0 = root) to 0-based targets (None = root)."""
    return tuple(None if t == 0 else t - 1 for t in key)


def targets_to_digraph(targets):
    g = nx.DiGraph()
    g.add_nodes_from(range(len(targets)))
    g.add_edges_from((v, t) for v, t in enumerate(targets) if t is not None)
    return g


def root_count(targets):
    return sum(t is None for t in targets)


def is_connected(targets):
    return nx.is_weakly_connected(targets_to_digraph(targets)) if targets else False


def brute_isomorphic(a, b):
    """Search every vertex bijection for one that carries a's edges onto b's."""
    if len(a) != len(b):
        return False
    n = len(a)
    for perm in itertools.permutations(range(n)):
        if all((b[perm[v]] is None) if a[v] is None else (b[perm[v]] == perm[a[v]]) for v in range(n)):
            return True
    return False


def brute_automorphisms(targets):
    """Number of vertex permutations preserving the edge set."""
    n = len(targets)
    count = 0
    for perm in itertools.permutations(range(n)):
        if all(
            (targets[perm[v]] is None) if targets[v] is None else (targets[perm[v]] == perm[targets[v]])
            for v in range(n)
        ):
            count += 1
    return count


def _dedupe(arrays):
    buckets = defaultdict(list)
    reps = []
    for arr in arrays:
        g = targets_to_digraph(arr)
        h = nx.weisfeiler_lehman_graph_hash(g, iterations=3)
        if not any(nx.is_isomorphic(g, r) for r in buckets[h]):
            buckets[h].append(g)
            reps.append(arr)
    return reps


def _indegree_sorted_arrays(k):
    # every isomorphism class has a labeling with non-increasing in-degrees
    for arr in itertools.product([None, *range(k)], repeat=k):
        c = Counter(t for t in arr if t is not None)
        if all(c[v] >= c[v + 1] for v in range(k - 1)):
            yield arr


def brute_trees(k):
    """Rooted trees from increasing parent arrays (vertex 0 root, parent[v] < v)."""
    arrays = [(None, *rest) for rest in itertools.product(*[range(v) for v in range(1, k)])]
    return _dedupe(arrays)


def brute_molecules(k):
    return _dedupe(a for a in _indegree_sorted_arrays(k) if root_count(a) == 0 and is_connected(a))


def brute_aromatic_trees(k):
    return _dedupe(a for a in _indegree_sorted_arrays(k) if root_count(a) == 1)


# ---------------------------------------------------------------------------
# elementary differentials through sympy
# ---------------------------------------------------------------------------

def symbols(n):
    return sympy.symbols(f"x1:{n + 1}")


def poly_to_sympy(poly, nvars):
    """Package polynomial -> sympy expression (reads coefficients only)."""
    xs = symbols(nvars)
    expr = sympy.Integer(0)
    for exps, coeff in poly.sorted_terms():
        term = sympy.Rational(int(coeff.numerator), int(coeff.denominator))
        for x, e in zip(xs, exps):
            term *= x ** e
        expr += term
    return sympy.expand(expr)


def to_sympy(f):
    return [poly_to_sympy(c, f.dim) for c in f]


def brute_eldiff(targets, comps):
    """Sum over every assignment of indices of the product of partials.

    Returns a dict from the sorted tuple of root indices to a sympy expression.
    """
    n = len(comps)
    xs = symbols(n)
    k = len(targets)
    parents = [[u for u in range(k) if targets[u] == v] for v in range(k)]
    roots = [v for v in range(k) if targets[v] is None]
    out = defaultdict(lambda: sympy.Integer(0))
    for nu in itertools.product(range(n), repeat=k):
        term = sympy.Integer(1)
        for v in range(k):
            factor = comps[nu[v]]
            for u in parents[v]:
                factor = sympy.diff(factor, xs[nu[u]])
            if factor == 0:
                term = 0
                break
            term *= factor
        if term != 0:
            out[tuple(sorted(nu[r] for r in roots))] += term
    return {idx: sympy.expand(e) for idx, e in out.items() if sympy.expand(e) != 0}


def sympy_field_equal(comps, f):
    return all(sympy.expand(a - b) == 0 for a, b in zip(comps, to_sympy(f)))


# ---------------------------------------------------------------------------
# exact flow through Lie derivatives
# ---------------------------------------------------------------------------

def lie_flow_terms(comps, order):
    """Coefficient of h^k in the exact flow of x' = f(x): (L_f)^k x / k!."""
    n = len(comps)
    xs = symbols(n)
    current = list(xs)
    terms = []
    fact = 1
    for k in range(1, order + 1):
        current = [sympy.expand(sum(sympy.diff(c, xs[j]) * comps[j] for j in range(n))) for c in current]
        fact *= k
        terms.append([sympy.expand(c / fact) for c in current])
    return terms


def frac(x):
    return Fraction(int(x.numerator), int(x.denominator))


# ---------------------------------------------------------------------------
# dual-field values at the origin
# ---------------------------------------------------------------------------

def brute_coverings(a, b, root_image=None):
    """Maps nu: V(a) -> V(b) sending each parent set of a bijectively onto the
    parent set of the image vertex in b.

    These are exactly the assignments that survive at x = 0 when a's
    elementary differential is applied to b's unscaled dual field.  With
    ``root_image`` set, a's (single) root must land on that vertex of b.
    """
    pa = [[u for u in range(len(a)) if a[u] == v] for v in range(len(a))]
    pb = [sorted(u for u in range(len(b)) if b[u] == v) for v in range(len(b))]
    roots = [v for v in range(len(a)) if a[v] is None]
    count = 0
    for nu in itertools.product(range(len(b)), repeat=len(a)):
        if root_image is not None and any(nu[r] != root_image for r in roots):
            continue
        if all(sorted(nu[u] for u in pa[v]) == pb[nu[v]] for v in range(len(a))):
            count += 1
    return count
