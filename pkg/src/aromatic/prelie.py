"""Finite series over canonical graphs, and grafting of rooted trees.

A :class:`Series` maps canonical keys (1-based target tuples, see
:mod:`aromatic.graphs`) to exact rational coefficients.  Zero coefficients are
dropped eagerly, so two series are equal exactly when their dictionaries are.
"""
from __future__ import annotations

from collections.abc import Mapping

from .graphs import AromaticGraph, as_graph, canonical_key_of, encode_key, parse_key
from .rationals import format_rational, to_fraction


class Series(Mapping):
    """Immutable linear combination of graphs with rational coefficients."""

    __slots__ = ("_terms",)

    def __init__(self, terms=None):
        clean = {}
        if terms:
            items = terms.items() if isinstance(terms, Mapping) else terms
            for key, coeff in items:
                key = _as_key(key)
                total = clean.get(key, 0) + coeff
                if total:
                    clean[key] = total
                else:
                    clean.pop(key, None)
        self._terms = clean

    @classmethod
    def single(cls, graph, coeff=1):
        return cls({as_graph(graph).canonical_key: coeff})

    def __getitem__(self, key):
        if key in self._terms:
            return self._terms[key]
        return self._terms.get(_as_key(key), 0)

    def __contains__(self, key):
        return key in self._terms or _as_key(key) in self._terms

    def items(self):
        return [(k, self._terms[k]) for k in sorted(self._terms)]

    def keys(self):
        return sorted(self._terms)

    def values(self):
        return [self._terms[k] for k in sorted(self._terms)]

    def __iter__(self):
        return iter(sorted(self._terms))

    def __len__(self):
        return len(self._terms)

    def __eq__(self, other):
        if isinstance(other, Series):
            return self._terms == other._terms
        if isinstance(other, Mapping):
            return self == Series(other)
        return NotImplemented

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    def __add__(self, other):
        out = dict(self._terms)
        for key, coeff in other._terms.items():
            out[key] = out.get(key, 0) + coeff
        return Series(out)

    def __neg__(self):
        return Series({k: -c for k, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, factor):
        return Series({k: c * factor for k, c in self._terms.items()})

    __rmul__ = __mul__

    def graphs(self):
        return [(AromaticGraph.from_key(k), self._terms[k]) for k in self]

    def is_tree_series(self):
        return all(AromaticGraph.from_key(k).is_tree() for k in self._terms)

    def orders(self):
        return sorted({len(k) for k in self._terms})

    def to_json(self):
        return [{"graph": encode_key(k), "coeff": format_rational(self._terms[k])} for k in self]

    @classmethod
    def from_json(cls, data):
        if not isinstance(data, list):
            raise ValueError("series JSON must be a list of {graph, coeff} objects")
        terms = []
        for item in data:
            if not isinstance(item, dict) or "graph" not in item or "coeff" not in item:
                raise ValueError("series terms need 'graph' and 'coeff'")
            terms.append((parse_key(item["graph"]), to_fraction(item["coeff"])))
        return cls(terms)

    def __repr__(self):
        inner = ", ".join(f"{encode_key(k)}: {format_rational(self._terms[k])}" for k in self)
        return f"Series({{{inner}}})"

    __str__ = __repr__


def _as_key(key):
    if isinstance(key, AromaticGraph):
        return key.canonical_key
    if isinstance(key, str):
        return parse_key(key)
    # raw keys are canonicalised so a non-canonical labelling cannot slip in
    return canonical_key_of(tuple(key))


def TreeSeries(terms=None):
    """A :class:`Series` whose keys must all be rooted trees."""
    series = Series(terms)
    for key in series:
        if not AromaticGraph.from_key(key).is_tree():
            raise ValueError(f"{encode_key(key)} is not a rooted tree")
    return series


def ForestSeries(terms=None):
    """A :class:`Series` whose keys must all have exactly one root."""
    series = Series(terms)
    for key in series:
        if len(AromaticGraph.from_key(key).roots) != 1:
            raise ValueError(f"{encode_key(key)} does not have exactly one root")
    return series


def graft(left, right):
    """``left |> right``: attach the root of ``left`` to each vertex of ``right``."""
    left, right = as_graph(left), as_graph(right)
    if not left.is_tree() or not right.is_tree():
        raise ValueError("grafting is defined on rooted trees")
    shift = len(right)
    root = left.roots[0]
    base = list(right.targets) + [None if t is None else t + shift for t in left.targets]
    out = {}
    for v in range(len(right)):
        targets = list(base)
        targets[shift + root] = v
        key = AromaticGraph(tuple(targets)).canonical_key
        out[key] = out.get(key, 0) + 1
    return Series(out)


def graft_series(left, right):
    """Bilinear extension of :func:`graft`."""
    out = Series()
    for kl, cl in left.items():
        for kr, cr in right.items():
            out = out + graft(AromaticGraph.from_key(kl), AromaticGraph.from_key(kr)) * (cl * cr)
    return out

