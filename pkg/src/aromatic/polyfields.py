"""Exact polynomial vector fields and the affine operations on them.

Coefficients are Python ints or ``gmpy2.mpq`` rationals; no floating point
is involved anywhere.  A polynomial identity ``p == q`` is decided by comparing
normal forms (zero coefficients are never stored).
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass
from functools import cached_property
from numbers import Rational

from gmpy2 import mpq

from .graphs import AromaticGraph, GraphError, as_graph, canonicalize
from .rationals import format_rational, tidy, to_fraction


class DimensionError(ValueError):
    """Operands live in incompatible dimensions."""


def _add_exps(a, b):
    return tuple(x + y for x, y in zip(a, b))


class Polynomial:
    """Sparse polynomial in ``nvars`` variables: exponent tuple -> coefficient."""

    __slots__ = ("nvars", "terms", "_hash")

    def __init__(self, nvars, terms=None):
        self.nvars = nvars
        clean = {}
        if terms:
            for exps, c in terms.items():
                if c:
                    exps = tuple(exps)
                    if len(exps) != nvars:
                        raise DimensionError(f"exponent {exps} does not have length {nvars}")
                    clean[exps] = c
        self.terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, nvars, terms):
        # trusted constructor: terms already pruned
        poly = cls.__new__(cls)
        poly.nvars = nvars
        poly.terms = terms
        poly._hash = None
        return poly

    @classmethod
    def constant(cls, nvars, value):
        return cls._raw(nvars, {(0,) * nvars: value} if value else {})

    @classmethod
    def variable(cls, nvars, index):
        exps = [0] * nvars
        exps[index] = 1
        return cls._raw(nvars, {tuple(exps): 1})

    @classmethod
    def monomial(cls, exps, coeff=1):
        exps = tuple(exps)
        return cls._raw(len(exps), {exps: coeff} if coeff else {})

    # -- arithmetic --------------------------------------------------------
    def _check(self, other):
        if other.nvars != self.nvars:
            raise DimensionError(f"polynomials in {self.nvars} and {other.nvars} variables")

    def __add__(self, other):
        if not isinstance(other, Polynomial):
            other = Polynomial.constant(self.nvars, other)
        self._check(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            s = out.get(e, 0) + c
            if s:
                out[e] = s
            else:
                out.pop(e, None)
        return Polynomial._raw(self.nvars, out)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._raw(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, Polynomial):
            other = Polynomial.constant(self.nvars, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            if not other:
                return Polynomial._raw(self.nvars, {})
            return Polynomial._raw(self.nvars, {e: c * other for e, c in self.terms.items()})
        self._check(other)
        out = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = _add_exps(e1, e2)
                s = out.get(e, 0) + c1 * c2
                if s:
                    out[e] = s
                else:
                    out.pop(e, None)
        return Polynomial._raw(self.nvars, out)

    __rmul__ = __mul__

    def __pow__(self, power):
        result = Polynomial.constant(self.nvars, 1)
        for _ in range(power):
            result = result * self
        return result

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.nvars == other.nvars and self.terms == other.terms
        if isinstance(other, Rational):
            return self == Polynomial.constant(self.nvars, other)
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self.terms.items())))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self):
        return not self.terms

    def degree(self):
        return max((sum(e) for e in self.terms), default=-1)

    def derivative(self, var, times=1):
        out = self.terms
        for _ in range(times):
            nxt = {}
            for e, c in out.items():
                if e[var]:
                    f = list(e)
                    f[var] -= 1
                    nxt[tuple(f)] = c * e[var]
            out = nxt
        return Polynomial._raw(self.nvars, dict(out))

    def partial(self, variables):
        """Mixed partial derivative over a sequence of variable indices."""
        counts = [0] * self.nvars
        for v in variables:
            counts[v] += 1
        out = {}
        for e, c in self.terms.items():
            coeff = c
            f = list(e)
            for var, k in enumerate(counts):
                if k:
                    if e[var] < k:
                        coeff = 0
                        break
                    coeff *= math.perm(e[var], k)
                    f[var] -= k
            if coeff:
                out[tuple(f)] = coeff
        return Polynomial._raw(self.nvars, out)

    def depends_on(self, var):
        return any(e[var] for e in self.terms)

    def evaluate(self, point):
        if len(point) != self.nvars:
            raise DimensionError(f"point of length {len(point)} for {self.nvars} variables")
        total = 0
        for e, c in self.terms.items():
            term = c
            for x, k in zip(point, e):
                if k:
                    term *= x ** k
            total += term
        return total

    def compose(self, substitutions):
        """Substitute polynomial ``substitutions[i]`` for variable ``i``."""
        if len(substitutions) != self.nvars:
            raise DimensionError(f"{len(substitutions)} substitutions for {self.nvars} variables")
        target = substitutions[0].nvars if substitutions else 0
        powers = [[Polynomial.constant(target, 1)] for _ in substitutions]
        result = Polynomial(target)
        for e, c in self.terms.items():
            term = Polynomial.constant(target, c)
            for i, k in enumerate(e):
                while len(powers[i]) <= k:
                    powers[i].append(powers[i][-1] * substitutions[i])
                if k:
                    term = term * powers[i][k]
            result = result + term
        return result

    def embed(self, nvars, offset):
        """Same polynomial with its variables moved to ``offset..`` of ``nvars``."""
        pad_after = nvars - offset - self.nvars
        if pad_after < 0 or offset < 0:
            raise DimensionError("embedding does not fit")
        head = (0,) * offset
        tail = (0,) * pad_after
        return Polynomial._raw(nvars, {head + e + tail: c for e, c in self.terms.items()})

    def restrict_variables(self, start, stop):
        """Drop variables outside ``start:stop``; caller guarantees they are absent."""
        return Polynomial._raw(stop - start, {e[start:stop]: c for e, c in self.terms.items()})

    def sorted_terms(self):
        return sorted(self.terms.items(), reverse=True)

    def __repr__(self):
        return f"Polynomial({self.nvars}, {self})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.sorted_terms():
            mono = "*".join(
                f"x{i + 1}" if k == 1 else f"x{i + 1}^{k}" for i, k in enumerate(e) if k
            )
            coeff = format_rational(c)
            if not mono:
                parts.append(coeff)
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{coeff}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")


@dataclass(frozen=True)
class PolyVectorField:
    components: tuple

    def __post_init__(self):
        comps = tuple(self.components)
        if not comps:
            raise DimensionError("a vector field needs at least one component")
        n = len(comps)
        for c in comps:
            if not isinstance(c, Polynomial) or c.nvars != n:
                raise DimensionError(f"every component must be a polynomial in {n} variables")
        object.__setattr__(self, "components", comps)

    @property
    def dim(self):
        return len(self.components)

    def __len__(self):
        return len(self.components)

    def __getitem__(self, i):
        return self.components[i]

    def __iter__(self):
        return iter(self.components)

    @classmethod
    def zero(cls, dim):
        return cls(tuple(Polynomial(dim) for _ in range(dim)))

    @classmethod
    def from_terms(cls, dim, components):
        """Build from per-component ``{exponents: coeff}`` mappings."""
        return cls(tuple(Polynomial(dim, {tuple(e): to_fraction(c) for e, c in comp.items()})
                         for comp in components))

    def __add__(self, other):
        _same_dim(self, other)
        return PolyVectorField(tuple(a + b for a, b in zip(self, other)))

    def __sub__(self, other):
        _same_dim(self, other)
        return PolyVectorField(tuple(a - b for a, b in zip(self, other)))

    def __neg__(self):
        return PolyVectorField(tuple(-a for a in self))

    def scale(self, factor):
        return PolyVectorField(tuple(a * factor for a in self))

    def is_zero(self):
        return all(c.is_zero() for c in self.components)

    def degree(self):
        return max(c.degree() for c in self.components)

    def evaluate(self, point):
        return evaluate(self, point)

    @cached_property
    def _hashed(self):
        return hash(self.components)

    def __hash__(self):
        return self._hashed

    def __str__(self):
        return "(" + ", ".join(str(c) for c in self.components) + ")"


def _same_dim(f, g):
    if f.dim != g.dim:
        raise DimensionError(f"fields of dimension {f.dim} and {g.dim}")


@dataclass(frozen=True)
class AffineMap:
    """``x -> A x + b`` from R^n to R^m; ``matrix`` is m rows of n entries."""

    matrix: tuple
    offset: tuple = None

    def __post_init__(self):
        rows = tuple(tuple(to_fraction(x) for x in row) for row in self.matrix)
        if not rows or not rows[0] and len(rows) > 1:
            raise DimensionError("affine map needs a non-empty matrix")
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise DimensionError("ragged affine matrix")
        offset = (0,) * len(rows) if self.offset is None else tuple(to_fraction(x) for x in self.offset)
        if len(offset) != len(rows):
            raise DimensionError(f"offset of length {len(offset)} for {len(rows)} rows")
        object.__setattr__(self, "matrix", rows)
        object.__setattr__(self, "offset", offset)

    @property
    def source_dim(self):
        return len(self.matrix[0])

    @property
    def target_dim(self):
        return len(self.matrix)

    @classmethod
    def identity(cls, n):
        return cls(tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    def as_polynomials(self):
        n = self.source_dim
        return [
            sum((Polynomial.variable(n, j) * a for j, a in enumerate(row) if a), Polynomial.constant(n, b))
            for row, b in zip(self.matrix, self.offset)
        ]

    def apply_linear(self, values, zero=0):
        """``A v`` for a sequence of polynomials (or numbers) ``v``."""
        if len(values) != self.source_dim:
            raise DimensionError("vector length does not match the map's source dimension")
        out = []
        for row in self.matrix:
            acc = zero
            for a, v in zip(row, values):
                if a:
                    acc = acc + v * a
            out.append(acc)
        return out

    def inverse(self):
        m = self.matrix
        n = len(m)
        if n != self.source_dim:
            raise DimensionError("only square affine maps can be inverted")
        aug = [[mpq(x) for x in row] + [mpq(int(i == j)) for j in range(n)] for i, row in enumerate(m)]
        for col in range(n):
            pivot = next((r for r in range(col, n) if aug[r][col]), None)
            if pivot is None:
                raise ValueError("affine map is not invertible")
            aug[col], aug[pivot] = aug[pivot], aug[col]
            p = aug[col][col]
            aug[col] = [x / p for x in aug[col]]
            for r in range(n):
                if r != col and aug[r][col]:
                    factor = aug[r][col]
                    aug[r] = [x - factor * y for x, y in zip(aug[r], aug[col])]
        inv = tuple(tuple(tidy(x) for x in row[n:]) for row in aug)
        off = tuple(tidy(-sum(inv[i][j] * self.offset[j] for j in range(n))) for i in range(n))
        return AffineMap(inv, off)

    def to_json(self):
        return {
            "A": [[format_rational(x) for x in row] for row in self.matrix],
            "b": [format_rational(x) for x in self.offset],
        }

    @classmethod
    def from_json(cls, data):
        if not isinstance(data, dict) or "A" not in data:
            raise ValueError("affine JSON must be an object with key 'A' (and optional 'b')")
        return cls(tuple(tuple(row) for row in data["A"]), data.get("b"))



# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

def evaluate(f, point):
    point = [to_fraction(x) for x in point]
    if len(point) != f.dim:
        raise DimensionError(f"point of length {len(point)} for a field of dimension {f.dim}")
    return tuple(c.evaluate(point) for c in f.components)


def jacobian_apply(g, f):
    """``g'(x) f(x)`` for fields of equal dimension."""
    _same_dim(f, g)
    n = f.dim
    out = []
    for gi in g:
        acc = Polynomial(n)
        for j in range(n):
            dj = gi.derivative(j)
            if dj and f[j]:
                acc = acc + dj * f[j]
        out.append(acc)
    return PolyVectorField(tuple(out))


def connection(f, g):
    """The flat connection ``(f |> g)(x) = d/dt g(x + t f(x)) |_{t=0}``."""
    return jacobian_apply(g, f)


def divergence(f):
    n = f.dim
    acc = Polynomial(n)
    for i, fi in enumerate(f):
        acc = acc + fi.derivative(i)
    return acc


def dependency_graph(f):
    """Edges ``(j, i)`` (0-based) such that component ``i`` depends on ``x_j``."""
    return frozenset(
        (j, i) for i, fi in enumerate(f) for j in range(f.dim) if fi.depends_on(j)
    )


def direct_sum(*fields):
    """Block field whose k-th block is the k-th argument in its own variables."""
    total = sum(f.dim for f in fields)
    comps = []
    offset = 0
    for f in fields:
        comps.extend(c.embed(total, offset) for c in f)
        offset += f.dim
    return PolyVectorField(tuple(comps))


def pad(f, dim):
    """``f (+) 0`` in ``dim`` dimensions."""
    if dim < f.dim:
        raise DimensionError(f"cannot pad dimension {f.dim} down to {dim}")
    if dim == f.dim:
        return f
    return direct_sum(f, PolyVectorField.zero(dim - f.dim))


def block(f, start, stop):
    """Components ``start:stop`` of ``f``, assuming they only use those variables."""
    comps = f.components[start:stop]
    for c in comps:
        if any(any(e[:start]) or any(e[stop:]) for e in c.terms):
            raise DimensionError("block depends on variables outside its range")
    return PolyVectorField(tuple(c.restrict_variables(start, stop) for c in comps))


def projection(n, indices):
    """Linear map keeping coordinates ``indices`` of R^n."""
    return AffineMap(tuple(tuple(int(j == i) for j in range(n)) for i in indices))


def compose_affine(f, a):
    """``f(A x + b)`` as a field in the source variables of ``a``."""
    if f.dim != a.target_dim:
        raise DimensionError("affine map target dimension differs from the field dimension")
    subs = a.as_polynomials()
    return [c.compose(subs) for c in f]


def intertwining_residual(a, f, g):
    """``g(A x + b) - A f(x)``, componentwise, for ``f`` on R^n and ``g`` on R^m."""
    if a.source_dim != f.dim or a.target_dim != g.dim:
        raise DimensionError(
            f"affine map R^{a.source_dim}->R^{a.target_dim} does not match fields of "
            f"dimension {f.dim} and {g.dim}"
        )
    lhs = compose_affine(g, a)
    rhs = a.apply_linear(list(f.components), Polynomial(f.dim))
    return [l - r for l, r in zip(lhs, rhs)]


def intertwines(a, f, g):
    """Exact test of ``g(A x + b) == A f(x)``."""
    return all(r.is_zero() for r in intertwining_residual(a, f, g))


def pushforward(a, f):
    """``g(y) = A f(a^{-1}(y))`` for invertible ``a``; ``a`` intertwines f with g."""
    inv = a.inverse()
    pulled = compose_affine(f, inv)
    return PolyVectorField(tuple(a.apply_linear(pulled, Polynomial(a.target_dim))))


def dual_field(graph, labeling=None):
    """Unscaled dual field: component ``j`` is the product of ``x_i`` over parents ``i`` of ``j``.

    ``labeling[i]`` is the vertex carrying label ``i + 1``; the default is the
    canonical labeling.  Roots must carry the smallest labels.
    """
    graph = as_graph(graph)
    n = len(graph)
    if labeling is None:
        _, labeling = canonicalize(graph)
    labeling = tuple(labeling)
    if sorted(labeling) != list(range(n)):
        raise GraphError(f"labeling {labeling} is not a bijection onto the {n} vertices")
    root_count = len(graph.roots)
    if any(graph.targets[v] is not None for v in labeling[:root_count]):
        raise GraphError("roots must receive the smallest labels")
    label_of = {v: i for i, v in enumerate(labeling)}
    comps = []
    for v in labeling:
        exps = [0] * n
        for p in graph.parents[v]:
            exps[label_of[p]] += 1
        comps.append(Polynomial.monomial(exps, 1))
    return PolyVectorField(tuple(comps))


class _ReproducibleStream:
    """Integers drawn from ``random.Random(seed).random()`` (MT19937).

    Only ``random()`` has a cross-version stability guarantee in CPython, so
    integers are derived from it directly rather than via ``randrange``.
    """

    def __init__(self, seed):
        self._rng = random.Random(seed)

    def below(self, n):
        return min(int(self._rng.random() * n), n - 1)

    def between(self, lo, hi):
        return lo + self.below(hi - lo + 1)


def random_field(dim, max_degree=2, term_count=3, seed=0, coeff_bound=3, density=1):
    """Deterministic random field with small nonzero integer coefficients.

    Each component gets ``term_count`` draws (colliding monomials merge, so a
    component may end up with fewer terms); ``density`` < 1 leaves a component
    empty with probability ``1 - density``.
    """
    if dim < 1 or max_degree < 0 or term_count < 1:
        raise ValueError("random_field needs positive bounds")
    stream = _ReproducibleStream(seed)
    comps = []
    for _ in range(dim):
        terms = {}
        keep = density >= 1 or stream.below(1000) < density * 1000
        for _ in range(term_count):
            degree = stream.between(0, max_degree)
            exps = [0] * dim
            for _ in range(degree):
                exps[stream.below(dim)] += 1
            coeff = stream.between(1, coeff_bound) * (1 if stream.below(2) else -1)
            if keep:
                e = tuple(exps)
                terms[e] = terms.get(e, 0) + coeff
        comps.append(Polynomial(dim, terms))
    return PolyVectorField(tuple(comps))


# ---------------------------------------------------------------------------
# JSON
# ---------------------------------------------------------------------------

def polynomial_to_json(p):
    return [{"coeff": format_rational(c), "exps": list(e)} for e, c in p.sorted_terms()]


def polynomial_from_json(nvars, data):
    terms = {}
    if not isinstance(data, list):
        raise ValueError("polynomial JSON must be a list of terms")
    for term in data:
        if not isinstance(term, dict) or "coeff" not in term or "exps" not in term:
            raise ValueError("each term needs 'coeff' and 'exps'")
        exps = term["exps"]
        if (not isinstance(exps, list) or len(exps) != nvars
                or any(not isinstance(x, int) or isinstance(x, bool) or x < 0 for x in exps)):
            raise DimensionError(f"exponent vector {exps!r} must hold {nvars} nonnegative integers")
        e = tuple(exps)
        terms[e] = terms.get(e, 0) + to_fraction(term["coeff"])
    return Polynomial(nvars, terms)


def field_to_json(f):
    return {"dim": f.dim, "components": [polynomial_to_json(c) for c in f]}


def field_from_json(data):
    if not isinstance(data, dict) or "dim" not in data or "components" not in data:
        raise ValueError("field JSON must be an object with 'dim' and 'components'")
    dim = data["dim"]
    comps = data["components"]
    if not isinstance(dim, int) or dim < 1:
        raise DimensionError(f"invalid dimension {dim!r}")
    if not isinstance(comps, list) or len(comps) != dim:
        raise DimensionError(f"expected {dim} components")
    return PolyVectorField(tuple(polynomial_from_json(dim, c) for c in comps))
