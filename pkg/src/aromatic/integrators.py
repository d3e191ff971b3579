"""One-step methods expanded exactly in powers of the step size.

The step size is folded into the field, so a method is a map f -> Phi(hf), and
``expand`` returns the coefficients of h, h^2, ..., h^K in ``Phi(hf)(x) - x``
as polynomial vector fields in x.  All arithmetic happens in the truncated
ring Q[x][h] / (h^{K+1}).  Implicit stage equations are solved by Picard
iteration in that ring: each sweep fixes one more power of h, so K sweeps are
exact through order K.

Elementary weights use the convention

    Phi(hf)(x) - x = sum over trees t of h^|t| * alpha(t) * F(t)[f](x),
    alpha(t) = (b^T Phi_stage(t)) / sigma(t),

where F is the unnormalised elementary differential of :mod:`aromatic.eldiff`
and sigma is the automorphism count.  The 1/sigma factor is what the jet
expansion requires for this F; tests lock it against :func:`expand`.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

from .graphs import DEFAULT_MAX_ORDER, OrderError, as_graph, enumerate_trees, symmetry
from .polyfields import Polynomial, PolyVectorField, divergence
from .prelie import Series
from .rationals import format_rational, rational, tidy, to_fraction


class TableauError(ValueError):
    """Inconsistent Butcher tableau."""


# ---------------------------------------------------------------------------
# tableaux and method specs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ButcherTableau:
    a: tuple
    b: tuple
    c: tuple = None
    strict: bool = True

    def __post_init__(self):
        try:
            a = tuple(tuple(to_fraction(x) for x in row) for row in self.a)
            b = tuple(to_fraction(x) for x in self.b)
        except (TypeError, ValueError) as exc:
            raise TableauError(str(exc)) from exc
        s = len(b)
        if s == 0:
            raise TableauError("a tableau needs at least one stage")
        if len(a) != s or any(len(row) != s for row in a):
            raise TableauError(f"A must be {s}x{s} to match b")
        row_sums = tuple(sum(row) for row in a)
        if self.c is None:
            c = row_sums
        else:
            c = tuple(to_fraction(x) for x in self.c)
            if len(c) != s:
                raise TableauError(f"c must have {s} entries")
            if c != row_sums:
                msg = f"c = {[format_rational(x) for x in c]} differs from the row sums of A"
                if self.strict:
                    raise TableauError(msg)
                warnings.warn(msg, stacklevel=2)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)

    @property
    def stages(self):
        return len(self.b)

    def is_explicit(self):
        return all(not self.a[i][j] for i in range(self.stages) for j in range(i, self.stages))

    def to_json(self):
        return {
            "a": [[format_rational(x) for x in row] for row in self.a],
            "b": [format_rational(x) for x in self.b],
            "c": [format_rational(x) for x in self.c],
        }

    @classmethod
    def from_json(cls, data, strict=True):
        if not isinstance(data, dict) or "a" not in data or "b" not in data:
            raise TableauError("tableau JSON must be an object with 'a' and 'b' (and optional 'c')")
        return cls(tuple(tuple(r) for r in data["a"]), tuple(data["b"]), data.get("c"), strict)


EXPLICIT_EULER = ButcherTableau(((0,),), (1,))
IMPLICIT_MIDPOINT = ButcherTableau(((rational(1, 2),),), (1,))
TRAPEZOIDAL = ButcherTableau(((0, 0), (rational(1, 2), rational(1, 2))), (rational(1, 2), rational(1, 2)))
RK4 = ButcherTableau(
    (
        (0, 0, 0, 0),
        (rational(1, 2), 0, 0, 0),
        (0, rational(1, 2), 0, 0),
        (0, 0, 1, 0),
    ),
    (rational(1, 6), rational(1, 3), rational(1, 3), rational(1, 6)),
)

KINDS = ("explicit-rk", "implicit-rk", "avf", "exact-flow", "divergence-euler", "hadamard-euler")


@dataclass(frozen=True)
class IntegratorSpec:
    kind: str
    tableau: ButcherTableau = None
    name: str = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown integrator kind {self.kind!r}")
        if self.kind in ("explicit-rk", "implicit-rk"):
            if self.tableau is None:
                raise TableauError(f"{self.kind} needs a tableau")
            if self.kind == "explicit-rk" and not self.tableau.is_explicit():
                raise TableauError("explicit-rk needs a strictly lower-triangular A")
        elif self.tableau is not None:
            raise TableauError(f"{self.kind} does not take a tableau")
        if self.name is None:
            object.__setattr__(self, "name", self.kind)

    @classmethod
    def runge_kutta(cls, tableau, name=None):
        kind = "explicit-rk" if tableau.is_explicit() else "implicit-rk"
        return cls(kind, tableau, name)


BUILTIN_METHODS = {
    "explicit-euler": IntegratorSpec("explicit-rk", EXPLICIT_EULER, "explicit-euler"),
    "implicit-midpoint": IntegratorSpec("implicit-rk", IMPLICIT_MIDPOINT, "implicit-midpoint"),
    "trapezoidal": IntegratorSpec("implicit-rk", TRAPEZOIDAL, "trapezoidal"),
    "rk4": IntegratorSpec("explicit-rk", RK4, "rk4"),
    "avf": IntegratorSpec("avf", name="avf"),
    "exact-flow": IntegratorSpec("exact-flow", name="exact-flow"),
    "divergence-euler": IntegratorSpec("divergence-euler", name="divergence-euler"),
    "hadamard-euler": IntegratorSpec("hadamard-euler", name="hadamard-euler"),
}

TABLEAU_CORPUS = {
    "explicit-euler": EXPLICIT_EULER,
    "implicit-midpoint": IMPLICIT_MIDPOINT,
    "trapezoidal": TRAPEZOIDAL,
    "rk4": RK4,
}


def get_method(name, tableau=None):
    """Resolve a CLI method name; ``explicit-rk``/``implicit-rk``/``rk`` take a tableau."""
    if name in ("rk", "explicit-rk", "implicit-rk"):
        if tableau is None:
            raise TableauError(f"method {name!r} needs a tableau")
        if name == "rk":
            return IntegratorSpec.runge_kutta(tableau, "rk")
        return IntegratorSpec(name, tableau, name)
    if tableau is not None:
        raise TableauError(f"method {name!r} does not take a tableau")
    try:
        return BUILTIN_METHODS[name]
    except KeyError:
        raise ValueError(
            f"unknown method {name!r}; choose from {', '.join(sorted(BUILTIN_METHODS))}, rk"
        ) from None


# ---------------------------------------------------------------------------
# truncated power series in h with polynomial coefficients
# ---------------------------------------------------------------------------

def _zero_series(nvars, order):
    return [Polynomial(nvars) for _ in range(order + 1)]


def _series_mul(a, b, order):
    out = [None] * (order + 1)
    nvars = a[0].nvars
    for i in range(order + 1):
        if a[i].is_zero():
            continue
        for j in range(order + 1 - i):
            if b[j].is_zero():
                continue
            prod = a[i] * b[j]
            out[i + j] = prod if out[i + j] is None else out[i + j] + prod
    return [p if p is not None else Polynomial(nvars) for p in out]


def _series_add(a, b):
    return [x + y for x, y in zip(a, b)]


def substitute(poly, args, order):
    """``poly(args)`` where each argument is a truncated h-series."""
    nvars = args[0][0].nvars
    result = _zero_series(nvars, order)
    powers = [[None] for _ in args]
    for exps, coeff in poly.terms.items():
        term = None
        for i, k in enumerate(exps):
            if not k:
                continue
            cache = powers[i]
            while len(cache) <= k:
                prev = cache[-1]
                cache.append(list(args[i]) if prev is None else _series_mul(prev, args[i], order))
            term = cache[k] if term is None else _series_mul(term, cache[k], order)
        if term is None:
            result[0] = result[0] + Polynomial.constant(nvars, coeff)
        else:
            result = [r + t * coeff for r, t in zip(result, term)]
    return result


def _identity_series(n, order):
    return [[Polynomial.variable(n, i)] + [Polynomial(n) for _ in range(order)] for i in range(n)]


def _field_at(components, args, order):
    return [substitute(c, args, order) for c in components]


def _shift(series, order):
    """Multiply by h."""
    return [Polynomial(series[0].nvars)] + series[:order]


def _runge_kutta(tableau, f, order, sweeps=None):
    n = f.dim
    s = tableau.stages
    x = _identity_series(n, order)
    stage_values = [None] * s

    def stage_arg(i, values):
        args = []
        for comp in range(n):
            acc = list(x[comp])
            for j in range(s):
                aij = tableau.a[i][j]
                if aij and values[j] is not None:
                    acc = _series_add(acc, [p * aij for p in _shift(values[j][comp], order)])
            args.append(acc)
        return args

    if tableau.is_explicit():
        for i in range(s):
            stage_values[i] = _field_at(f, stage_arg(i, stage_values), order)
    else:
        stage_values = [_field_at(f, x, order) for _ in range(s)]
        for _ in range(order if sweeps is None else sweeps):
            stage_values = [_field_at(f, stage_arg(i, stage_values), order) for i in range(s)]

    increment = []
    for comp in range(n):
        acc = _zero_series(n, order)
        for j in range(s):
            if tableau.b[j]:
                acc = _series_add(acc, [p * tableau.b[j] for p in _shift(stage_values[j][comp], order)])
        increment.append(acc)
    return increment


def _integrate_last_variable(poly):
    """Integrate over the last variable from 0 to 1 and drop it."""
    out = {}
    for e, c in poly.terms.items():
        key = e[:-1]
        out[key] = out.get(key, 0) + c * rational(1, e[-1] + 1)
    return Polynomial(poly.nvars - 1, out)


def _avf(f, order):
    n = f.dim
    xi = Polynomial.variable(n + 1, n)
    lifted = [c.embed(n + 1, 0) for c in f]
    delta = [_zero_series(n, order) for _ in range(n)]
    for _ in range(order):
        args = []
        for comp in range(n):
            base = [Polynomial.variable(n + 1, comp)] + [Polynomial(n + 1) for _ in range(order)]
            moved = [p.embed(n + 1, 0) * xi for p in delta[comp]]
            args.append(_series_add(base, moved))
        averaged = []
        for comp_series in _field_at(lifted, args, order):
            averaged.append([_integrate_last_variable(p) for p in comp_series])
        delta = [_shift(s, order) for s in averaged]
    return delta


def _exact_flow(f, order):
    """Taylor coefficients of the true solution, one order at a time:
    (k+1) y_{k+1} = [h^k] f(y(h))."""
    n = f.dim
    y = _identity_series(n, order)
    for k in range(order):
        fy = _field_at(f, y, order)
        for comp in range(n):
            y[comp][k + 1] = fy[comp][k] * rational(1, k + 1)
    return [[Polynomial(n)] + comp[1:] for comp in y]


@dataclass(frozen=True)
class JetExpansion:
    """``terms[k-1]`` is the coefficient of h^k in Phi(hf)(x) - x."""

    dim: int
    terms: tuple

    def term(self, k):
        return self.terms[k - 1]

    @property
    def order(self):
        return len(self.terms)

    def to_json(self):
        from .polyfields import field_to_json

        return {"dim": self.dim, "terms": [field_to_json(t) for t in self.terms]}


def _check_jet_order(order, max_order):
    bound = DEFAULT_MAX_ORDER if max_order is None else max_order
    if not isinstance(order, int) or order < 1:
        raise OrderError(f"order must be a positive integer, got {order!r}")
    if order > bound:
        raise OrderError(f"order {order} exceeds the configured maximum {bound}")


def _to_jet(n, increment, order):
    terms = []
    for k in range(1, order + 1):
        terms.append(PolyVectorField(tuple(increment[comp][k] for comp in range(n))))
    return JetExpansion(n, tuple(terms))


def runge_kutta_jet(tableau, f, order, sweeps=None):
    """h-jet of a Runge-Kutta method; implicit stages get ``sweeps`` Picard
    sweeps (default ``order``, which is always enough)."""
    _check_jet_order(order, max(order, DEFAULT_MAX_ORDER))
    return _to_jet(f.dim, _runge_kutta(tableau, f, order, sweeps), order)


def expand(method, f, order, max_order=None):
    """Exact h-jet of ``method`` applied to ``f`` through ``h**order``."""
    _check_jet_order(order, max_order)
    n = f.dim
    kind = method.kind
    if kind in ("explicit-rk", "implicit-rk"):
        return _to_jet(n, _runge_kutta(method.tableau, f, order), order)
    if kind == "avf":
        return _to_jet(n, _avf(f, order), order)
    if kind == "exact-flow":
        return _to_jet(n, _exact_flow(f, order), order)
    zero = PolyVectorField.zero(n)
    terms = [f] + [zero] * (order - 1)
    if order >= 2:
        if kind == "divergence-euler":
            div = divergence(f)
            terms[1] = PolyVectorField(tuple(div * c for c in f))
        elif kind == "hadamard-euler":
            terms[1] = PolyVectorField(tuple(c * c for c in f))
        else:  # pragma: no cover - guarded by IntegratorSpec
            raise ValueError(kind)
    return JetExpansion(n, tuple(terms))


def exact_flow_expansion(f, order, max_order=None):
    return expand(BUILTIN_METHODS["exact-flow"], f, order, max_order)


def picard_flow(f, order):
    """Exact flow jet by plain Picard iteration y <- x + int_0^h f(y); test oracle."""
    n = f.dim
    x = _identity_series(n, order)
    y = [list(c) for c in x]
    for _ in range(order):
        fy = _field_at(f, y, order)
        y = []
        for comp in range(n):
            integ = [Polynomial(n)] + [fy[comp][m] * rational(1, m + 1) for m in range(order)]
            y.append(_series_add(x[comp], integ))
    return _to_jet(n, [[Polynomial(n)] + comp[1:] for comp in y], order)


# ---------------------------------------------------------------------------
# elementary weights
# ---------------------------------------------------------------------------

def _stage_weights(tableau, graph, v):
    """Vector over stages i of the classical internal weight of the subtree at v."""
    s = tableau.stages
    out = [1] * s
    for child in graph.parents[v]:
        inner = _stage_weights(tableau, graph, child)
        for i in range(s):
            out[i] *= sum(tableau.a[i][j] * inner[j] for j in range(s))
    return out


def elementary_weight(tableau, tree):
    """``b^T Phi(tree)``: the classical elementary weight, without symmetry factor."""
    tree = as_graph(tree)
    if not tree.is_tree():
        raise ValueError("elementary weights are defined on rooted trees")
    inner = _stage_weights(tableau, tree, tree.roots[0])
    return tidy(sum(bi * w for bi, w in zip(tableau.b, inner)))


def elementary_weights(tableau, tree):
    """Coefficient alpha(tree) of h^|tree| F(tree)[f] in the method's expansion."""
    tree = as_graph(tree)
    return rational(elementary_weight(tableau, tree), symmetry(tree))


def bseries_of_rk(tableau, order, max_order=None):
    """Per-order tree series of a Runge-Kutta method, orders 1..order."""
    _check_jet_order(order, max_order)
    out = []
    for k in range(1, order + 1):
        out.append(Series({t.canonical_key: elementary_weights(tableau, t) for t in enumerate_trees(k, max(k, DEFAULT_MAX_ORDER))}))
    return out


def exact_flow_series(order):
    """B-series of the exact flow: 1 / (sigma(t) * gamma(t)) per tree."""
    out = []
    for k in range(1, order + 1):
        out.append(Series({t.canonical_key: rational(1, symmetry(t) * tree_factorial(t)) for t in enumerate_trees(k, max(k, DEFAULT_MAX_ORDER))}))
    return out


def tree_factorial(tree):
    tree = as_graph(tree)

    def size_and_product(v):
        size, prod = 1, 1
        for child in tree.parents[v]:
            s, p = size_and_product(child)
            size += s
            prod *= p
        return size, prod * size

    return size_and_product(tree.roots[0])[1]

