"""Order-by-order classification of one-step methods.

At order k the method's h^k jet term is a k-form on vector fields.  Working in
dimension n = k, where elementary differentials of one-root graphs with k
vertices are linearly independent, the classifier fits that k-form with a
linear combination of those graphs:

* no fit                              -> not affine equivariant
* fit uses a graph with a molecule   -> aromatic series only
* fit uses rooted trees only         -> B-series at this order

The fit is an exact linear solve over coefficient-of-monomial equations
collected from probe fields, followed by a check on held-out random probes.
Negative verdicts carry a concrete witness: an affine map whose intertwining
relation the method breaks, or a decoupled system it couples.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .eldiff import eldiff_hom, eldiff_series
from .graphs import (
    DEFAULT_MAX_ORDER,
    OrderError,
    as_graph,
    decompose,
    encode_key,
    enumerate_aromatic_trees,
)
from .integrators import expand
from .linalg import IncrementalSolver
from .polyfields import (
    AffineMap,
    PolyVectorField,
    direct_sum,
    dual_field,
    evaluate,
    field_to_json,
    intertwines,
    intertwining_residual,
    pad,
    polynomial_to_json,
    pushforward,
    random_field,
)
from .prelie import Series
from .rationals import format_rational

DEFAULT_SEED = 20190401

B_SERIES = "BSeries"
AROMATIC_ONLY = "AromaticOnly"
NOT_EQUIVARIANT = "NotEquivariant"
_RANK = {B_SERIES: 0, AROMATIC_ONLY: 1, NOT_EQUIVARIANT: 2}


class RankDeficientError(RuntimeError):
    """The probe family did not reach full rank; recovery refuses to guess."""


class PreconditionError(ValueError):
    """An operation's documented precondition does not hold."""


@dataclass
class Recovery:
    """Outcome of :func:`recover_kform`.

    On success ``series`` is set; on failure ``witness`` describes the probe
    whose equations could not be satisfied.
    """

    order: int
    dim: int
    series: Series = None
    witness: dict = None
    probes_used: int = 0
    rank: int = 0

    @property
    def ok(self):
        return self.series is not None


@dataclass
class OrderVerdict:
    order: int
    status: str
    series: Series = None
    offending: tuple = ()
    witness: dict = None

    def to_json(self):
        out = {"order": self.order, "status": self.status}
        if self.series is not None:
            out["series"] = self.series.to_json()
        if self.offending:
            out["offending"] = [encode_key(k) for k in self.offending]
        if self.witness is not None:
            out["witness"] = self.witness
        return out


@dataclass
class ClassificationVerdict:
    method: str
    orders: list = field(default_factory=list)

    @property
    def overall(self):
        if not self.orders:
            return B_SERIES
        return max((v.status for v in self.orders), key=_RANK.__getitem__)

    def at(self, k):
        return self.orders[k - 1]

    def to_json(self):
        return {
            "method": self.method,
            "overall": self.overall,
            "orders": [v.to_json() for v in self.orders],
        }


# ---------------------------------------------------------------------------
# probes
# ---------------------------------------------------------------------------

def structured_probes(k, dim):
    """Direct sums of dual fields, one family per one-root graph on k vertices.

    For a graph mu_1^p_1 ... mu_m^p_m tau the probe is
    f_tau (+) l_1 f_mu_1 (+) ... (+) l_m f_mu_m (+) 0, with two choices of the
    distinct multipliers l_i so that powers of different molecules separate.
    """
    seen = set()
    out = []
    for graph in enumerate_aromatic_trees(k, max(k, DEFAULT_MAX_ORDER)):
        molecules, tree = decompose(graph)
        distinct = sorted({m.key for m in molecules})
        for shift in (1, 2):
            parts = [dual_field(tree)]
            for i, key in enumerate(distinct):
                parts.append(dual_field(as_graph(key)).scale(i + shift))
            joint = direct_sum(*parts)
            if joint.dim > dim:
                continue  # does not fit below the bijective dimension
            probe = pad(joint, dim)
            if probe not in seen:
                seen.add(probe)
                out.append(probe)
    return out


def random_probe(k, dim, seed):
    return random_field(dim, max_degree=max(1, k - 1), term_count=2, seed=seed)


def _field_terms(f):
    return [dict(c.terms) for c in f]


def _equations(basis_values, target, dim):
    """Yield (component, exponent, coefficient row, rhs) for every monomial."""
    for comp in range(dim):
        monos = set(target[comp].terms)
        for value in basis_values:
            monos.update(value[comp])
        for exps in sorted(monos):
            row = [value[comp].get(exps, 0) for value in basis_values]
            yield comp, exps, row, target[comp].terms.get(exps, 0)


def _basis_values(basis, f):
    values = []
    for graph in basis:
        tensor = eldiff_hom(graph, f)
        comps = [dict() for _ in range(f.dim)]
        for key, poly in tensor.items():
            comps[key[0]] = poly.terms
        values.append(comps)
    return values


def probe_matrix_rank(k, dim=None, seed=DEFAULT_SEED, max_random=40):
    """Rank reached by the probe family over the one-root graphs on k vertices."""
    dim = k if dim is None else dim
    basis = enumerate_aromatic_trees(k, max(k, DEFAULT_MAX_ORDER))
    solver = IncrementalSolver(len(basis))
    probes = itertools.chain(
        structured_probes(k, dim),
        (random_probe(k, dim, seed + i) for i in range(max_random)),
    )
    for f in probes:
        if solver.full_rank():
            break
        for _, _, row, _ in _equations(_basis_values(basis, f), PolyVectorField.zero(dim), dim):
            solver.add_row(row)
    return solver.rank, len(basis)


def recover_kform(evaluator, k, dim=None, seed=DEFAULT_SEED, max_random=40, holdout=3):
    """Find the combination of one-root k-vertex graphs matching ``evaluator``.

    ``evaluator(f)`` must return the k-form applied to ``f`` as a field.
    Returns a :class:`Recovery`; ``ok`` is false when no combination fits
    (either during the solve or on the held-out probes).
    """
    dim = k if dim is None else dim
    basis = enumerate_aromatic_trees(k, max(k, DEFAULT_MAX_ORDER))
    keys = [g.canonical_key for g in basis]
    solver = IncrementalSolver(len(basis))
    result = Recovery(order=k, dim=dim)
    probes = itertools.chain(
        structured_probes(k, dim),
        (random_probe(k, dim, seed + i) for i in range(max_random)),
    )
    for f in probes:
        if solver.full_rank():
            break
        result.probes_used += 1
        target = evaluator(f)
        for comp, exps, row, rhs in _equations(_basis_values(basis, f), target, dim):
            if solver.add_row(row, rhs) == "inconsistent":
                result.witness = {
                    "reason": "no aromatic combination matches the probe",
                    "probe": field_to_json(f),
                    "component": comp + 1,
                    "monomial": list(exps),
                    "jet_term": field_to_json(target),
                }
                result.rank = solver.rank
                return result
    result.rank = solver.rank
    if not solver.full_rank():
        raise RankDeficientError(
            f"probe rank {solver.rank} < {len(basis)} at order {k} in dimension {dim}; "
            f"increase max_random"
        )
    series = Series(dict(zip(keys, solver.solution())))
    for i in range(holdout):
        f = random_field(dim, max_degree=max(1, k), term_count=3, seed=seed + 1000 + i)
        expected = evaluator(f)
        got = eldiff_series(series, f)
        if got != expected:
            residual = expected - got
            result.witness = {
                "reason": "fitted combination fails on a held-out probe",
                "probe": field_to_json(f),
                "residual": field_to_json(residual),
                "point": _nonzero_point(residual),
            }
            return result
    result.series = series
    return result


# ---------------------------------------------------------------------------
# witnesses
# ---------------------------------------------------------------------------

def _nonzero_point(polys):
    """A small integer point where some polynomial in ``polys`` is nonzero."""
    polys = [p for p in polys if not p.is_zero()]
    if not polys:
        return None
    nvars = polys[0].nvars
    degree = max(p.degree() for p in polys)
    for point in itertools.product(range(degree + 1), repeat=nvars):
        if any(p.evaluate(point) for p in polys):
            return list(point)
    return None  # pragma: no cover - impossible for a nonzero polynomial


def _jets(method, f, order):
    return expand(method, f, order, max_order=max(order, DEFAULT_MAX_ORDER))


def decoupling_test(method, f, g, order):
    """Check ``term_k(f (+) g) == term_k(f) (+) term_k(g)`` for k <= order.

    Returns ``None`` on success, otherwise the first mismatch as a dict with
    the order, the block (1 or 2), the component inside the block and the
    monomial of the coupled jet that disagrees.
    """
    joint = _jets(method, direct_sum(f, g), order)
    left = _jets(method, f, order)
    right = _jets(method, g, order)
    for k in range(1, order + 1):
        expected = direct_sum(left.term(k), right.term(k))
        got = joint.term(k)
        if got == expected:
            continue
        for comp in range(got.dim):
            diff = got[comp] - expected[comp]
            if diff.is_zero():
                continue
            exps, coeff = diff.sorted_terms()[0]
            block_no, inner = (1, comp) if comp < f.dim else (2, comp - f.dim)
            return {
                "order": k,
                "block": block_no,
                "component": inner + 1,
                "monomial": list(exps),
                "coupled": polynomial_to_json(got[comp]),
                "decoupled": polynomial_to_json(expected[comp]),
                "difference": format_rational(coeff),
                "fields": [field_to_json(f), field_to_json(g)],
            }
    return None


def equivariance_probe(method, a, f, g, order):
    """Check that ``a`` intertwines ``term_k(f)`` and ``term_k(g)`` for k <= order.

    ``a`` must intertwine ``f`` (on its source) and ``g`` (on its target).
    """
    if not intertwines(a, f, g):
        raise PreconditionError("the affine map does not intertwine the two probe fields")
    jf = _jets(method, f, order)
    jg = _jets(method, g, order)
    for k in range(1, order + 1):
        residual = intertwining_residual(a, jf.term(k), jg.term(k))
        if all(r.is_zero() for r in residual):
            continue
        point = _nonzero_point(residual)
        return {
            "order": k,
            "affine": a.to_json(),
            "fields": [field_to_json(f), field_to_json(g)],
            "residual": [polynomial_to_json(r) for r in residual],
            "point": point,
            "lhs_minus_rhs_at_point": [format_rational(r.evaluate(point)) for r in residual],
        }
    return None


def fixed_point_test(method, f, x0, order):
    """Every jet term of ``method`` must vanish where ``f`` does."""
    if any(evaluate(f, x0)):
        raise PreconditionError("f does not vanish at the given point")
    jets = _jets(method, f, order)
    for k in range(1, order + 1):
        value = evaluate(jets.term(k), x0)
        if any(value):
            return {"order": k, "point": [format_rational(x) for x in x0],
                    "value": [format_rational(v) for v in value]}
    return None


def _candidate_maps(dim):
    """Structured invertible affine maps: rotation first, then shear, scaling, translation."""
    maps = []
    eye = [[int(i == j) for j in range(dim)] for i in range(dim)]
    if dim >= 2:
        rot = [row[:] for row in eye]
        rot[0][0], rot[0][1], rot[1][0], rot[1][1] = 0, -1, 1, 0
        maps.append(AffineMap(rot))
        shear = [row[:] for row in eye]
        shear[0][1] = 1
        maps.append(AffineMap(shear))
    scale = [row[:] for row in eye]
    scale[0][0] = 2
    maps.append(AffineMap(scale))
    maps.append(AffineMap(eye, [1] * dim))
    return maps


def find_equivariance_witness(method, order, dim, probes):
    for a in _candidate_maps(dim):
        for f in probes:
            witness = equivariance_probe(method, a, f, pushforward(a, f), order)
            if witness is not None:
                return witness
    return None


def _decoupling_candidates(offending, k, seed):
    x2 = PolyVectorField.from_terms(1, [{(2,): 1}])
    yield x2, x2
    for key in offending:
        molecules, tree = decompose(as_graph(key))
        for mol in molecules:
            yield dual_field(tree), dual_field(mol)
    for i in range(5):
        yield random_field(1, k, 2, seed + 2000 + i), random_field(1, k, 2, seed + 3000 + i)


def classify_order(method, k, dim=None, seed=DEFAULT_SEED):
    dim = k if dim is None else dim

    def evaluator(f):
        return _jets(method, f, k).term(k)

    recovery = recover_kform(evaluator, k, dim, seed)
    if not recovery.ok:
        probes = [random_probe(k, dim, seed + 4000 + i) for i in range(3)]
        if "probe" in recovery.witness:
            from .polyfields import field_from_json

            probes.insert(0, field_from_json(recovery.witness["probe"]))
        affine = find_equivariance_witness(method, k, dim, probes)
        witness = dict(recovery.witness)
        if affine is not None:
            witness["equivariance"] = affine
        return OrderVerdict(k, NOT_EQUIVARIANT, witness=witness)
    series = recovery.series
    offending = tuple(key for key in series if not as_graph(key).is_tree())
    if not offending:
        return OrderVerdict(k, B_SERIES, series=series)
    witness = None
    for f, g in _decoupling_candidates(offending, k, seed):
        witness = decoupling_test(method, f, g, k)
        if witness is not None:
            break
    return OrderVerdict(k, AROMATIC_ONLY, series=series, offending=offending, witness=witness)


def classify_integrator(method, order, seed=DEFAULT_SEED, dim=None, max_order=None):
    """Per-order verdicts for orders 1..order (working dimension = order unless ``dim``)."""
    bound = DEFAULT_MAX_ORDER if max_order is None else max_order
    if not isinstance(order, int) or order < 1 or order > bound:
        raise OrderError(f"order must lie in 1..{bound}, got {order!r}")
    verdict = ClassificationVerdict(method.name)
    for k in range(1, order + 1):
        verdict.orders.append(classify_order(method, k, dim, seed))
    return verdict
