"""Command-line front end: ``aromatic <subcommand> ...``.

Every subcommand prints a human-readable summary by default, or the JSON
payload with ``--json``.  When an output directory is given (``--output-dir``
or the ``AROMATIC_OUTPUT_DIR`` environment variable) the JSON payload is also
written there as ``<subcommand>.json``.

Exit codes: 0 success or pass, 1 negative verdict or witness found, 2 usage
or input error.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .classifier import (
    B_SERIES,
    DEFAULT_SEED,
    PreconditionError,
    RankDeficientError,
    classify_integrator,
    equivariance_probe,
)
from .eldiff import TensorRankError, eldiff
from .graphs import (
    DEFAULT_MAX_ORDER,
    GraphError,
    OrderError,
    as_graph,
    encode_key,
    enumerate_aromatic_trees,
    enumerate_molecules,
    enumerate_trees,
    symmetry,
)
from .integrators import TableauError, ButcherTableau, bseries_of_rk, expand, get_method
from .polyfields import (
    AffineMap,
    DimensionError,
    Polynomial,
    PolyVectorField,
    field_from_json,
    field_to_json,
    polynomial_to_json,
)
from .prelie import graft
from .rationals import format_rational, to_fraction

OUTPUT_DIR_ENV = "AROMATIC_OUTPUT_DIR"

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_USAGE = 2


class InputError(Exception):
    """Bad user input; the message is printed verbatim and the exit code is 2."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise InputError(f"usage error: {message}")


# ---------------------------------------------------------------------------
# input loading
# ---------------------------------------------------------------------------

def _load_json(source, what):
    """Parse ``source`` as inline JSON if it looks like JSON, else as a file path."""
    text = source.strip()
    if text[:1] in "{[":
        origin = "inline argument"
    else:
        try:
            text = Path(source).read_text()
        except OSError as exc:
            raise InputError(f"cannot read {what} file {source!r}: {exc.strerror}") from None
        origin = source
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON in {what} ({origin}): {exc.msg} at line {exc.lineno}") from None


def _load_field(source):
    data = _load_json(source, "field")
    try:
        return field_from_json(data)
    except DimensionError as exc:
        raise InputError(f"shape mismatch in field {source!r}: {exc}") from None
    except (ValueError, TypeError) as exc:
        raise InputError(f"invalid field {source!r}: {exc}") from None


def _load_tableau(source):
    data = _load_json(source, "tableau")
    try:
        return ButcherTableau.from_json(data)
    except (TableauError, TypeError) as exc:
        raise InputError(f"invalid tableau {source!r}: {exc}") from None


def _load_affine(source):
    data = _load_json(source, "affine map")
    try:
        return AffineMap.from_json(data)
    except DimensionError as exc:
        raise InputError(f"shape mismatch in affine map {source!r}: {exc}") from None
    except (ValueError, TypeError) as exc:
        raise InputError(f"invalid affine map {source!r}: {exc}") from None


def _load_graph(text):
    try:
        graph = as_graph(text)
    except GraphError as exc:
        raise InputError(f"invalid graph: {exc}") from None
    if len(graph) == 0:
        raise InputError("invalid graph: the empty graph is not supported")
    return graph


def _load_point(text, dim):
    raw = text.strip()
    try:
        items = json.loads(raw) if raw.startswith("[") else raw.split(",")
        point = [to_fraction(x) for x in items]
    except (TypeError, ValueError) as exc:
        raise InputError(f"invalid point {text!r}: {exc}") from None
    if len(point) != dim:
        raise InputError(f"shape mismatch: point has {len(point)} coordinates, field has dimension {dim}")
    return point


def _method(name, tableau_path):
    tableau = _load_tableau(tableau_path) if tableau_path else None
    try:
        return get_method(name, tableau)
    except (TableauError, ValueError) as exc:
        raise InputError(f"invalid method: {exc}") from None


def _check_order(order, bound=DEFAULT_MAX_ORDER):
    if order < 1 or order > bound:
        raise InputError(f"order bound exceeded: order must lie in 1..{bound}, got {order}")


# ---------------------------------------------------------------------------
# rendering
# ---------------------------------------------------------------------------

def _render_value(value):
    """JSON for an elementary differential of any supported rank."""
    if isinstance(value, Polynomial):
        return {"rank": 0, "value": polynomial_to_json(value)}
    if isinstance(value, PolyVectorField):
        return {"rank": 1, "value": field_to_json(value)}
    return {
        "rank": 2,
        "value": [{"index": [i + 1 for i in idx], "poly": polynomial_to_json(p)}
                  for idx, p in sorted(value.items())],
    }


def _series_text(series):
    if not series:
        return "0"
    return " + ".join(f"{format_rational(c)}*{encode_key(k)}" for k, c in series.items())


def _field_text(f):
    return "(" + ", ".join(str(c) for c in f) + ")"


# ---------------------------------------------------------------------------
# subcommands: each returns (exit code, json payload, text lines)
# ---------------------------------------------------------------------------

_ENUMERATORS = {
    "trees": enumerate_trees,
    "molecules": enumerate_molecules,
    "aromatic": enumerate_aromatic_trees,
}


def _cmd_enumerate(args):
    _check_order(args.order)
    graphs = _ENUMERATORS[args.command](args.order)
    items = [{"graph": encode_key(g.key), "sigma": symmetry(g)} for g in graphs]
    payload = {"kind": args.command, "order": args.order, "count": len(items), "graphs": items}
    lines = [f"{args.command} with {args.order} vertices: {len(items)}"]
    lines += [f"  {it['graph']}  sigma={it['sigma']}" for it in items]
    return EXIT_OK, payload, lines


def _cmd_eldiff(args):
    graph = _load_graph(args.graph)
    f = _load_field(args.field)
    try:
        value = eldiff(graph, f)
    except TensorRankError as exc:
        raise InputError(f"unsupported graph: {exc}") from None
    payload = {"graph": encode_key(graph.canonical_key), "dim": f.dim, **_render_value(value)}
    if isinstance(value, Polynomial):
        text = str(value)
    elif isinstance(value, PolyVectorField):
        text = _field_text(value)
    else:
        text = "; ".join(f"[{','.join(str(i + 1) for i in idx)}] {p}" for idx, p in sorted(value.items()))
    lines = [f"F({encode_key(graph.canonical_key)})[f] = {text}"]
    if args.at is not None:
        point = _load_point(args.at, f.dim)
        if isinstance(value, Polynomial):
            at = format_rational(value.evaluate(point))
        elif isinstance(value, PolyVectorField):
            at = [format_rational(c.evaluate(point)) for c in value]
        else:
            at = [{"index": [i + 1 for i in idx], "value": format_rational(p.evaluate(point))}
                  for idx, p in sorted(value.items())]
        payload["point"] = [format_rational(x) for x in point]
        payload["at"] = at
        lines.append(f"at {payload['point']}: {at}")
    return EXIT_OK, payload, lines


def _cmd_graft(args):
    left, right = _load_graph(args.left), _load_graph(args.right)
    if not left.is_tree() or not right.is_tree():
        raise InputError("invalid graph: grafting is defined on rooted trees")
    result = graft(left, right)
    payload = {"left": encode_key(left.canonical_key), "right": encode_key(right.canonical_key),
               "series": result.to_json()}
    return EXIT_OK, payload, [f"{payload['left']} > {payload['right']} = {_series_text(result)}"]


def _cmd_expand(args):
    _check_order(args.order)
    method = _method(args.method, args.tableau)
    f = _load_field(args.field)
    jets = expand(method, f, args.order)
    payload = {"method": method.name, "order": args.order, **jets.to_json()}
    lines = [f"{method.name} on f = {_field_text(f)}"]
    lines += [f"  h^{k}: {_field_text(jets.term(k))}" for k in range(1, args.order + 1)]
    return EXIT_OK, payload, lines


def _cmd_weights(args):
    _check_order(args.order)
    tableau = _load_tableau(args.tableau)
    per_order = bseries_of_rk(tableau, args.order)
    payload = {"tableau": tableau.to_json(), "orders": [s.to_json() for s in per_order]}
    lines = [f"order {k}: {_series_text(s)}" for k, s in enumerate(per_order, 1)]
    return EXIT_OK, payload, lines


def _cmd_classify(args):
    _check_order(args.order)
    method = _method(args.method, args.tableau)
    try:
        verdict = classify_integrator(method, args.order, seed=args.seed)
    except RankDeficientError as exc:
        raise InputError(f"probe matrix is rank deficient: {exc}") from None
    payload = {"seed": args.seed, **verdict.to_json()}
    lines = [f"{method.name}: {verdict.overall}"]
    for v in verdict.orders:
        line = f"  order {v.order}: {v.status}"
        if v.series is not None:
            line += f"  {_series_text(v.series)}"
        if v.witness is not None:
            line += f"  witness at order {v.witness.get('order', v.order)}"
        lines.append(line)
    code = EXIT_OK if verdict.overall == B_SERIES else EXIT_NEGATIVE
    return code, payload, lines


def _cmd_probe(args):
    _check_order(args.order)
    method = _method(args.method, args.tableau)
    a = _load_affine(args.affine)
    f, g = (_load_field(p) for p in args.fields)
    if a.source_dim != f.dim or a.target_dim != g.dim:
        raise InputError(
            f"shape mismatch: affine map is {a.target_dim}x{a.source_dim}, fields have dimensions {f.dim} and {g.dim}"
        )
    try:
        witness = equivariance_probe(method, a, f, g, args.order)
    except PreconditionError as exc:
        raise InputError(f"precondition failed: {exc}") from None
    payload = {"method": method.name, "order": args.order, "pass": witness is None, "witness": witness}
    if witness is None:
        return EXIT_OK, payload, [f"{method.name}: equivariant through order {args.order}"]
    lines = [f"{method.name}: equivariance fails at order {witness['order']}",
             f"  point {witness['point']}: residual {witness['lhs_minus_rhs_at_point']}"]
    return EXIT_NEGATIVE, payload, lines


# ---------------------------------------------------------------------------
# parser and entry point
# ---------------------------------------------------------------------------

def build_parser():
    # shared options may appear before or after the subcommand name
    common = _Parser(add_help=False)
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS,
                        help="print the JSON payload instead of text")
    common.add_argument("--output-dir", default=argparse.SUPPRESS,
                        help=f"also write <subcommand>.json here (default: ${OUTPUT_DIR_ENV})")
    parser = _Parser(prog="aromatic", description="Exact B-series and aromatic series toolkit.",
                     parents=[common])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    for name, help_text in [("trees", "rooted trees"), ("molecules", "aromatic molecules"),
                            ("aromatic", "aromatic trees")]:
        p = sub.add_parser(name, parents=[common], help=f"enumerate {help_text} with symmetry coefficients")
        p.add_argument("--order", type=int, required=True)
        p.set_defaults(handler=_cmd_enumerate)

    p = sub.add_parser("eldiff", parents=[common], help="elementary differential of a graph")
    p.add_argument("--graph", required=True, help="graph key such as [0,1,1]")
    p.add_argument("--field", required=True, help="field JSON file or inline JSON")
    p.add_argument("--at", help="evaluation point, e.g. 1,1/2 or [1,\"1/2\"]")
    p.set_defaults(handler=_cmd_eldiff)

    p = sub.add_parser("graft", parents=[common], help="graft one rooted tree onto another")
    p.add_argument("--left", required=True)
    p.add_argument("--right", required=True)
    p.set_defaults(handler=_cmd_graft)

    p = sub.add_parser("expand", parents=[common], help="exact h-jet of a method on a field")
    p.add_argument("--method", required=True)
    p.add_argument("--tableau")
    p.add_argument("--field", required=True)
    p.add_argument("--order", type=int, required=True)
    p.set_defaults(handler=_cmd_expand)

    p = sub.add_parser("weights", parents=[common], help="B-series coefficients of a Runge-Kutta tableau")
    p.add_argument("--tableau", required=True)
    p.add_argument("--order", type=int, required=True)
    p.set_defaults(handler=_cmd_weights)

    p = sub.add_parser("classify", parents=[common], help="classify a method order by order")
    p.add_argument("--method", required=True)
    p.add_argument("--tableau")
    p.add_argument("--order", type=int, required=True)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.set_defaults(handler=_cmd_classify)

    p = sub.add_parser("probe", parents=[common], help="check equivariance of a method under one affine map")
    p.add_argument("--method", required=True)
    p.add_argument("--tableau")
    p.add_argument("--affine", required=True)
    p.add_argument("--fields", nargs=2, required=True, metavar=("F", "G"))
    p.add_argument("--order", type=int, required=True)
    p.set_defaults(handler=_cmd_probe)
    return parser


def run(argv=None, stdout=None, stderr=None):
    """Execute one command; returns the exit code."""
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    try:
        args = build_parser().parse_args(argv)
        code, payload, lines = args.handler(args)
    except InputError as exc:
        print(f"error: {exc}", file=stderr)
        return EXIT_USAGE
    except OrderError as exc:
        print(f"error: order bound exceeded: {exc}", file=stderr)
        return EXIT_USAGE
    except DimensionError as exc:
        print(f"error: shape mismatch: {exc}", file=stderr)
        return EXIT_USAGE
    text = json.dumps(payload, indent=2, sort_keys=True)
    # the shared actions default to SUPPRESS so a subcommand cannot reset them
    if getattr(args, "json", False):
        print(text, file=stdout)
    else:
        print("\n".join(lines), file=stdout)
    out_dir = getattr(args, "output_dir", None) or os.environ.get(OUTPUT_DIR_ENV)
    if out_dir:
        path = Path(out_dir)
        path.mkdir(parents=True, exist_ok=True)
        (path / f"{args.command}.json").write_text(text + "\n")
    return code


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
