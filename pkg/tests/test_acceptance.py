"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run with ``pytest tests/test_acceptance.py -s -v`` to see the summary lines.
All comparisons are exact; the tolerance is zero throughout.
"""
import random
import time
from fractions import Fraction

import oracles
from aromatic.classifier import (
    AROMATIC_ONLY,
    B_SERIES,
    NOT_EQUIVARIANT,
    classify_integrator,
    decoupling_test,
    recover_kform,
)
from aromatic.eldiff import eldiff, eldiff_hom, eldiff_naive, eldiff_series, root_component
from aromatic.graphs import (
    AromaticGraph,
    chain,
    enumerate_aromatic_trees,
    enumerate_molecules,
    enumerate_trees,
    symmetry,
)
from aromatic.integrators import (
    BUILTIN_METHODS,
    TABLEAU_CORPUS,
    IntegratorSpec,
    bseries_of_rk,
    expand,
)
from aromatic.polyfields import (
    PolyVectorField,
    connection,
    direct_sum,
    dual_field,
    random_field,
)
from aromatic.prelie import Series, graft

TREE_COUNTS = (1, 1, 2, 4, 9, 20, 48)


def report(number, ok, detail, started):
    line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail} [{time.perf_counter() - started:.1f}s]"
    print(line)
    assert ok, line


def keys_of(graphs):
    return {g.canonical_key for g in graphs}


def test_criterion_01_enumeration_matches_oracle():
    started = time.perf_counter()
    bad = []
    oracle_trees = [len(oracles.brute_trees(k)) for k in range(1, 8)]
    if tuple(oracle_trees) != TREE_COUNTS:
        bad.append(("oracle tree counts", oracle_trees))
    for k in range(1, 7):
        pairs = [
            ("trees", enumerate_trees(k), oracles.brute_trees(k)),
            ("molecules", enumerate_molecules(k), oracles.brute_molecules(k)),
            ("aromatic", enumerate_aromatic_trees(k), oracles.brute_aromatic_trees(k)),
        ]
        for name, got, reps in pairs:
            if len(got) != len(reps) or keys_of(got) != {AromaticGraph(r).canonical_key for r in reps}:
                bad.append((name, k, len(got), len(reps)))
    if len(enumerate_trees(7)) != TREE_COUNTS[6]:
        bad.append(("trees", 7))
    report(1, not bad, f"enumeration vs oracle k<=6, oracle tree counts {oracle_trees}; mismatches {bad}", started)


def test_criterion_02_midpoint_second_order():
    started = time.perf_counter()
    midpoint = BUILTIN_METHODS["implicit-midpoint"]
    bad = []
    for i in range(20):
        dim = 1 + i % 3
        f = random_field(dim, 3, 4, 1000 + i)
        want = PolyVectorField(tuple(c * Fraction(1, 2) for c in eldiff(chain(2), f)))
        if expand(midpoint, f, 2).term(2) != want:
            bad.append(i)
    report(2, not bad, f"midpoint h^2 term = 1/2 chain on 20 fields, dims 1-3; failing fields {bad}", started)


def test_criterion_03_dual_basis_law():
    # tree pairs: root component at the origin is sigma(tau) when equal, else 0.
    # molecule pairs: the scalar at the origin is sigma(mu) when equal, else 0.
    started = time.perf_counter()
    trees = [t for k in range(1, 6) for t in enumerate_trees(k)]
    bad_trees = []
    for other in trees:
        f = dual_field(other)
        origin = [0] * f.dim
        for tau in trees:
            want = symmetry(tau) if tau.canonical_key == other.canonical_key else 0
            if root_component(tau, f).evaluate(origin) != want:
                bad_trees.append(f"{tau} on dual of {other}")
    mols = [m for k in range(1, 5) for m in enumerate_molecules(k)]
    bad_mols = []
    for other in mols:
        f = dual_field(other)
        origin = [0] * f.dim
        for mu in mols:
            want = symmetry(mu) if mu.canonical_key == other.canonical_key else 0
            got = eldiff(mu, f).evaluate(origin)
            if got != want:
                bad_mols.append(f"{mu} on dual of {other} = {got}")
    ok = not bad_trees and not bad_mols
    detail = (
        f"{len(trees) ** 2} tree pairs ({len(bad_trees)} failing), "
        f"{len(mols) ** 2} molecule pairs ({len(bad_mols)} failing"
        + (": " + "; ".join(bad_mols) if bad_mols else "")
        + ")"
    )
    report(3, ok, detail, started)


def test_criterion_04_two_algorithms_agree():
    started = time.perf_counter()
    graphs = [g for k in range(1, 6) for g in enumerate_aromatic_trees(k)]
    bad = []
    for dim in range(1, 5):
        for i in range(10):
            f = random_field(dim, 3, 4, 4000 + 10 * dim + i)
            for g in graphs:
                if eldiff_naive(g, f) != eldiff_hom(g, f):
                    bad.append((g.key, dim, i))
    report(4, not bad, f"naive == hom on {len(graphs)} graphs x 10 fields x dims 1-4; failures {bad[:5]}", started)


def test_criterion_05_vanishing_combinations():
    started = time.perf_counter()
    combos = [
        (Series({"[0,2,3]": 1, "[0,1,2]": 2, "[0,1,3]": -2, "[0,3,2]": -1}), 2),
        (Series({"[0,1,1,3]": 1, "[0,1,2,2]": -1}), 1),
    ]
    bad = []
    for n, (combo, dim) in enumerate(combos):
        for i in range(50):
            if not eldiff_series(combo, random_field(dim, 4, 5, 5000 + i)).is_zero():
                bad.append((n, "nonzero", i))
        if all(eldiff_series(combo, random_field(dim + 1, 3, 4, 5100 + i)).is_zero() for i in range(10)):
            bad.append((n, "vanishes one dimension higher"))
    report(5, not bad, f"both combinations vanish on 50 fields and not one dimension higher; issues {bad}", started)


def test_criterion_06_prelie_and_grafting():
    started = time.perf_counter()
    trees = [t for k in range(1, 5) for t in enumerate_trees(k)]
    bad = []
    for dim in range(1, 4):
        for i in range(5):
            seed = 6000 + 10 * dim + i
            f, g, h = (random_field(dim, 2, 3, seed + 100 * j) for j in range(3))
            lhs = connection(f, connection(g, h)) - connection(connection(f, g), h)
            rhs = connection(g, connection(f, h)) - connection(connection(g, f), h)
            if lhs != rhs:
                bad.append(("pre-Lie", dim, i))
            values = {t.canonical_key: eldiff(t, f) for t in trees}
            for a in trees:
                for b in trees:
                    got = eldiff_series(graft(a, b), f)
                    if got != connection(values[a.canonical_key], values[b.canonical_key]):
                        bad.append(("graft", a.key, b.key, dim, i))
    detail = f"pre-Lie and grafting for {len(trees) ** 2} tree pairs, dims 1-3, 5 fields; failures {bad[:5]}"
    report(6, not bad, detail, started)


def test_criterion_07_partition_and_decoupling():
    started = time.perf_counter()
    bad = []
    for i in range(4):
        f1, f2 = random_field(1 + i % 2, 3, 3, 7000 + i), random_field(2, 2, 3, 7100 + i)
        joint = direct_sum(f1, f2)
        for k in range(1, 5):
            for mu in enumerate_molecules(k):
                if eldiff(mu, joint) != eldiff(mu, f1).embed(joint.dim, 0) + eldiff(mu, f2).embed(joint.dim, f1.dim):
                    bad.append(("molecule", mu.key, i))
            for tau in enumerate_trees(k):
                if eldiff(tau, joint) != direct_sum(eldiff(tau, f1), eldiff(tau, f2)):
                    bad.append(("tree", tau.key, i))
    for name in ("explicit-euler", "implicit-midpoint", "rk4", "avf"):
        for i in range(2):
            f, g = random_field(1, 2, 3, 7200 + i), random_field(2, 2, 3, 7300 + i)
            if decoupling_test(BUILTIN_METHODS[name], f, g, 4) is not None:
                bad.append(("decoupling", name, i))
    x_squared = PolyVectorField.from_terms(1, [{(2,): 1}])
    witness = decoupling_test(BUILTIN_METHODS["divergence-euler"], x_squared, x_squared, 2)
    again = decoupling_test(BUILTIN_METHODS["divergence-euler"], x_squared, x_squared, 2)
    if witness is None or witness["order"] != 2 or witness != again:
        bad.append(("divergence-euler witness", witness))
    detail = f"partition laws k<=4, decoupling for 4 methods to order 4, divergence-euler witness at order {witness and witness['order']}; failures {bad[:5]}"
    report(7, not bad, detail, started)


def test_criterion_08_classifier():
    started = time.perf_counter()
    bad = []
    for name, order in (("implicit-midpoint", 4), ("avf", 4), ("rk4", 5)):
        verdict = classify_integrator(BUILTIN_METHODS[name], order)
        statuses = [v.status for v in verdict.orders]
        if statuses != [B_SERIES] * order:
            bad.append((name, statuses))
    div = classify_integrator(BUILTIN_METHODS["divergence-euler"], 2)
    if div.overall != AROMATIC_ONLY or div.at(2).series != Series({"[0,2]": 1}):
        bad.append(("divergence-euler", div.overall, div.at(2).series))
    had = classify_integrator(BUILTIN_METHODS["hadamard-euler"], 2)
    second = had.at(2)
    rotation = (second.witness or {}).get("equivariance", {}).get("affine", {}).get("A")
    if had.overall != NOT_EQUIVARIANT or second.status != NOT_EQUIVARIANT or rotation != [["0", "-1"], ["1", "0"]]:
        bad.append(("hadamard-euler", had.overall, rotation))
    detail = "midpoint/AVF BSeries to 4, RK4 to 5, divergence-euler AromaticOnly, hadamard-euler NotEquivariant"
    report(8, not bad, f"{detail}; failures {bad}", started)


def test_criterion_09_round_trip_recovery():
    started = time.perf_counter()
    rng = random.Random(9)
    bad = []
    for k in range(1, 5):
        basis = enumerate_aromatic_trees(k)
        for i in range(20):
            gamma = Series({
                g.canonical_key: Fraction(rng.randint(-5, 5), rng.randint(1, 4))
                for g in basis if rng.random() < 0.7
            })
            rec = recover_kform(lambda f, s=gamma: eldiff_series(s, f), k)
            if not rec.ok or rec.series != gamma:
                bad.append((k, i))
    report(9, not bad, f"recover(eldiff(gamma)) == gamma for 20 random gamma per k<=4; failures {bad}", started)


def test_criterion_10_runge_kutta_consistency():
    started = time.perf_counter()
    bad = []
    for name, tableau in sorted(TABLEAU_CORPUS.items()):
        series = bseries_of_rk(tableau, 5)
        method = IntegratorSpec.runge_kutta(tableau)
        for dim, seed in ((1, 10), (2, 11), (3, 12)):
            f = random_field(dim, 2, 3, seed)
            jets = expand(method, f, 5)
            for k in range(1, 6):
                if eldiff_series(series[k - 1], f) != jets.term(k):
                    bad.append((name, dim, k))
    detail = f"B-series equals jet for {sorted(TABLEAU_CORPUS)} orders <=5, dims 1-3; failures {bad}"
    report(10, not bad, detail, started)
