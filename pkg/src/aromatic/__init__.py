"""Exact B-series and aromatic series over polynomial vector fields.

Submodules: :mod:`graphs` (aromatic graphs, canonical forms, enumeration),
:mod:`prelie` (formal series and grafting), :mod:`polyfields` (exact
polynomial fields and affine maps), :mod:`eldiff` (elementary differentials),
:mod:`integrators` (exact h-jets of integrators), :mod:`classifier`
(B-series / aromatic / non-equivariant verdicts) and :mod:`cli`.
"""
from .classifier import classify_integrator, recover_kform
from .eldiff import eldiff
from .graphs import AromaticGraph, enumerate_aromatic_trees, enumerate_molecules, enumerate_trees
from .integrators import bseries_of_rk, expand, get_method
from .polyfields import AffineMap, Polynomial, PolyVectorField
from .prelie import Series, graft

__version__ = "0.1.0"

__all__ = [
    "AffineMap",
    "AromaticGraph",
    "PolyVectorField",
    "Polynomial",
    "Series",
    "bseries_of_rk",
    "classify_integrator",
    "eldiff",
    "enumerate_aromatic_trees",
    "enumerate_molecules",
    "enumerate_trees",
    "expand",
    "get_method",
    "graft",
    "recover_kform",
]
