"""Coarse combinatorics of subsets of finitely generated groups.

Infinite statements are reduced to finite-window semi-decisions that return
a :class:`~coarse.verdict.Verdict` together with checkable witnesses.
"""

__version__ = "0.1.0"

from .group_core import (CustomGroup, FreeGroup, GroupError, GroupModel, IntegerLattice,
                         infinite_dihedral, parse_group)
from .lazy_sets import (INF, Frontier, FrontierError, IdealSpec, LazySet, Window,
                        difference, finite_product, ideal_contains, intersection, inverse,
                        product_set, restrict, right_translate, set_algebra, translate,
                        union, window)
from .verdict import BoundingWitness, MalformedWitness, Status, Verdict

__all__ = [
    "__version__", "CustomGroup", "FreeGroup", "GroupError", "GroupModel",
    "IntegerLattice", "infinite_dihedral", "parse_group", "INF", "Frontier",
    "FrontierError", "IdealSpec", "LazySet", "Window", "difference",
    "finite_product", "ideal_contains", "intersection", "inverse", "product_set",
    "restrict", "right_translate", "set_algebra", "translate", "union", "window",
    "BoundingWitness", "MalformedWitness", "Status", "Verdict",
]
