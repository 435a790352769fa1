"""Finite geometry toolkit for polarity graphs of projective planes.

Builds finite fields, planes from planar polynomials and division rings,
their polarities and polarity graphs; constructs and certifies independent
sets; and produces verified proper colorings.
"""

from .finite_field import FieldCtx, ff_build
from .planes import build_coordinatized_plane, build_division_ring, build_pg2, build_pi_f
from .polarities import absolute_points, verify_polarity
from .graphs import Graph, build_er, build_er_star, build_polarity_graph, build_uq, build_uq_star
from .independent_sets import (construct_thm1, construct_thm2, construct_thm3, hoffman_bound,
                               max_independent_exact, unitary_absolute_set)
from .coloring import check_admissible, color_dickson, color_graph

__version__ = "0.1.0"

__all__ = [
    "FieldCtx", "ff_build", "build_coordinatized_plane", "build_division_ring", "build_pg2",
    "build_pi_f", "absolute_points", "verify_polarity", "Graph", "build_er", "build_er_star",
    "build_polarity_graph", "build_uq", "build_uq_star", "construct_thm1", "construct_thm2",
    "construct_thm3", "hoffman_bound", "max_independent_exact", "unitary_absolute_set",
    "check_admissible", "color_dickson", "color_graph",
]
