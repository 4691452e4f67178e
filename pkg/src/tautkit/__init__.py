"""Taut angle structures on 3-manifold triangulations: enumeration,
fixed-parameter decision procedures and the 1-in-3-SAT hardness gadgets."""
from .dp import DpError, DpResult, solve_cutwidth, solve_treewidth
from .fpg import (FacePairingGraph, Layout, TreeDecomposition, build_fpg,
                  heuristic_layout, heuristic_treedec, validate_layout,
                  validate_treedec)
from .gadgets import (Assembly, build_clause_gadget, build_fork_gadget,
                      build_variable_gadget, reduce_sat)
from .sat import SatInstance, parse_sat, sat_oracle
from .skeleton import EdgeReversalError, compute_skeleton, vertex_link_euler
from .taut import (BoundaryTorus, boundary_pattern, brute_force_taut,
                   enumerate_taut, is_taut)
from .triangulation import (Triangulation, TriangulationError,
                            load_triangulation, parse_triangulation,
                            serialize_triangulation)

__version__ = "0.1.0"
