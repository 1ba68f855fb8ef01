"""Instance generators for the two hardness reductions, used as fixtures and
for end-to-end checks of the solvers."""

from ._hamiltonian import min_hamiltonian_cycle_weight
from .subiso import (
    PatternedHost,
    SubisoInstance,
    gen_subiso_instance,
    k_prime,
    parse_patterned_host,
    witness_cycle,
    witness_move,
)
from .triangle import (
    CatalogueSwap,
    TriangleInstance,
    TriangleMode,
    TripartiteGraph,
    gen_triangle_instance,
    parse_tripartite,
    restricted_oracle_9opt,
)

__all__ = (
    "CatalogueSwap",
    "PatternedHost",
    "SubisoInstance",
    "TriangleInstance",
    "TriangleMode",
    "TripartiteGraph",
    "gen_subiso_instance",
    "gen_triangle_instance",
    "k_prime",
    "min_hamiltonian_cycle_weight",
    "parse_patterned_host",
    "parse_tripartite",
    "restricted_oracle_9opt",
    "witness_cycle",
    "witness_move",
)
