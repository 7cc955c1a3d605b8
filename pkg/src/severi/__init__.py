"""Exact verification toolkit for nodal-curve degeneration combinatorics on
ruled and toric surfaces: Picard-lattice numerology, the marking move
calculus with exhaustive equivalence checking, and rational-curve
parameterization with implicitization."""

from .lattice import (
    DivisorClass,
    SeveriNumerology,
    Surface,
    canonical_class,
    dim_bound_severi,
    dim_bound_tangency,
    intersect,
    severi_numerology,
    smooth_genus,
)
from .gamma import (
    ComponentId,
    DegenerationCurve,
    NodeId,
    build_gamma,
    is_connected_after_removal,
    spanning_tree_count,
)
from .markings import (
    Marking,
    MoveInstance,
    apply_d,
    apply_q,
    apply_t,
    enumerate_moves,
    is_irreducible,
)
from .equiv import (
    ClassReport,
    StateBudgetExceeded,
    VerificationError,
    compute_classes,
    enumerate_markings,
    existence_window,
    maximal_marking_count,
    orbit_class_counts,
    shortest_trace,
    verify_equivalence_grid,
    verify_node_coverage,
)
from .toric import (
    EdgeData,
    ImplicitizationResult,
    LatticePolygon,
    RationalParam,
    build_param,
    edge_data,
    implicitize,
    is_smooth,
    rational_moduli_dim,
)

__version__ = "0.1.0"
