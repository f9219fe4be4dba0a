"""Exact lattice, Mobius-map and affine-group computations for a Kummer K3 surface and its quotients."""

__version__ = "0.1.0"

from .lattice import (  # noqa: E402
    INF, LAMBDA, DivisorClass, GramLattice, LatticeError, P1Point, Symbol, adjunction_genus, coord,
    gram_determinant, is_negative_definite, matrix_rank, pair,
)
from .surface import (  # noqa: E402
    CoverCase, CurveRecord, InsufficientData, PointSpec, SurfaceModel, blow_up, build_kummer_config,
    build_T, build_X, change_basis, double_cover_pushforward, make_quadric,
)
from .automorphisms import (  # noqa: E402
    AffineMap, AutomorphismRecord, CurveMap, MobiusMap, compose, compose_records, fixed_points,
    grid_rigidity_check, invert, make_f1, make_f3, make_iota, make_iota_n, make_theta, ns_action,
)
from .configurations import (  # noqa: E402
    FiberReport, IncidenceGraph, Kodaira, certify_rigid_linear_system, check_fiber, check_section,
    fixed_locus_table, incidence_graph, unique_fixed_component_through,
)
from .groups import (  # noqa: E402
    AffineGroupModel, DyadicClosure, FinitelyGenerated, Involution, are_conjugate, conjugate_involution,
    contains, count_conjugacy_classes, is_finitely_generated, marked_stabilizer, normalize,
    real_form_classes,
)
from .report import CheckResult, Options, SuiteReport, list_checks, run_suite  # noqa: E402
