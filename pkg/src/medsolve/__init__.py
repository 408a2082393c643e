"""Optimal measurements for minimum-error discrimination of linearly
independent pure quantum states.

The toolkit computes the rank-one projective measurement maximizing the
average identification probability for an ensemble of m linearly
independent pure states, by integrating the optimum along a line of Gram
matrices from the trivial orthogonal case to the target.  Results are
certified against the stationarity and global-optimality conditions, and
cross-checked by independent routes: exhaustive stationary-point
enumeration for three real states, a Bloch-geometry audit for qutrits, a
closed form for two states, and direct search over the unitary group.
"""

from .bloch3 import AuditReport, geometric_audit, star, to_bloch, to_density
from .cases import reference_five_state_gram
from .certify import (
    TOL_GLB,
    TOL_STAT,
    Certificate,
    certify_gram,
    certify_povm,
    global_check,
    stationarity_check,
    z_operator,
)
from .enumerate3 import (
    LandscapeSummary,
    StationaryRoot,
    classify_landscape,
    root_to_povm,
    solve_stationary,
)
from .exceptions import (
    AuditFailure,
    MedError,
    NearLinearDependence,
    NoConvergence,
    NotCertified,
    NotRealRoot,
    NotStationary,
    NotUnitary,
    PositivityLost,
    ResidualTooLarge,
    RootCountAnomaly,
    SchemaError,
    SingularJacobian,
    UnitarityLost,
)
from .gram import (
    EPS_LI,
    CanonicalizedGram,
    DualBasis,
    Ensemble,
    GramMatrix,
    canonicalize,
    dual_basis,
    ensemble_from_gram,
    gram_from_ensemble,
    random_ensemble,
)
from .homotopy import (
    COND_MAX,
    EPS_A,
    RunReport,
    SolverState,
    Trajectory,
    derivative,
    drag_between,
    initial_state,
    rk4_drag,
)
from .measurement import (
    FRAME_AMBIENT,
    FRAME_DUAL,
    Povm,
    SuccessReport,
    pgm,
    povm_from_unitary,
    success_of_povm,
    success_probability,
)
from .oracle import OracleResult, SearchStats, helstrom, helstrom_angle_scan, search_optimum

__version__ = "0.1.0"

__all__ = [
    "AuditFailure",
    "AuditReport",
    "COND_MAX",
    "CanonicalizedGram",
    "Certificate",
    "DualBasis",
    "EPS_A",
    "EPS_LI",
    "Ensemble",
    "FRAME_AMBIENT",
    "FRAME_DUAL",
    "GramMatrix",
    "LandscapeSummary",
    "MedError",
    "NearLinearDependence",
    "NoConvergence",
    "NotCertified",
    "NotRealRoot",
    "NotStationary",
    "NotUnitary",
    "OracleResult",
    "PositivityLost",
    "Povm",
    "ResidualTooLarge",
    "RootCountAnomaly",
    "RunReport",
    "SchemaError",
    "SearchStats",
    "SingularJacobian",
    "SolverState",
    "StationaryRoot",
    "SuccessReport",
    "TOL_GLB",
    "TOL_STAT",
    "Trajectory",
    "UnitarityLost",
    "canonicalize",
    "certify_gram",
    "certify_povm",
    "classify_landscape",
    "derivative",
    "drag_between",
    "dual_basis",
    "ensemble_from_gram",
    "geometric_audit",
    "global_check",
    "gram_from_ensemble",
    "helstrom",
    "helstrom_angle_scan",
    "initial_state",
    "pgm",
    "povm_from_unitary",
    "random_ensemble",
    "reference_five_state_gram",
    "rk4_drag",
    "root_to_povm",
    "search_optimum",
    "solve_stationary",
    "stationarity_check",
    "star",
    "success_of_povm",
    "success_probability",
    "to_bloch",
    "to_density",
    "z_operator",
]
