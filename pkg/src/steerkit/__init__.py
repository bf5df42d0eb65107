"""steerkit: steering detection for qubit-qudit states via mutually unbiased
measurements (MUMs) and general SIC measurement sets.

The hot numerical kernel (a cyclic Jacobi Hermitian eigensolver) is compiled
when the extension built; ``steerkit.linalg.USING_COMPILED_KERNEL`` reports
which lane is active.
"""

__version__ = "0.1.0"

from .criteria import (
    MU_MAX,
    Criterion,
    Direction,
    SteeringVerdict,
    detect,
    detect_corollary1,
    h_correlation,
    j_gsic,
    j_mum,
    threshold_gsic,
    threshold_mum,
)
from .linalg import (
    USING_COMPILED_KERNEL,
    DensityMatrix,
    conjugate,
    hermitian_eigenvalues,
    partial_trace,
    partial_transpose,
    tensor,
    trace_product,
)
from .measurements import (
    GsicSet,
    MumSet,
    build_gsic,
    build_mums,
    max_feasible_t_gsic,
    max_feasible_t_mum,
    validate_gsic,
    validate_mums,
)
from .oracle import brute_force_j, consistency_suite, is_npt
from .shotsim import ShotConfig, ShotEstimate, estimate_j, joint_distribution, verdict_with_confidence
from .states import (
    bloch_two_qubit,
    load_density,
    make_family_state,
    max_steerable_mixed,
    munro_mems,
    save_density,
    tau_state,
    werner_derivative,
)

__all__ = [
    "__version__",
    "MU_MAX",
    "Criterion",
    "Direction",
    "SteeringVerdict",
    "DensityMatrix",
    "MumSet",
    "GsicSet",
    "ShotConfig",
    "ShotEstimate",
    "USING_COMPILED_KERNEL",
    "bloch_two_qubit",
    "brute_force_j",
    "build_gsic",
    "build_mums",
    "conjugate",
    "consistency_suite",
    "detect",
    "detect_corollary1",
    "estimate_j",
    "h_correlation",
    "hermitian_eigenvalues",
    "is_npt",
    "j_gsic",
    "j_mum",
    "joint_distribution",
    "load_density",
    "make_family_state",
    "max_feasible_t_gsic",
    "max_feasible_t_mum",
    "max_steerable_mixed",
    "munro_mems",
    "partial_trace",
    "partial_transpose",
    "save_density",
    "tau_state",
    "tensor",
    "threshold_gsic",
    "threshold_mum",
    "trace_product",
    "validate_gsic",
    "validate_mums",
    "verdict_with_confidence",
    "werner_derivative",
]
