"""Independent ground truth: PPT entanglement test, naive J recomputation,
and the steerable-implies-entangled consistency sweep.

The PPT test is one-sided for dim_A > 3 (negative partial transpose implies
entanglement, never the converse); that matches the one-sided criteria it
is used to cross-check.  For 2x2 and 2x3 it is exact.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from . import criteria as _criteria
from .errors import NumericalIntegrityError
from .linalg import DensityMatrix, PSD_TOL, hermitian_eigenvalues, partial_transpose, tensor, trace_product


def min_pt_eigenvalue(rho: DensityMatrix, side: str = "b") -> float:
    """Smallest eigenvalue of the partial transpose (both sides share a spectrum)."""
    pt = partial_transpose(rho.mat, rho.dim_a, rho.dim_b, side)
    return float(hermitian_eigenvalues(pt)[0])


def is_npt(rho: DensityMatrix, tol: float = PSD_TOL) -> bool:
    """True iff the partial transpose has an eigenvalue below -tol."""
    return min_pt_eigenvalue(rho) < -tol


def brute_force_j(rho: DensityMatrix, effects_a, effects_b, pairing) -> float:
    """Plain summation of Tr[(A_i x B_j) rho] over an explicit index pairing.

    Forms every tensor product; no reshaping shortcut shares code with the
    optimized evaluators, so this is a genuinely independent route.
    """
    total = 0.0 + 0.0j
    for ia, ib in pairing:
        total += trace_product(tensor(effects_a[ia], effects_b[ib]), rho.mat)
    if abs(total.imag) > 1e-8:
        raise NumericalIntegrityError(f"imaginary residue {total.imag:.3e} in brute-force J")
    return total.real


def mum_pairing(d: int) -> list[tuple[int, int]]:
    """Index pairs (qudit flat index, padded-grid flat index) for the MUM sum.

    Both grids are flattened b-major with d entries per basis, so the pairing
    is the identity map over d(d+1) indices.
    """
    return [(i, i) for i in range(d * (d + 1))]


@dataclass(frozen=True)
class OracleReport:
    """Outcome of a consistency sweep.

    Each violation records a state flagged steerable whose partial transpose
    stayed positive; ``deviations`` holds the detection margin per violation.
    """

    checks_run: int
    deviations: dict[str, float]
    worst_case: str = field(init=False)
    passed: bool = field(init=False)

    def __post_init__(self):
        worst = max(self.deviations, key=lambda k: self.deviations[k], default="")
        object.__setattr__(self, "worst_case", worst)
        object.__setattr__(self, "passed", not self.deviations)

    def to_dict(self) -> dict:
        return {
            "checks_run": self.checks_run,
            "violations": len(self.deviations),
            "deviations": dict(self.deviations),
            "worst_case": self.worst_case,
            "passed": self.passed,
        }


def applicable_criteria(dim_a: int, dim_b: int) -> list[_criteria.Criterion]:
    out = []
    if dim_b == 2:
        out += [_criteria.Criterion.THM1_MUM, _criteria.Criterion.THM3_GSIC]
    if dim_a == 2:
        out += [_criteria.Criterion.THM2_MUM, _criteria.Criterion.THM4_GSIC]
    if dim_a == 2 and dim_b == 2:
        out.append(_criteria.Criterion.COR1_H)
    return out


def consistency_suite(states, criterion_ids=None, mu: float = _criteria.MU_MAX) -> OracleReport:
    """Assert steerable-implies-NPT over labeled states.

    ``states`` yields (label, DensityMatrix) pairs.  Every criterion in
    ``criterion_ids`` (default: all applicable to the state's dims) is
    evaluated; a flagged state with positive partial transpose is a
    violation.  Equivalently, no criterion may fire on a PPT state.
    """
    checks = 0
    deviations: dict[str, float] = {}
    for label, rho in states:
        ids = criterion_ids or applicable_criteria(rho.dim_a, rho.dim_b)
        npt = None
        for cid in ids:
            verdict = _criteria.detect(rho, cid, mu)
            checks += 1
            if verdict.detected:
                if npt is None:
                    npt = is_npt(rho)
                if not npt:
                    deviations[f"{label}/{_criteria.Criterion(cid).value}"] = verdict.margin
    return OracleReport(checks_run=checks, deviations=deviations)
