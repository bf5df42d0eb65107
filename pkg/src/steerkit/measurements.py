"""Complete MUM families and general SIC measurement sets.

Both constructions start from an orthonormal Hermitian traceless basis
(generalized Gell-Mann by default) and a scale parameter t:

  MUM:   P_n^(b) = I/d + t * F_n^(b),   b = 1..d+1, n = 1..d,
         with F_n^(b) = F^(b) - (d + sqrt(d)) F_{n,b} for n < d
         and  F_d^(b) = (1 + sqrt(d)) F^(b),  F^(b) = sum_n F_{n,b}.

  GSIC:  P_alpha = I/d^2 + t [F - d(d+1) F_alpha],  alpha = 1..d^2-1,
         P_{d^2} = I/d^2 + t (d+1) F,  F = sum_alpha F_alpha.

t must keep every effect positive semidefinite; the feasible range is found
by bisection on the minimum effect eigenvalue.  Constructors validate every
defining trace relation at 1e-10 and fail fast.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import ioformats
from .bases import OperatorBasis, gellmann_basis, relabel_for_mum
from .errors import FeasibilityError, ValidationError
from .linalg import PSD_TOL, Matrix, hermitian_eigenvalues, identity, trace_product

DEFAULT_TOL = 1e-10
_BISECT_TOL = 1e-10


@dataclass(frozen=True)
class ValidationReport:
    """Max deviation per defining relation; passes iff all below ``tol``."""

    kind: str
    tol: float
    deviations: dict[str, float]
    min_eigenvalue: float
    worst_relation: str = field(init=False)
    passed: bool = field(init=False)

    def __post_init__(self):
        worst = max(self.deviations, key=lambda k: self.deviations[k])
        object.__setattr__(self, "worst_relation", worst)
        object.__setattr__(self, "passed", all(v < self.tol for v in self.deviations.values()))

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "tol": self.tol,
            "deviations": dict(self.deviations),
            "min_eigenvalue": self.min_eigenvalue,
            "worst_relation": self.worst_relation,
            "passed": self.passed,
        }


@dataclass(frozen=True)
class MumSet:
    """d+1 mutually unbiased measurements of d effects each.

    ``kappa`` is the measured purity Tr[(P_n^(b))^2], identical for every
    effect of the construction; valid range is (1/d, 1].
    """

    d: int
    t: float
    kappa: float
    effects: tuple[tuple[Matrix, ...], ...]  # indexed [b][n]

    @property
    def n_bases(self) -> int:
        return self.d + 1

    def conjugated(self) -> "MumSet":
        """Entrywise-conjugated family; a MUM set with the same kappa."""
        conj = tuple(tuple(np.conj(p) for p in basis) for basis in self.effects)
        return MumSet(d=self.d, t=self.t, kappa=self.kappa, effects=conj)

    def to_dict(self) -> dict:
        return {
            "kind": "mum",
            "d": self.d,
            "t": self.t,
            "kappa": self.kappa,
            "effects": [[ioformats.matrix_to_rows(p) for p in basis] for basis in self.effects],
        }

    @staticmethod
    def from_dict(data: dict) -> "MumSet":
        effects = tuple(
            tuple(ioformats.rows_to_matrix(p) for p in basis) for basis in data["effects"]
        )
        s = MumSet(d=int(data["d"]), t=float(data["t"]), kappa=float(data["kappa"]), effects=effects)
        report = validate_mums(s, DEFAULT_TOL)
        if not report.passed:
            raise ValidationError(
                f"loaded MUM set fails '{report.worst_relation}' "
                f"(deviation {report.deviations[report.worst_relation]:.3e})"
            )
        return s


@dataclass(frozen=True)
class GsicSet:
    """d^2 general SIC effects with common purity ``a`` in (1/d^3, 1/d^2]."""

    d: int
    t: float
    a: float
    effects: tuple[Matrix, ...]

    def conjugated(self) -> "GsicSet":
        return GsicSet(d=self.d, t=self.t, a=self.a, effects=tuple(np.conj(p) for p in self.effects))

    def to_dict(self) -> dict:
        return {
            "kind": "gsic",
            "d": self.d,
            "t": self.t,
            "a": self.a,
            "effects": [ioformats.matrix_to_rows(p) for p in self.effects],
        }

    @staticmethod
    def from_dict(data: dict) -> "GsicSet":
        effects = tuple(ioformats.rows_to_matrix(p) for p in data["effects"])
        s = GsicSet(d=int(data["d"]), t=float(data["t"]), a=float(data["a"]), effects=effects)
        report = validate_gsic(s, DEFAULT_TOL)
        if not report.passed:
            raise ValidationError(
                f"loaded GSIC set fails '{report.worst_relation}' "
                f"(deviation {report.deviations[report.worst_relation]:.3e})"
            )
        return s


# ---------------------------------------------------------------------------
# MUM construction


def _mum_effect_grid(d: int, t: float, basis: OperatorBasis) -> list[list[Matrix]]:
    grid = relabel_for_mum(basis, d)
    root = math.sqrt(d)
    eye_over_d = identity(d) / d
    effects: list[list[Matrix]] = []
    for b in range(d + 1):
        f_b = np.sum(grid[b], axis=0)
        basis_effects = [eye_over_d + t * (f_b - (d + root) * grid[b][n]) for n in range(d - 1)]
        basis_effects.append(eye_over_d + t * (1.0 + root) * f_b)
        effects.append(basis_effects)
    return effects


def _check_psd_grid(effects: list[list[Matrix]], t: float) -> float:
    """Min eigenvalue over the grid; raises naming the offending effect."""
    worst = math.inf
    worst_at = (0, 0)
    for b, basis_effects in enumerate(effects):
        for n, p in enumerate(basis_effects):
            lo = float(hermitian_eigenvalues(p)[0])
            if lo < worst:
                worst, worst_at = lo, (n, b)
    if worst < -PSD_TOL:
        n, b = worst_at
        raise FeasibilityError(
            f"t={t!r} infeasible: effect (n={n + 1}, b={b + 1}) has min eigenvalue {worst:.3e}"
        )
    return worst


def mum_kappa_closed_form(d: int, t: float) -> float:
    """kappa(t) = 1/d + t^2 (d-1)(1+sqrt(d))^2.

    Derived from the construction, not stated as a formula anywhere; the test
    suite checks it against measured Tr[(P_n^(b))^2] for every effect.
    """
    return 1.0 / d + t * t * (d - 1) * (1.0 + math.sqrt(d)) ** 2


def mum_projective_t(d: int) -> float:
    """The t solving kappa(t) = 1, i.e. t = 1/(sqrt(d)(1+sqrt(d))).

    Only guaranteed PSD-feasible for d = 2; for larger d the projective limit
    may lie outside the feasible range of this construction.
    """
    return 1.0 / (math.sqrt(d) * (1.0 + math.sqrt(d)))


def build_mums(d: int, t: float, basis: OperatorBasis | None = None) -> MumSet:
    """Construct and validate the d+1 MUMs at scale t.

    Raises ValidationError for t <= 0 (kappa would hit its excluded lower
    bound 1/d) and FeasibilityError when t breaks positivity, naming the
    offending effect and its minimum eigenvalue.
    """
    if d < 2:
        raise ValueError(f"dimension must be >= 2, got {d}")
    if t <= 0.0:
        raise ValidationError(f"t={t!r} is degenerate: kappa = 1/d violates 1/d < kappa <= 1")
    if basis is None:
        basis = gellmann_basis(d)
    effects = _mum_effect_grid(d, t, basis)
    _check_psd_grid(effects, t)
    kappa = trace_product(effects[0][0], effects[0][0]).real
    s = MumSet(d=d, t=t, kappa=kappa, effects=tuple(tuple(b) for b in effects))
    report = validate_mums(s, DEFAULT_TOL)
    if not report.passed:
        raise ValidationError(
            f"MUM construction fails '{report.worst_relation}' "
            f"(deviation {report.deviations[report.worst_relation]:.3e})"
        )
    return s


def validate_mums(s: MumSet, tol: float = DEFAULT_TOL) -> ValidationReport:
    """Check every defining MUM relation, reporting max deviations."""
    d = s.d
    dev_trace = 0.0
    dev_complete = 0.0
    dev_cross = 0.0
    dev_same = 0.0
    min_eig = math.inf
    off_diag = (1.0 - s.kappa) / (d - 1)
    for b in range(d + 1):
        total = np.sum(s.effects[b], axis=0)
        dev_complete = max(dev_complete, float(np.abs(total - identity(d)).max()))
        for n in range(d):
            p = s.effects[b][n]
            dev_trace = max(dev_trace, abs(complex(np.trace(p)) - 1.0))
            min_eig = min(min_eig, float(hermitian_eigenvalues(p)[0]))
            for bp in range(b, d + 1):
                for npp in range(d):
                    if bp == b and npp < n:
                        continue
                    overlap = trace_product(p, s.effects[bp][npp])
                    if bp != b:
                        dev_cross = max(dev_cross, abs(overlap - 1.0 / d))
                    else:
                        target = s.kappa if npp == n else off_diag
                        dev_same = max(dev_same, abs(overlap - target))
    return ValidationReport(
        kind="mum",
        tol=tol,
        deviations={
            "trace-one": dev_trace,
            "completeness": dev_complete,
            "cross-basis-overlap": dev_cross,
            "same-basis-overlap": dev_same,
            "psd": max(0.0, -min_eig),
        },
        min_eigenvalue=min_eig,
    )


def max_feasible_t_mum(d: int, tol: float = _BISECT_TOL, basis: OperatorBasis | None = None) -> float:
    """Largest t keeping all d(d+1) effects PSD, located by bisection.

    Positivity of I/d + t F is concave in t, so feasibility is an interval
    and bisection is exact.  The returned value sits on the feasible side of
    the boundary within ``tol``.
    """
    if basis is None:
        basis = gellmann_basis(d)

    def feasible(t: float) -> bool:
        worst = min(
            float(hermitian_eigenvalues(p)[0])
            for basis_effects in _mum_effect_grid(d, t, basis)
            for p in basis_effects
        )
        return worst >= -PSD_TOL

    return _bisect_feasible(feasible, tol)


# ---------------------------------------------------------------------------
# general SIC construction


def _gsic_effect_list(d: int, t: float, basis: OperatorBasis) -> list[Matrix]:
    f_sum = np.sum(basis.ops, axis=0)
    eye = identity(d) / (d * d)
    effects = [eye + t * (f_sum - d * (d + 1.0) * f_a) for f_a in basis.ops]
    effects.append(eye + t * (d + 1.0) * f_sum)
    return effects


def gsic_a_closed_form(d: int, t: float) -> float:
    """a(t) = 1/d^3 + t^2 (d-1)(d+1)^3, the common effect purity."""
    return 1.0 / d**3 + t * t * (d - 1) * (d + 1.0) ** 3


def gsic_rank1_t(d: int) -> float:
    """The t solving a(t) = 1/d^2: t = (d(d+1))^(-3/2).

    PSD-feasible for d = 2 (yields a genuine SIC-POVM); not necessarily for
    larger d under this construction.
    """
    return (d * (d + 1.0)) ** -1.5


def build_gsic(d: int, t: float, basis: OperatorBasis | None = None) -> GsicSet:
    """Construct and validate the d^2 general SIC effects at scale t.

    t = 0 is rejected (a = 1/d^3 is excluded); negative t is allowed when
    PSD-feasible.
    """
    if d < 2:
        raise ValueError(f"dimension must be >= 2, got {d}")
    if t == 0.0:
        raise ValidationError("t=0 is degenerate: a = 1/d^3 violates 1/d^3 < a <= 1/d^2")
    if basis is None:
        basis = gellmann_basis(d)
    effects = _gsic_effect_list(d, t, basis)
    worst = math.inf
    worst_at = 0
    for alpha, p in enumerate(effects):
        lo = float(hermitian_eigenvalues(p)[0])
        if lo < worst:
            worst, worst_at = lo, alpha
    if worst < -PSD_TOL:
        raise FeasibilityError(
            f"t={t!r} infeasible: effect alpha={worst_at + 1} has min eigenvalue {worst:.3e}"
        )
    a = trace_product(effects[0], effects[0]).real
    s = GsicSet(d=d, t=t, a=a, effects=tuple(effects))
    report = validate_gsic(s, DEFAULT_TOL)
    if not report.passed:
        raise ValidationError(
            f"GSIC construction fails '{report.worst_relation}' "
            f"(deviation {report.deviations[report.worst_relation]:.3e})"
        )
    return s


def validate_gsic(s: GsicSet, tol: float = DEFAULT_TOL) -> ValidationReport:
    """Check every defining general-SIC relation, reporting max deviations."""
    d = s.d
    pairwise_target = (1.0 - d * s.a) / (d * (d * d - 1.0))
    total = np.sum(s.effects, axis=0)
    dev_complete = float(np.abs(total - identity(d)).max())
    dev_trace = 0.0
    dev_purity = 0.0
    dev_pair = 0.0
    min_eig = math.inf
    for alpha, p in enumerate(s.effects):
        dev_trace = max(dev_trace, abs(complex(np.trace(p)) - 1.0 / d))
        dev_purity = max(dev_purity, abs(trace_product(p, p) - s.a))
        min_eig = min(min_eig, float(hermitian_eigenvalues(p)[0]))
        for beta in range(alpha + 1, len(s.effects)):
            dev_pair = max(dev_pair, abs(trace_product(p, s.effects[beta]) - pairwise_target))
    return ValidationReport(
        kind="gsic",
        tol=tol,
        deviations={
            "completeness": dev_complete,
            "trace-1/d": dev_trace,
            "purity": dev_purity,
            "pairwise-overlap": dev_pair,
            "psd": max(0.0, -min_eig),
        },
        min_eigenvalue=min_eig,
    )


def max_feasible_t_gsic(d: int, tol: float = _BISECT_TOL, basis: OperatorBasis | None = None) -> float:
    """Largest positive t keeping all d^2 general-SIC effects PSD."""
    if basis is None:
        basis = gellmann_basis(d)

    def feasible(t: float) -> bool:
        worst = min(float(hermitian_eigenvalues(p)[0]) for p in _gsic_effect_list(d, t, basis))
        return worst >= -PSD_TOL

    return _bisect_feasible(feasible, tol)


def _bisect_feasible(feasible, tol: float) -> float:
    """Largest t with feasible(t) true, assuming an interval [0, t_max]."""
    lo, hi = 0.0, 0.25
    for _ in range(64):
        if not feasible(hi):
            break
        lo, hi = hi, 2.0 * hi
    else:
        raise RuntimeError("no infeasible upper bracket found")
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if feasible(mid):
            lo = mid
        else:
            hi = mid
    return lo
