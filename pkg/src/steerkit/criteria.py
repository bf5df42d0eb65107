"""Steering detection functionals and thresholds.

Four measurement-based criteria plus the two-qubit correlation shortcut:

  MUM, qudit-qubit  (steers Bob -> Alice):
     J = sum_b sum_n Tr[(P_n^(b) x R_n^(b)) rho] over the qudit grid, where
     R matches the qubit effects for b <= 3, n <= 2 and is I/2 elsewhere;
     threshold sqrt(k1+1) sqrt(4 k2+4+(d+3)(d-2)) / (2 mu) - (d+1)(1-mu)/(2 mu).
  MUM, qubit-qudit  (Alice -> Bob): mirrored sum, kappa roles swapped.
  GSIC, qudit-qubit: J = sum_j Tr[(P_j x R_j) rho], R_j = Q_j for j <= 4
     else I/4; threshold sqrt((a1 d^2+1)/(d(d+1))) sqrt((4 a2+1)/6 +
     (d^2-4)/16) / mu - (1-mu)/(4 mu).
  GSIC, qubit-qudit: mirrored, a roles swapped.
  Two-qubit H shortcut: H = Tr[(s1 x s1 - s2 x s2 + s3 x s3) rho] with
     detection iff H > 1/mu, both ways.

A state is flagged iff J exceeds its threshold strictly.  mu defaults to
its maximal allowed value 1/sqrt(3), which never detects fewer states than
any smaller mu (the thresholds are non-increasing in mu).

Detection power depends on how the qubit-side effects are paired with the
qudit grid; by default the qubit-side set is entrywise conjugated, the
pairing that makes the two-qubit J collapse to (3 + (2 kappa - 1) H)/2.
"""

from __future__ import annotations

import enum
import functools
import math
from dataclasses import dataclass

import numpy as np

from .errors import NumericalIntegrityError
from .linalg import PAULIS, DensityMatrix, Matrix, identity, tensor, trace_product
from .measurements import (
    GsicSet,
    MumSet,
    build_gsic,
    build_mums,
    gsic_rank1_t,
    max_feasible_t_gsic,
    max_feasible_t_mum,
    mum_projective_t,
)

MU_MAX = 1.0 / math.sqrt(3.0)
IMAG_RESIDUE_TOL = 1e-8


class Criterion(str, enum.Enum):
    THM1_MUM = "Thm1-MUM"
    THM2_MUM = "Thm2-MUM"
    THM3_GSIC = "Thm3-GSIC"
    THM4_GSIC = "Thm4-GSIC"
    COR1_H = "Cor1-H"


class Direction(str, enum.Enum):
    BOB_TO_ALICE = "BobToAlice"
    ALICE_TO_BOB = "AliceToBob"
    BOTH_WAYS = "BothWays"


@dataclass(frozen=True)
class SteeringVerdict:
    criterion: Criterion
    direction: Direction
    j_value: float
    threshold: float
    mu: float
    detected: bool

    def __post_init__(self):
        _check_mu(self.mu)
        if self.detected != (self.j_value > self.threshold):
            raise ValueError("detected flag inconsistent with j_value vs threshold")

    @property
    def margin(self) -> float:
        """Signed distance above the threshold; detection is strict."""
        return self.j_value - self.threshold

    def to_dict(self) -> dict:
        return {
            "criterion": self.criterion.value,
            "direction": self.direction.value,
            "mu": self.mu,
            "j": self.j_value,
            "threshold": self.threshold,
            "margin": self.margin,
            "detected": self.detected,
        }


def _check_mu(mu: float) -> None:
    if not 0.0 < mu <= MU_MAX:
        raise ValueError(f"mu={mu!r} outside (0, 1/sqrt(3)]")


def _real_within(z: complex, tol: float = IMAG_RESIDUE_TOL) -> float:
    if abs(z.imag) > tol:
        raise NumericalIntegrityError(f"imaginary residue {z.imag:.3e} exceeds {tol}")
    return z.real


def padded_qubit_grid(d: int, qubit_set: MumSet) -> list[list[Matrix]]:
    """Qubit-side effects aligned with a (d+1) x d qudit grid.

    Equal to the qubit effect for b <= 3 and n <= 2, and to I/2 everywhere
    the qubit side has no matching setting or outcome.
    """
    if qubit_set.d != 2:
        raise ValueError(f"padding requires a qubit MUM set, got d={qubit_set.d}")
    half = identity(2) / 2.0
    return [
        [qubit_set.effects[b][n] if b < 3 and n < 2 else half for n in range(d)]
        for b in range(d + 1)
    ]


def _split_mum_sides(rho, alice_set, bob_set, orientation):
    orientation = Direction(orientation)
    if orientation == Direction.BOB_TO_ALICE:
        qudit, qubit, qubit_on_a = alice_set, bob_set, False
        d_qudit, d_qubit = rho.dim_a, rho.dim_b
    elif orientation == Direction.ALICE_TO_BOB:
        qudit, qubit, qubit_on_a = bob_set, alice_set, True
        d_qudit, d_qubit = rho.dim_b, rho.dim_a
    else:
        raise ValueError("orientation must be BobToAlice or AliceToBob")
    if d_qubit != 2 or qubit.d != 2:
        raise ValueError("the steered-from side must be a qubit with a d=2 measurement set")
    if qudit.d != d_qudit:
        raise ValueError(f"qudit set dimension {qudit.d} does not match state dimension {d_qudit}")
    return qudit, qubit, qubit_on_a


def j_mum_by_setting(
    rho: DensityMatrix, alice_set: MumSet, bob_set: MumSet, orientation=Direction.BOB_TO_ALICE
) -> np.ndarray:
    """Per-setting contributions to the MUM J sum, one value per qudit basis b."""
    qudit, qubit, qubit_on_a = _split_mum_sides(rho, alice_set, bob_set, orientation)
    d = qudit.d
    rho4 = rho.mat.reshape(rho.dim_a, rho.dim_b, rho.dim_a, rho.dim_b)
    r_grid = padded_qubit_grid(d, qubit)
    totals = np.empty(d + 1, dtype=np.complex128)
    for b in range(d + 1):
        acc = 0.0 + 0.0j
        for n in range(d):
            big, small = qudit.effects[b][n], r_grid[b][n]
            a_op, b_op = (small, big) if qubit_on_a else (big, small)
            acc += np.einsum("ik,jl,klij->", a_op, b_op, rho4)
        totals[b] = acc
    _real_within(complex(totals.sum()))
    return totals.real.copy()


def j_mum(
    rho: DensityMatrix, alice_set: MumSet, bob_set: MumSet, orientation=Direction.BOB_TO_ALICE
) -> float:
    """The MUM steering functional J (double sum over the qudit grid)."""
    return float(j_mum_by_setting(rho, alice_set, bob_set, orientation).sum())


def threshold_mum(d: int, kappa1: float, kappa2: float, mu: float) -> float:
    """MUM detection threshold; kappa1 on the qudit side, kappa2 on the qubit.

    For the qubit-qudit orientation the kappa roles swap, i.e. pass
    (kappa_qudit, kappa_qubit) here in either case.
    """
    _check_mu(mu)
    for name, kappa, dim in (("kappa1", kappa1, d), ("kappa2", kappa2, 2)):
        if not 1.0 / dim - 1e-12 < kappa <= 1.0 + 1e-12:
            raise ValueError(f"{name}={kappa!r} outside (1/{dim}, 1]")
    lead = math.sqrt(kappa1 + 1.0) * math.sqrt(4.0 * kappa2 + 4.0 + (d + 3.0) * (d - 2.0))
    return lead / (2.0 * mu) - (d + 1.0) * (1.0 - mu) / (2.0 * mu)


_H_OBSERVABLE = (
    tensor(PAULIS[0], PAULIS[0]) - tensor(PAULIS[1], PAULIS[1]) + tensor(PAULIS[2], PAULIS[2])
)


def h_correlation(rho: DensityMatrix) -> float:
    """H = Tr[(s1 x s1 - s2 x s2 + s3 x s3) rho] for a two-qubit state."""
    if (rho.dim_a, rho.dim_b) != (2, 2):
        raise ValueError(f"H is defined for two-qubit states, got {rho.dim_a}x{rho.dim_b}")
    return _real_within(trace_product(_H_OBSERVABLE, rho.mat))


def detect_corollary1(rho: DensityMatrix, mu: float = MU_MAX) -> SteeringVerdict:
    """Two-qubit both-way detection: flagged iff H(rho) > 1/mu.

    Evaluated on the state as given; no local-unitary normal form is
    searched, so the verdict is basis-dependent exactly as the correlation
    combination is written.
    """
    _check_mu(mu)
    h = h_correlation(rho)
    threshold = 1.0 / mu
    return SteeringVerdict(
        criterion=Criterion.COR1_H,
        direction=Direction.BOTH_WAYS,
        j_value=h,
        threshold=threshold,
        mu=mu,
        detected=h > threshold,
    )


# ---------------------------------------------------------------------------
# general SIC criteria


def _split_gsic_sides(rho, alice_set, bob_set, orientation):
    orientation = Direction(orientation)
    if orientation == Direction.BOB_TO_ALICE:
        qudit, qubit, qubit_on_a = alice_set, bob_set, False
        d_qudit, d_qubit = rho.dim_a, rho.dim_b
    elif orientation == Direction.ALICE_TO_BOB:
        qudit, qubit, qubit_on_a = bob_set, alice_set, True
        d_qudit, d_qubit = rho.dim_b, rho.dim_a
    else:
        raise ValueError("orientation must be BobToAlice or AliceToBob")
    if d_qubit != 2 or qubit.d != 2:
        raise ValueError("the steered-from side must be a qubit with a d=2 GSIC set (4 effects)")
    if qudit.d != d_qudit:
        raise ValueError(f"GSIC set dimension {qudit.d} does not match state dimension {d_qudit}")
    return qudit, qubit, qubit_on_a


def padded_qubit_effects(d: int, qubit_set: GsicSet) -> list[Matrix]:
    """Qubit-side GSIC effects aligned with d^2 qudit effects; I/4 beyond j=4."""
    if qubit_set.d != 2:
        raise ValueError(f"padding requires a qubit GSIC set, got d={qubit_set.d}")
    quarter = identity(2) / 4.0
    return [qubit_set.effects[j] if j < 4 else quarter for j in range(d * d)]


def j_gsic_by_effect(
    rho: DensityMatrix, alice_set: GsicSet, bob_set: GsicSet, orientation=Direction.BOB_TO_ALICE
) -> np.ndarray:
    """Per-effect contributions to the GSIC J sum, one value per qudit index."""
    qudit, qubit, qubit_on_a = _split_gsic_sides(rho, alice_set, bob_set, orientation)
    d = qudit.d
    rho4 = rho.mat.reshape(rho.dim_a, rho.dim_b, rho.dim_a, rho.dim_b)
    r_effects = padded_qubit_effects(d, qubit)
    totals = np.empty(d * d, dtype=np.complex128)
    for j in range(d * d):
        big, small = qudit.effects[j], r_effects[j]
        a_op, b_op = (small, big) if qubit_on_a else (big, small)
        totals[j] = np.einsum("ik,jl,klij->", a_op, b_op, rho4)
    _real_within(complex(totals.sum()))
    return totals.real.copy()


def j_gsic(
    rho: DensityMatrix, alice_set: GsicSet, bob_set: GsicSet, orientation=Direction.BOB_TO_ALICE
) -> float:
    """The GSIC steering functional J (sum over d^2 paired effects)."""
    return float(j_gsic_by_effect(rho, alice_set, bob_set, orientation).sum())


def threshold_gsic(d: int, a1: float, a2: float, mu: float, orientation=Direction.BOB_TO_ALICE) -> float:
    """GSIC detection threshold.

    a1 belongs to Alice's set and a2 to Bob's; the qudit-side parameter feeds
    the (a d^2 + 1)/(d (d+1)) factor and the qubit-side one the
    (4 a + 1)/6 + (d^2 - 4)/16 factor, per the stated orientation.
    """
    _check_mu(mu)
    orientation = Direction(orientation)
    if orientation == Direction.BOB_TO_ALICE:
        a_qudit, a_qubit = a1, a2
    elif orientation == Direction.ALICE_TO_BOB:
        a_qudit, a_qubit = a2, a1
    else:
        raise ValueError("orientation must be BobToAlice or AliceToBob")
    for name, a, dim in (("qudit-side a", a_qudit, d), ("qubit-side a", a_qubit, 2)):
        if not 1.0 / dim**3 - 1e-15 < a <= 1.0 / dim**2 + 1e-15:
            raise ValueError(f"{name}={a!r} outside (1/{dim}^3, 1/{dim}^2]")
    lead = math.sqrt((a_qudit * d * d + 1.0) / (d * (d + 1.0))) * math.sqrt(
        (4.0 * a_qubit + 1.0) / 6.0 + (d * d - 4.0) / 16.0
    )
    return lead / mu - (1.0 - mu) / (4.0 * mu)


# ---------------------------------------------------------------------------
# default measurement sets and dispatch


@functools.lru_cache(maxsize=None)
def _default_t_mum(d: int) -> float:
    return mum_projective_t(d) if d == 2 else max_feasible_t_mum(d)


@functools.lru_cache(maxsize=None)
def _default_t_gsic(d: int) -> float:
    return gsic_rank1_t(d) if d == 2 else max_feasible_t_gsic(d)


@functools.lru_cache(maxsize=128)
def cached_mum(d: int, t: float | None = None) -> MumSet:
    """Memoized MUM construction; t=None picks the documented default
    (projective for d=2, the max feasible t otherwise)."""
    return build_mums(d, _default_t_mum(d) if t is None else t)


@functools.lru_cache(maxsize=128)
def cached_gsic(d: int, t: float | None = None) -> GsicSet:
    """Memoized GSIC construction; t=None picks rank-1 for d=2, max-t otherwise."""
    return build_gsic(d, _default_t_gsic(d) if t is None else t)


def default_sets_for(
    criterion: Criterion,
    dims: tuple[int, int],
    t_qudit: float | None = None,
    t_qubit: float | None = None,
    conjugate_qubit: bool = True,
):
    """(alice_set, bob_set) for a criterion on a state of the given dims.

    The qubit-side set is conjugated by default; see the module docstring.
    Returns (None, None) for the H-correlation criterion, which needs no
    constructed sets.
    """
    criterion = Criterion(criterion)
    dim_a, dim_b = dims
    if criterion == Criterion.COR1_H:
        return None, None
    if criterion in (Criterion.THM1_MUM, Criterion.THM2_MUM):
        build = cached_mum
    else:
        build = cached_gsic
    if criterion in (Criterion.THM1_MUM, Criterion.THM3_GSIC):
        if dim_b != 2:
            raise ValueError(f"{criterion.value} needs a qubit on subsystem B, got dim {dim_b}")
        alice, bob = build(dim_a, t_qudit), build(2, t_qubit)
        if conjugate_qubit:
            bob = bob.conjugated()
    else:
        if dim_a != 2:
            raise ValueError(f"{criterion.value} needs a qubit on subsystem A, got dim {dim_a}")
        alice, bob = build(2, t_qubit), build(dim_b, t_qudit)
        if conjugate_qubit:
            alice = alice.conjugated()
    return alice, bob


def detect(
    rho: DensityMatrix,
    criterion: Criterion | str,
    mu: float = MU_MAX,
    *,
    alice_set=None,
    bob_set=None,
    t_qudit: float | None = None,
    t_qubit: float | None = None,
    conjugate_qubit: bool = True,
) -> SteeringVerdict:
    """Evaluate one criterion on a state and assemble the verdict.

    Measurement sets default to the cached constructions at the documented
    default scales; pass both sets or neither (explicit sets take precedence
    over t overrides).
    """
    criterion = Criterion(criterion)
    _check_mu(mu)
    if criterion == Criterion.COR1_H:
        return detect_corollary1(rho, mu)
    if (alice_set is None) != (bob_set is None):
        raise ValueError("provide both alice_set and bob_set, or neither")
    if alice_set is None:
        alice_set, bob_set = default_sets_for(
            criterion, (rho.dim_a, rho.dim_b), t_qudit, t_qubit, conjugate_qubit
        )
    if criterion == Criterion.THM1_MUM:
        direction = Direction.BOB_TO_ALICE
        j = j_mum(rho, alice_set, bob_set, direction)
        threshold = threshold_mum(rho.dim_a, alice_set.kappa, bob_set.kappa, mu)
    elif criterion == Criterion.THM2_MUM:
        direction = Direction.ALICE_TO_BOB
        j = j_mum(rho, alice_set, bob_set, direction)
        # kappa roles swap: the qudit-side parameter leads
        threshold = threshold_mum(rho.dim_b, bob_set.kappa, alice_set.kappa, mu)
    elif criterion == Criterion.THM3_GSIC:
        direction = Direction.BOB_TO_ALICE
        j = j_gsic(rho, alice_set, bob_set, direction)
        threshold = threshold_gsic(rho.dim_a, alice_set.a, bob_set.a, mu, direction)
    else:
        direction = Direction.ALICE_TO_BOB
        j = j_gsic(rho, alice_set, bob_set, direction)
        threshold = threshold_gsic(rho.dim_b, alice_set.a, bob_set.a, mu, direction)
    return SteeringVerdict(
        criterion=criterion,
        direction=direction,
        j_value=j,
        threshold=threshold,
        mu=mu,
        detected=j > threshold,
    )
