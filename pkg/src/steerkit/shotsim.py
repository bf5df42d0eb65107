"""Finite-shot estimation of the MUM steering functional.

Models the experiment directly: for each informative setting b = 1..3 both
parties measure their b-th POVM jointly, outcomes are drawn from the Born
joint distribution, and the plug-in estimate of the setting's contribution
is formed from the empirical frequencies (diagonal correlation terms for
the two matched outcomes, half the qudit marginal for padded outcomes).
Settings beyond the third pair only with I/2, so their contribution is the
constant 1/2 independent of the state; by default they consume no shots.

Randomness comes from the counter-based 64-bit Philox generator, keyed by
(seed, setting index): per-setting histograms are reproducible on their own
and independent of evaluation order.  Outcomes are drawn by inverse CDF
over the flattened table, ties in the cumulative sums breaking toward the
lower index.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .criteria import Direction, _split_mum_sides
from .errors import NumericalIntegrityError
from .linalg import DensityMatrix, identity
from .measurements import MumSet


@dataclass(frozen=True)
class ShotConfig:
    shots_per_setting: int
    seed: int
    sample_padded: bool = False  # also spend shots on the constant settings

    def __post_init__(self):
        if self.shots_per_setting < 1:
            raise ValueError("shots_per_setting must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 bits")


@dataclass(frozen=True)
class ShotEstimate:
    """Plug-in estimate of J with per-setting outcome histograms.

    ``per_setting_counts[b]`` has one row per Alice outcome and one column
    per Bob outcome for the b-th joint setting (0-based).
    """

    j_hat: float
    std_error: float
    per_setting_counts: dict[int, np.ndarray]
    settings_used: list[int]
    shots_per_setting: int
    seed: int

    def __post_init__(self):
        if self.std_error < 0:
            raise ValueError("std_error must be >= 0")
        for b, counts in self.per_setting_counts.items():
            if int(counts.sum()) != self.shots_per_setting:
                raise ValueError(f"setting {b}: counts sum {counts.sum()} != shots")

    def to_dict(self) -> dict:
        return {
            "j_hat": self.j_hat,
            "std_error": self.std_error,
            "settings_used": list(self.settings_used),
            "shots_per_setting": self.shots_per_setting,
            "seed": self.seed,
            "per_setting_counts": {str(b): c.tolist() for b, c in self.per_setting_counts.items()},
        }


class ShotVerdict(str, enum.Enum):
    DETECTED = "Detected"
    NOT_DETECTED = "NotDetected"
    INCONCLUSIVE = "Inconclusive"


def joint_distribution(rho: DensityMatrix, alice_effects, bob_effects) -> np.ndarray:
    """Born joint outcome table p[n, m] = Tr[(A_n x B_m) rho].

    Both effect lists must each resolve the identity within 1e-10.  Entries
    below -1e-8 raise; tiny negative round-off is clamped to zero and the
    table renormalized to unit total.
    """
    for name, effects, dim in (("alice", alice_effects, rho.dim_a), ("bob", bob_effects, rho.dim_b)):
        total = np.sum(effects, axis=0)
        if np.abs(total - identity(dim)).max() > 1e-10:
            raise ValueError(f"{name} effects do not sum to the identity")
    rho4 = rho.mat.reshape(rho.dim_a, rho.dim_b, rho.dim_a, rho.dim_b)
    table = np.empty((len(alice_effects), len(bob_effects)))
    for n, a_op in enumerate(alice_effects):
        for m, b_op in enumerate(bob_effects):
            p = complex(np.einsum("ik,jl,klij->", a_op, b_op, rho4))
            if abs(p.imag) > 1e-8 or p.real < -1e-8:
                raise NumericalIntegrityError(f"outcome ({n},{m}) probability {p} is corrupt")
            table[n, m] = max(p.real, 0.0)
    total = table.sum()
    if abs(total - 1.0) > 1e-10:
        raise NumericalIntegrityError(f"joint table total {total} far from 1")
    return table / total


def _setting_rng(seed: int, setting: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=np.array([seed, setting], dtype=np.uint64)))


def _sample_counts(table: np.ndarray, shots: int, rng: np.random.Generator) -> np.ndarray:
    flat = table.ravel()
    cum = np.cumsum(flat)
    cum[-1] = 1.0  # exact upper edge; total already verified
    idx = np.searchsorted(cum, rng.random(shots), side="left")
    return np.bincount(idx, minlength=flat.size).reshape(table.shape)


def estimate_j(
    rho: DensityMatrix,
    alice_set: MumSet,
    bob_set: MumSet,
    cfg: ShotConfig,
    orientation=Direction.BOB_TO_ALICE,
) -> ShotEstimate:
    """Estimate the MUM J functional from simulated measurement shots.

    Standard error propagates per-setting multinomial variance of the
    weighted frequency sums; padded settings contribute zero variance.
    """
    qudit, qubit, qubit_on_a = _split_mum_sides(rho, alice_set, bob_set, orientation)
    d = qudit.d
    shots = cfg.shots_per_setting

    # estimator weights on the (qudit outcome, qubit outcome) table
    weights = np.full((d, 2), 0.5)
    weights[:2, :] = np.eye(2)

    j_hat = 0.0
    var = 0.0
    counts_by_setting: dict[int, np.ndarray] = {}
    settings = list(range(3)) + (list(range(3, d + 1)) if cfg.sample_padded else [])
    for b in settings:
        padded = b >= 3
        qubit_effects = [identity(2) / 2.0] * 2 if padded else list(qubit.effects[b])
        qudit_effects = list(qudit.effects[b])
        if qubit_on_a:
            table = joint_distribution(rho, qubit_effects, qudit_effects)
            counts = _sample_counts(table, shots, _setting_rng(cfg.seed, b))
            freq_qq = (counts / shots).T
        else:
            table = joint_distribution(rho, qudit_effects, qubit_effects)
            counts = _sample_counts(table, shots, _setting_rng(cfg.seed, b))
            freq_qq = counts / shots
        counts_by_setting[b] = counts
        if padded:
            j_hat += 0.5  # exact: weighted sum of all frequencies is 1/2
            continue
        c_b = float((weights * freq_qq).sum())
        j_hat += c_b
        var += max(float((weights**2 * freq_qq).sum()) - c_b**2, 0.0) / shots
    # unsampled padded settings are the exact constant 1/2 each
    if not cfg.sample_padded:
        j_hat += 0.5 * (d + 1 - 3)
    return ShotEstimate(
        j_hat=j_hat,
        std_error=float(np.sqrt(var)),
        per_setting_counts=counts_by_setting,
        settings_used=settings,
        shots_per_setting=shots,
        seed=cfg.seed,
    )


def verdict_with_confidence(est: ShotEstimate, threshold: float, z: float) -> ShotVerdict:
    """z-band decision: detected only when the whole band clears the threshold."""
    if z <= 0:
        raise ValueError("z must be positive")
    if est.j_hat - z * est.std_error > threshold:
        return ShotVerdict.DETECTED
    if est.j_hat + z * est.std_error < threshold:
        return ShotVerdict.NOT_DETECTED
    return ShotVerdict.INCONCLUSIVE
