import math

import numpy as np
import pytest

from steerkit.criteria import Direction, cached_mum, detect, j_mum
from steerkit.linalg import DensityMatrix, identity
from steerkit.shotsim import (
    ShotConfig,
    ShotEstimate,
    ShotVerdict,
    estimate_j,
    joint_distribution,
    verdict_with_confidence,
)
from steerkit.states import munro_mems, random_density, random_product_state, werner_derivative

MIXED_22 = DensityMatrix(2, 2, identity(4) / 4)


def _qubit_sets():
    alice = cached_mum(2)
    return alice, alice.conjugated()


# ---------------------------------------------------------------------------
# joint distribution


def test_joint_distribution_factorizes_on_products(rng):
    alice, bob = _qubit_sets()
    rho = random_product_state(2, 2, rng)
    for b in range(3):
        table = joint_distribution(rho, list(alice.effects[b]), list(bob.effects[b]))
        marg_a = table.sum(axis=1)
        marg_b = table.sum(axis=0)
        assert np.abs(table - np.outer(marg_a, marg_b)).max() < 1e-12


def test_joint_distribution_marginals_match_reduced_state(rng):
    alice, bob = _qubit_sets()
    rho = random_density(2, 2, rng)
    rho_a = rho.reduced_a()
    for b in range(3):
        table = joint_distribution(rho, list(alice.effects[b]), list(bob.effects[b]))
        for n in range(2):
            expected = np.trace(alice.effects[b][n] @ rho_a).real
            assert abs(table[n].sum() - expected) < 1e-12


def test_bell_state_perfectly_correlated_under_conjugate_pairing():
    alice, bob = _qubit_sets()
    bell = werner_derivative(1.0, math.pi / 4)
    for b in range(3):
        table = joint_distribution(bell, list(alice.effects[b]), list(bob.effects[b]))
        assert abs(table[0, 0] - 0.5) < 1e-12
        assert abs(table[1, 1] - 0.5) < 1e-12
        assert abs(table[0, 1]) < 1e-12 and abs(table[1, 0]) < 1e-12


def test_joint_distribution_requires_povm():
    alice, _ = _qubit_sets()
    bad = [identity(2) / 3.0, identity(2) / 3.0]
    with pytest.raises(ValueError, match="identity"):
        joint_distribution(MIXED_22, list(alice.effects[0]), bad)


# ---------------------------------------------------------------------------
# estimator


def test_seed_determinism():
    alice, bob = _qubit_sets()
    cfg = ShotConfig(shots_per_setting=2000, seed=99)
    rho = munro_mems(0.8)
    e1 = estimate_j(rho, alice, bob, cfg)
    e2 = estimate_j(rho, alice, bob, cfg)
    assert e1.j_hat == e2.j_hat and e1.std_error == e2.std_error
    for b in e1.per_setting_counts:
        assert np.array_equal(e1.per_setting_counts[b], e2.per_setting_counts[b])


def test_counts_shape_and_totals():
    alice, bob = _qubit_sets()
    est = estimate_j(munro_mems(0.8), alice, bob, ShotConfig(5000, 3))
    assert est.settings_used == [0, 1, 2]
    for counts in est.per_setting_counts.values():
        assert counts.shape == (2, 2)
        assert counts.sum() == 5000


def test_large_shot_consistency_with_exact_j():
    alice, bob = _qubit_sets()
    rho = munro_mems(0.8)
    exact = j_mum(rho, alice, bob)
    est = estimate_j(rho, alice, bob, ShotConfig(10**6, 12345))
    assert abs(est.j_hat - exact) < 5 * est.std_error


def test_maximally_mixed_concentrates_at_three_halves():
    alice, bob = _qubit_sets()
    est = estimate_j(MIXED_22, alice, bob, ShotConfig(10**5, 7))
    assert abs(est.j_hat - 1.5) < 5 * est.std_error + 1e-12


def test_padded_settings_use_no_shots_by_default(rng):
    alice3, bob = cached_mum(3), cached_mum(2).conjugated()
    rho = random_density(3, 2, rng)
    est = estimate_j(rho, alice3, bob, ShotConfig(3000, 5))
    assert est.settings_used == [0, 1, 2]
    full = estimate_j(rho, alice3, bob, ShotConfig(3000, 5, sample_padded=True))
    assert full.settings_used == [0, 1, 2, 3]
    # padded slices are state-independent constants, so the estimates agree
    assert abs(est.j_hat - full.j_hat) < 1e-12
    assert full.per_setting_counts[3].shape == (3, 2)


def test_qubit_qudit_orientation(rng):
    alice, bob3 = cached_mum(2).conjugated(), cached_mum(3)
    rho = random_density(2, 3, rng)
    exact = j_mum(rho, alice, bob3, Direction.ALICE_TO_BOB)
    est = estimate_j(rho, alice, bob3, ShotConfig(10**6, 21), Direction.ALICE_TO_BOB)
    assert abs(est.j_hat - exact) < 5 * est.std_error
    assert est.per_setting_counts[0].shape == (2, 3)


def test_empirical_cells_converge_at_five_sigma(rng):
    alice, bob = _qubit_sets()
    rho = munro_mems(0.75)
    shots = 10**5
    est = estimate_j(rho, alice, bob, ShotConfig(shots, 31))
    for b in range(3):
        table = joint_distribution(rho, list(alice.effects[b]), list(bob.effects[b]))
        freq = est.per_setting_counts[b] / shots
        bound = 5.0 * np.sqrt(table * (1 - table) / shots) + 1e-12
        assert (np.abs(freq - table) <= bound).all()


def test_estimator_unbiased_over_seeds():
    alice, bob = _qubit_sets()
    rho = munro_mems(0.8)
    exact = j_mum(rho, alice, bob)
    shots = 10**4
    estimates = [estimate_j(rho, alice, bob, ShotConfig(shots, seed)) for seed in range(200)]
    mean_j = np.mean([e.j_hat for e in estimates])
    combined_se = np.sqrt(np.mean([e.std_error**2 for e in estimates]) / len(estimates))
    assert abs(mean_j - exact) < 3 * combined_se


# ---------------------------------------------------------------------------
# config and verdicts


def test_shot_config_validation():
    with pytest.raises(ValueError):
        ShotConfig(0, 1)
    with pytest.raises(ValueError):
        ShotConfig(10, -1)


def test_shot_estimate_invariants():
    with pytest.raises(ValueError):
        ShotEstimate(
            j_hat=1.0,
            std_error=-0.1,
            per_setting_counts={},
            settings_used=[],
            shots_per_setting=10,
            seed=0,
        )
    with pytest.raises(ValueError, match="counts sum"):
        ShotEstimate(
            j_hat=1.0,
            std_error=0.1,
            per_setting_counts={0: np.array([[3, 3], [3, 3]])},
            settings_used=[0],
            shots_per_setting=10,
            seed=0,
        )


def _fake_estimate(j_hat, std_error):
    return ShotEstimate(
        j_hat=j_hat,
        std_error=std_error,
        per_setting_counts={},
        settings_used=[],
        shots_per_setting=1,
        seed=0,
    )


def test_verdict_bands():
    assert verdict_with_confidence(_fake_estimate(5.0, 0.01), 2.0, 5.0) == ShotVerdict.DETECTED
    assert verdict_with_confidence(_fake_estimate(1.0, 0.01), 2.0, 5.0) == ShotVerdict.NOT_DETECTED
    assert verdict_with_confidence(_fake_estimate(2.0, 0.01), 2.0, 5.0) == ShotVerdict.INCONCLUSIVE
    assert verdict_with_confidence(_fake_estimate(2.0, 0.0), 2.0, 5.0) == ShotVerdict.INCONCLUSIVE
    with pytest.raises(ValueError):
        verdict_with_confidence(_fake_estimate(2.0, 0.01), 2.0, 0.0)


def test_detected_munro_with_generous_shots():
    alice, bob = _qubit_sets()
    rho = munro_mems(0.9)
    v = detect(rho, "Thm1-MUM")
    hits = 0
    for seed in range(100):
        est = estimate_j(rho, alice, bob, ShotConfig(10**5, seed))
        if verdict_with_confidence(est, v.threshold, 5.0) == ShotVerdict.DETECTED:
            hits += 1
    assert hits >= 99
