import math

import numpy as np
import pytest

from steerkit.criteria import Direction, cached_gsic, cached_mum, j_gsic, j_mum, padded_qubit_effects, padded_qubit_grid
from steerkit.linalg import DensityMatrix, identity
from steerkit.oracle import (
    applicable_criteria,
    brute_force_j,
    consistency_suite,
    is_npt,
    min_pt_eigenvalue,
    mum_pairing,
)
from steerkit.states import (
    max_steerable_mixed,
    munro_mems,
    random_density,
    random_product_state,
    werner_derivative,
)


def test_product_states_are_ppt(rng):
    for dims in ((2, 2), (3, 2), (2, 4)):
        assert not is_npt(random_product_state(*dims, rng))


def test_bell_state_is_npt():
    bell = werner_derivative(1.0, math.pi / 4)
    assert is_npt(bell)
    assert abs(min_pt_eigenvalue(bell) + 0.5) < 1e-10


def test_werner_line_ppt_boundary_at_one_third():
    # theta = pi/4 reduces to the Werner state; PT min eigenvalue (1-3p)/4
    lo, hi = 0.0, 1.0
    for _ in range(40):
        mid = 0.5 * (lo + hi)
        if min_pt_eigenvalue(werner_derivative(mid, math.pi / 4)) < -1e-10:
            hi = mid
        else:
            lo = mid
    assert abs(0.5 * (lo + hi) - 1.0 / 3.0) < 1e-8


def test_pt_sides_share_spectrum(rng):
    rho = random_density(3, 2, rng)
    assert abs(min_pt_eigenvalue(rho, "a") - min_pt_eigenvalue(rho, "b")) < 1e-10


# ---------------------------------------------------------------------------
# brute-force J cross-checks


@pytest.mark.parametrize("dims", [(2, 2), (3, 2)])
def test_brute_force_matches_j_mum(dims, rng):
    d = dims[0]
    alice, bob = cached_mum(d), cached_mum(2).conjugated()
    flat_a = [p for basis in alice.effects for p in basis]
    flat_b = [p for basis in padded_qubit_grid(d, bob) for p in basis]
    for _ in range(50):
        rho = random_density(*dims, rng)
        got = brute_force_j(rho, flat_a, flat_b, mum_pairing(d))
        assert abs(got - j_mum(rho, alice, bob)) < 1e-11


def test_brute_force_matches_j_gsic_qubit_qudit(rng):
    alice, bob = cached_gsic(2).conjugated(), cached_gsic(3)
    flat_a = padded_qubit_effects(3, alice)
    flat_b = list(bob.effects)
    pairing = [(j, j) for j in range(9)]
    for _ in range(50):
        rho = random_density(2, 3, rng)
        got = brute_force_j(rho, flat_a, flat_b, pairing)
        assert abs(got - j_gsic(rho, alice, bob, Direction.ALICE_TO_BOB)) < 1e-11


@pytest.mark.parametrize("d", [2, 3, 4])
def test_brute_force_on_padded_identity_input(d):
    # rho = I/(2d): every basis slice contributes 1/2, total (d+1)/2
    rho = DensityMatrix(d, 2, identity(2 * d) / (2 * d))
    alice, bob = cached_mum(d), cached_mum(2).conjugated()
    flat_a = [p for basis in alice.effects for p in basis]
    flat_b = [p for basis in padded_qubit_grid(d, bob) for p in basis]
    got = brute_force_j(rho, flat_a, flat_b, mum_pairing(d))
    assert abs(got - (d + 1.0) / 2.0) < 1e-12


# ---------------------------------------------------------------------------
# consistency sweeps


def test_applicable_criteria_by_dims():
    assert len(applicable_criteria(2, 2)) == 5
    assert [c.value for c in applicable_criteria(3, 2)] == ["Thm1-MUM", "Thm3-GSIC"]
    assert [c.value for c in applicable_criteria(2, 3)] == ["Thm2-MUM", "Thm4-GSIC"]
    assert applicable_criteria(3, 3) == []


def test_consistency_on_family_lines():
    states = [(f"munro/C={c:.2f}", munro_mems(c)) for c in np.linspace(0, 1, 51)]
    states += [(f"msm/tau={t:.2f}", max_steerable_mixed(t)) for t in np.linspace(-1, 1, 51)]
    report = consistency_suite(states)
    assert report.passed, report.to_dict()
    assert report.checks_run == 5 * len(states)


def test_consistency_on_random_states(rng):
    states = [(f"rand22/{i}", random_density(2, 2, rng)) for i in range(50)]
    states += [(f"rand32/{i}", random_density(3, 2, rng)) for i in range(25)]
    states += [(f"rand23/{i}", random_density(2, 3, rng)) for i in range(25)]
    report = consistency_suite(states)
    assert report.passed, report.to_dict()


def test_consistency_detects_planted_violation():
    # a PPT state with a fabricated "detected" verdict cannot be produced via
    # the public API, so check the report plumbing directly instead
    report = consistency_suite([("mixed", DensityMatrix(2, 2, identity(4) / 4))])
    assert report.passed and report.worst_case == ""
