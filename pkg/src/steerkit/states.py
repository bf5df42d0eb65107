"""Factories for the two-qubit state families used in the detection examples,
general Bloch-form assembly, noisy-mixture construction and state file I/O.

Product basis order is |00>, |01>, |10>, |11> everywhere; the displayed
family matrices are transcribed row by row in that order.
"""

from __future__ import annotations

import json
import math
import os

import numpy as np

from . import ioformats
from .errors import StateFormatError
from .linalg import PAULIS, SIGMA_1, SIGMA_2, SIGMA_3, DensityMatrix, identity, min_eigenvalue, tensor


def werner_derivative(p: float, theta: float) -> DensityMatrix:
    """Non-maximally entangled pure state mixed with white noise.

    p |psi_theta><psi_theta| + (1-p) I/4 with
    |psi_theta> = cos(theta)|00> + sin(theta)|11>, p in [0,1],
    theta in [0, pi/4].
    """
    if not 0.0 <= p <= 1.0:
        raise StateFormatError(f"p={p!r} outside [0, 1]")
    if not 0.0 <= theta <= math.pi / 4 + 1e-12:
        raise StateFormatError(f"theta={theta!r} outside [0, pi/4]")
    psi = np.zeros(4, dtype=np.complex128)
    psi[0] = math.cos(theta)
    psi[3] = math.sin(theta)
    mat = p * np.outer(psi, psi.conj()) + (1.0 - p) * identity(4) / 4.0
    return DensityMatrix(2, 2, mat)


def max_steerable_mixed(tau: float) -> DensityMatrix:
    """The one-parameter family mixing the two even/odd Bell blocks.

    Entries are (1-tau)/4 on the outer block and (1+tau)/4 on the inner
    block, tau in [-1, 1]; tau = -1 is the pure (|00>+|11>)/sqrt(2) state.
    """
    if not -1.0 <= tau <= 1.0:
        raise StateFormatError(f"tau={tau!r} outside [-1, 1]")
    lo = (1.0 - tau) / 4.0
    hi = (1.0 + tau) / 4.0
    mat = np.array(
        [
            [lo, 0.0, 0.0, lo],
            [0.0, hi, hi, 0.0],
            [0.0, hi, hi, 0.0],
            [lo, 0.0, 0.0, lo],
        ],
        dtype=np.complex128,
    )
    return DensityMatrix(2, 2, mat)


def munro_mems(c: float) -> DensityMatrix:
    """Maximally entangled mixed state at concurrence c in [0, 1].

    Diagonal (h, 1-2h, 0, h) with corners c/2, where h = 1/3 below c = 2/3
    and h = c/2 above; both branches meet at h = 1/3.
    """
    if not 0.0 <= c <= 1.0:
        raise StateFormatError(f"concurrence C={c!r} outside [0, 1]")
    h = 1.0 / 3.0 if c < 2.0 / 3.0 else c / 2.0
    mat = np.zeros((4, 4), dtype=np.complex128)
    mat[0, 0] = mat[3, 3] = h
    mat[1, 1] = 1.0 - 2.0 * h
    mat[0, 3] = mat[3, 0] = c / 2.0
    return DensityMatrix(2, 2, mat)


def bloch_two_qubit(a_vec, b_vec, c_vec) -> DensityMatrix:
    """Assemble (I + a.sigma x I + I x b.sigma + sum_i c_i sigma_i x sigma_i)/4.

    Raises StateFormatError when the parameters give a non-positive matrix.
    """
    a_vec = np.asarray(a_vec, dtype=float)
    b_vec = np.asarray(b_vec, dtype=float)
    c_vec = np.asarray(c_vec, dtype=float)
    if a_vec.shape != (3,) or b_vec.shape != (3,) or c_vec.shape != (3,):
        raise StateFormatError("a, b, c must each be 3-vectors")
    mat = tensor(identity(2), identity(2)).astype(np.complex128)
    for i in range(3):
        mat = mat + a_vec[i] * tensor(PAULIS[i], identity(2))
        mat = mat + b_vec[i] * tensor(identity(2), PAULIS[i])
        mat = mat + c_vec[i] * tensor(PAULIS[i], PAULIS[i])
    return DensityMatrix(2, 2, mat / 4.0)


def bloch_vectors(rho: DensityMatrix) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Recover (a, b, c) via a_i = Tr[(sigma_i x I) rho] etc."""
    if (rho.dim_a, rho.dim_b) != (2, 2):
        raise ValueError("Bloch decomposition defined for two-qubit states only")
    a = np.array([np.trace(tensor(s, identity(2)) @ rho.mat).real for s in PAULIS])
    b = np.array([np.trace(tensor(identity(2), s) @ rho.mat).real for s in PAULIS])
    c = np.array([np.trace(tensor(s, s) @ rho.mat).real for s in PAULIS])
    return a, b, c


def tau_state(rho: DensityMatrix, mu: float, side: str = "b") -> DensityMatrix:
    """Noisy mixture mu*rho + (1-mu) * (reduced state x I/2).

    side="b" replaces subsystem B by the maximally mixed qubit (the
    Bob-to-Alice construction); side="a" mirrors it.  Requires the replaced
    side to be a qubit and mu in (0, 1].
    """
    if not 0.0 < mu <= 1.0:
        raise ValueError(f"mu={mu!r} outside (0, 1]")
    if side == "b":
        if rho.dim_b != 2:
            raise ValueError("side='b' requires a qubit on subsystem B")
        mixed = tensor(rho.reduced_a(), identity(2) / 2.0)
    elif side == "a":
        if rho.dim_a != 2:
            raise ValueError("side='a' requires a qubit on subsystem A")
        mixed = tensor(identity(2) / 2.0, rho.reduced_b())
    else:
        raise ValueError(f"side must be 'a' or 'b', got {side!r}")
    return DensityMatrix(rho.dim_a, rho.dim_b, mu * rho.mat + (1.0 - mu) * mixed)


# ---------------------------------------------------------------------------
# random states (test plumbing: uniform pure vectors plus mixing, nothing more)


def random_pure(dim_a: int, dim_b: int, rng: np.random.Generator) -> DensityMatrix:
    v = rng.normal(size=dim_a * dim_b) + 1j * rng.normal(size=dim_a * dim_b)
    v /= np.linalg.norm(v)
    return DensityMatrix(dim_a, dim_b, np.outer(v, v.conj()))


def random_density(dim_a: int, dim_b: int, rng: np.random.Generator, n_mix: int = 0) -> DensityMatrix:
    """Mixture of n_mix (default: dim) uniform pure states with random weights."""
    d = dim_a * dim_b
    n_mix = n_mix or d
    weights = rng.random(n_mix)
    weights /= weights.sum()
    mat = np.zeros((d, d), dtype=np.complex128)
    for w in weights:
        mat += w * random_pure(dim_a, dim_b, rng).mat
    return DensityMatrix(dim_a, dim_b, mat)


def random_product_state(dim_a: int, dim_b: int, rng: np.random.Generator) -> DensityMatrix:
    rho_a = random_density(dim_a, 1, rng).mat
    rho_b = random_density(dim_b, 1, rng).mat
    return DensityMatrix(dim_a, dim_b, tensor(rho_a, rho_b))


# ---------------------------------------------------------------------------
# file format: {"dims": [dA, dB], "rows": [[[re, im], ...], ...]}


def save_density(path: str | os.PathLike, rho: DensityMatrix) -> None:
    payload = {"dims": [rho.dim_a, rho.dim_b], "rows": ioformats.matrix_to_rows(rho.mat)}
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh)
        fh.write("\n")


def load_density(path: str | os.PathLike) -> DensityMatrix:
    """Parse and validate a density-matrix file; rejects NaN/Inf and any
    matrix failing the Hermiticity/trace/positivity checks, naming the
    violated invariant."""
    try:
        with open(path, encoding="utf-8") as fh:
            payload = json.load(
                fh, parse_constant=lambda s: (_ for _ in ()).throw(StateFormatError(f"non-finite constant {s!r}"))
            )
    except OSError:
        raise
    except (json.JSONDecodeError, StateFormatError) as exc:
        raise StateFormatError(f"{path}: {exc}") from exc
    if not isinstance(payload, dict) or "dims" not in payload or "rows" not in payload:
        raise StateFormatError(f"{path}: expected an object with 'dims' and 'rows'")
    dims = payload["dims"]
    if not (isinstance(dims, list) and len(dims) == 2):
        raise StateFormatError(f"{path}: 'dims' must be [dimA, dimB]")
    mat = ioformats.rows_to_matrix(payload["rows"])
    try:
        return DensityMatrix(int(dims[0]), int(dims[1]), mat)
    except StateFormatError as exc:
        raise StateFormatError(f"{path}: {exc}") from exc


# ---------------------------------------------------------------------------
# family registry (CLI surface)

FAMILY_PARAMS = {
    "werner-derivative": {"p": (0.0, 1.0), "theta": (0.0, math.pi / 4)},
    "max-steerable-mixed": {"tau": (-1.0, 1.0)},
    "munro-mems": {"C": (0.0, 1.0)},
    "bloch": {k: (-1.0, 1.0) for k in ("ax", "ay", "az", "bx", "by", "bz", "c1", "c2", "c3")},
}


def make_family_state(family: str, params: dict[str, float]) -> DensityMatrix:
    """Instantiate a named family; unknown names or parameters raise
    StateFormatError."""
    spec = FAMILY_PARAMS.get(family)
    if spec is None:
        raise StateFormatError(f"unknown family {family!r}; known: {sorted(FAMILY_PARAMS)}")
    unknown = set(params) - set(spec)
    if unknown:
        raise StateFormatError(f"unknown parameter(s) {sorted(unknown)} for family {family!r}")
    params = {k: ioformats.reject_non_finite(v, k) for k, v in params.items()}
    if family == "werner-derivative":
        return werner_derivative(params.get("p", 0.0), params.get("theta", 0.0))
    if family == "max-steerable-mixed":
        return max_steerable_mixed(params.get("tau", 0.0))
    if family == "munro-mems":
        return munro_mems(params.get("C", 0.0))
    a = [params.get(k, 0.0) for k in ("ax", "ay", "az")]
    b = [params.get(k, 0.0) for k in ("bx", "by", "bz")]
    c = [params.get(k, 0.0) for k in ("c1", "c2", "c3")]
    return bloch_two_qubit(a, b, c)


def min_eigenvalue_of(rho: DensityMatrix) -> float:
    """Convenience passthrough used in reports."""
    return min_eigenvalue(rho.mat)
