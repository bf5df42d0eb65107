"""Cyclic Jacobi diagonalization for complex Hermitian matrices, pure Python.

Fallback twin of the compiled kernel in ``_jacobi.pyx``; same rotation
sequence and convergence rule, so both lanes give matching eigenvalues.
Selected at import time by :mod:`steerkit.linalg` when the extension is
unavailable or ``STEERKIT_PURE_PYTHON`` is set.
"""

from __future__ import annotations

import math

import numpy as np

COMPILED = False


def _off_norm(a: np.ndarray) -> float:
    """Frobenius norm of the off-diagonal part (summed directly; subtracting
    the diagonal mass from the total would cancel catastrophically)."""
    d = np.abs(a) ** 2
    np.fill_diagonal(d, 0.0)
    return math.sqrt(d.sum())


def jacobi_eigenvalues(a: np.ndarray, rel_tol: float = 1e-14, max_sweeps: int = 100) -> np.ndarray:
    """Eigenvalues of a Hermitian matrix by cyclic two-sided complex rotations.

    ``a`` (complex128, square) is destroyed in place.  One sweep visits every
    upper-triangle pair (p, q) in row order and applies the unitary plane
    rotation that zeroes a[p, q].  Convergence threshold: the off-diagonal
    Frobenius norm must drop below ``rel_tol * max(1, ||A||_F)``.

    Returns the eigenvalues sorted ascending.
    """
    n = a.shape[0]
    if n <= 1:
        return np.real(np.diag(a)).copy()

    threshold = rel_tol * max(1.0, math.sqrt((np.abs(a) ** 2).sum()))
    converged = False
    for _ in range(max_sweeps):
        if _off_norm(a) <= threshold:
            converged = True
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                r = abs(apq)
                if r == 0.0:
                    continue
                phase = apq / r
                phi = 0.5 * math.atan2(2.0 * r, a[q, q].real - a[p, p].real)
                c = math.cos(phi)
                s = math.sin(phi)
                # column update (A <- A J), then row update (A <- J^dagger A)
                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = c * col_p - s * phase.conjugate() * col_q
                a[:, q] = s * phase * col_p + c * col_q
                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = c * row_p - s * phase * row_q
                a[q, :] = s * phase.conjugate() * row_p + c * row_q
    if not converged and _off_norm(a) > threshold:
        raise RuntimeError(f"Jacobi rotations did not converge in {max_sweeps} sweeps")

    vals = np.real(np.diag(a)).copy()
    vals.sort()
    return vals
