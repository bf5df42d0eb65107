# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Cyclic Jacobi diagonalization for complex Hermitian matrices, compiled kernel.

Hot loop of the whole package: every PSD check, PPT test and feasibility
bisection lands here.  ``_jacobi_py.py`` is the pure-Python twin with the
same rotation sequence and convergence rule.
"""

from libc.math cimport atan2, cos, sin, sqrt

import numpy as np

COMPILED = True


cdef inline double _sq_abs(double complex z) noexcept nogil:
    return z.real * z.real + z.imag * z.imag


cdef double _off_norm_sq(double complex[:, ::1] a, Py_ssize_t n) noexcept nogil:
    cdef Py_ssize_t i, j
    cdef double acc = 0.0
    for i in range(n):
        for j in range(n):
            if i != j:
                acc += _sq_abs(a[i, j])
    return acc


def jacobi_eigenvalues(double complex[:, ::1] a, double rel_tol=1e-14, int max_sweeps=100):
    """Eigenvalues of a Hermitian matrix by cyclic two-sided complex rotations.

    ``a`` (complex128, C-contiguous, square) is destroyed in place.
    Convergence threshold: off-diagonal Frobenius norm below
    ``rel_tol * max(1, ||A||_F)``.  Returns eigenvalues sorted ascending.
    """
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t p, q, i, sweep
    cdef double r, phi, c, s, fro, threshold
    cdef double complex apq, phase, phc, tp, tq
    cdef bint converged = False

    if n <= 1:
        out = np.empty(n, dtype=np.float64)
        if n == 1:
            out[0] = a[0, 0].real
        return out

    fro = 0.0
    for p in range(n):
        for q in range(n):
            fro += _sq_abs(a[p, q])
    fro = sqrt(fro)
    threshold = rel_tol * (fro if fro > 1.0 else 1.0)

    with nogil:
        for sweep in range(max_sweeps):
            if sqrt(_off_norm_sq(a, n)) <= threshold:
                converged = True
                break
            for p in range(n - 1):
                for q in range(p + 1, n):
                    apq = a[p, q]
                    r = sqrt(_sq_abs(apq))
                    if r == 0.0:
                        continue
                    phase = apq / r
                    phc = phase.conjugate()
                    phi = 0.5 * atan2(2.0 * r, a[q, q].real - a[p, p].real)
                    c = cos(phi)
                    s = sin(phi)
                    # column update (A <- A J)
                    for i in range(n):
                        tp = a[i, p]
                        tq = a[i, q]
                        a[i, p] = c * tp - s * phc * tq
                        a[i, q] = s * phase * tp + c * tq
                    # row update (A <- J^dagger A)
                    for i in range(n):
                        tp = a[p, i]
                        tq = a[q, i]
                        a[p, i] = c * tp - s * phase * tq
                        a[q, i] = s * phc * tp + c * tq
        if not converged and sqrt(_off_norm_sq(a, n)) <= threshold:
            converged = True

    if not converged:
        raise RuntimeError(f"Jacobi rotations did not converge in {max_sweeps} sweeps")

    vals = np.empty(n, dtype=np.float64)
    for p in range(n):
        vals[p] = a[p, p].real
    vals.sort()
    return vals
