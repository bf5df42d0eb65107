"""Dense complex linear algebra for operators on small Hilbert spaces.

Matrices are plain ``numpy.ndarray`` (complex128, square, row-major).
Bipartite operators follow one fixed convention throughout the package:
subsystem A is the left (slow) tensor factor, so a composite index reads
``i * dim_b + j`` with ``i`` on A and ``j`` on B.

The Hermitian eigensolver is our own cyclic Jacobi kernel: the compiled
extension when available, otherwise the pure-Python twin.  Set
``STEERKIT_PURE_PYTHON=1`` to force the fallback.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .errors import StateFormatError

if os.environ.get("STEERKIT_PURE_PYTHON"):
    from . import _jacobi_py as _kernel
else:
    try:
        from . import _jacobi as _kernel  # type: ignore[no-redef]
    except ImportError:
        from . import _jacobi_py as _kernel  # type: ignore[no-redef]

USING_COMPILED_KERNEL: bool = _kernel.COMPILED

Matrix = np.ndarray

HERMITICITY_TOL = 1e-10
TRACE_TOL = 1e-10
PSD_TOL = 1e-10  # an operator counts as PSD iff min eigenvalue >= -PSD_TOL

SIGMA_1 = np.array([[0, 1], [1, 0]], dtype=np.complex128)
SIGMA_2 = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
SIGMA_3 = np.array([[1, 0], [0, -1]], dtype=np.complex128)
PAULIS = (SIGMA_1, SIGMA_2, SIGMA_3)


def identity(d: int) -> Matrix:
    return np.eye(d, dtype=np.complex128)


def as_matrix(m) -> Matrix:
    """Coerce to a square complex128 array."""
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    return a


def tensor(a: Matrix, b: Matrix) -> Matrix:
    """Kronecker product with A as the left (slow) factor."""
    return np.kron(a, b)


def conjugate(m: Matrix) -> Matrix:
    """Entrywise complex conjugate."""
    return np.conj(m)


def trace_product(a: Matrix, b: Matrix) -> complex:
    """Tr[a b] as sum a_ij b_ji, without forming the matrix product."""
    if a.shape != b.shape:
        raise ValueError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return complex(np.einsum("ij,ji->", a, b))


def partial_trace(m: Matrix, dim_a: int, dim_b: int, keep: str) -> Matrix:
    """Trace out one subsystem of a bipartite operator.

    ``keep`` is "a" or "b"; the result acts on the kept subsystem and has
    the same trace as ``m``.
    """
    if m.shape != (dim_a * dim_b, dim_a * dim_b):
        raise ValueError(f"matrix of dim {m.shape[0]} does not factor as {dim_a}x{dim_b}")
    r = m.reshape(dim_a, dim_b, dim_a, dim_b)
    if keep == "a":
        return np.einsum("ijkj->ik", r)
    if keep == "b":
        return np.einsum("ijil->jl", r)
    raise ValueError(f"keep must be 'a' or 'b', got {keep!r}")


def partial_transpose(m: Matrix, dim_a: int, dim_b: int, side: str) -> Matrix:
    """Transpose one tensor factor of a bipartite operator."""
    if m.shape != (dim_a * dim_b, dim_a * dim_b):
        raise ValueError(f"matrix of dim {m.shape[0]} does not factor as {dim_a}x{dim_b}")
    r = m.reshape(dim_a, dim_b, dim_a, dim_b)
    if side == "a":
        out = r.transpose(2, 1, 0, 3)
    elif side == "b":
        out = r.transpose(0, 3, 2, 1)
    else:
        raise ValueError(f"side must be 'a' or 'b', got {side!r}")
    return out.reshape(dim_a * dim_b, dim_a * dim_b)


def hermiticity_defect(m: Matrix) -> float:
    """Max entrywise deviation from the conjugate transpose."""
    return float(np.abs(m - m.conj().T).max())


def hermitian_eigenvalues(m: Matrix, rel_tol: float = 1e-14) -> np.ndarray:
    """Real eigenvalues of a Hermitian matrix, sorted ascending.

    Cyclic two-sided Jacobi rotations to convergence (off-diagonal Frobenius
    norm below ``rel_tol * max(1, ||m||_F)``).  The input must be Hermitian
    within HERMITICITY_TOL; it is symmetrized exactly before iterating, which
    shifts eigenvalues by at most half the defect.
    """
    m = as_matrix(m)
    if hermiticity_defect(m) > HERMITICITY_TOL:
        raise ValueError(
            f"matrix is not Hermitian (defect {hermiticity_defect(m):.3e} > {HERMITICITY_TOL})"
        )
    work = np.ascontiguousarray((m + m.conj().T) / 2.0)
    return _kernel.jacobi_eigenvalues(work, rel_tol, 100)


def min_eigenvalue(m: Matrix) -> float:
    return float(hermitian_eigenvalues(m)[0])


@dataclass(frozen=True)
class DensityMatrix:
    """A validated bipartite quantum state.

    The matrix must be Hermitian within 1e-10 entrywise, have unit trace
    within 1e-10 and minimum eigenvalue >= -1e-10.  Subsystem A is the left
    tensor factor of dimension ``dim_a``.
    """

    dim_a: int
    dim_b: int
    mat: Matrix

    def __post_init__(self):
        m = as_matrix(self.mat)
        object.__setattr__(self, "mat", m)
        if self.dim_a < 1 or self.dim_b < 1:
            raise StateFormatError(f"invalid subsystem dims ({self.dim_a}, {self.dim_b})")
        if m.shape[0] != self.dim_a * self.dim_b:
            raise StateFormatError(
                f"matrix dim {m.shape[0]} does not equal dim_a*dim_b = {self.dim_a * self.dim_b}"
            )
        defect = hermiticity_defect(m)
        if defect > HERMITICITY_TOL:
            raise StateFormatError(f"not Hermitian: defect {defect:.3e} > {HERMITICITY_TOL}")
        tr = complex(np.trace(m))
        if abs(tr - 1.0) > TRACE_TOL:
            raise StateFormatError(f"trace {tr} differs from 1 by more than {TRACE_TOL}")
        lo = min_eigenvalue(m)
        if lo < -PSD_TOL:
            raise StateFormatError(f"not positive semidefinite: min eigenvalue {lo:.3e}")

    @property
    def dim(self) -> int:
        return self.dim_a * self.dim_b

    def reduced_a(self) -> Matrix:
        return partial_trace(self.mat, self.dim_a, self.dim_b, keep="a")

    def reduced_b(self) -> Matrix:
        return partial_trace(self.mat, self.dim_a, self.dim_b, keep="b")
