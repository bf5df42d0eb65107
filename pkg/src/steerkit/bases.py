"""Orthonormal Hermitian traceless operator bases.

The generalized Gell-Mann construction, normalized so Tr[F_a F_b] = delta_ab.
Ordering is fixed for reproducibility: symmetric pairs, then antisymmetric
pairs, then diagonal operators, each block lexicographic in (i, j) / k.
For d = 2 this yields sigma_1/sqrt(2), sigma_2/sqrt(2), sigma_3/sqrt(2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linalg import Matrix


@dataclass(frozen=True)
class OperatorBasis:
    """d^2 - 1 Hilbert-Schmidt-orthonormal, Hermitian, traceless operators."""

    dim: int
    ops: tuple[Matrix, ...]

    def __post_init__(self):
        if len(self.ops) != self.dim**2 - 1:
            raise ValueError(
                f"basis for dim {self.dim} needs {self.dim**2 - 1} operators, got {len(self.ops)}"
            )


def gellmann_basis(d: int) -> OperatorBasis:
    """Generalized Gell-Mann basis of dimension d in the documented order."""
    if d < 2:
        raise ValueError(f"dimension must be >= 2, got {d}")
    ops: list[Matrix] = []
    # symmetric block: (|i><j| + |j><i|) / sqrt(2), i < j
    for i in range(d):
        for j in range(i + 1, d):
            m = np.zeros((d, d), dtype=np.complex128)
            m[i, j] = m[j, i] = 1.0 / math.sqrt(2.0)
            ops.append(m)
    # antisymmetric block: -i(|i><j| - |j><i|) / sqrt(2), i < j
    for i in range(d):
        for j in range(i + 1, d):
            m = np.zeros((d, d), dtype=np.complex128)
            m[i, j] = -1j / math.sqrt(2.0)
            m[j, i] = 1j / math.sqrt(2.0)
            ops.append(m)
    # diagonal block: diag(1, ..., 1, -k, 0, ..., 0) / sqrt(k (k+1)), k ones
    for k in range(1, d):
        m = np.zeros((d, d), dtype=np.complex128)
        norm = math.sqrt(k * (k + 1.0))
        for i in range(k):
            m[i, i] = 1.0 / norm
        m[k, k] = -k / norm
        ops.append(m)
    return OperatorBasis(dim=d, ops=tuple(ops))


def relabel_for_mum(basis: OperatorBasis, d: int) -> list[list[Matrix]]:
    """Arrange the flat basis into the (b, n) grid used by the MUM construction.

    Returns d+1 groups of d-1 operators; the grid is b-major, so flat index
    (b-1)*(d-1) + (n-1) holds F_{n,b}.
    """
    if len(basis.ops) != d**2 - 1:
        raise ValueError(f"basis size {len(basis.ops)} does not match d={d}")
    return [list(basis.ops[b * (d - 1) : (b + 1) * (d - 1)]) for b in range(d + 1)]


def flatten_mum_labels(grid: list[list[Matrix]]) -> list[Matrix]:
    """Inverse of :func:`relabel_for_mum`."""
    return [f for group in grid for f in group]
