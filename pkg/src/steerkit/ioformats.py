"""Row-major complex-array JSON encoding shared by state and measurement files.

A matrix entry is a two-element [re, im] list; a matrix is a list of rows.
Decoding rejects non-finite numbers.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import StateFormatError
from .linalg import Matrix


def matrix_to_rows(m: Matrix) -> list[list[list[float]]]:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(m, dtype=np.complex128)]


def rows_to_matrix(rows) -> Matrix:
    try:
        m = np.array([[complex(e[0], e[1]) for e in row] for row in rows], dtype=np.complex128)
    except (TypeError, ValueError, IndexError) as exc:
        raise StateFormatError(f"malformed matrix rows: {exc}") from exc
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise StateFormatError(f"matrix rows give shape {m.shape}, expected square")
    if not np.all(np.isfinite(m.view(np.float64))):
        raise StateFormatError("matrix contains NaN or Inf entries")
    return m


def reject_non_finite(x: float, what: str) -> float:
    x = float(x)
    if not math.isfinite(x):
        raise StateFormatError(f"{what} is not finite")
    return x
