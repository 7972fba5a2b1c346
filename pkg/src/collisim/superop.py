"""Superoperators in the column-stacking convention:
vec(A rho B) = (B^T kron A) vec(rho)."""

from dataclasses import dataclass

import numpy as np

from .linalg import as_matrix
from .tolerances import DEFAULT


def vec(rho) -> np.ndarray:
    """Column-stack a matrix into a vector."""
    return as_matrix(rho).reshape(-1, order="F")


def unvec(v, dim: int) -> np.ndarray:
    return np.asarray(v, dtype=complex).reshape(dim, dim, order="F")


@dataclass(frozen=True)
class Superoperator:
    """Dense D^2 x D^2 matrix acting on column-stacked density operators."""

    matrix: np.ndarray
    dim: int
    convention: str = "column-stacking"

    def __post_init__(self):
        m = as_matrix(self.matrix)
        if m.shape != (self.dim ** 2, self.dim ** 2):
            raise ValueError(f"superoperator shape {m.shape} does not match dim {self.dim}")
        object.__setattr__(self, "matrix", m)

    def __call__(self, rho) -> np.ndarray:
        return unvec(self.matrix @ vec(rho), self.dim)

    def power(self, n: int) -> "Superoperator":
        return Superoperator(np.linalg.matrix_power(self.matrix, n), self.dim)

    def compose(self, other: "Superoperator") -> "Superoperator":
        return Superoperator(self.matrix @ other.matrix, self.dim)


def choi_matrix(s: Superoperator) -> np.ndarray:
    """Choi matrix sum_ab |a><b| kron phi[|a><b|]; PSD iff the map is
    completely positive, trace = D for trace-preserving maps."""
    d = s.dim
    out = np.zeros((d * d, d * d), dtype=complex)
    unit = np.zeros((d, d), dtype=complex)
    for a in range(d):
        for b in range(d):
            unit[a, b] = 1.0
            block = s(unit)
            unit[a, b] = 0.0
            out[a * d:(a + 1) * d, b * d:(b + 1) * d] = block
    return out


def is_trace_preserving(s: Superoperator, atol=None) -> float:
    """Max-abs residual of vec(I)^dag S - vec(I)^dag (0 for TP channels)."""
    ident = vec(np.eye(s.dim, dtype=complex))
    return float(np.max(np.abs(ident.conj() @ s.matrix - ident.conj())))


def channel_checks(s: Superoperator, tol=None):
    """(trace-preservation residual, Choi min eigenvalue)."""
    tol = DEFAULT if tol is None else tol
    tp = is_trace_preserving(s)
    choi = choi_matrix(s)
    min_eig = float(np.min(np.linalg.eigvalsh(0.5 * (choi + choi.conj().T))))
    return tp, min_eig
