"""Dense complex-matrix substrate: tensor-factor bookkeeping, local-operator
embedding, partial trace, matrix exponential, and the norms used everywhere
else.

Conventions fixed here, once:
  * matrices are dense complex128 numpy arrays, row-major;
  * in Kronecker products, factor 0 is the most significant index, i.e.
    ``embed(A, [0], dims=[d0, d1])`` equals ``kron(A, eye(d1))``.
"""

import math
from dataclasses import dataclass

import numpy as np

from .tolerances import DEFAULT

SIGMA_PLUS = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)   # |e><g|
SIGMA_MINUS = np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex)  # |g><e|
SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
NUMBER_OP = np.array([[1.0, 0.0], [0.0, 0.0]], dtype=complex)    # excited-state projector

# Qubit basis ordering: index 0 = excited |e>, index 1 = ground |g>,
# so sigma^- = |g><e| lowers and sigma_z = diag(1, -1).


@dataclass(frozen=True)
class TensorLayout:
    """Ordered local dimensions of a tensor-product space (system factors
    first, then any ancilla factors)."""

    factor_dims: tuple

    def __post_init__(self):
        dims = tuple(int(d) for d in self.factor_dims)
        if not dims or any(d < 1 for d in dims):
            raise ValueError(f"factor dims must be positive, got {dims}")
        object.__setattr__(self, "factor_dims", dims)

    @property
    def dim(self) -> int:
        return math.prod(self.factor_dims)

    @property
    def n_factors(self) -> int:
        return len(self.factor_dims)

    def dims_at(self, sites) -> int:
        return math.prod(self.factor_dims[s] for s in sites)

    def check_sites(self, sites):
        if len(set(sites)) != len(sites):
            raise ValueError(f"duplicate site indices in {sites}")
        for s in sites:
            if not 0 <= s < self.n_factors:
                raise ValueError(f"site {s} out of range for {self.n_factors} factors")


def as_matrix(a) -> np.ndarray:
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        raise ValueError(f"expected a matrix, got shape {m.shape}")
    return m


def dagger(a: np.ndarray) -> np.ndarray:
    return a.conj().T


def is_hermitian(a, atol=None) -> bool:
    a = as_matrix(a)
    atol = DEFAULT.hermiticity if atol is None else atol
    return a.shape[0] == a.shape[1] and np.max(np.abs(a - dagger(a))) <= atol


def is_unitary(a, atol=None) -> bool:
    a = as_matrix(a)
    atol = DEFAULT.unitarity if atol is None else atol
    if a.shape[0] != a.shape[1]:
        return False
    return np.max(np.abs(dagger(a) @ a - np.eye(a.shape[0]))) <= atol


def embed(op, sites, layout: TensorLayout) -> np.ndarray:
    """Act with ``op`` on the listed tensor factors and with the identity on
    all the others.

    ``op`` must live on the product of the dims at ``sites``, with the sites
    ordered as given (most significant first).
    """
    op = as_matrix(op)
    sites = list(sites)
    layout.check_sites(sites)
    d_op = layout.dims_at(sites)
    if op.shape != (d_op, d_op):
        raise ValueError(f"operator shape {op.shape} does not match dims at sites {sites}")
    others = [i for i in range(layout.n_factors) if i not in sites]
    d_rest = layout.dims_at(others)
    full = np.kron(op, np.eye(d_rest, dtype=complex))
    order = sites + others
    shape = [layout.factor_dims[i] for i in order]
    tensor = full.reshape(shape + shape)
    inv = np.argsort(order)
    perm = list(inv) + [layout.n_factors + i for i in inv]
    return np.ascontiguousarray(tensor.transpose(perm).reshape(layout.dim, layout.dim))


def partial_trace(state, layout: TensorLayout, keep) -> np.ndarray:
    """Trace out every factor not in ``keep``; the kept factors stay in
    layout order."""
    state = as_matrix(state)
    keep = sorted(keep)
    layout.check_sites(keep)
    n = layout.n_factors
    if state.shape != (layout.dim, layout.dim):
        raise ValueError(f"state shape {state.shape} does not match layout dim {layout.dim}")
    shape = list(layout.factor_dims)
    tensor = state.reshape(shape + shape)
    traced = 0
    for site in range(n - 1, -1, -1):
        if site in keep:
            continue
        tensor = np.trace(tensor, axis1=site, axis2=site + n - traced)
        traced += 1
    d_keep = layout.dims_at(keep)
    return tensor.reshape(d_keep, d_keep)


def matrix_exp(a) -> np.ndarray:
    """exp(A) by scaling and squaring with a truncated Taylor kernel.

    The input is scaled until its 1-norm is below 0.5, the series is summed to
    machine precision, and the result is squared back up.  Accurate to ~1e-12
    relative for the well-conditioned (skew-Hermitian or small) exponents used
    here, up to operator norms of ~50.
    """
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise ValueError("matrix_exp requires a square matrix")
    n = a.shape[0]
    nrm = np.linalg.norm(a, 1)
    squarings = 0
    if nrm > 0.5:
        squarings = int(math.ceil(math.log2(nrm / 0.5)))
    b = a / (2 ** squarings)
    out = np.eye(n, dtype=complex)
    term = np.eye(n, dtype=complex)
    for k in range(1, 80):
        term = term @ b / k
        out = out + term
        if np.linalg.norm(term, 1) <= 1e-17 * np.linalg.norm(out, 1):
            break
    for _ in range(squarings):
        out = out @ out
    return out


def trace_norm(a) -> float:
    """Sum of singular values, Tr sqrt(A^dag A)."""
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise ValueError("trace_norm requires a square matrix")
    return float(np.sum(np.linalg.svd(a, compute_uv=False)))


def op_norm(a) -> float:
    """Largest singular value."""
    return float(np.linalg.norm(as_matrix(a), 2))
