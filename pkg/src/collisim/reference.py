"""Exact semigroup oracle: vectorized Liouvillian, exp(L t), and sampled
lower bounds on the 1->1 distance between the exact channel and the
collision map.

The 1->1 induced norm itself is never computed exactly; every reported
epsilon is a lower bound obtained by maximizing the output trace norm over
random pure states.
"""

from dataclasses import dataclass

import numpy as np

from .engine import DIM_CAP, DimensionCapError, extract_map
from .linalg import dagger, matrix_exp, trace_norm
from .model import GKLSModel
from .superop import Superoperator, unvec, vec
from .tolerances import DEFAULT

DEFAULT_SAMPLES = 64


@dataclass(frozen=True)
class ErrorReport:
    """Sampled lower bounds on the global and single-step errors."""

    epsilon_g_lower: float
    epsilon_s_lower: float
    per_state: tuple  # (sample index, global trace distance) pairs
    n: int
    dt: float
    t: float
    seed: int
    samples: int


def vectorize_liouvillian(model: GKLSModel, dim_cap: int = DIM_CAP) -> Superoperator:
    """Column-stacked matrix of the GKLS generator:
    L = -i(I x H - H^T x I)
        + sum_jk gamma_jk [conj(F_k) x F_j - (I x F_k^dag F_j
                           + (F_k^dag F_j)^T x I)/2]."""
    d = model.dim
    if d * d > dim_cap:
        raise DimensionCapError(f"superoperator dimension {d * d} exceeds cap {dim_cap}")
    ident = np.eye(d, dtype=complex)
    h = model.hamiltonian
    mat = -1j * (np.kron(ident, h) - np.kron(h.T, ident))
    ops = model.embedded_ops()
    gamma = model.kossakowski
    for j, fj in enumerate(ops):
        for k, fk in enumerate(ops):
            g = gamma[j, k]
            if abs(g) <= DEFAULT.zero_entry:
                continue
            anti = dagger(fk) @ fj
            mat = mat + g * (
                np.kron(fk.conj(), fj)
                - 0.5 * (np.kron(ident, anti) + np.kron(anti.T, ident))
            )
    return Superoperator(matrix=mat, dim=d)


def semigroup(model: GKLSModel, t: float, liouvillian: Superoperator = None) -> Superoperator:
    """exp(L t) as a channel matrix."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    if liouvillian is None:
        liouvillian = vectorize_liouvillian(model)
    return Superoperator(matrix_exp(t * liouvillian.matrix), liouvillian.dim)


def sample_pure_states(dim: int, samples: int, seed: int):
    """Haar-uniform pure-state density matrices (deterministic per seed)."""
    rng = np.random.default_rng(seed)
    states = []
    for _ in range(samples):
        psi = rng.normal(size=dim) + 1j * rng.normal(size=dim)
        psi /= np.linalg.norm(psi)
        states.append(np.outer(psi, psi.conj()))
    return states


def sampled_distance(a: Superoperator, b: Superoperator, samples: int, seed: int):
    """Lower bound on ||a - b||_{1->1}: max over sampled pure states of the
    output trace-norm difference.  Returns (max, per-state list)."""
    delta = a.matrix - b.matrix
    per_state = []
    for i, rho in enumerate(sample_pure_states(a.dim, samples, seed)):
        dist = trace_norm(unvec(delta @ vec(rho), a.dim))
        per_state.append((i, float(dist)))
    return max(d for _, d in per_state), per_state


def measure_errors(circuit, model: GKLSModel, n: int, samples: int = DEFAULT_SAMPLES,
                   seed: int = 0) -> ErrorReport:
    """Sampled lower bounds on the global error (exact semigroup at t = n*dt
    versus the n-fold collision map) and the single-step error."""
    if n < 1:
        raise ValueError("n must be at least 1")
    dt = circuit.params.dt
    t = n * dt
    liou = vectorize_liouvillian(model)
    phi = extract_map(circuit)
    exact_step = semigroup(model, dt, liouvillian=liou)
    exact_full = semigroup(model, t, liouvillian=liou)
    eps_s, _ = sampled_distance(exact_step, phi, samples, seed)
    eps_g, per_state = sampled_distance(exact_full, phi.power(n), samples, seed)
    return ErrorReport(
        epsilon_g_lower=float(eps_g),
        epsilon_s_lower=float(eps_s),
        per_state=tuple(per_state),
        n=n, dt=dt, t=t, seed=seed, samples=samples,
    )
