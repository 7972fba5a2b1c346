"""Execute collision circuits: build the per-step joint unitary, apply the
quantum map with fresh ancillas each step, and extract the step channel as a
superoperator."""

from dataclasses import dataclass

import numpy as np

from . import kernels
from .compiler import CollisionCircuit
from .linalg import (SIGMA_PLUS, TensorLayout, as_matrix, dagger, embed,
                     matrix_exp, op_norm)
from .superop import Superoperator, vec
from .tolerances import DEFAULT

DIM_CAP = 4096


class DimensionCapError(ValueError):
    pass


@dataclass(frozen=True)
class StepUnitary:
    matrix: np.ndarray
    dim_system: int
    dim_env: int
    env_weights: np.ndarray


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray
    states: tuple  # density operators at t = n*dt


def gate_generator(circuit: CollisionCircuit, gate) -> np.ndarray:
    """Hermitian joint-space generator of one gate:
    amplitude * F sigma^+ + h.c. on the gate's ancilla."""
    layout = circuit.joint_layout
    anc_factor = circuit.system_layout.n_factors + gate.ancilla
    f_emb = embed(gate.operator.matrix, list(gate.operator.sites), layout)
    raise_emb = embed(SIGMA_PLUS, [anc_factor], layout)
    half = gate.amplitude * (f_emb @ raise_emb)
    return half + dagger(half)


def build_step_unitary(circuit: CollisionCircuit, dim_cap: int = DIM_CAP) -> StepUnitary:
    """Product of per-gate exponentials in execution order, then the system
    gate."""
    layout = circuit.joint_layout
    if layout.dim > dim_cap:
        raise DimensionCapError(f"joint dimension {layout.dim} exceeds cap {dim_cap}")
    p = circuit.params
    u = np.eye(layout.dim, dtype=complex)
    for gate in circuit.gates:
        gen = gate_generator(circuit, gate)
        u = matrix_exp(-1j * p.g_I * gate.fraction * p.dt * gen) @ u
    if circuit.system_hamiltonian is not None:
        h_emb = embed(
            as_matrix(circuit.system_hamiltonian),
            list(range(circuit.system_layout.n_factors)),
            layout,
        )
        u = matrix_exp(-1j * p.dt * h_emb) @ u
    dim_s = circuit.system_layout.dim
    dim_e = layout.dim // dim_s
    return StepUnitary(matrix=u, dim_system=dim_s, dim_env=dim_e,
                       env_weights=circuit.env_weights())


def step(circuit: CollisionCircuit, rho, unitary: StepUnitary = None,
         check_state: bool = True) -> np.ndarray:
    """One application of the collision map with fresh ancillas."""
    rho = np.ascontiguousarray(as_matrix(rho))
    if unitary is None:
        unitary = build_step_unitary(circuit)
    if check_state and abs(np.trace(rho).real - 1.0) > DEFAULT.state_check:
        import warnings
        warnings.warn(f"input trace {np.trace(rho):.6g} deviates from 1", stacklevel=2)
    return kernels.apply_step(unitary.matrix, rho, unitary.env_weights,
                              unitary.dim_system, unitary.dim_env)


def evolve(circuit: CollisionCircuit, rho0, n_steps: int) -> Trajectory:
    """Trajectory of n_steps + 1 system states at t = n*dt."""
    if n_steps < 0:
        raise ValueError("n_steps must be nonnegative")
    unitary = build_step_unitary(circuit)
    rho = np.ascontiguousarray(as_matrix(rho0))
    states = [rho]
    for _ in range(n_steps):
        rho = step(circuit, rho, unitary=unitary, check_state=False)
        states.append(rho)
    times = circuit.params.dt * np.arange(n_steps + 1)
    return Trajectory(times=times, states=tuple(states))


def extract_map(circuit: CollisionCircuit, dim_cap: int = DIM_CAP) -> Superoperator:
    """Matrix of the step channel in the column-stacking convention, built by
    applying the map to the matrix-unit basis."""
    d = circuit.system_layout.dim
    if d * d > dim_cap:
        raise DimensionCapError(f"superoperator dimension {d * d} exceeds cap {dim_cap}")
    unitary = build_step_unitary(circuit, dim_cap=dim_cap)
    s = np.zeros((d * d, d * d), dtype=complex)
    unit = np.zeros((d, d), dtype=complex)
    for c in range(d):
        for r in range(d):
            unit[r, c] = 1.0
            out = step(circuit, unit, unitary=unitary, check_state=False)
            unit[r, c] = 0.0
            s[:, r + c * d] = vec(out)
    return Superoperator(matrix=s, dim=d)


def interaction_unitary(circuit: CollisionCircuit, dim_cap: int = DIM_CAP) -> np.ndarray:
    """The gate-sequence product alone, without the system gate."""
    layout = circuit.joint_layout
    if layout.dim > dim_cap:
        raise DimensionCapError(f"joint dimension {layout.dim} exceeds cap {dim_cap}")
    p = circuit.params
    u = np.eye(layout.dim, dtype=complex)
    for gate in circuit.gates:
        gen = gate_generator(circuit, gate)
        u = matrix_exp(-1j * p.g_I * gate.fraction * p.dt * gen) @ u
    return u


def summed_generator_unitary(circuit: CollisionCircuit) -> np.ndarray:
    """exp(-i g_I dt sum_g fraction-weighted generators), the target the
    symmetrized sequence approximates to third order in dt."""
    layout = circuit.joint_layout
    total = np.zeros((layout.dim, layout.dim), dtype=complex)
    seen = {}
    for gate in circuit.gates:
        key = (gate.ancilla, gate.slot, gate.operator.label, gate.operator.sites)
        seen[key] = seen.get(key, 0.0) + gate.fraction
    # rebuild per distinct generator with its accumulated fraction
    done = set()
    for gate in circuit.gates:
        key = (gate.ancilla, gate.slot, gate.operator.label, gate.operator.sites)
        if key in done:
            continue
        done.add(key)
        total = total + seen[key] * gate_generator(circuit, gate)
    p = circuit.params
    return matrix_exp(-1j * p.g_I * p.dt * total)


def suzuki_defect(circuit: CollisionCircuit) -> float:
    """Operator-norm gap between the palindromic gate sequence and the
    single exponential of the summed generator (O(dt^3) for fixed g_I)."""
    return op_norm(interaction_unitary(circuit) - summed_generator_unitary(circuit))
