"""Analytical error bounds, resource-count formulas, and convergence sweeps
with log-log slope fitting.

All bound formulas take dimensionless operator data (amplitudes folded into
Lambda) with gamma setting the energy scale; times are in units of 1/gamma
unless the caller supplies consistent units.
"""

import math
from dataclasses import dataclass, replace

import numpy as np

from .compiler import CollisionCircuit, effective_g_S
from .linalg import op_norm
from .reference import DEFAULT_SAMPLES, measure_errors

DEGENERATE_ERROR = 1e-14


@dataclass(frozen=True)
class BoundInputs:
    """Everything the truncation/collision bounds consume."""

    Lambda: float   # max generator scale: max(||H_S||, |amplitude| * ||F||)
    Xi: int         # count of distinct elementary generator exponentials per step
    K: int          # number of k-local Liouvillian terms (1 without k-locality)
    J: int          # jump / GKS operator count (J_k under k-locality)
    R: int          # elementary generators per jump operator
    g_S: float
    gamma: float
    dt: float

    @property
    def a_max(self) -> float:
        return self.R * self.Lambda

    @property
    def g_I(self) -> float:
        return math.sqrt(self.gamma / self.dt)

    def prescriptions(self) -> dict:
        """Side conditions under which the bounds are claimed."""
        return {
            "truncation": 2 * self.K * self.R * self.Lambda
            * (1 + self.J * self.R * self.Lambda) * self.dt < 1,
            "interaction": 4 * self.Xi * self.dt * self.g_I * self.Lambda < 1,
            "system": 2 * self.dt * self.K * self.g_S * self.Lambda < 1,
        }

    def prescriptions_hold(self) -> bool:
        return all(self.prescriptions().values())


def bound_inputs_for(circuit: CollisionCircuit, k_terms: int = 1) -> BoundInputs:
    """Derive bound inputs from a compiled circuit.

    Xi and R come from the circuit's actual distinct gate generators; J is
    the circuit's Kossakowski slot count; Lambda maximizes over the
    dimensionless system Hamiltonian and every gate's amplitude-weighted
    operator norm.
    """
    per_ancilla = {}
    lam = 0.0
    for gate in circuit.gates:
        key = (gate.slot, gate.operator.label, gate.operator.sites)
        per_ancilla.setdefault(gate.ancilla, set()).add(key)
        lam = max(lam, abs(gate.amplitude) * op_norm(gate.operator.matrix))
    g_s = effective_g_S(circuit)
    if circuit.system_hamiltonian is not None and g_s > 0:
        lam = max(lam, op_norm(circuit.system_hamiltonian) / g_s)
    xi = sum(len(v) for v in per_ancilla.values())
    r = max((len(v) for v in per_ancilla.values()), default=1)
    return BoundInputs(
        Lambda=lam,
        Xi=xi,
        K=k_terms,
        J=max(circuit.n_slots, 1),
        R=r,
        g_S=g_s,
        gamma=circuit.params.gamma,
        dt=circuit.params.dt,
    )


def truncation_bound(inputs: BoundInputs) -> float:
    """Second-order Taylor remainder of the semigroup step:
    2e (K R Lambda (1 + J R Lambda) dt)^2."""
    x = inputs.K * inputs.R * inputs.Lambda * (1 + inputs.J * inputs.R * inputs.Lambda)
    return 2 * math.e * (x * inputs.dt) ** 2


def collision_pols(inputs: BoundInputs):
    """The two polynomial prefactors of the collision-error bound."""
    lam, xi, k, g_s, gamma = inputs.Lambda, inputs.Xi, inputs.K, inputs.g_S, inputs.gamma
    pol1 = (
        (2 * xi * lam) ** 4 * gamma ** 2 * math.cosh(0.5) / math.factorial(4)
        + (4 * lam) ** 3 * xi ** 2 * g_s * k * gamma * math.sinh(1.0) / math.factorial(2)
        + math.e * (2 * k * g_s * lam) ** 2 / math.factorial(2)
    )
    pol2 = (4 * lam) ** 4 * xi ** 2 * (k * g_s) ** 2 * gamma * math.cosh(1.0) / math.factorial(4)
    return pol1, pol2


def collision_bound(inputs: BoundInputs) -> float:
    """Gap between the collision map and the first-order semigroup step:
    pol1 * dt^2 + pol2 * dt^3."""
    pol1, pol2 = collision_pols(inputs)
    return pol1 * inputs.dt ** 2 + pol2 * inputs.dt ** 3


def single_step_bound(inputs: BoundInputs) -> float:
    return truncation_bound(inputs) + collision_bound(inputs)


def f_of_M(inputs: BoundInputs) -> float:
    """Per-step error prefactor entering the resource counts; carries the
    configured dt through the cubic collision term."""
    pol1, pol2 = collision_pols(inputs)
    trunc = 2 * math.e * (
        inputs.K * inputs.R * inputs.Lambda * (1 + inputs.J * inputs.R * inputs.Lambda)
    ) ** 2
    return pol1 + pol2 * inputs.dt + trunc


def ancilla_count(inputs: BoundInputs, t: float, eps_g: float) -> int:
    """ceil(K * J_k * f(M) * t^2 / eps_g) fresh ancillas for the whole run."""
    if eps_g <= 0:
        raise ValueError("eps_g must be positive")
    if t <= 0:
        raise ValueError("t must be positive")
    return math.ceil(inputs.K * inputs.J * f_of_M(inputs) * t ** 2 / eps_g)


def gate_count(inputs: BoundInputs, n_g_system: int, t: float, eps_g: float) -> int:
    """ceil(((2R-1) K J_k + N_G^(S)) * f(M) * t^2 / eps_g) total gates."""
    if eps_g <= 0:
        raise ValueError("eps_g must be positive")
    if t <= 0:
        raise ValueError("t must be positive")
    per_step = (2 * inputs.R - 1) * inputs.K * inputs.J + n_g_system
    return math.ceil(per_step * f_of_M(inputs) * t ** 2 / eps_g)


def system_gate_count(circuit: CollisionCircuit, k_terms: int = 1) -> int:
    """One gate per k-local Hamiltonian term per step (first-order split)."""
    return k_terms if circuit.system_hamiltonian is not None else 0


@dataclass(frozen=True)
class SlopeFit:
    slope: float
    intercept: float
    residual: float
    degenerate: bool


def fit_loglog(x, y) -> SlopeFit:
    """Least-squares slope of log y against log x; flagged degenerate when
    any y is numerically zero."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(y <= DEGENERATE_ERROR):
        return SlopeFit(slope=math.nan, intercept=math.nan, residual=math.nan, degenerate=True)
    coeffs, res, *_ = np.polyfit(np.log(x), np.log(y), 1, full=True)
    residual = float(res[0]) if len(res) else 0.0
    return SlopeFit(slope=float(coeffs[0]), intercept=float(coeffs[1]),
                    residual=residual, degenerate=False)


@dataclass(frozen=True)
class SweepRow:
    n: int
    dt: float
    eps_g_lower: float
    eps_s_lower: float
    trunc_bound: float
    coll_bound: float


@dataclass(frozen=True)
class SweepResult:
    rows: tuple
    fit: SlopeFit
    t: float
    seed: int


def sweep_scaling(model, circuit_factory, n_values, t: float,
                  samples: int = DEFAULT_SAMPLES, seed: int = 0) -> SweepResult:
    """Measure the global-error lower bound at fixed t over a list of step
    counts (dt = t/n) and fit its log-log slope against n.

    ``circuit_factory(dt)`` must return the circuit compiled for that
    timestep.
    """
    if len(n_values) < 2:
        raise ValueError("need at least two step counts to fit a slope")
    rows = []
    for n in n_values:
        dt = t / n
        circuit = circuit_factory(dt)
        report = measure_errors(circuit, model, n=n, samples=samples, seed=seed)
        inputs = bound_inputs_for(circuit)
        rows.append(SweepRow(
            n=n, dt=dt,
            eps_g_lower=report.epsilon_g_lower,
            eps_s_lower=report.epsilon_s_lower,
            trunc_bound=truncation_bound(inputs),
            coll_bound=collision_bound(inputs),
        ))
    fit = fit_loglog([r.n for r in rows], [r.eps_g_lower for r in rows])
    return SweepResult(rows=tuple(rows), fit=fit, t=t, seed=seed)


def with_dt(inputs: BoundInputs, dt: float) -> BoundInputs:
    return replace(inputs, dt=dt)
