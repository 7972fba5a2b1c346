"""Translate GKLS models into collision circuits.

A circuit is one timestep's worth of data: ancilla specs (ground
populations and engineered amplitudes), the ordered elementary gates of the
symmetrized interaction sequence, and the optional free system evolution.
"""

import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from .linalg import SIGMA_MINUS, TensorLayout, as_matrix, embed, op_norm
from .model import DiagonalModel, GKLSModel, LocalOperator, ModelValidationError, validate
from .tolerances import DEFAULT

G_S_RATIO_WARN = 0.1
GAMMA_DT_WARN = 0.05


class InfeasibleEngineering(ValueError):
    """Raised when the pairwise inverse engineering cannot reproduce the
    target Kossakowski matrix (it requires diagonal dominance)."""


@dataclass(frozen=True)
class StepParams:
    """Timestep parameters tying the coupling constants together through
    gamma = g_I^2 * dt."""

    dt: float
    g_I: float
    g_S: float = 0.0

    def __post_init__(self):
        if self.dt <= 0:
            raise ValueError("dt must be positive")
        if self.g_I < 0 or self.g_S < 0:
            raise ValueError("coupling constants must be nonnegative")
        if self.g_I > 0 and self.g_S / self.g_I > G_S_RATIO_WARN:
            warnings.warn(
                f"g_S/g_I = {self.g_S / self.g_I:.3g} exceeds {G_S_RATIO_WARN}; "
                "the weak-system-coupling regime is violated",
                stacklevel=3,
            )
        if self.gamma * self.dt > GAMMA_DT_WARN:
            warnings.warn(
                f"gamma*dt = {self.gamma * self.dt:.3g} exceeds {GAMMA_DT_WARN}; "
                "the small-timestep regime is violated",
                stacklevel=3,
            )

    @property
    def gamma(self) -> float:
        return self.g_I ** 2 * self.dt

    @classmethod
    def from_rate(cls, dt: float, gamma: float, g_S: float = 0.0) -> "StepParams":
        """Fix the induced rate scale gamma and derive g_I = sqrt(gamma/dt)."""
        if gamma < 0:
            raise ValueError("gamma must be nonnegative")
        return cls(dt=dt, g_I=math.sqrt(gamma / dt), g_S=g_S)

    @classmethod
    def from_couplings(cls, dt: float, g_I: float, g_S: float = 0.0) -> "StepParams":
        return cls(dt=dt, g_I=g_I, g_S=g_S)


@dataclass(frozen=True)
class AncillaSpec:
    """One environment qubit: ground population ``c`` plus the engineered
    amplitude it attaches to each Kossakowski slot it couples."""

    id: int
    c: float
    slots: tuple        # Kossakowski row/column indices this ancilla addresses
    amplitudes: tuple   # complex amplitude per slot
    label: str = ""

    def __post_init__(self):
        if not 0.0 <= self.c <= 1.0:
            raise ValueError(f"ancilla population must be in [0, 1], got {self.c}")
        if len(self.slots) != len(self.amplitudes):
            raise ValueError("slots and amplitudes must pair up")


@dataclass(frozen=True)
class ElementaryGate:
    """One exponential in the step sequence.

    Interaction gates generate ``amplitude * F sigma^+ + h.c.`` on the given
    ancilla; the lone system gate (``ancilla is None``) generates the
    physical Hamiltonian directly.
    """

    operator: LocalOperator
    amplitude: complex
    ancilla: int
    slot: int
    fraction: float
    coupling: str = "interaction"

    def __post_init__(self):
        if self.fraction not in (0.5, 1.0):
            raise ValueError(f"gate fraction must be 1/2 or 1, got {self.fraction}")


@dataclass(frozen=True)
class CollisionCircuit:
    system_layout: TensorLayout
    ancillas: tuple
    gates: tuple
    params: StepParams
    system_hamiltonian: np.ndarray = None  # physical (energy-carrying) H, or None
    n_slots: int = 0
    version: int = 1

    @property
    def n_ancillas(self) -> int:
        return len(self.ancillas)

    @property
    def joint_layout(self) -> TensorLayout:
        return TensorLayout(self.system_layout.factor_dims + (2,) * self.n_ancillas)

    def env_weights(self) -> np.ndarray:
        """Diagonal of the fresh environment state in the joint ancilla
        basis (index 0 = excited, 1 = ground per ancilla)."""
        w = np.array([1.0])
        for anc in self.ancillas:
            w = np.kron(w, np.array([1.0 - anc.c, anc.c]))
        return w

    def with_negated_amplitudes(self) -> "CollisionCircuit":
        """Flip the sign of every interaction amplitude (parity probe)."""
        gates = tuple(replace(g, amplitude=-g.amplitude) for g in self.gates)
        ancillas = tuple(
            replace(a, amplitudes=tuple(-x for x in a.amplitudes)) for a in self.ancillas
        )
        return replace(self, gates=gates, ancillas=ancillas)

    def with_scaled_amplitudes(self, scale) -> "CollisionCircuit":
        """Scale interaction amplitudes; ``scale`` is a global factor or a
        per-ancilla-id mapping."""
        def factor(anc_id):
            return scale.get(anc_id, 1.0) if isinstance(scale, dict) else scale

        gates = tuple(replace(g, amplitude=factor(g.ancilla) * g.amplitude) for g in self.gates)
        ancillas = tuple(
            replace(a, amplitudes=tuple(factor(a.id) * x for x in a.amplitudes))
            for a in self.ancillas
        )
        return replace(self, gates=gates, ancillas=ancillas)


def induced_kossakowski(circuit: CollisionCircuit, n_slots=None):
    """Evaluate the induced emission/absorption Kossakowski matrices from the
    circuit's (c, amplitude) data.

    Per ancilla the emission block is gamma * c * v v^dag over its slots and
    the absorption block is gamma * (1-c) * conj(v) v^T; both are scattered
    into the full slot space and summed, so the totals are PSD by
    construction.
    """
    n = circuit.n_slots if n_slots is None else n_slots
    gamma = circuit.params.gamma
    down = np.zeros((n, n), dtype=complex)
    up = np.zeros((n, n), dtype=complex)
    for anc in circuit.ancillas:
        v = np.zeros(n, dtype=complex)
        for slot, amp in zip(anc.slots, anc.amplitudes):
            v[slot] += amp
        down += gamma * anc.c * np.outer(v, v.conj())
        up += gamma * (1.0 - anc.c) * np.outer(v.conj(), v)
    return down, up


def _palindrome(ancilla_id, slot_for, terms):
    """Symmetrized execution order over ``terms`` = [(amplitude, operator)]:
    reversed half-steps, merged central full step, forward half-steps."""
    gates = []
    if len(terms) == 1:
        amp, op = terms[0]
        return [ElementaryGate(op, amp, ancilla_id, slot_for(0), 1.0)]
    r = len(terms)
    for i in range(r - 1, 0, -1):
        amp, op = terms[i]
        gates.append(ElementaryGate(op, amp, ancilla_id, slot_for(i), 0.5))
    amp, op = terms[0]
    gates.append(ElementaryGate(op, amp, ancilla_id, slot_for(0), 1.0))
    for i in range(1, r):
        amp, op = terms[i]
        gates.append(ElementaryGate(op, amp, ancilla_id, slot_for(i), 0.5))
    return gates


def _require_valid(model: GKLSModel):
    report = validate(model)
    if not report.ok:
        raise ModelValidationError(f"model fails validation: {report.failures()}")


def compile_nondiagonal(model: GKLSModel, params: StepParams) -> CollisionCircuit:
    """One ancilla per off-diagonal Kossakowski pair plus residual
    self-ancillas, all in the ground state (emission-only engineering).

    For the pair (j, k) the amplitudes are chosen with symmetric magnitude
    sqrt(|gamma_jk| / gamma) and the phase of gamma_jk on slot j, so the
    induced coefficients reproduce gamma entrywise.  Requires diagonal
    dominance; otherwise fails toward compile_diagonal.
    """
    _require_valid(model)
    gamma_m = model.kossakowski
    j_ops = model.n_ops
    g = params.gamma
    if g <= 0:
        raise ValueError("params.gamma must be positive to engineer rates")
    scale = max(float(np.max(np.abs(gamma_m))), 1.0)

    residual = np.real(np.diag(gamma_m)).astype(float).copy()
    for j in range(j_ops):
        for k in range(j_ops):
            if k != j:
                residual[j] -= abs(gamma_m[j, k])
    bad = [j for j in range(j_ops) if residual[j] < -DEFAULT.zero_entry * scale]
    if bad:
        raise InfeasibleEngineering(
            f"Kossakowski matrix is not diagonally dominant (negative residual weight "
            f"at indices {bad}); diagonalize the model and use compile_diagonal instead"
        )

    ancillas, gates = [], []
    next_id = 0
    for j in range(j_ops):
        for k in range(j + 1, j_ops):
            target = gamma_m[j, k]
            if abs(target) <= DEFAULT.zero_entry * scale:
                continue
            mag = math.sqrt(abs(target) / g)
            phase = target / abs(target)
            amp_j = mag * phase
            amp_k = mag
            anc = AncillaSpec(
                id=next_id, c=1.0, slots=(j, k), amplitudes=(amp_j, amp_k),
                label=f"pair({j},{k})",
            )
            ancillas.append(anc)
            gates += _palindrome(
                next_id,
                lambda i, jj=j, kk=k: (jj, kk)[i],
                [(amp_j, model.gks_ops[j]), (amp_k, model.gks_ops[k])],
            )
            next_id += 1
    for j in range(j_ops):
        r = max(residual[j], 0.0)
        if r <= DEFAULT.zero_entry * scale:
            continue
        amp = math.sqrt(r / g)
        anc = AncillaSpec(id=next_id, c=1.0, slots=(j,), amplitudes=(amp,), label=f"self({j})")
        ancillas.append(anc)
        gates.append(ElementaryGate(model.gks_ops[j], amp, next_id, j, 1.0))
        next_id += 1

    h = model.hamiltonian if np.max(np.abs(model.hamiltonian)) > 0 else None
    return CollisionCircuit(
        system_layout=model.layout,
        ancillas=tuple(ancillas),
        gates=tuple(gates),
        params=params,
        system_hamiltonian=h,
        n_slots=j_ops,
    )


def compile_diagonal(dm: DiagonalModel, params: StepParams, decompositions=None) -> CollisionCircuit:
    """One ground-state ancilla per jump operator; each contributes the
    palindromic 2R-1 gate sequence over its per-support components (or a
    supplied many-body decomposition), with amplitude sqrt(rate / gamma)."""
    g = params.gamma
    if g <= 0:
        raise ValueError("params.gamma must be positive to engineer rates")
    decompositions = decompositions or {}
    ancillas, gates = [], []
    for k, (op, rate) in enumerate(zip(dm.lindblad_ops, dm.rates)):
        lam = math.sqrt(rate / g)
        if k in decompositions:
            terms = [(lam * mu, basis_op) for mu, basis_op in decompositions[k].terms]
        else:
            comps = dm.components[k] if dm.components else [op]
            if not comps:
                raise ValueError(f"jump operator {k} has no per-support decomposition")
            terms = [(lam, comp) for comp in comps]
        anc = AncillaSpec(id=k, c=1.0, slots=(k,), amplitudes=(lam,), label=f"jump({k})")
        ancillas.append(anc)
        gates += _palindrome(k, lambda i, kk=k: kk, terms)

    h = dm.hamiltonian if np.max(np.abs(dm.hamiltonian)) > 0 else None
    return CollisionCircuit(
        system_layout=dm.layout,
        ancillas=tuple(ancillas),
        gates=tuple(gates),
        params=params,
        system_hamiltonian=h,
        n_slots=len(dm.lindblad_ops),
    )


def thermal_occupation(omega: float, temperature: float) -> float:
    """Bose-Einstein occupation at frequency omega (k_B = 1)."""
    if omega <= 0:
        raise ValueError("omega must be positive")
    if temperature < 0 or math.isinf(temperature):
        raise ValueError("only finite nonnegative temperatures are supported")
    if temperature == 0:
        return 0.0
    return 1.0 / math.expm1(omega / temperature)


def compile_thermal(omega, temperature, target_sites, gamma0, params: StepParams,
                    layout=None) -> CollisionCircuit:
    """Single thermally populated ancilla collectively coupled to qubit
    ``target_sites``, inducing emission rate gamma0*(N+1) and absorption rate
    gamma0*N with N the occupation at (omega, temperature)."""
    n_t = thermal_occupation(omega, temperature)
    target_sites = sorted(target_sites)
    if layout is None:
        layout = TensorLayout((2,) * (max(target_sites) + 1))
    c_e = (n_t + 1.0) / (2.0 * n_t + 1.0)
    lam = math.sqrt((2.0 * n_t + 1.0) * gamma0 / params.gamma)
    terms = [
        (lam, LocalOperator(sites=(m,), matrix=SIGMA_MINUS, label=f"lower({m})"))
        for m in target_sites
    ]
    anc = AncillaSpec(
        id=0, c=c_e, slots=tuple(range(len(target_sites))),
        amplitudes=(lam,) * len(target_sites), label="thermal",
    )
    gates = _palindrome(0, lambda i: i, terms)
    return CollisionCircuit(
        system_layout=layout,
        ancillas=(anc,),
        gates=tuple(gates),
        params=params,
        n_slots=len(target_sites),
    )


def compile_common_bath(m: int, xi, params: StepParams) -> CollisionCircuit:
    """Single ground-state ancilla shared by M qubits with weights xi,
    inducing the rank-one Kossakowski matrix gamma * xi xi^T over the
    per-site lowering operators (2M-1 gates per step)."""
    if m < 1:
        raise ValueError("need at least one subsystem")
    xi = [complex(x) for x in xi]
    if len(xi) != m:
        raise ValueError(f"expected {m} weights, got {len(xi)}")
    layout = TensorLayout((2,) * m)
    terms = [
        (xi[site], LocalOperator(sites=(site,), matrix=SIGMA_MINUS, label=f"lower({site})"))
        for site in range(m)
    ]
    anc = AncillaSpec(
        id=0, c=1.0, slots=tuple(range(m)), amplitudes=tuple(xi), label="common-bath",
    )
    gates = _palindrome(0, lambda i: i, terms)
    return CollisionCircuit(
        system_layout=layout,
        ancillas=(anc,),
        gates=tuple(gates),
        params=params,
        n_slots=m,
    )


@dataclass(frozen=True)
class ManyBodyDecomposition:
    """Coefficients mu_r expressing a target generator amplitude*F as
    sum_r mu_r G_r over an available gate basis."""

    target: LocalOperator
    amplitude: complex
    terms: tuple  # (mu_r, LocalOperator) pairs
    residual: float


def decompose_manybody(target: LocalOperator, amplitude, basis, layout=None) -> ManyBodyDecomposition:
    """Least-squares expansion of amplitude * target over the basis
    operators; fails when the basis does not span the target."""
    sites = tuple(sorted({s for op in [target] + list(basis) for s in op.sites}))
    if layout is None:
        layout = TensorLayout((2,) * (max(sites) + 1))
    pos = {s: i for i, s in enumerate(sites)}
    sub = TensorLayout(tuple(layout.factor_dims[s] for s in sites))

    def lift(op):
        return embed(op.matrix, [pos[s] for s in op.sites], sub).ravel()

    a = np.stack([lift(op) for op in basis], axis=1)
    b = complex(amplitude) * lift(target)
    mu, *_ = np.linalg.lstsq(a, b, rcond=None)
    residual = float(np.linalg.norm(a @ mu - b, np.inf))
    if residual > DEFAULT.decomposition:
        raise ValueError(
            f"basis does not span the target generator (residual {residual:.3e})"
        )
    terms = tuple((complex(c), op) for c, op in zip(mu, basis))
    return ManyBodyDecomposition(target=target, amplitude=complex(amplitude),
                                 terms=terms, residual=residual)


@dataclass(frozen=True)
class Segment:
    """One piecewise-constant interval of a time-dependent schedule."""

    t_start: float
    t_end: float
    amplitude_scale: object = 1.0   # global factor or {ancilla_id: factor}
    hamiltonian: np.ndarray = None  # optional physical H override


@dataclass(frozen=True)
class ScheduledCircuit:
    segments: tuple
    circuits: tuple

    def circuit_for_step(self, n: int) -> CollisionCircuit:
        """Segment assignment by containment of the step start time n*dt."""
        t = n * self.circuits[0].params.dt
        for seg, circ in zip(self.segments, self.circuits):
            if seg.t_start <= t < seg.t_end:
                return circ
        raise ValueError(f"step {n} (t={t}) is outside the scheduled horizon")


def schedule_time_dependent(base: CollisionCircuit, schedule) -> ScheduledCircuit:
    """Expand a sorted, gap-free schedule of amplitude/Hamiltonian overrides
    into one concrete circuit per segment."""
    segments = tuple(schedule)
    if not segments:
        raise ValueError("schedule must contain at least one segment")
    t = segments[0].t_start
    for seg in segments:
        if seg.t_start != t:
            raise ValueError(f"schedule has a gap or overlap at t={seg.t_start}")
        if seg.t_end <= seg.t_start:
            raise ValueError("segments must have positive duration")
        t = seg.t_end
    circuits = []
    for seg in segments:
        circ = base.with_scaled_amplitudes(seg.amplitude_scale)
        if seg.hamiltonian is not None:
            circ = replace(circ, system_hamiltonian=as_matrix(seg.hamiltonian))
        circuits.append(circ)
    return ScheduledCircuit(segments=segments, circuits=tuple(circuits))


def interaction_gate_count(circuit: CollisionCircuit) -> int:
    return sum(1 for g in circuit.gates if g.coupling == "interaction")


def effective_g_S(circuit: CollisionCircuit) -> float:
    """Energy scale of the system gate: configured g_S, else the operator
    norm of the physical Hamiltonian."""
    if circuit.system_hamiltonian is None:
        return 0.0
    if circuit.params.g_S > 0:
        return circuit.params.g_S
    return op_norm(circuit.system_hamiltonian)
