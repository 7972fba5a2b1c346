"""File formats: model documents, circuit exports, and CSV artifacts.

All structured documents are JSON with a ``version`` field and a canonical
formatting (sorted keys, two-space indent) so that parse followed by emit is
the identity.  Complex numbers are stored as [real, imag] pairs; floats keep
full precision through repr.
"""

import json
import math

import numpy as np

from .compiler import AncillaSpec, CollisionCircuit, ElementaryGate, StepParams
from .linalg import (NUMBER_OP, SIGMA_MINUS, SIGMA_PLUS, SIGMA_X, SIGMA_Y,
                     SIGMA_Z, TensorLayout)
from .model import GKLSModel, LocalOperator

MODEL_VERSION = 1
CIRCUIT_VERSION = 1
CSV_VERSION = 1

OPERATOR_REGISTRY = {
    "X": SIGMA_X,
    "Y": SIGMA_Y,
    "Z": SIGMA_Z,
    "+": SIGMA_PLUS,
    "-": SIGMA_MINUS,
    "I": np.eye(2, dtype=complex),
    "N": NUMBER_OP,
}


class DocumentError(ValueError):
    """Parse error carrying the offending field path."""

    def __init__(self, path, message):
        super().__init__(f"{path}: {message}")
        self.path = path


def _c2pair(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


def _pair2c(pair, path):
    if not (isinstance(pair, (list, tuple)) and len(pair) == 2):
        raise DocumentError(path, f"expected [re, im] pair, got {pair!r}")
    return complex(float(pair[0]), float(pair[1]))


def matrix_to_doc(m) -> list:
    return [[_c2pair(z) for z in row] for row in np.asarray(m, dtype=complex)]


def matrix_from_doc(rows, path) -> np.ndarray:
    try:
        return np.array(
            [[_pair2c(z, path) for z in row] for row in rows], dtype=complex
        )
    except (TypeError, DocumentError) as exc:
        raise DocumentError(path, f"malformed matrix: {exc}") from exc


def operator_from_spec(spec, sites, path) -> np.ndarray:
    """Registry string (one character per site) or explicit matrix."""
    if isinstance(spec, str):
        if len(spec) != len(sites):
            raise DocumentError(path, f"registry string {spec!r} must name one operator per site")
        out = np.array([[1.0 + 0j]])
        for ch in spec:
            if ch not in OPERATOR_REGISTRY:
                raise DocumentError(path, f"unknown registry operator {ch!r}")
            out = np.kron(out, OPERATOR_REGISTRY[ch])
        return out
    if isinstance(spec, dict) and "matrix" in spec:
        return matrix_from_doc(spec["matrix"], path + ".matrix")
    raise DocumentError(path, "operator spec must be a registry string or {'matrix': ...}")


def canonical_json(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


# ---------------------------------------------------------------------------
# Model documents


def parse_model_document(doc: dict) -> GKLSModel:
    if doc.get("version") != MODEL_VERSION:
        raise DocumentError("version", f"expected {MODEL_VERSION}, got {doc.get('version')!r}")
    system = doc.get("system")
    if not isinstance(system, dict) or "M" not in system or "d" not in system:
        raise DocumentError("system", "expected {'M': ..., 'd': ...}")
    m, d = int(system["M"]), int(system["d"])
    layout = TensorLayout((d,) * m)

    hamiltonian = np.zeros((layout.dim, layout.dim), dtype=complex)
    for i, term in enumerate(doc.get("hamiltonian", [])):
        path = f"hamiltonian[{i}]"
        sites = [int(s) for s in term.get("sites", [])]
        op = operator_from_spec(term.get("op"), sites, path + ".op")
        from .linalg import embed
        hamiltonian = hamiltonian + float(term.get("coefficient", 1.0)) * embed(op, sites, layout)

    if "gks_operators" in doc:
        ops = []
        for i, entry in enumerate(doc["gks_operators"]):
            path = f"gks_operators[{i}]"
            sites = tuple(int(s) for s in entry.get("sites", []))
            matrix = operator_from_spec(entry.get("op"), sites, path + ".op")
            ops.append(LocalOperator(sites=sites, matrix=matrix, label=entry.get("label", "")))
        if "kossakowski" not in doc:
            raise DocumentError("kossakowski", "required alongside gks_operators")
        gamma = matrix_from_doc(doc["kossakowski"], "kossakowski")
    elif "lindblad" in doc:
        ops, rates = [], []
        for i, entry in enumerate(doc["lindblad"]):
            path = f"lindblad[{i}]"
            sites = tuple(int(s) for s in entry.get("sites", []))
            matrix = operator_from_spec(entry.get("op"), sites, path + ".op")
            ops.append(LocalOperator(sites=sites, matrix=matrix, label=entry.get("label", "")))
            rates.append(float(entry.get("rate", 1.0)))
        gamma = np.diag(np.asarray(rates, dtype=complex))
    else:
        raise DocumentError("gks_operators", "model needs gks_operators or lindblad")

    return GKLSModel(layout=layout, hamiltonian=hamiltonian, gks_ops=ops, kossakowski=gamma)


def emit_model_document(doc: dict) -> str:
    """Models are authored documents; emission is canonical re-formatting."""
    return canonical_json(doc)


def load_model(path):
    """Returns (model, raw document)."""
    with open(path) as fh:
        doc = json.load(fh)
    return parse_model_document(doc), doc


# ---------------------------------------------------------------------------
# Circuit documents


def circuit_to_doc(circuit: CollisionCircuit) -> dict:
    return {
        "version": CIRCUIT_VERSION,
        "system_dims": list(circuit.system_layout.factor_dims),
        "n_slots": circuit.n_slots,
        "params": {
            "dt": circuit.params.dt,
            "g_I": circuit.params.g_I,
            "g_S": circuit.params.g_S,
        },
        "ancillas": [
            {
                "id": a.id,
                "c": a.c,
                "label": a.label,
                "slots": list(a.slots),
                "amplitudes": [_c2pair(x) for x in a.amplitudes],
            }
            for a in circuit.ancillas
        ],
        "gates": [
            {
                "ancilla": g.ancilla,
                "slot": g.slot,
                "sites": list(g.operator.sites),
                "label": g.operator.label,
                "matrix": matrix_to_doc(g.operator.matrix),
                "amplitude": _c2pair(g.amplitude),
                "fraction": g.fraction,
                "coupling": g.coupling,
            }
            for g in circuit.gates
        ],
        "system_hamiltonian": (
            None if circuit.system_hamiltonian is None
            else matrix_to_doc(circuit.system_hamiltonian)
        ),
    }


def circuit_from_doc(doc: dict) -> CollisionCircuit:
    if doc.get("version") != CIRCUIT_VERSION:
        raise DocumentError("version", f"expected {CIRCUIT_VERSION}, got {doc.get('version')!r}")
    layout = TensorLayout(tuple(doc["system_dims"]))
    p = doc["params"]
    params = StepParams(dt=float(p["dt"]), g_I=float(p["g_I"]), g_S=float(p["g_S"]))
    ancillas = tuple(
        AncillaSpec(
            id=int(a["id"]), c=float(a["c"]),
            slots=tuple(int(s) for s in a["slots"]),
            amplitudes=tuple(_pair2c(x, f"ancillas[{i}].amplitudes") for x in a["amplitudes"]),
            label=a.get("label", ""),
        )
        for i, a in enumerate(doc["ancillas"])
    )
    gates = tuple(
        ElementaryGate(
            operator=LocalOperator(
                sites=tuple(int(s) for s in g["sites"]),
                matrix=matrix_from_doc(g["matrix"], f"gates[{i}].matrix"),
                label=g.get("label", ""),
            ),
            amplitude=_pair2c(g["amplitude"], f"gates[{i}].amplitude"),
            ancilla=int(g["ancilla"]),
            slot=int(g["slot"]),
            fraction=float(g["fraction"]),
            coupling=g.get("coupling", "interaction"),
        )
        for i, g in enumerate(doc["gates"])
    )
    h = doc.get("system_hamiltonian")
    return CollisionCircuit(
        system_layout=layout,
        ancillas=ancillas,
        gates=gates,
        params=params,
        system_hamiltonian=None if h is None else matrix_from_doc(h, "system_hamiltonian"),
        n_slots=int(doc.get("n_slots", 0)),
    )


def save_circuit(circuit: CollisionCircuit, path):
    with open(path, "w") as fh:
        fh.write(canonical_json(circuit_to_doc(circuit)))


def load_circuit(path) -> CollisionCircuit:
    with open(path) as fh:
        return circuit_from_doc(json.load(fh))


# ---------------------------------------------------------------------------
# CSV artifacts


def trajectory_to_csv(trajectory, path, header_extra=None):
    """Columns: step, t, then row-major real and imaginary parts of rho."""
    d = trajectory.states[0].shape[0]
    cols = ["step", "t"]
    for r in range(d):
        for c in range(d):
            cols += [f"re_{r}_{c}", f"im_{r}_{c}"]
    with open(path, "w") as fh:
        fh.write(f"# trajectory csv version={CSV_VERSION}\n")
        for line in header_extra or []:
            fh.write(f"# {line}\n")
        fh.write(",".join(cols) + "\n")
        for n, (t, rho) in enumerate(zip(trajectory.times, trajectory.states)):
            row = [str(n), repr(float(t))]
            for r in range(d):
                for c in range(d):
                    row += [repr(float(rho[r, c].real)), repr(float(rho[r, c].imag))]
            fh.write(",".join(row) + "\n")


def error_report_to_csv(report, path):
    with open(path, "w") as fh:
        fh.write(f"# error report version={CSV_VERSION} seed={report.seed} samples={report.samples}\n")
        fh.write(f"# n={report.n} dt={report.dt!r} t={report.t!r}\n")
        fh.write(f"# eps_g_lower={report.epsilon_g_lower!r} eps_s_lower={report.epsilon_s_lower!r}\n")
        fh.write("sample_index,trace_distance\n")
        for idx, dist in report.per_state:
            fh.write(f"{idx},{dist!r}\n")


def sweep_to_csv(result, path):
    with open(path, "w") as fh:
        fh.write(f"# sweep csv version={CSV_VERSION} t={result.t!r} seed={result.seed}\n")
        fit = result.fit
        slope = "nan" if fit.degenerate or math.isnan(fit.slope) else repr(fit.slope)
        intercept = "nan" if fit.degenerate or math.isnan(fit.intercept) else repr(fit.intercept)
        fh.write(f"# slope={slope} intercept={intercept} degenerate={fit.degenerate}\n")
        fh.write("n,dt,eps_g_lower,eps_s_lower,trunc_bound,coll_bound\n")
        for row in result.rows:
            fh.write(
                f"{row.n},{row.dt!r},{row.eps_g_lower!r},{row.eps_s_lower!r},"
                f"{row.trunc_bound!r},{row.coll_bound!r}\n"
            )
