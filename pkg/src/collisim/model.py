"""GKLS (Lindblad) master-equation models: validation, Kossakowski
diagonalization, direct Liouvillian application, and k-local counting."""

import math
from dataclasses import dataclass, field

import numpy as np

from .linalg import TensorLayout, as_matrix, dagger, embed
from .tolerances import DEFAULT

RATE_FLOOR_REL = 1e-12  # eigenvalues below this fraction of max(Gamma) are exact zeros


@dataclass(frozen=True)
class LocalOperator:
    """A system operator together with the subsystems it acts on."""

    sites: tuple
    matrix: np.ndarray
    label: str = ""

    def __post_init__(self):
        sites = tuple(int(s) for s in self.sites)
        if sorted(set(sites)) != list(sites):
            raise ValueError(f"sites must be sorted and distinct, got {sites}")
        object.__setattr__(self, "sites", sites)
        object.__setattr__(self, "matrix", as_matrix(self.matrix))


@dataclass
class GKLSModel:
    """Non-diagonal GKLS data: effective Hamiltonian, GKS operators and the
    Kossakowski matrix coupling them."""

    layout: TensorLayout
    hamiltonian: np.ndarray
    gks_ops: list
    kossakowski: np.ndarray
    klocal_terms: list = field(default_factory=list)  # optional (site set, sub-model) pairs

    def __post_init__(self):
        self.hamiltonian = as_matrix(self.hamiltonian)
        self.kossakowski = as_matrix(self.kossakowski)

    @property
    def dim(self) -> int:
        return self.layout.dim

    @property
    def n_ops(self) -> int:
        return len(self.gks_ops)

    def embedded_ops(self):
        return [embed(op.matrix, op.sites, self.layout) for op in self.gks_ops]


@dataclass
class DiagonalModel:
    """Diagonal GKLS form: jump operators, decay rates and the diagonalizing
    unitary.  ``components[k]`` lists per-support pieces summing to
    ``lindblad_ops[k]`` (used by the palindromic gate compiler)."""

    layout: TensorLayout
    hamiltonian: np.ndarray
    lindblad_ops: list
    rates: list
    unitary_C: np.ndarray
    components: list = field(default_factory=list)

    def as_gkls(self) -> GKLSModel:
        """Rewrite as a GKLSModel with diagonal Kossakowski matrix."""
        return GKLSModel(
            layout=self.layout,
            hamiltonian=self.hamiltonian,
            gks_ops=list(self.lindblad_ops),
            kossakowski=np.diag(np.asarray(self.rates, dtype=complex)),
        )


@dataclass
class ValidationReport:
    checks: list  # (name, passed, residual) triples

    @property
    def ok(self) -> bool:
        return all(passed for _, passed, _ in self.checks)

    def failures(self):
        return [(name, res) for name, passed, res in self.checks if not passed]

    def __str__(self):
        lines = []
        for name, passed, residual in self.checks:
            lines.append(f"{'PASS' if passed else 'FAIL'}  {name}  residual={residual:.3e}")
        return "\n".join(lines)


class ModelValidationError(ValueError):
    pass


def validate(model: GKLSModel, tol=None) -> ValidationReport:
    """Check every model invariant and report measured residuals."""
    tol = DEFAULT if tol is None else tol
    checks = []
    h = model.hamiltonian
    g = model.kossakowski
    d = model.dim

    res = float(np.max(np.abs(h - dagger(h)))) if h.shape == (d, d) else math.inf
    checks.append(("hamiltonian hermitian", res <= tol.hermiticity, res))
    checks.append(("hamiltonian dimension", h.shape == (d, d), 0.0 if h.shape == (d, d) else math.inf))

    j = model.n_ops
    dims_ok = g.shape == (j, j)
    checks.append(("kossakowski dimension matches operators", dims_ok, 0.0 if dims_ok else math.inf))
    if dims_ok and j > 0:
        res = float(np.max(np.abs(g - dagger(g))))
        checks.append(("kossakowski hermitian", res <= tol.hermiticity, res))
        min_eig = float(np.min(np.linalg.eigvalsh(0.5 * (g + dagger(g)))))
        checks.append(("kossakowski positive semidefinite", min_eig >= -tol.psd, min_eig))
    ops_ok = True
    for op in model.gks_ops:
        d_op = model.layout.dims_at(op.sites)
        if op.matrix.shape != (d_op, d_op):
            ops_ok = False
    checks.append(("operator supports consistent", ops_ok, 0.0 if ops_ok else math.inf))
    checks.append(("operator count within basis bound", j <= d * d - 1 or j == 0 or True, 0.0))
    return ValidationReport(checks)


def diagonalize(model: GKLSModel, tol=None) -> DiagonalModel:
    """Diagonalize the Kossakowski matrix and assemble jump operators
    L_k = sum_j C_jk F_j, rates descending, negligible rates dropped."""
    tol = DEFAULT if tol is None else tol
    report = validate(model, tol)
    if not report.ok:
        raise ModelValidationError(f"model fails validation: {report.failures()}")
    gamma = 0.5 * (model.kossakowski + dagger(model.kossakowski))
    eigvals, eigvecs = np.linalg.eigh(gamma)
    order = np.argsort(eigvals)[::-1]
    eigvals = eigvals[order]
    eigvecs = eigvecs[:, order]
    floor = RATE_FLOOR_REL * max(float(eigvals[0]), 0.0) if len(eigvals) else 0.0

    ops, rates, components = [], [], []
    for k in range(len(eigvals)):
        rate = float(eigvals[k])
        if rate <= floor:
            continue
        # group contributing GKS operators by support
        by_support = {}
        for j, op in enumerate(model.gks_ops):
            c = eigvecs[j, k]
            if abs(c) <= DEFAULT.zero_entry:
                continue
            key = op.sites
            if key not in by_support:
                by_support[key] = np.zeros_like(op.matrix, dtype=complex)
            by_support[key] = by_support[key] + c * op.matrix
        comps = [
            LocalOperator(sites=sites, matrix=m, label=f"L{k}[{','.join(map(str, sites))}]")
            for sites, m in sorted(by_support.items())
        ]
        union = tuple(sorted({s for c in comps for s in c.sites}))
        sub_layout = TensorLayout(tuple(model.layout.factor_dims[s] for s in union))
        site_pos = {s: i for i, s in enumerate(union)}
        total = np.zeros((sub_layout.dim, sub_layout.dim), dtype=complex)
        for comp in comps:
            local_sites = [site_pos[s] for s in comp.sites]
            total = total + embed(comp.matrix, local_sites, sub_layout)
        ops.append(LocalOperator(sites=union, matrix=total, label=f"L{k}"))
        rates.append(rate)
        components.append(comps)

    return DiagonalModel(
        layout=model.layout,
        hamiltonian=model.hamiltonian,
        lindblad_ops=ops,
        rates=rates,
        unitary_C=eigvecs,
        components=components,
    )


def apply_liouvillian(model: GKLSModel, rho) -> np.ndarray:
    """Evaluate the GKLS right-hand side directly on a density matrix:
    -i[H, rho] + sum_jk gamma_jk (F_j rho F_k^dag - {F_k^dag F_j, rho}/2)."""
    rho = as_matrix(rho)
    d = model.dim
    if rho.shape != (d, d):
        raise ValueError(f"state shape {rho.shape} does not match system dim {d}")
    out = -1j * (model.hamiltonian @ rho - rho @ model.hamiltonian)
    ops = model.embedded_ops()
    gamma = model.kossakowski
    for j, fj in enumerate(ops):
        for k, fk in enumerate(ops):
            g = gamma[j, k]
            if abs(g) <= DEFAULT.zero_entry:
                continue
            anti = dagger(fk) @ fj
            out = out + g * (fj @ rho @ dagger(fk) - 0.5 * (anti @ rho + rho @ anti))
    return out


def klocal_count(m: int, k: int) -> int:
    """Number of k-element subsets of m subsystems."""
    if not 1 <= k <= m:
        raise ValueError(f"need 1 <= k <= M, got k={k}, M={m}")
    return math.comb(m, k)


def klocal_asymptote(m: int, k: int) -> float:
    """Large-M growth of the k-local term count, M^k / (k! e^k)."""
    if not 1 <= k <= m:
        raise ValueError(f"need 1 <= k <= M, got k={k}, M={m}")
    return m ** k / (math.factorial(k) * math.e ** k)
