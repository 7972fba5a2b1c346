import numpy as np
import pytest

import collisim as cs
from collisim.linalg import SIGMA_MINUS, TensorLayout


def amplitude_damping_model(rate=1.0):
    """Single qubit, one lowering GKS operator, decay rate ``rate``."""
    return cs.GKLSModel(
        layout=TensorLayout((2,)),
        hamiltonian=np.zeros((2, 2)),
        gks_ops=[cs.LocalOperator((0,), SIGMA_MINUS, "lower")],
        kossakowski=np.array([[rate]], dtype=complex),
    )


def collective_decay_model(m=2, rate=1.0):
    """M qubits in a common bath: all-ones Kossakowski over local lowering."""
    dim = 2 ** m
    return cs.GKLSModel(
        layout=TensorLayout((2,) * m),
        hamiltonian=np.zeros((dim, dim)),
        gks_ops=[cs.LocalOperator((s,), SIGMA_MINUS, f"lower{s}") for s in range(m)],
        kossakowski=rate * np.ones((m, m), dtype=complex),
    )


def two_op_dominant_model(off=0.4):
    """Two qubits, diagonally dominant 2x2 Kossakowski."""
    return cs.GKLSModel(
        layout=TensorLayout((2, 2)),
        hamiltonian=np.zeros((4, 4)),
        gks_ops=[cs.LocalOperator((0,), SIGMA_MINUS, "lower0"),
                 cs.LocalOperator((1,), SIGMA_MINUS, "lower1")],
        kossakowski=np.array([[1.0, off], [off, 1.0]], dtype=complex),
    )


def random_density(dim, rng):
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    rho = a @ a.conj().T
    return rho / np.trace(rho)


def random_hermitian(dim, rng, scale=1.0):
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return scale * (a + a.conj().T) / 2


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
