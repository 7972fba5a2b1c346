"""Model validation, Kossakowski diagonalization, and generator evaluation."""

import math

import numpy as np
import pytest

import collisim as cs
from collisim.linalg import NUMBER_OP, SIGMA_MINUS, SIGMA_Z, TensorLayout
from collisim.model import klocal_asymptote, klocal_count
from conftest import amplitude_damping_model, collective_decay_model, random_density


def make_model(kossakowski, m=2):
    dim = 2 ** m
    j = kossakowski.shape[0]
    ops = [cs.LocalOperator((s % m,), SIGMA_MINUS, f"op{s}") for s in range(j)]
    return cs.GKLSModel(
        layout=TensorLayout((2,) * m),
        hamiltonian=np.zeros((dim, dim)),
        gks_ops=ops,
        kossakowski=np.asarray(kossakowski, dtype=complex),
    )


class TestValidate:
    def test_valid_model_passes(self):
        report = cs.validate(amplitude_damping_model())
        assert report.ok
        assert report.failures() == []

    def test_indefinite_kossakowski_rejected(self):
        model = make_model(np.array([[1.0, 2.0], [2.0, 1.0]]))
        report = cs.validate(model)
        assert not report.ok
        # Minimum eigenvalue of [[1,2],[2,1]] is -1.
        fails = dict(report.failures())
        assert np.isclose(fails["kossakowski positive semidefinite"], -1.0)
        with pytest.raises(cs.ModelValidationError):
            cs.diagonalize(model)

    def test_hermitian_complex_kossakowski_accepted(self):
        model = make_model(np.array([[1.0, 1j], [-1j, 1.0]]))
        assert cs.validate(model).ok

    def test_nonhermitian_kossakowski_rejected(self):
        model = make_model(np.array([[1.0, 0.5], [0.2, 1.0]]))
        assert not cs.validate(model).ok

    def test_nonhermitian_hamiltonian_rejected(self):
        model = amplitude_damping_model()
        bad = cs.GKLSModel(
            layout=model.layout,
            hamiltonian=np.array([[0.0, 1.0], [0.0, 0.0]]),
            gks_ops=model.gks_ops,
            kossakowski=model.kossakowski,
        )
        assert not cs.validate(bad).ok


class TestDiagonalize:
    def test_already_diagonal(self):
        model = make_model(np.diag([2.0, 1.0]))
        dm = cs.diagonalize(model)
        assert np.allclose(dm.rates, [2.0, 1.0])

    def test_rates_descending(self):
        model = make_model(np.array([[1.0, 1j], [-1j, 1.0]]))
        dm = cs.diagonalize(model)
        # Eigenvalues of [[1,i],[-i,1]] are 2 and 0; the zero rate is dropped.
        assert np.allclose(dm.rates, [2.0])

    def test_all_ones_collective_mode(self):
        model = collective_decay_model(m=2)
        dm = cs.diagonalize(model)
        assert np.allclose(dm.rates, [2.0])
        op = dm.lindblad_ops[0]
        collective = (
            model.embedded_ops()[0] + model.embedded_ops()[1]
        ) / np.sqrt(2)
        # Eigenvectors carry an arbitrary global phase.
        emb = cs.linalg.embed(op.matrix, op.sites, model.layout)
        phase = np.vdot(collective.ravel(), emb.ravel())
        phase /= abs(phase)
        assert np.allclose(emb, phase * collective, atol=1e-10)

    def test_reconstruction(self, rng):
        a = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        gamma = a @ a.conj().T
        model = make_model(gamma, m=3)
        dm = cs.diagonalize(model)
        padded = np.zeros(3)
        padded[: len(dm.rates)] = dm.rates
        rebuilt = dm.unitary_C @ np.diag(padded) @ dm.unitary_C.conj().T
        assert np.allclose(rebuilt, gamma, atol=1e-9)

    def test_dynamics_agree_with_source(self, rng):
        model = make_model(np.array([[1.0, 0.3], [0.3, 0.8]]))
        dm = cs.diagonalize(model)
        rho = random_density(4, rng)
        lhs = cs.apply_liouvillian(model, rho)
        rhs = cs.apply_liouvillian(dm.as_gkls(), rho)
        assert np.allclose(lhs, rhs, atol=1e-10)


class TestApplyLiouvillian:
    def test_zero_for_commuting_state(self):
        model = cs.GKLSModel(
            layout=TensorLayout((2,)),
            hamiltonian=SIGMA_Z,
            gks_ops=[],
            kossakowski=np.zeros((0, 0)),
        )
        rho = np.diag([0.25, 0.75]).astype(complex)
        assert np.allclose(cs.apply_liouvillian(model, rho), 0)

    def test_amplitude_damping_action(self):
        model = amplitude_damping_model(rate=0.7)
        excited = np.diag([1.0, 0.0]).astype(complex)
        out = cs.apply_liouvillian(model, excited)
        assert np.allclose(out, 0.7 * np.diag([-1.0, 1.0]))

    def test_traceless_and_hermitian(self, rng):
        model = make_model(np.array([[1.0, 0.4], [0.4, 1.0]]))
        rho = random_density(4, rng)
        out = cs.apply_liouvillian(model, rho)
        assert abs(np.trace(out)) < 1e-12
        assert np.allclose(out, out.conj().T)


class TestKLocalCounting:
    def test_small_values(self):
        assert klocal_count(5, 2) == 10
        assert klocal_count(3, 3) == 1
        assert klocal_count(4, 1) == 4

    def test_upper_bound(self):
        for m in range(1, 13):
            for k in range(1, m + 1):
                assert klocal_count(m, k) <= m ** k

    def test_matches_comb(self):
        assert klocal_count(10, 4) == math.comb(10, 4)

    def test_asymptote_ratio(self):
        # C(M,k) / (M^k / (k! e^k)) -> e^k as M grows; check the helper is
        # of the right order of magnitude for moderate M.
        for m in (40, 80):
            ratio = klocal_count(m, 3) / klocal_asymptote(m, 3)
            assert 1.0 < ratio < 25.0

    def test_asymptote_formula(self):
        assert np.isclose(klocal_asymptote(6, 2), 36 / (2 * np.e ** 2))


def test_number_operator_convention():
    # Index 0 is the excited level.
    assert np.allclose(NUMBER_OP, np.diag([1.0, 0.0]))
    assert np.allclose(SIGMA_MINUS @ np.array([1.0, 0.0]), [0.0, 1.0])
