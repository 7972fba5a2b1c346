"""Step unitary construction, collision-map execution, channel extraction,
and the symmetrization defect."""

import numpy as np
import pytest

import collisim as cs
from collisim.engine import (DimensionCapError, build_step_unitary,
                             interaction_unitary, summed_generator_unitary)
from collisim.kernels import _pure
from collisim.linalg import SIGMA_MINUS, SIGMA_Z, TensorLayout, is_unitary
from collisim.superop import channel_checks, choi_matrix, unvec, vec
from conftest import amplitude_damping_model, collective_decay_model, random_density

PARAMS = cs.StepParams.from_rate(dt=0.01, gamma=1.0)


def damping_circuit(dt=0.01, gamma=1.0):
    return cs.compile_nondiagonal(
        amplitude_damping_model(rate=gamma), cs.StepParams.from_rate(dt=dt, gamma=gamma)
    )


class TestStepUnitary:
    def test_unitarity(self):
        u = build_step_unitary(damping_circuit())
        assert is_unitary(u.matrix)
        assert u.dim_system == 2 and u.dim_env == 2

    def test_no_hamiltonian_identity_when_decoupled(self):
        circ = damping_circuit().with_scaled_amplitudes(0.0)
        u = build_step_unitary(circ)
        assert np.allclose(u.matrix, np.eye(4))

    def test_system_gate_applied(self):
        model = amplitude_damping_model()
        model.hamiltonian = 0.5 * SIGMA_Z
        circ = cs.compile_nondiagonal(model, PARAMS).with_scaled_amplitudes(0.0)
        u = build_step_unitary(circ)
        expected = np.kron(cs.matrix_exp(-1j * PARAMS.dt * 0.5 * SIGMA_Z), np.eye(2))
        assert np.allclose(u.matrix, expected)

    def test_dimension_cap(self):
        circ = cs.compile_common_bath(2, [1.0, 1.0], PARAMS)
        with pytest.raises(DimensionCapError):
            build_step_unitary(circ, dim_cap=4)


class TestStep:
    def test_one_step_excited_population(self):
        # A single collision rotates the excited population by cos^2(g_I dt).
        circ = damping_circuit(dt=0.01)
        excited = np.diag([1.0, 0.0]).astype(complex)
        out = cs.step(circ, excited)
        g_t = circ.params.g_I * circ.params.dt
        assert np.isclose(out[0, 0].real, np.cos(g_t) ** 2, atol=1e-12)
        assert np.isclose(np.trace(out).real, 1.0, atol=1e-12)

    def test_ground_state_fixed(self):
        circ = damping_circuit()
        ground = np.diag([0.0, 1.0]).astype(complex)
        assert np.allclose(cs.step(circ, ground), ground, atol=1e-12)

    def test_trace_and_hermiticity_preserved(self, rng):
        circ = cs.compile_common_bath(2, [1.0, 0.5], PARAMS)
        rho = random_density(4, rng)
        out = cs.step(circ, rho)
        assert np.isclose(np.trace(out).real, 1.0, atol=1e-12)
        assert np.allclose(out, out.conj().T)

    def test_nonnormalized_state_warns(self):
        circ = damping_circuit()
        with pytest.warns(UserWarning, match="trace"):
            cs.step(circ, np.diag([2.0, 0.0]).astype(complex))


class TestEvolve:
    def test_zero_steps(self, rng):
        circ = damping_circuit()
        rho = random_density(2, rng)
        traj = cs.evolve(circ, rho, 0)
        assert len(traj.states) == 1
        assert np.allclose(traj.states[0], rho)

    def test_exponential_decay(self):
        circ = damping_circuit(dt=0.005)
        excited = np.diag([1.0, 0.0]).astype(complex)
        traj = cs.evolve(circ, excited, 200)  # t = 1 at rate 1
        assert abs(traj.states[-1][0, 0].real - np.e ** -1) < 0.02
        assert np.isclose(traj.times[-1], 1.0)

    def test_composition_matches_repeated_step(self, rng):
        circ = damping_circuit()
        rho = random_density(2, rng)
        traj = cs.evolve(circ, rho, 3)
        manual = rho
        for _ in range(3):
            manual = cs.step(circ, manual)
        assert np.allclose(traj.states[-1], manual, atol=1e-14)

    def test_deterministic(self, rng):
        circ = damping_circuit()
        rho = random_density(2, rng)
        a = cs.evolve(circ, rho, 5).states[-1]
        b = cs.evolve(circ, rho, 5).states[-1]
        assert np.array_equal(a, b)


class TestExtractMap:
    def test_decoupled_circuit_gives_identity(self):
        circ = damping_circuit().with_scaled_amplitudes(0.0)
        s = cs.extract_map(circ)
        assert np.allclose(s.matrix, np.eye(4))

    def test_channel_properties(self):
        s = cs.extract_map(damping_circuit())
        tp, min_eig = channel_checks(s)
        assert tp < 1e-10
        assert min_eig > -1e-9
        choi = choi_matrix(s)
        assert np.isclose(np.trace(choi).real, 2.0, atol=1e-10)

    def test_matches_direct_step(self, rng):
        circ = cs.compile_common_bath(2, [1.0, 1.0], PARAMS)
        s = cs.extract_map(circ)
        rho = random_density(4, rng)
        assert np.allclose(s(rho), cs.step(circ, rho), atol=1e-12)

    def test_generator_consistency(self):
        # (phi - id)/dt approaches the Liouvillian as dt -> 0.
        model = amplitude_damping_model()
        gaps = []
        for dt in (0.01, 0.005):
            circ = damping_circuit(dt=dt)
            s = cs.extract_map(circ)
            liou = cs.vectorize_liouvillian(model)
            approx = (s.matrix - np.eye(4)) / dt
            gaps.append(np.max(np.abs(approx - liou.matrix)))
        assert gaps[1] < gaps[0]
        assert gaps[1] < 0.01


class TestVectorizationConvention:
    def test_column_stacking_pin(self):
        rho = np.array([[1.0, 2.0], [3.0, 4.0]])
        assert np.allclose(vec(rho), [1.0, 3.0, 2.0, 4.0])
        assert np.allclose(unvec(vec(rho), 2), rho)

    def test_sandwich_identity(self, rng):
        a = rng.normal(size=(3, 3))
        b = rng.normal(size=(3, 3))
        rho = rng.normal(size=(3, 3))
        lhs = vec(a @ rho @ b)
        rhs = np.kron(b.T, a) @ vec(rho)
        assert np.allclose(lhs, rhs)


class TestSymmetrization:
    def test_single_generator_sequence_is_exact(self):
        circ = damping_circuit()
        assert cs.suzuki_defect(circ) < 1e-12

    def test_defect_cubic_in_dt(self):
        # Two noncommuting collective couplings at fixed g_I: the palindromic
        # sequence defect falls as dt^3.
        defects = []
        dts = [0.1, 0.05, 0.025, 0.0125]
        for dt in dts:
            params = cs.StepParams.from_couplings(dt=dt, g_I=1.0)
            circ = cs.compile_common_bath(2, [1.0, 0.7], params)
            defects.append(cs.suzuki_defect(circ))
        fit = cs.fit_loglog(dts, defects)
        assert 2.8 <= fit.slope <= 3.2

    def test_summed_generator_is_unitary(self):
        circ = cs.compile_common_bath(2, [1.0, 1.0], PARAMS)
        assert is_unitary(summed_generator_unitary(circ))
        assert is_unitary(interaction_unitary(circ))


class TestParity:
    def test_map_invariant_under_amplitude_negation(self, rng):
        circ = cs.compile_common_bath(2, [1.0, 0.5], PARAMS)
        flipped = circ.with_negated_amplitudes()
        a = cs.extract_map(circ)
        b = cs.extract_map(flipped)
        assert np.max(np.abs(a.matrix - b.matrix)) < 1e-11


class TestKernels:
    def test_pure_backend_available(self):
        assert cs.BACKEND in ("compiled", "pure-python")

    def test_pure_and_active_agree(self, rng):
        circ = cs.compile_common_bath(2, [1.0, 0.5], PARAMS)
        u = build_step_unitary(circ)
        rho = random_density(4, rng)
        via_engine = cs.step(circ, rho)
        via_pure = _pure.apply_step(u.matrix, rho, u.env_weights,
                                    u.dim_system, u.dim_env)
        assert np.allclose(via_engine, via_pure, atol=1e-13)
