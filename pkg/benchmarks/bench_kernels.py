"""Compare the compiled step kernel against the pure-numpy fallback.

The hot loop of every simulation is the per-step collision map: sandwich the
joint density operator between the step unitary's Kraus blocks for each
environment basis pair.  Run with:

    python3 benchmarks/bench_kernels.py
"""

import argparse
import time

import numpy as np

import collisim as cs
from collisim.engine import build_step_unitary
from collisim.kernels import _pure

try:
    from collisim.kernels import _ckernels
except ImportError:
    _ckernels = None


def workloads():
    """(name, circuit) pairs spanning small and moderate joint dimensions."""
    params = cs.StepParams.from_rate(dt=0.005, gamma=1.0)
    yield "thermal qubit (2x2 env)", cs.compile_thermal(
        1.0, 1.0 / np.log(2.0), [0], gamma0=1.0, params=params
    )
    yield "common bath M=3 (8x2 env)", cs.compile_common_bath(3, [1.0, 0.8, 0.6], params)
    model = cs.GKLSModel(
        layout=cs.TensorLayout((2, 2)),
        hamiltonian=np.zeros((4, 4)),
        gks_ops=[cs.LocalOperator((0,), np.array([[0, 0], [1, 0]], dtype=complex)),
                 cs.LocalOperator((1,), np.array([[0, 0], [1, 0]], dtype=complex))],
        kossakowski=np.array([[1.0, 0.4], [0.4, 1.0]], dtype=complex),
    )
    yield "two-qubit pair engineering (4x8 env)", cs.compile_nondiagonal(model, params)


def bench(fn, u, rho, weights, dim_s, dim_e, repeats):
    # warm up once, then time the loop
    out = fn(u, rho, weights, dim_s, dim_e)
    start = time.perf_counter()
    for _ in range(repeats):
        out = fn(u, rho, weights, dim_s, dim_e)
    elapsed = time.perf_counter() - start
    return elapsed / repeats, out


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=2000)
    args = parser.parse_args()

    print(f"active backend: {cs.BACKEND}")
    if _ckernels is None:
        print("compiled kernel unavailable; benchmarking the fallback only")
    header = f"{'workload':38s} {'dim S x E':>10s} {'pure (us)':>10s} {'compiled (us)':>14s} {'speedup':>8s}"
    print(header)
    print("-" * len(header))
    for name, circuit in workloads():
        u = build_step_unitary(circuit)
        rng = np.random.default_rng(0)
        a = rng.normal(size=(u.dim_system, u.dim_system)) \
            + 1j * rng.normal(size=(u.dim_system, u.dim_system))
        rho = a @ a.conj().T
        rho /= np.trace(rho)
        rho = np.ascontiguousarray(rho)
        t_pure, out_pure = bench(_pure.apply_step, u.matrix, rho, u.env_weights,
                                 u.dim_system, u.dim_env, args.repeats)
        dims = f"{u.dim_system} x {u.dim_env}"
        if _ckernels is None:
            print(f"{name:38s} {dims:>10s} {t_pure * 1e6:10.2f} {'-':>14s} {'-':>8s}")
            continue
        t_c, out_c = bench(_ckernels.apply_step, u.matrix, rho, u.env_weights,
                           u.dim_system, u.dim_env, args.repeats)
        gap = float(np.max(np.abs(np.asarray(out_pure) - np.asarray(out_c))))
        assert gap < 1e-12, f"backend mismatch: {gap:.3e}"
        print(f"{name:38s} {dims:>10s} {t_pure * 1e6:10.2f} {t_c * 1e6:14.2f} "
              f"{t_pure / t_c:7.2f}x")


if __name__ == "__main__":
    main()
