"""Command-line surface: validate -> compile -> simulate -> sweep -> bounds
-> resources.

Exit codes: 0 success, 1 validation failure, 2 compilation infeasibility,
3 runtime or dimension-cap errors.
"""

import argparse
import sys

import numpy as np

from . import analysis, engine, io, reference
from .compiler import (InfeasibleEngineering, StepParams, compile_diagonal,
                       compile_nondiagonal, induced_kossakowski)
from .engine import DimensionCapError
from .model import ModelValidationError, diagonalize, klocal_count, validate

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_INFEASIBLE = 2
EXIT_RUNTIME = 3


def cmd_validate(args) -> int:
    try:
        model, _ = io.load_model(args.model)
    except (io.DocumentError, OSError, ValueError) as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    report = validate(model)
    print(report)
    if args.report_out:
        with open(args.report_out, "w") as fh:
            fh.write(str(report) + "\n")
    return EXIT_OK if report.ok else EXIT_VALIDATION


def _params_from_args(args) -> StepParams:
    return StepParams.from_rate(dt=args.dt, gamma=args.gamma, g_S=args.g_s)


def cmd_compile(args) -> int:
    try:
        model, _ = io.load_model(args.model)
    except (io.DocumentError, OSError, ValueError) as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    report = validate(model)
    if not report.ok:
        print(report, file=sys.stderr)
        return EXIT_VALIDATION
    params = _params_from_args(args)

    circuit = None
    if args.mode in ("nondiagonal", "auto"):
        try:
            circuit = compile_nondiagonal(model, params)
        except InfeasibleEngineering as exc:
            if args.mode == "nondiagonal":
                print(f"infeasible: {exc}", file=sys.stderr)
                return EXIT_INFEASIBLE
            print(f"nondiagonal engineering infeasible, falling back to diagonal: {exc}")
    if circuit is None:
        circuit = compile_diagonal(diagonalize(model), params)

    io.save_circuit(circuit, args.output)
    down, _ = induced_kossakowski(circuit)
    target = (model.kossakowski if circuit.n_slots == model.n_ops
              else np.diag(np.asarray(diagonalize(model).rates, dtype=complex)))
    residual = float(np.max(np.abs(down - target)))
    n_gates = sum(1 for g in circuit.gates if g.coupling == "interaction")
    print(f"ancillas: {circuit.n_ancillas}")
    print(f"interaction gates per step: {n_gates}")
    print("amplitudes:")
    for anc in circuit.ancillas:
        amps = ", ".join(f"slot {s}: {a:.6g}" for s, a in zip(anc.slots, anc.amplitudes))
        print(f"  ancilla {anc.id} [{anc.label}] c={anc.c:.6g}: {amps}")
    print(f"induced Kossakowski residual: {residual:.3e}")
    print(f"circuit written to {args.output}")
    return EXIT_OK


def cmd_simulate(args) -> int:
    try:
        model, _ = io.load_model(args.model)
        circuit = io.load_circuit(args.circuit)
    except (io.DocumentError, OSError, ValueError) as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    if circuit.system_layout.dim != model.dim:
        print(
            f"model dimension {model.dim} does not match circuit dimension "
            f"{circuit.system_layout.dim}", file=sys.stderr,
        )
        return EXIT_RUNTIME
    n = args.steps if args.steps is not None else round(args.t / circuit.params.dt)
    d = model.dim
    rho0 = np.zeros((d, d), dtype=complex)
    if args.initial == "excited":
        rho0[0, 0] = 1.0
    elif args.initial == "ground":
        rho0[d - 1, d - 1] = 1.0
    else:
        rho0[:] = np.eye(d) / d
    try:
        trajectory = engine.evolve(circuit, rho0, n)
        report = reference.measure_errors(circuit, model, n=max(n, 1),
                                          samples=args.samples, seed=args.seed)
    except DimensionCapError as exc:
        print(f"dimension cap: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    io.trajectory_to_csv(trajectory, args.output,
                         header_extra=[f"seed={args.seed}", f"initial={args.initial}"])
    print(f"simulated {n} steps to t={n * circuit.params.dt:.6g}")
    print(f"eps_g lower bound: {report.epsilon_g_lower:.6e}")
    print(f"eps_s lower bound: {report.epsilon_s_lower:.6e}")
    if args.errors_out:
        io.error_report_to_csv(report, args.errors_out)
    print(f"trajectory written to {args.output}")
    return EXIT_OK


def cmd_sweep(args) -> int:
    try:
        model, _ = io.load_model(args.model)
    except (io.DocumentError, OSError, ValueError) as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    report = validate(model)
    if not report.ok:
        print(report, file=sys.stderr)
        return EXIT_VALIDATION
    n_values = [int(x) for x in args.n_values.split(",")]
    dm = diagonalize(model)

    def factory(dt):
        return compile_diagonal(dm, StepParams.from_rate(dt=dt, gamma=args.gamma, g_S=args.g_s))

    try:
        result = analysis.sweep_scaling(model, factory, n_values, t=args.t,
                                        samples=args.samples, seed=args.seed)
    except DimensionCapError as exc:
        print(f"dimension cap: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    io.sweep_to_csv(result, args.output)
    if result.fit.degenerate:
        print("fit degenerate: measured errors at numerical zero")
    else:
        print(f"log-log slope of eps_g vs n: {result.fit.slope:.4f}")
    print(f"sweep written to {args.output}")
    return EXIT_OK


def cmd_bounds(args) -> int:
    try:
        circuit = io.load_circuit(args.circuit)
    except (io.DocumentError, OSError, ValueError) as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    inputs = analysis.bound_inputs_for(circuit, k_terms=args.k_terms)
    trunc = analysis.truncation_bound(inputs)
    coll = analysis.collision_bound(inputs)
    print(f"Lambda={inputs.Lambda:.6g} Xi={inputs.Xi} K={inputs.K} J={inputs.J} R={inputs.R}")
    print(f"truncation bound: {trunc:.6e}")
    print(f"collision bound:  {coll:.6e}")
    print(f"single-step bound: {trunc + coll:.6e}")
    for name, ok in inputs.prescriptions().items():
        print(f"prescription {name}: {'holds' if ok else 'VIOLATED'}")
    return EXIT_OK


def cmd_resources(args) -> int:
    try:
        k_terms = klocal_count(args.subsystems, args.locality)
    except ValueError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_RUNTIME
    r = args.r if args.r is not None else args.locality
    j_k = args.jk if args.jk is not None else args.local_dim ** (2 * args.locality) - 1
    inputs = analysis.BoundInputs(
        Lambda=args.lam, Xi=k_terms * j_k * r, K=k_terms, J=j_k, R=r,
        g_S=args.g_s, gamma=args.gamma, dt=args.dt,
    )
    f_m = analysis.f_of_M(inputs)
    n_a = analysis.ancilla_count(inputs, t=args.t, eps_g=args.eps_g)
    n_g = analysis.gate_count(inputs, n_g_system=args.system_gates, t=args.t, eps_g=args.eps_g)
    print(f"K = {k_terms}")
    print(f"J_k <= {j_k}")
    print(f"f(M) = {f_m:.6e}")
    print(f"ancillas N_A = {n_a}")
    print(f"gates N_G = {n_g}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="collisim",
        description="Compile Lindblad master equations to collision-model "
                    "circuits and verify them against exact semigroup dynamics.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a model document's invariants")
    p.add_argument("model")
    p.add_argument("--report-out", default=None)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("compile", help="compile a model into a circuit file")
    p.add_argument("model")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--mode", choices=("auto", "diagonal", "nondiagonal"), default="auto")
    p.add_argument("--dt", type=float, default=0.005)
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--g-s", type=float, default=0.0)
    p.set_defaults(func=cmd_compile)

    p = sub.add_parser("simulate", help="evolve a state and report measured errors")
    p.add_argument("model")
    p.add_argument("circuit")
    p.add_argument("-o", "--output", required=True)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--steps", type=int, default=None)
    group.add_argument("--t", type=float, default=None)
    p.add_argument("--initial", choices=("excited", "ground", "maximally-mixed"),
                   default="excited")
    p.add_argument("--samples", type=int, default=reference.DEFAULT_SAMPLES)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--errors-out", default=None)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="error scaling sweep over step counts at fixed t")
    p.add_argument("model")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--n-values", default="50,100,200,400,800")
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--g-s", type=float, default=0.0)
    p.add_argument("--samples", type=int, default=reference.DEFAULT_SAMPLES)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("bounds", help="analytical error bounds for a circuit")
    p.add_argument("circuit")
    p.add_argument("--k-terms", type=int, default=1)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("resources", help="ancilla and gate counts for a target precision")
    p.add_argument("--subsystems", type=int, required=True)
    p.add_argument("--locality", type=int, required=True)
    p.add_argument("--local-dim", type=int, default=2)
    p.add_argument("--r", type=int, default=None)
    p.add_argument("--jk", type=int, default=None)
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--eps-g", type=float, default=0.01)
    p.add_argument("--lam", type=float, default=1.0)
    p.add_argument("--gamma", type=float, default=1.0)
    p.add_argument("--g-s", type=float, default=0.0)
    p.add_argument("--dt", type=float, default=0.01)
    p.add_argument("--system-gates", type=int, default=0)
    p.set_defaults(func=cmd_resources)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ModelValidationError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_VALIDATION
    except InfeasibleEngineering as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_INFEASIBLE
    except DimensionCapError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
