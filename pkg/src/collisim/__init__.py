"""collisim: compile GKLS (Lindblad) master equations into collision-model
circuits, execute them by exact dense simulation, and certify the result
against semigroup oracles, analytical error bounds, and resource counts."""

from .analysis import (BoundInputs, SlopeFit, ancilla_count, bound_inputs_for,
                       collision_bound, collision_pols, f_of_M, fit_loglog,
                       gate_count, single_step_bound, sweep_scaling,
                       system_gate_count, truncation_bound)
from .compiler import (AncillaSpec, CollisionCircuit, ElementaryGate,
                       InfeasibleEngineering, ManyBodyDecomposition, Segment,
                       StepParams, compile_common_bath, compile_diagonal,
                       compile_nondiagonal, compile_thermal,
                       decompose_manybody, induced_kossakowski,
                       schedule_time_dependent)
from .engine import (StepUnitary, Trajectory, build_step_unitary, evolve,
                     extract_map, step, suzuki_defect)
from .kernels import BACKEND
from .linalg import (TensorLayout, embed, matrix_exp, op_norm, partial_trace,
                     trace_norm)
from .model import (DiagonalModel, GKLSModel, LocalOperator,
                    ModelValidationError, ValidationReport, apply_liouvillian,
                    diagonalize, klocal_asymptote, klocal_count, validate)
from .reference import (ErrorReport, measure_errors, semigroup,
                        vectorize_liouvillian)
from .superop import Superoperator, channel_checks, choi_matrix, unvec, vec

__version__ = "0.1.0"
