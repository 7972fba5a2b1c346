"""Central numerical tolerance record.

Every module reads its default tolerances from the module-level ``DEFAULT``
instance, so a single override point controls the whole pipeline.
"""

from dataclasses import dataclass, replace


@dataclass
class Tolerances:
    hermiticity: float = 1e-10        # max-abs entry difference A - A^dag
    unitarity: float = 1e-10          # max-abs entry difference U^dag U - I
    psd: float = 1e-10                # allowed negative eigenvalue magnitude
    trace: float = 1e-10              # trace-preservation slack
    reconstruction: float = 1e-9      # Kossakowski round trips
    choi: float = 1e-9                # Choi min-eigenvalue slack for channels
    decomposition: float = 1e-9       # least-squares residual for generator bases
    zero_entry: float = 1e-14         # entries treated as exact zeros (relative)
    state_check: float = 1e-8         # density-operator sanity in trajectories

    def replaced(self, **kwargs) -> "Tolerances":
        return replace(self, **kwargs)


DEFAULT = Tolerances()
