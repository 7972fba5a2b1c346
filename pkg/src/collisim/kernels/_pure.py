"""Pure-numpy collision-step kernel (fallback for the compiled extension)."""

import numpy as np


def apply_step(u, rho, weights, dim_s, dim_e):
    """Tr_E[U (rho x diag(weights)) U^dag] for a joint unitary on
    system x environment with the system factor most significant.

    Equivalent Kraus form: sum_{e,f} w_e K_{f,e} rho K_{f,e}^dag with
    K_{f,e} = <f|U|e> the dim_s x dim_s blocks of U.
    """
    ur = u.reshape(dim_s, dim_e, dim_s, dim_e)
    return np.einsum("sfae,ab,tfbe,e->st", ur, rho, ur.conj(), weights, optimize=True)
