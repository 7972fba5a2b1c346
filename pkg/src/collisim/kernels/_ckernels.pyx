# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled collision-step kernel: fused unitary conjugation and partial
trace over the environment, looping over the Kraus blocks of the joint
unitary.  Semantics match kernels._pure.apply_step exactly."""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def apply_step(cnp.complex128_t[:, ::1] u, cnp.complex128_t[:, ::1] rho,
               double[::1] weights, Py_ssize_t dim_s, Py_ssize_t dim_e):
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] out_arr = np.zeros((dim_s, dim_s), dtype=np.complex128)
    cdef cnp.complex128_t[:, ::1] out = out_arr
    cdef cnp.ndarray[cnp.complex128_t, ndim=2] tmp_arr = np.empty((dim_s, dim_s), dtype=np.complex128)
    cdef cnp.complex128_t[:, ::1] tmp = tmp_arr
    cdef Py_ssize_t e, f, s, t, a, b
    cdef double w
    cdef double complex acc

    for e in range(dim_e):
        w = weights[e]
        if w == 0.0:
            continue
        for f in range(dim_e):
            # tmp = K_{f,e} @ rho with K_{f,e}[s, a] = u[s*dim_e + f, a*dim_e + e]
            for s in range(dim_s):
                for b in range(dim_s):
                    acc = 0.0
                    for a in range(dim_s):
                        acc = acc + u[s * dim_e + f, a * dim_e + e] * rho[a, b]
                    tmp[s, b] = acc
            # out += w * tmp @ K_{f,e}^dag
            for s in range(dim_s):
                for t in range(dim_s):
                    acc = 0.0
                    for b in range(dim_s):
                        acc = acc + tmp[s, b] * u[t * dim_e + f, b * dim_e + e].conjugate()
                    out[s, t] = out[s, t] + w * acc
    return out_arr
