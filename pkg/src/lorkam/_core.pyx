# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernel for the flat-chart causal-relation / interval evaluation.

Same contract as ``lorkam._core_py.flat_relation_batch``; this version loops
in C, which matters when the Lax-Oleinik field evaluators issue millions of
interval queries.
"""
import numpy as np

cimport numpy as cnp
from libc.math cimport sqrt, fabs, NAN

cnp.import_array()

cdef double TWO_PI = 6.283185307179586476925287
cdef double TIE_RTOL = 1e-9


def flat_relation_batch(dt, dsp, int winding_bound, bint periodic):
    dt_arr = np.ascontiguousarray(np.atleast_1d(np.asarray(dt, dtype=np.float64)).ravel())
    dsp_arr = np.ascontiguousarray(np.atleast_1d(np.asarray(dsp, dtype=np.float64)).ravel())
    shape = np.broadcast(np.atleast_1d(dt), np.atleast_1d(dsp)).shape
    if dt_arr.shape[0] != dsp_arr.shape[0]:
        dt_arr, dsp_arr = np.broadcast_arrays(dt_arr, dsp_arr)
        dt_arr = np.ascontiguousarray(dt_arr)
        dsp_arr = np.ascontiguousarray(dsp_arr)

    cdef double[::1] dtv = dt_arr
    cdef double[::1] dsv = dsp_arr
    cdef Py_ssize_t n = dtv.shape[0]

    d_out = np.empty(n, dtype=np.float64)
    m_out = np.empty(n, dtype=np.int64)
    r_out = np.empty(n, dtype=np.int8)
    cdef double[::1] dv = d_out
    cdef long long[::1] mv = m_out
    cdef signed char[::1] rv = r_out

    cdef Py_ssize_t i
    cdef int k, K = winding_bound
    cdef int mult, nullmult
    cdef double t, s, sep, val, best, tol, ntol

    for i in range(n):
        t = dtv[i]
        s = dsv[i]
        if periodic:
            best = -1e308
            mult = 0
            for k in range(-K, K + 1):
                sep = s + TWO_PI * k
                val = t * t - sep * sep
                tol = TIE_RTOL * (1.0 + fabs(val))
                if val > best + tol:
                    best = val
                    mult = 1
                elif fabs(val - best) <= tol:
                    mult += 1
        else:
            best = t * t - s * s
            mult = 1

        ntol = TIE_RTOL * (1.0 + t * t + s * s)
        if t < 0.0 or best < -ntol:
            rv[i] = 0
            mv[i] = 0
            dv[i] = NAN
        elif best > ntol:
            rv[i] = 2
            mv[i] = mult
            dv[i] = sqrt(best)
        else:
            rv[i] = 1
            dv[i] = 0.0
            if periodic:
                nullmult = 0
                for k in range(-K, K + 1):
                    sep = s + TWO_PI * k
                    val = t * t - sep * sep
                    if fabs(val) <= ntol:
                        nullmult += 1
                mv[i] = nullmult
            else:
                mv[i] = 1

    return (d_out.reshape(shape), m_out.reshape(shape), r_out.reshape(shape))
