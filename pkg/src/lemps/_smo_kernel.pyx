# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled SMO solver for the epsilon-SVR dual.

Identical updates and tie-breaking as the pure-numpy fallback in
``_smo_python.py``: selection scans up-side variables before down-side ones
and keeps the lowest index on ties.
"""

import numpy as np

IS_COMPILED = True

cdef double _TAU = 1e-12


def smo_solve(double[:, ::1] K, double[::1] y, double C, double epsilon,
              double tol, int max_iter, bint track_objective=False):
    """See _smo_python.smo_solve; same contract and return shape."""
    cdef Py_ssize_t n = y.shape[0]
    t_up_arr = np.zeros(n)
    t_dn_arr = np.zeros(n)
    a_arr = np.zeros(n)
    Ka_arr = np.zeros(n)
    F_arr = np.asarray(y, dtype=np.float64).copy()
    cdef double[::1] t_up = t_up_arr
    cdef double[::1] t_dn = t_dn_arr
    cdef double[::1] a = a_arr
    cdef double[::1] Ka = Ka_arr
    cdef double[::1] F = F_arr

    trace = [] if track_objective else None

    cdef Py_ssize_t it = 0, idx, i = 0, j = 0
    cdef bint i_on_up = True, j_on_up = True, converged = False
    cdef double m, M, v, violation = 0.0
    cdef double cap_i, cap_j, q, step, dk, obj_quad, obj_lin

    while True:
        m = -np.inf
        for idx in range(n):
            if t_up[idx] < C:
                v = F[idx] - epsilon
                if v > m:
                    m = v
                    i = idx
                    i_on_up = True
        for idx in range(n):
            if t_dn[idx] > 0.0:
                v = F[idx] + epsilon
                if v > m:
                    m = v
                    i = idx
                    i_on_up = False

        M = np.inf
        for idx in range(n):
            if t_up[idx] > 0.0:
                v = F[idx] - epsilon
                if v < M:
                    M = v
                    j = idx
                    j_on_up = True
        for idx in range(n):
            if t_dn[idx] < C:
                v = F[idx] + epsilon
                if v < M:
                    M = v
                    j = idx
                    j_on_up = False

        violation = m - M
        if violation <= tol:
            converged = True
            if violation < 0.0:
                violation = 0.0
            break
        if it >= max_iter:
            break
        it += 1

        cap_i = (C - t_up[i]) if i_on_up else t_dn[i]
        cap_j = t_up[j] if j_on_up else (C - t_dn[j])
        q = K[i, i] + K[j, j] - 2.0 * K[i, j]
        if q < _TAU:
            q = _TAU
        step = (m - M) / q
        if cap_i < step:
            step = cap_i
        if cap_j < step:
            step = cap_j

        if i_on_up:
            t_up[i] = C if step == cap_i else t_up[i] + step
        else:
            t_dn[i] = 0.0 if step == cap_i else t_dn[i] - step
        if j_on_up:
            t_up[j] = 0.0 if step == cap_j else t_up[j] - step
        else:
            t_dn[j] = C if step == cap_j else t_dn[j] + step
        a[i] += step
        a[j] -= step
        for idx in range(n):
            dk = step * (K[idx, i] - K[idx, j])
            Ka[idx] += dk
            F[idx] -= dk

        if track_objective:
            obj_quad = 0.0
            obj_lin = 0.0
            for idx in range(n):
                obj_quad += a[idx] * Ka[idx]
                obj_lin += epsilon * (t_up[idx] + t_dn[idx]) - y[idx] * a[idx]
            trace.append(0.5 * obj_quad + obj_lin)

    return t_up_arr, t_dn_arr, a_arr, F_arr, m, M, converged, violation, it, trace
