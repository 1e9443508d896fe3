"""Pure-numpy SMO solver for the epsilon-SVR dual.

Reference implementation of the second hot kernel; the compiled twin in
``_smo_kernel.pyx`` performs identical updates with the same tie-breaking
(up-side variables scanned before down-side, lowest index wins), so the two
backends produce the same iterate sequence up to float summation order.
"""

import numpy as np

IS_COMPILED = False

_TAU = 1e-12


def smo_solve(K, y, C, epsilon, tol, max_iter, track_objective=False):
    """Maximal-violating-pair SMO on the doubled dual.

    State: t_up/t_dn in [0, C] per point, signed coefficient a = t_up - t_dn,
    F = y - K @ a. Optimality scores are F - eps for up-side moves and
    F + eps for down-side moves; each step changes a_i and a_j by the same
    amount with opposite signs, so sum(a) stays at zero up to rounding.

    Returns (t_up, t_dn, a, F, m, M, converged, violation, iterations, trace).
    """
    n = y.shape[0]
    t_up = np.zeros(n)
    t_dn = np.zeros(n)
    a = np.zeros(n)
    Ka = np.zeros(n)
    F = y.astype(np.float64).copy()
    diag = np.ascontiguousarray(np.diag(K))
    trace = [] if track_objective else None

    it = 0
    while True:
        v_up = F - epsilon
        v_dn = F + epsilon
        sel_i_up = np.where(t_up < C, v_up, -np.inf)
        sel_i_dn = np.where(t_dn > 0.0, v_dn, -np.inf)
        i_u = int(np.argmax(sel_i_up))
        i_d = int(np.argmax(sel_i_dn))
        if sel_i_up[i_u] >= sel_i_dn[i_d]:
            i, i_on_up, m = i_u, True, float(sel_i_up[i_u])
        else:
            i, i_on_up, m = i_d, False, float(sel_i_dn[i_d])

        sel_j_up = np.where(t_up > 0.0, v_up, np.inf)
        sel_j_dn = np.where(t_dn < C, v_dn, np.inf)
        j_u = int(np.argmin(sel_j_up))
        j_d = int(np.argmin(sel_j_dn))
        if sel_j_up[j_u] <= sel_j_dn[j_d]:
            j, j_on_up, M = j_u, True, float(sel_j_up[j_u])
        else:
            j, j_on_up, M = j_d, False, float(sel_j_dn[j_d])

        violation = m - M
        if violation <= tol:
            return t_up, t_dn, a, F, m, M, True, max(violation, 0.0), it, trace
        if it >= max_iter:
            return t_up, t_dn, a, F, m, M, False, violation, it, trace
        it += 1

        cap_i = (C - t_up[i]) if i_on_up else t_dn[i]
        cap_j = t_up[j] if j_on_up else (C - t_dn[j])
        q = diag[i] + diag[j] - 2.0 * K[i, j]
        step = (m - M) / max(q, _TAU)
        step = min(step, cap_i, cap_j)

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
        delta_K = step * (K[:, i] - K[:, j])
        Ka += delta_K
        F -= delta_K

        if trace is not None:
            # dual objective in minimization form
            trace.append(0.5 * float(a @ Ka) + epsilon * float(t_up.sum() + t_dn.sum())
                         - float(y @ a))
