"""Pure-numpy cyclic coordinate descent for the elastic net.

Reference implementation of the hot kernel; the compiled twin in
``_cd_kernel.pyx`` follows the same update order so the two backends agree
to convergence tolerance. Penalties arrive pre-scaled to residual-sum units:
l1_reg = n * alpha * rho, l2_reg = n * alpha * (1 - rho).
"""

import numpy as np

IS_COMPILED = False


def enet_coordinate_descent(w, X, r, col_sq, l1_reg, l2_reg, max_iter, tol):
    """Sweep coordinates until the largest coefficient update is <= tol.

    ``w`` and ``r`` are updated in place; ``r`` must equal y - X @ w on
    entry. Returns (sweeps_run, last_max_update, converged).
    """
    p = X.shape[1]
    sweeps = 0
    max_delta = np.inf
    for sweeps in range(1, max_iter + 1):
        max_delta = 0.0
        for j in range(p):
            wj = w[j]
            denom = col_sq[j] + l2_reg
            if denom == 0.0:
                w_new = 0.0
            else:
                rho_j = X[:, j] @ r + col_sq[j] * wj
                if rho_j > l1_reg:
                    w_new = (rho_j - l1_reg) / denom
                elif rho_j < -l1_reg:
                    w_new = (rho_j + l1_reg) / denom
                else:
                    w_new = 0.0
            if w_new != wj:
                r += (wj - w_new) * X[:, j]
                w[j] = w_new
            delta = abs(w_new - wj)
            if delta > max_delta:
                max_delta = delta
        if max_delta <= tol:
            return sweeps, max_delta, True
    return sweeps, max_delta, False
