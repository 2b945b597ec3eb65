"""Hot numeric kernels.

Every kernel here is written in the numba-compatible subset of numpy and
wrapped with :func:`supersol._accel.jit`, so it runs compiled by default and
as plain Python when ``SUPERSOL_DISABLE_NUMBA=1``.  The finite-difference
stencil has a separate vectorised numpy formulation, which is what the
fallback path uses.
"""

import numpy as np

from ._accel import USE_NUMBA, jit

# nonlinearity codes understood by f_family
F_POWER = 0
F_SUM = 1
F_MAX = 2
F_SINGULAR = 3

# right-hand side kinds understood by rhs_eval
KIND_EXTREMAL = 0
KIND_RADIAL = 1
KIND_CONE = 2

# weight codes for KIND_RADIAL
W_CONSTANT = 0
W_RADIAL_POWER = 1

# dopri_solve status codes
STATUS_OK = 0
STATUS_STOPPED = 1
STATUS_BLOWUP = 2
STATUS_MAX_STEPS = 3
STATUS_STEP_UNDERFLOW = 4


@jit
def f_family(code, a, b, s):
    if s < 0.0:
        s = 0.0
    if code == F_POWER:
        return s**a
    if code == F_SUM:
        return s**a + s**b
    if code == F_MAX:
        return max(s**a, s**b)
    # F_SINGULAR: (1 - s)^(-a)
    return (1.0 - s) ** (-a)


@jit
def rhs_eval(kind, t, y, prm):
    out = np.empty_like(y)
    if kind == KIND_EXTREMAL:
        # prm: code, a, b, p, kappa, alpha, rho
        code = int(prm[0])
        p = prm[3]
        kappa = prm[4]
        m = y[0]
        if m <= 0.0:
            out[0] = 0.0
        else:
            g = (prm[6] * f_family(code, prm[1], prm[2], m)) ** (1.0 / (1.0 - p))
            out[0] = -kappa * prm[5] * t ** (kappa - 1.0) * g
    elif kind == KIND_RADIAL:
        # prm: code, a, b, p, N, weight code, weight param, source, fscale
        code = int(prm[0])
        p = prm[3]
        n = prm[4]
        if int(prm[5]) == W_CONSTANT:
            rho = prm[6]
        else:
            rho = t ** prm[6] if t > 0.0 else 0.0
        s = -prm[7]
        if prm[8] != 0.0:
            s -= prm[8] * rho * f_family(code, prm[1], prm[2], y[0]) * abs(y[1]) ** p
        out[0] = y[1]
        if t > 0.0:
            out[1] = s - (n - 1.0) * y[1] / t
        else:
            out[1] = s / n
    else:
        # KIND_CONE, prm: beta_q, q
        w = y[0]
        wq = w ** prm[1] if w > 0.0 else 0.0
        out[0] = y[1]
        out[1] = -prm[0] * w - wq
    return out


@jit
def _dopri_step(kind, t, y, h, prm, k1):
    k2 = rhs_eval(kind, t + h / 5.0, y + h * (k1 / 5.0), prm)
    k3 = rhs_eval(kind, t + 3.0 * h / 10.0, y + h * (3.0 / 40.0 * k1 + 9.0 / 40.0 * k2), prm)
    k4 = rhs_eval(
        kind, t + 4.0 * h / 5.0,
        y + h * (44.0 / 45.0 * k1 - 56.0 / 15.0 * k2 + 32.0 / 9.0 * k3), prm,
    )
    k5 = rhs_eval(
        kind, t + 8.0 * h / 9.0,
        y + h * (19372.0 / 6561.0 * k1 - 25360.0 / 2187.0 * k2
                 + 64448.0 / 6561.0 * k3 - 212.0 / 729.0 * k4), prm,
    )
    k6 = rhs_eval(
        kind, t + h,
        y + h * (9017.0 / 3168.0 * k1 - 355.0 / 33.0 * k2 + 46732.0 / 5247.0 * k3
                 + 49.0 / 176.0 * k4 - 5103.0 / 18656.0 * k5), prm,
    )
    y5 = y + h * (35.0 / 384.0 * k1 + 500.0 / 1113.0 * k3 + 125.0 / 192.0 * k4
                  - 2187.0 / 6784.0 * k5 + 11.0 / 84.0 * k6)
    k7 = rhs_eval(kind, t + h, y5, prm)
    err = h * (71.0 / 57600.0 * k1 - 71.0 / 16695.0 * k3 + 71.0 / 1920.0 * k4
               - 17253.0 / 339200.0 * k5 + 22.0 / 525.0 * k6 - 1.0 / 40.0 * k7)
    return y5, err, k7


@jit
def dopri_solve(kind, prm, t0, y0, t_eval, rtol, atol, max_steps, stop_idx, blowup):
    """Adaptive Dormand-Prince 5(4) integration landing exactly on ``t_eval``.

    Returns ``(ys, n_filled, t_stop, n_steps, n_rejected, status)``.  When
    ``stop_idx >= 0`` the run ends at the first zero of that component, located
    by bisection on the step length; rows past ``n_filled`` are left as zeros.
    """
    dim = y0.shape[0]
    n_out = t_eval.shape[0]
    ys = np.zeros((n_out, dim))
    t = t0
    y = y0.copy()
    span = t_eval[n_out - 1] - t0
    h = 1e-3 * span if span > 0.0 else 1e-3
    k1 = rhs_eval(kind, t, y, prm)
    n_steps = 0
    n_rej = 0
    t_stop = np.nan
    for j in range(n_out):
        target = t_eval[j]
        while t < target:
            if n_steps + n_rej >= max_steps:
                return ys, j, t_stop, n_steps, n_rej, STATUS_MAX_STEPS
            clipped = h >= target - t
            h_try = target - t if clipped else h
            if h_try <= 1e-15 * max(1.0, abs(t)):
                return ys, j, t_stop, n_steps, n_rej, STATUS_STEP_UNDERFLOW
            y5, err, k7 = _dopri_step(kind, t, y, h_try, prm, k1)
            enorm = 0.0
            for i in range(dim):
                sc = atol + rtol * max(abs(y[i]), abs(y5[i]))
                v = abs(err[i]) / sc
                if v > enorm:
                    enorm = v
            if enorm <= 1.0:
                if stop_idx >= 0 and y5[stop_idx] <= 0.0:
                    lo = 0.0
                    hi = h_try
                    for _ in range(200):
                        mid = 0.5 * (lo + hi)
                        ym, _e, _k = _dopri_step(kind, t, y, mid, prm, k1)
                        if ym[stop_idx] > 0.0:
                            lo = mid
                        else:
                            hi = mid
                        if hi - lo <= 1e-16 * max(1.0, abs(t)):
                            break
                    y_stop, _e, _k = _dopri_step(kind, t, y, hi, prm, k1)
                    y_stop[stop_idx] = 0.0
                    t_stop = t + hi
                    n_steps += 1
                    filled = j
                    for jj in range(j, n_out):
                        if t_eval[jj] >= t_stop:
                            break
                        y_last, _e, _k = _dopri_step(kind, t, y, t_eval[jj] - t, prm, k1)
                        ys[jj, :] = y_last
                        filled = jj + 1
                    return ys, filled, t_stop, n_steps, n_rej, STATUS_STOPPED
                n_steps += 1
                t = target if clipped else t + h_try
                y = y5
                k1 = k7
                for i in range(dim):
                    if abs(y[i]) > blowup:
                        return ys, j, t_stop, n_steps, n_rej, STATUS_BLOWUP
                fac = 5.0 if enorm == 0.0 else min(5.0, max(0.2, 0.9 * enorm ** -0.2))
                h_new = h_try * fac
                h = max(h, h_new) if clipped else h_new
            else:
                n_rej += 1
                h = h_try * max(0.2, 0.9 * enorm ** -0.2)
        ys[j, :] = y
    return ys, n_out, t_stop, n_steps, n_rej, STATUS_OK


@jit
def _fd_lap_grad_loop(u_flat, shape, h):
    ndim = shape.shape[0]
    strides = np.empty(ndim, np.int64)
    s = 1
    for d in range(ndim - 1, -1, -1):
        strides[d] = s
        s *= shape[d]
    total = u_flat.shape[0]
    lap = np.full(total, np.nan)
    grad = np.full(total, np.nan)
    inv_h2 = 1.0 / (h * h)
    for i in range(total):
        interior = True
        for d in range(ndim):
            idx = (i // strides[d]) % shape[d]
            if idx == 0 or idx == shape[d] - 1:
                interior = False
                break
        if not interior:
            continue
        c = u_flat[i]
        acc = 0.0
        g2 = 0.0
        for d in range(ndim):
            a = u_flat[i + strides[d]]
            b = u_flat[i - strides[d]]
            acc += a - 2.0 * c + b
            g = (a - b) / (2.0 * h)
            g2 += g * g
        lap[i] = acc * inv_h2
        grad[i] = np.sqrt(g2)
    return lap, grad


def _fd_lap_grad_numpy(u, h):
    core = tuple(slice(1, -1) for _ in range(u.ndim))
    lap_core = np.zeros(tuple(n - 2 for n in u.shape))
    g2 = np.zeros_like(lap_core)
    for d in range(u.ndim):
        hi = list(core)
        lo = list(core)
        hi[d] = slice(2, None)
        lo[d] = slice(None, -2)
        a = u[tuple(hi)]
        b = u[tuple(lo)]
        lap_core += a - 2.0 * u[core] + b
        g2 += ((a - b) / (2.0 * h)) ** 2
    lap = np.full(u.shape, np.nan)
    grad = np.full(u.shape, np.nan)
    lap[core] = lap_core / (h * h)
    grad[core] = np.sqrt(g2)
    return lap, grad


def fd_lap_grad(u, h, use_numba=None):
    """Central-difference Laplacian and gradient norm; NaN on the boundary layer."""
    u = np.ascontiguousarray(u, dtype=float)
    if any(n < 3 for n in u.shape):
        raise ValueError("grid needs at least 3 nodes per axis")
    if use_numba is None:
        use_numba = USE_NUMBA
    if use_numba:
        lap, grad = _fd_lap_grad_loop(u.ravel(), np.asarray(u.shape, dtype=np.int64), float(h))
        return lap.reshape(u.shape), grad.reshape(u.shape)
    return _fd_lap_grad_numpy(u, h)
