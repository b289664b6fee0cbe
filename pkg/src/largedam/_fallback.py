"""Pure-Python implementations of the hot kernels.

Selected when the compiled extension is unavailable.  The simulation loop
performs the same floating-point operations in the same order as the
compiled version and draws from the same numpy bit generator, so both give
bit-identical results for a given seed.
"""

import math

import numpy as np

# column layout of the per-batch accumulator rows
COL_TOTAL, COL_IDLE, COL_B1, COL_B2, COL_ABOVE = 0, 1, 2, 3, 4
COL_LEVEL = 5


def takacs_forward(f, q0, n):
    """Forward solve of ``Q_m = sum_{i=0}^{m} f_i Q_{m-i+1}`` for ``Q_0..Q_n``."""
    f = np.asarray(f, dtype=np.float64)
    fl = np.zeros(n + 1, dtype=np.longdouble)
    k = min(n + 1, f.size)
    fl[:k] = f[:k]
    q = np.zeros(n + 1, dtype=np.longdouble)
    q[0] = q0
    f0 = fl[0]
    for m in range(n):
        # f_1..f_m against Q_m..Q_1
        s = np.dot(fl[1 : m + 1], q[m:0:-1]) if m else 0.0
        q[m + 1] = (q[m] - s) / f0
    return q.astype(np.float64)


def _draw_service(rng, code, params):
    if code == 0:
        return params[0]
    if code == 1:
        return -math.log(1.0 - rng.random()) / params[0]
    if code == 2:
        k = int(params[0])
        x = 0.0
        for _ in range(k):
            x += -math.log(1.0 - rng.random()) / params[1]
        return x
    m = params.shape[0] // 2
    u = rng.random()
    j = 0
    while j < m - 1 and u >= params[j]:
        j += 1
    return -math.log(1.0 - rng.random()) / params[m + j]


def simulate_kernel(bitgen, lam, cdf, code1, params1, code2, params2, L, n_events, n_warm, n_batches):
    """Event loop; returns ``(acc, cycles)``.

    ``acc[b]`` holds time totals for statistics batch ``b``: total, idle,
    normal-service, high-service, level above ``L``, level histogram
    ``1..L`` and normal-service time by starting level ``1..L``.
    ``cycles`` = [count, sum served, sum served^2, sum normal served,
    sum normal served^2] over busy cycles that began after warmup.
    """
    rng = np.random.Generator(bitgen)
    cdf = np.asarray(cdf, dtype=np.float64)
    params1 = np.asarray(params1, dtype=np.float64)
    params2 = np.asarray(params2, dtype=np.float64)
    ncdf = cdf.shape[0]
    acc = np.zeros((n_batches, 5 + 2 * L))
    cycles = np.zeros(5)
    n_post = n_events - n_warm
    col_start = COL_LEVEL + L
    inf = math.inf

    t = 0.0
    n = 0
    stype = 0
    start_level = 0
    t_arr = -math.log(1.0 - rng.random()) / lam
    t_dep = inf
    served = 0
    served1 = 0
    counted = False
    ev = 0
    while ev < n_events:
        arrival = t_arr <= t_dep
        t_next = t_arr if arrival else t_dep
        if ev >= n_warm:
            row = acc[(ev - n_warm) * n_batches // n_post]
            dt = t_next - t
            row[COL_TOTAL] += dt
            if n == 0:
                row[COL_IDLE] += dt
            else:
                if stype == 1:
                    row[COL_B1] += dt
                    row[col_start + start_level - 1] += dt
                else:
                    row[COL_B2] += dt
                if n > L:
                    row[COL_ABOVE] += dt
                else:
                    row[COL_LEVEL + n - 1] += dt
        t = t_next
        if arrival:
            u = rng.random()
            lo, hi = 0, ncdf - 1
            while lo < hi:
                mid = (lo + hi) // 2
                if u < cdf[mid]:
                    hi = mid
                else:
                    lo = mid + 1
            was_idle = n == 0
            n += lo + 1
            t_arr = t + (-math.log(1.0 - rng.random()) / lam)
            if was_idle:
                counted = ev >= n_warm
                served = 0
                served1 = 0
                if n > L:
                    stype = 2
                    t_dep = t + _draw_service(rng, code2, params2)
                else:
                    stype = 1
                    start_level = n
                    t_dep = t + _draw_service(rng, code1, params1)
        else:
            n -= 1
            served += 1
            if stype == 1:
                served1 += 1
            if n > 0:
                if n > L:
                    stype = 2
                    t_dep = t + _draw_service(rng, code2, params2)
                else:
                    stype = 1
                    start_level = n
                    t_dep = t + _draw_service(rng, code1, params1)
            else:
                stype = 0
                t_dep = inf
                if counted:
                    cycles[0] += 1.0
                    cycles[1] += served
                    cycles[2] += float(served) * served
                    cycles[3] += served1
                    cycles[4] += float(served1) * served1
        ev += 1
    return acc, cycles
