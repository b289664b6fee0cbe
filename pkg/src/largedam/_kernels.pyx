# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels: the Takács forward recursion and the event loop.

The event loop mirrors ``_fallback.simulate_kernel`` operation for operation.
"""

import numpy as np
cimport numpy as cnp
from cpython.pycapsule cimport PyCapsule_GetPointer
from libc.math cimport log, INFINITY
from numpy.random cimport bitgen_t

cnp.import_array()

cdef enum:
    COL_TOTAL = 0
    COL_IDLE = 1
    COL_B1 = 2
    COL_B2 = 3
    COL_ABOVE = 4
    COL_LEVEL = 5


def takacs_forward(f, double q0, Py_ssize_t n):
    """Forward solve with TwoSum-compensated convolution sums."""
    cdef cnp.ndarray[double, ndim=1] fa = np.zeros(n + 1)
    cdef Py_ssize_t k = min(n + 1, len(f))
    fa[:k] = np.asarray(f, dtype=np.float64)[:k]
    cdef cnp.ndarray[double, ndim=1] qa = np.zeros(n + 1)
    cdef double[::1] fv = fa
    cdef double[::1] q = qa
    cdef double f0 = fv[0], s, c, t, x, bp
    cdef Py_ssize_t m, i
    q[0] = q0
    for m in range(n):
        # compensated sum of q[m] - sum_{i=1..m} f_i q[m-i+1]
        s = q[m]
        c = 0.0
        for i in range(1, m + 1):
            # branchless TwoSum
            x = -fv[i] * q[m - i + 1]
            t = s + x
            bp = t - s
            c += (s - (t - bp)) + (x - bp)
            s = t
        q[m + 1] = (s + c) / f0
    return qa


cdef inline double _expo(bitgen_t *rng, double rate) noexcept nogil:
    return -log(1.0 - rng.next_double(rng.state)) / rate


cdef double _draw_service(bitgen_t *rng, int code, double[::1] p) noexcept nogil:
    cdef int k, j, m
    cdef double x, u
    if code == 0:
        return p[0]
    if code == 1:
        return -log(1.0 - rng.next_double(rng.state)) / p[0]
    if code == 2:
        k = <int>p[0]
        x = 0.0
        for j in range(k):
            x += -log(1.0 - rng.next_double(rng.state)) / p[1]
        return x
    m = p.shape[0] // 2
    u = rng.next_double(rng.state)
    j = 0
    while j < m - 1 and u >= p[j]:
        j += 1
    return -log(1.0 - rng.next_double(rng.state)) / p[m + j]


def simulate_kernel(bitgen, double lam, cdf, int code1, params1, int code2, params2,
                    long L, long long n_events, long long n_warm, long n_batches):
    """Compiled event loop; see ``_fallback.simulate_kernel`` for the contract."""
    capsule = bitgen.capsule
    cdef bitgen_t *rng = <bitgen_t *> PyCapsule_GetPointer(capsule, "BitGenerator")
    cdef double[::1] cd = np.ascontiguousarray(cdf, dtype=np.float64)
    cdef double[::1] p1 = np.ascontiguousarray(params1, dtype=np.float64)
    cdef double[::1] p2 = np.ascontiguousarray(params2, dtype=np.float64)
    acc_arr = np.zeros((n_batches, 5 + 2 * L))
    cyc_arr = np.zeros(5)
    cdef double[:, ::1] acc = acc_arr
    cdef double[::1] cycles = cyc_arr
    cdef long long n_post = n_events - n_warm
    cdef long col_start = COL_LEVEL + L
    cdef long ncdf = cd.shape[0]
    cdef double t = 0.0, t_next, t_arr, t_dep = INFINITY, dt, u
    cdef long long n = 0, ev = 0, served = 0, served1 = 0
    cdef long lo, hi, mid, b
    cdef int stype = 0
    cdef long start_level = 0
    cdef bint arrival, was_idle, counted = False

    with bitgen.lock:
        with nogil:
            t_arr = -log(1.0 - rng.next_double(rng.state)) / lam
            while ev < n_events:
                arrival = t_arr <= t_dep
                t_next = t_arr if arrival else t_dep
                if ev >= n_warm:
                    b = <long>((ev - n_warm) * n_batches // n_post)
                    dt = t_next - t
                    acc[b, COL_TOTAL] += dt
                    if n == 0:
                        acc[b, COL_IDLE] += dt
                    else:
                        if stype == 1:
                            acc[b, COL_B1] += dt
                            acc[b, col_start + start_level - 1] += dt
                        else:
                            acc[b, COL_B2] += dt
                        if n > L:
                            acc[b, COL_ABOVE] += dt
                        else:
                            acc[b, COL_LEVEL + n - 1] += dt
                t = t_next
                if arrival:
                    u = rng.next_double(rng.state)
                    lo = 0
                    hi = ncdf - 1
                    while lo < hi:
                        mid = (lo + hi) // 2
                        if u < cd[mid]:
                            hi = mid
                        else:
                            lo = mid + 1
                    was_idle = n == 0
                    n += lo + 1
                    t_arr = t + (-log(1.0 - rng.next_double(rng.state)) / lam)
                    if was_idle:
                        counted = ev >= n_warm
                        served = 0
                        served1 = 0
                        if n > L:
                            stype = 2
                            t_dep = t + _draw_service(rng, code2, p2)
                        else:
                            stype = 1
                            start_level = n
                            t_dep = t + _draw_service(rng, code1, p1)
                else:
                    n -= 1
                    served += 1
                    if stype == 1:
                        served1 += 1
                    if n > 0:
                        if n > L:
                            stype = 2
                            t_dep = t + _draw_service(rng, code2, p2)
                        else:
                            stype = 1
                            start_level = n
                            t_dep = t + _draw_service(rng, code1, p1)
                    else:
                        stype = 0
                        t_dep = INFINITY
                        if counted:
                            cycles[0] += 1.0
                            cycles[1] += served
                            cycles[2] += <double>served * served
                            cycles[3] += served1
                            cycles[4] += <double>served1 * served1
                ev += 1
    return acc_arr, cyc_arr
