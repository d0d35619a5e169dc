# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled equalizer kernel; arithmetic mirrors _kernels_py exactly.

Every floating-point operation appears in the same order as in the pure
Python twin and log2/sqrt resolve to the same libm, keeping the two backends
bit-identical.
"""

from libc.math cimport fabs, log2, sqrt

COMPILED = True

STATUS_CONVERGED = 0
STATUS_STEP_FLOOR = 1
STATUS_ITERATION_CAP = 2


cdef inline double h_eval(
    bint is_mf,
    double antennas,
    double total_power,
    double bandwidth,
    double eta,
    double phi_k,
    double a_k,
    double rate_k,
    double pk,
) noexcept nogil:
    cdef double gamma, t, s
    if is_mf:
        gamma = antennas * pk / (total_power - pk + phi_k)
    else:
        gamma = pk * phi_k
    t = 1.0 + gamma
    s = sqrt(1.0 - 1.0 / (t * t))
    return -(a_k * s) - eta * (bandwidth * log2(t) - rate_k)


def equalize(
    bint is_mf,
    double[::1] phis,
    double[::1] acoef,
    double[::1] rates,
    double bandwidth,
    double antennas,
    double total_power,
    double eta,
    double zeta_s,
    double mu0,
    long max_iter,
    double mu_floor,
    double[::1] p,
    double[::1] h,
    double[::1] trace_max,
    double[::1] trace_min,
    double[::1] trace_mu,
):
    """See _kernels_py.equalize; returns (status, iterations, mu, trace_len)."""
    cdef Py_ssize_t K = p.shape[0]
    cdef bint tracing = trace_max.shape[0] > 0
    cdef Py_ssize_t i, j, k, km, kM
    cdef double equal, mu, cur_min, cur_max, spread_prev, spread_new
    cdef double pm_new, pM_new, hm_new, hM_new, new_min, new_max
    cdef double s_acc, c_acc, t_acc, x
    cdef bint rejected
    cdef int status
    cdef long iters

    equal = total_power / K
    for k in range(K):
        p[k] = equal
        h[k] = h_eval(
            is_mf, antennas, total_power, bandwidth, eta,
            phis[k], acoef[k], rates[k], equal,
        )

    cur_min = h[0]
    cur_max = h[0]
    for k in range(1, K):
        if h[k] < cur_min:
            cur_min = h[k]
        if h[k] > cur_max:
            cur_max = h[k]

    mu = mu0
    if tracing:
        trace_max[0] = cur_max
        trace_min[0] = cur_min
        trace_mu[0] = mu

    spread_prev = cur_max - cur_min
    if spread_prev <= zeta_s:
        return STATUS_CONVERGED, 0, mu, 1

    status = STATUS_ITERATION_CAP
    iters = max_iter
    i = 0
    while i < max_iter:
        i += 1
        km = 0
        kM = 0
        for k in range(1, K):
            if h[k] < h[km]:
                km = k
            if h[k] > h[kM]:
                kM = k

        pm_new = p[km] + mu
        pM_new = p[kM] - mu
        rejected = False
        if pM_new <= 0.0:
            rejected = True
        else:
            s_acc = 0.0
            c_acc = 0.0
            for j in range(K):
                if j == km:
                    x = pm_new
                elif j == kM:
                    x = pM_new
                else:
                    x = p[j]
                t_acc = s_acc + x
                if fabs(s_acc) >= fabs(x):
                    c_acc += (s_acc - t_acc) + x
                else:
                    c_acc += (x - t_acc) + s_acc
                s_acc = t_acc
            pM_new += total_power - (s_acc + c_acc)
            if pM_new <= 0.0:
                rejected = True
            else:
                hm_new = h_eval(
                    is_mf, antennas, total_power, bandwidth, eta,
                    phis[km], acoef[km], rates[km], pm_new,
                )
                hM_new = h_eval(
                    is_mf, antennas, total_power, bandwidth, eta,
                    phis[kM], acoef[kM], rates[kM], pM_new,
                )
                new_min = hm_new if hm_new < hM_new else hM_new
                new_max = hm_new if hm_new > hM_new else hM_new
                for j in range(K):
                    if j == km or j == kM:
                        continue
                    if h[j] < new_min:
                        new_min = h[j]
                    if h[j] > new_max:
                        new_max = h[j]
                spread_new = new_max - new_min
                if spread_new <= zeta_s:
                    p[km] = pm_new
                    p[kM] = pM_new
                    h[km] = hm_new
                    h[kM] = hM_new
                    cur_min = new_min
                    cur_max = new_max
                    if tracing:
                        trace_max[i] = cur_max
                        trace_min[i] = cur_min
                        trace_mu[i] = mu
                    status = STATUS_CONVERGED
                    iters = i
                    break
                if hm_new <= h[km] or hM_new >= h[kM] or spread_prev <= spread_new:
                    rejected = True
                else:
                    p[km] = pm_new
                    p[kM] = pM_new
                    h[km] = hm_new
                    h[kM] = hM_new
                    cur_min = new_min
                    cur_max = new_max
                    spread_prev = spread_new

        if rejected:
            mu = 0.5 * mu
            if tracing:
                trace_max[i] = cur_max
                trace_min[i] = cur_min
                trace_mu[i] = mu
            if mu < mu_floor:
                status = STATUS_STEP_FLOOR
                iters = i
                break
        elif tracing:
            trace_max[i] = cur_max
            trace_min[i] = cur_min
            trace_mu[i] = mu

    return status, iters, mu, iters + 1
