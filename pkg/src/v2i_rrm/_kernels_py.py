"""Pure-Python equalizer kernel; arithmetic mirrors _kernels.pyx exactly.

Both backends perform the same floating-point operations in the same order
(and both route log2/sqrt through libm), so a compiled and an interpreted run
produce bit-identical trajectories.
"""

from __future__ import annotations

from math import log2, sqrt

COMPILED = False

# Status codes shared with the compiled backend.
STATUS_CONVERGED = 0
STATUS_STEP_FLOOR = 1
STATUS_ITERATION_CAP = 2


def equalize(
    is_mf,
    phis,
    acoef,
    rates,
    bandwidth,
    antennas,
    total_power,
    eta,
    zeta_s,
    mu0,
    max_iter,
    mu_floor,
    p,
    h,
    trace_max,
    trace_min,
    trace_mu,
):
    """Max-min equalization of h_k = f_k - eta * g_k under a total power budget.

    Starts from the equal split, moves a step mu of power from the current
    argmax of h to the current argmin, halves mu whenever a move is rejected
    (worsened min, worsened max, nonpositive power, or non-shrinking spread)
    and stops once max h - min h <= zeta_s. Writes powers/objectives into p/h
    and, when the trace arrays are non-empty, one (max, min, mu) triple per
    iteration. Returns (status, iterations, mu, trace_len).
    """
    K = len(p)
    tracing = len(trace_max) > 0

    phis_l = [float(x) for x in phis]
    acoef_l = [float(x) for x in acoef]
    rates_l = [float(x) for x in rates]

    def h_eval(k, pk):
        if is_mf:
            gamma = antennas * pk / (total_power - pk + phis_l[k])
        else:
            gamma = pk * phis_l[k]
        t = 1.0 + gamma
        s = sqrt(1.0 - 1.0 / (t * t))
        return -(acoef_l[k] * s) - eta * (bandwidth * log2(t) - rates_l[k])

    equal = total_power / K
    pw = [equal] * K
    hv = [h_eval(k, equal) for k in range(K)]

    cur_min = hv[0]
    cur_max = hv[0]
    for k in range(1, K):
        if hv[k] < cur_min:
            cur_min = hv[k]
        if hv[k] > cur_max:
            cur_max = hv[k]

    mu = mu0
    if tracing:
        trace_max[0] = cur_max
        trace_min[0] = cur_min
        trace_mu[0] = mu

    spread_prev = cur_max - cur_min
    if spread_prev <= zeta_s:
        for k in range(K):
            p[k] = pw[k]
            h[k] = hv[k]
        return STATUS_CONVERGED, 0, mu, 1

    status = STATUS_ITERATION_CAP
    iters = max_iter
    i = 0
    while i < max_iter:
        i += 1
        km = 0
        kM = 0
        for k in range(1, K):
            if hv[k] < hv[km]:
                km = k
            if hv[k] > hv[kM]:
                kM = k

        pm_new = pw[km] + mu
        pM_new = pw[kM] - mu
        rejected = False
        if pM_new <= 0.0:
            rejected = True
        else:
            # Pin the exact power budget: fold the compensated-sum residual
            # of the tentative vector into the reduced entry.
            s_acc = 0.0
            c_acc = 0.0
            for j in range(K):
                if j == km:
                    x = pm_new
                elif j == kM:
                    x = pM_new
                else:
                    x = pw[j]
                t_acc = s_acc + x
                if abs(s_acc) >= abs(x):
                    c_acc += (s_acc - t_acc) + x
                else:
                    c_acc += (x - t_acc) + s_acc
                s_acc = t_acc
            pM_new += total_power - (s_acc + c_acc)
            if pM_new <= 0.0:
                rejected = True
            else:
                hm_new = h_eval(km, pm_new)
                hM_new = h_eval(kM, pM_new)
                new_min = hm_new if hm_new < hM_new else hM_new
                new_max = hm_new if hm_new > hM_new else hM_new
                for j in range(K):
                    if j == km or j == kM:
                        continue
                    if hv[j] < new_min:
                        new_min = hv[j]
                    if hv[j] > new_max:
                        new_max = hv[j]
                spread_new = new_max - new_min
                if spread_new <= zeta_s:
                    pw[km] = pm_new
                    pw[kM] = pM_new
                    hv[km] = hm_new
                    hv[kM] = hM_new
                    cur_min = new_min
                    cur_max = new_max
                    if tracing:
                        trace_max[i] = cur_max
                        trace_min[i] = cur_min
                        trace_mu[i] = mu
                    status = STATUS_CONVERGED
                    iters = i
                    break
                if hm_new <= hv[km] or hM_new >= hv[kM] or spread_prev <= spread_new:
                    rejected = True
                else:
                    pw[km] = pm_new
                    pw[kM] = pM_new
                    hv[km] = hm_new
                    hv[kM] = hM_new
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

    for k in range(K):
        p[k] = pw[k]
        h[k] = hv[k]
    return status, iters, mu, iters + 1
