"""Compiled trial runner for linear-loss streams.

A single numba kernel advances one trial through a chunk of precomputed
slopes, carrying the iterate, moments, running max and ledger accumulators
across chunk calls. The arithmetic mirrors kernels.py operation for
operation (same expressions, same evaluation order), so this runner and the
step-by-step kernel path produce bit-identical trajectories and ledgers; the
test suite asserts that equivalence rather than trusting it.

Within a step t the order is: realized loss difference at the pre-update
iterate, trajectory record, moment and rate updates (ledger accumulation),
checkpoint snapshot, projected iterate update. Checkpoint rows therefore
hold x_t together with the regret and inverse-rate sums through step t.
"""

from __future__ import annotations

import math

from numba import njit

OPT_SGDM = 0
OPT_ADAM = 1
OPT_AMSGRAD = 2
OPT_ADABOUND = 3
OPT_AMSBOUND = 4

FAM_NONE = -1
FAM_GAMMA = 0
FAM_STEP = 1
FAM_CONST = 2

SCHED_CONST = 0
SCHED_OVER_T = 1

# acc layout: [0] regret, [1] error flag, [2] step at which the error fired,
# [3] unclamped-increment sum over steps t >= drift_from (the projection is
# what censors drift at the box faces; increments themselves are exogenous
# for linear losses)
ERR_ZERO_SECOND_MOMENT = 1.0


@njit(cache=True, nogil=True, error_model="numpy")
def run_chunk(t0, slopes,
              opt, sched, alpha, beta1, beta2, kappa, eps, bias_correction,
              fam, fam_gamma, fam_alpha, fam_beta2, fam_C, fam_K,
              fam_alpha_star,
              lo, hi, x_star,
              x, m, v, vhat, eta_buf, sums, acc,
              cps, cp_ptr, cp_x, cp_regret, cp_sums, cp_ehat,
              rec, do_record, drift_from):
    n, d = slopes.shape
    for k in range(n):
        t = t0 + k
        tf = float(t)
        sqrt_t = math.sqrt(tf)
        if sched == SCHED_OVER_T:
            b1t = beta1 / tf
        else:
            b1t = beta1

        # realized loss difference at the pre-update iterate
        s_x = 0.0
        s_star = 0.0
        for i in range(d):
            s_x += slopes[k, i] * x[i]
            s_star += slopes[k, i] * x_star[i]
        acc[0] += s_x - s_star

        if do_record:
            for i in range(d):
                rec[t - 1, i] = x[i]

        if opt == OPT_SGDM:
            lr = alpha / sqrt_t
            if bias_correction:
                rate = lr / (1.0 - beta1 ** tf)
            else:
                rate = lr
            eta_inv = 1.0 / rate
            for i in range(d):
                m[i] = beta1 * m[i] + (1.0 - kappa) * slopes[k, i]
                eta_buf[i] = rate
                sums[0, i] += b1t * eta_inv
                if t == 1:
                    sums[1, i] = eta_inv
                sums[2, i] = eta_inv / sqrt_t
        else:
            lo_b = 0.0
            hi_b = math.inf
            if fam == FAM_GAMMA:
                lo_b = 1.0 - 1.0 / (fam_gamma * tf + 1.0)
                hi_b = 1.0 + 1.0 / (fam_gamma * tf)
            elif fam == FAM_STEP:
                lo_b = fam_alpha / fam_C
                if tf <= fam_K:
                    hi_b = fam_alpha / math.sqrt(1.0 - fam_beta2)
                else:
                    hi_b = fam_alpha / fam_C
            elif fam == FAM_CONST:
                lo_b = fam_alpha_star
                hi_b = fam_alpha_star
            use_max = opt == OPT_AMSGRAD or opt == OPT_AMSBOUND
            bounded = opt == OPT_ADABOUND or opt == OPT_AMSBOUND
            for i in range(d):
                g = slopes[k, i]
                m[i] = b1t * m[i] + (1.0 - b1t) * g
                v[i] = beta2 * v[i] + (1.0 - beta2) * g * g
                if use_max and v[i] > vhat[i]:
                    vhat[i] = v[i]
                base = vhat[i] if use_max else v[i]
                denom = math.sqrt(base) + eps
                if not bounded and denom == 0.0:
                    acc[1] = ERR_ZERO_SECOND_MOMENT
                    acc[2] = tf
                    return cp_ptr
                e = alpha / denom
                if bounded:
                    if e > hi_b:
                        e = hi_b
                    if e < lo_b:
                        e = lo_b
                eta = e / sqrt_t
                eta_buf[i] = eta
                eta_inv = 1.0 / eta
                sums[0, i] += b1t * eta_inv
                if t == 1:
                    sums[1, i] = eta_inv
                sums[2, i] = eta_inv / sqrt_t

        if cp_ptr < cps.shape[0] and t == cps[cp_ptr]:
            cp_regret[cp_ptr] = acc[0]
            for i in range(d):
                cp_x[cp_ptr, i] = x[i]
                cp_sums[cp_ptr, i] = sums[0, i]
                cp_ehat[cp_ptr, i] = sums[2, i]
            cp_ptr += 1

        for i in range(d):
            step_i = eta_buf[i] * m[i]
            if t >= drift_from:
                acc[3] -= step_i
            xi = x[i] - step_i
            if xi < lo[i]:
                xi = lo[i]
            if xi > hi[i]:
                xi = hi[i]
            x[i] = xi
    return cp_ptr
