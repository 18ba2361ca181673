# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled game-loop stepper.

Must stay bit-identical to the pure-Python path in engine._run_pure /
agents.py / rng.py: same splitmix64 streams, same draw order, same IEEE
operation order in the welfare and utility formulas. Compiled without
-ffast-math for that reason.
"""

from libc.stdint cimport int64_t, uint8_t, uint64_t
from libc.stdlib cimport free, malloc

cdef extern from *:
    ctypedef unsigned long long uint128 "unsigned __int128"  # real width in C

cdef inline uint64_t mix64(uint64_t z) nogil:
    z = (z ^ (z >> 30)) * <uint64_t>0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * <uint64_t>0x94D049BB133111EB
    return z ^ (z >> 31)

cdef inline uint64_t next_u64(uint64_t* s) nogil:
    s[0] = s[0] + <uint64_t>0x9E3779B97F4A7C15
    return mix64(s[0])

cdef inline double uniform01(uint64_t* s) nogil:
    return <double>(next_u64(s) >> 11) * (1.0 / 9007199254740992.0)

cdef inline int64_t randbelow(uint64_t* s, int64_t bound) nogil:
    return <int64_t>((<uint128>next_u64(s) * <uint128><uint64_t>bound) >> 64)

cdef inline int pin_draw(uint64_t* s, double p0, int clamp, int64_t completion,
                         int64_t r, int64_t* out_action) nogil:
    if (p0 < -1e-9 or p0 > 1.0 + 1e-9) and not clamp:
        return 1
    if p0 < 0.0:
        p0 = 0.0
    if p0 > 1.0:
        p0 = 1.0
    if uniform01(s) < p0:
        out_action[0] = 0
    elif completion == 0:
        out_action[0] = 1 + randbelow(s, r)
    else:
        out_action[0] = r
    return 0


def run_rounds(int64_t n_rounds, int64_t n, int64_t r, int64_t k,
               double theta0, double theta1,
               double[:] m, double[:] beta, double[:] cm,
               int64_t[:] kinds, uint8_t[:] member_mask, int64_t leader,
               double[:] zd_phi, double[:] zd_alpha0,
               int64_t[:] zd_completion, uint8_t[:] zd_clamp,
               int64_t prior_mode, uint64_t[:] states,
               int64_t[:, :] actions, double[:] welfare, double[:, :] util,
               int64_t[:] resolved):
    """Fill the per-round arrays; returns 0 on success, 1 on an out-of-range
    pinned probability (infeasible solution in strict mode)."""
    cdef double chi0 = theta0 / theta1
    cdef double total_m = 0.0
    cdef double total_cm = 0.0
    cdef double kd = <double>k
    cdef int64_t i, t, total, prev_total, lo, hi, shared
    cdef double chi, gain, beta_dot, w_prev, p0, ind
    cdef int64_t kind
    cdef int status = 0
    cdef int64_t* prev = <int64_t*>malloc(n * sizeof(int64_t))
    cdef int64_t* row = <int64_t*>malloc(n * sizeof(int64_t))
    cdef int64_t[4] mixed_lut
    mixed_lut[0] = 1  # ALLC
    mixed_lut[1] = 0  # ALLD
    mixed_lut[2] = 2  # RAND
    mixed_lut[3] = 3  # TFT
    if prev == NULL or row == NULL:
        free(prev)
        free(row)
        raise MemoryError()

    try:
        for i in range(n):
            total_m = total_m + m[i]
            total_cm = total_cm + cm[i]

        # game-start resolution of MIXED agents, one draw per such org
        for i in range(n):
            if kinds[i] == 4:
                resolved[i] = mixed_lut[randbelow(&states[i + 1], 4)]
            else:
                resolved[i] = kinds[i]

        # synthetic previous outcome for round one
        if prior_mode == 0:
            for i in range(n):
                prev[i] = r
        elif prior_mode == 1:
            for i in range(n):
                prev[i] = 0
        else:
            for i in range(n):
                prev[i] = randbelow(&states[0], r + 1)

        for t in range(n_rounds):
            prev_total = 0
            for i in range(n):
                prev_total = prev_total + prev[i]
            chi = theta0 / (theta1 + <double>(k * prev_total))
            gain = chi0 - chi
            beta_dot = 0.0
            for i in range(n):
                beta_dot = beta_dot + beta[i] * <double>prev[i]
            w_prev = total_m * gain - kd * beta_dot - total_cm

            shared = 0
            if leader >= 0:
                ind = 1.0 if prev[leader] == 0 else 0.0
                p0 = ind + zd_phi[leader] * (w_prev + zd_alpha0[leader])
                if pin_draw(&states[leader + 1], p0, zd_clamp[leader],
                            zd_completion[leader], r, &shared):
                    status = 1
                    break

            for i in range(n):
                if member_mask[i]:
                    row[i] = shared
                    continue
                kind = resolved[i]
                if kind == 0:      # ALLD
                    row[i] = 0
                elif kind == 1:    # ALLC
                    row[i] = r
                elif kind == 2:    # RAND
                    row[i] = randbelow(&states[i + 1], r + 1)
                elif kind == 3:    # TFT
                    if 2 * prev_total < n * r:
                        lo = 0
                        hi = r / 2
                    else:
                        lo = (r + 1) / 2
                        hi = r
                    row[i] = lo + randbelow(&states[i + 1], hi - lo + 1)
                elif kind == 5:    # individual pinning
                    ind = 1.0 if prev[i] == 0 else 0.0
                    p0 = ind + zd_phi[i] * (w_prev + zd_alpha0[i])
                    if pin_draw(&states[i + 1], p0, zd_clamp[i],
                                zd_completion[i], r, &row[i]):
                        status = 1
                        break
                else:
                    raise ValueError(f"unexpected agent kind {kind}")
            if status:
                break

            total = 0
            for i in range(n):
                total = total + row[i]
            chi = theta0 / (theta1 + <double>(k * total))
            gain = chi0 - chi
            beta_dot = 0.0
            for i in range(n):
                beta_dot = beta_dot + beta[i] * <double>row[i]
            welfare[t] = total_m * gain - kd * beta_dot - total_cm
            for i in range(n):
                util[t, i] = m[i] * gain - (beta[i] * kd * <double>row[i] + cm[i])
                actions[t, i] = row[i]
                prev[i] = row[i]
    finally:
        free(prev)
        free(row)
    return status
