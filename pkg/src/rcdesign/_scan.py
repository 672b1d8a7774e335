"""Jit kernel for the v < r+c-1 admissibility scan at large v.

Substituting r = e+a, c = e+b into ev = rc gives e | ab; writing ab = ke the
window condition v < r+c-1 becomes 1 <= k <= e-2 and v = e+a+b+k.  The scan
walks (e, k), factors ke once, and tests every divisor split ab = ke.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def scan_small_v_kernel(v_max, mode, max_out=2_000_000):
    """mode: 0 double/triple (both lambdas), 1 rr-only, 2 cc-only, 3 ao."""
    spf = np.zeros(v_max + 1, np.int64)
    for i in range(2, v_max + 1):
        if spf[i] == 0:
            j = i
            while j <= v_max:
                if spf[j] == 0:
                    spf[j] = i
                j += i

    out = np.empty((max_out, 3), np.int64)
    n_out = 0
    primes = np.empty(40, np.int64)
    exps = np.empty(40, np.int64)
    divbuf = np.empty(8192, np.int64)

    for e in range(3, v_max + 1):
        se = np.int64(np.sqrt(e))
        while se * se > e:
            se -= 1
        while (se + 1) * (se + 1) <= e:
            se += 1
        if e + 1 + 2 * se > v_max:
            break
        for k in range(1, e - 1):
            n = k * e
            s = np.int64(np.sqrt(n))
            while s * s > n:
                s -= 1
            while (s + 1) * (s + 1) <= n:
                s += 1
            if e + k + 2 * s > v_max:
                break
            # factor n = k * e by merging the two factorizations
            npr = 0
            for which in range(2):
                m = k if which == 0 else e
                while m > 1:
                    p = spf[m]
                    cnt = 0
                    while m % p == 0:
                        m //= p
                        cnt += 1
                    seen = False
                    for t in range(npr):
                        if primes[t] == p:
                            exps[t] += cnt
                            seen = True
                            break
                    if not seen:
                        primes[npr] = p
                        exps[npr] = cnt
                        npr += 1
            ndiv = 1
            divbuf[0] = 1
            for t in range(npr):
                base = ndiv
                pe = np.int64(1)
                for _x in range(exps[t]):
                    pe *= primes[t]
                    for y in range(base):
                        divbuf[ndiv] = divbuf[y] * pe
                        ndiv += 1
            for t in range(ndiv):
                a = divbuf[t]
                b = n // a
                v = e + a + b + k
                if v > v_max or v < 6:
                    continue
                r = e + a
                c = e + b
                if mode == 0 or mode == 1:
                    if (c * (e - 1)) % (r - 1) != 0:
                        continue
                if mode == 0 or mode == 2:
                    if (r * (e - 1)) % (c - 1) != 0:
                        continue
                if n_out >= max_out:
                    return out[:n_out]
                out[n_out, 0] = v
                out[n_out, 1] = r
                out[n_out, 2] = c
                n_out += 1
    return out[:n_out]
