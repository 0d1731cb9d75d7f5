"""Path kernels compiled with numba.

Each kernel simulates paths ``start .. start+n-1`` and writes the survivors
compactly into the output arrays, returning their count.  ``exp_rate > 0``
replaces the fixed horizon by a per-path Exp(exp_rate) horizon (draw 1).
"""
import math

import numpy as np
from numba import njit

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_S30 = np.uint64(30)
_S27 = np.uint64(27)
_S31 = np.uint64(31)
_S11 = np.uint64(11)
_ONE = np.uint64(1)
_INV53 = 2.0**-53


@njit(inline="always")
def _mix64(z):
    z = (z ^ (z >> _S30)) * _M1
    z = (z ^ (z >> _S27)) * _M2
    return z ^ (z >> _S31)


@njit(inline="always")
def _uniform(base, j):
    x = _mix64(base + (np.uint64(j) + _ONE) * _GAMMA)
    return (np.float64(x >> _S11) + 0.5) * _INV53


@njit(nogil=True, cache=True)
def cp_paths(start, n, key, sign, drift, lam, nu, rho, phi0, horizon, exp_rate,
             out_idx, out_q0, out_qt):
    count = 0
    for p in range(n):
        i = start + p
        base = _mix64(key ^ _mix64(np.uint64(i) + _ONE))
        u = _uniform(base, 0)
        if sign > 0:
            if u <= 1.0 - rho:
                continue  # atom at zero: T = 0
            q0 = math.log(rho / (1.0 - u)) / (nu * (1.0 - rho))
        else:
            q0 = -math.log(u) / phi0
        j = 1
        h = horizon
        if exp_rate > 0.0:
            h = -math.log(_uniform(base, 1)) / exp_rate
            j = 2
        q = q0
        tau = 0.0
        alive = True
        while True:
            gap = -math.log(_uniform(base, j)) / lam
            j += 1
            if tau + gap >= h:
                q += drift * (h - tau)
                if q <= 0.0:
                    alive = False
                break
            q += drift * gap
            if q <= 0.0:
                alive = False
                break
            q += sign * (-math.log(_uniform(base, j)) / nu)
            j += 1
            if q <= 0.0:
                alive = False
                break
            tau += gap
        if alive:
            out_idx[count] = i
            out_q0[count] = q0
            out_qt[count] = q
            count += 1
    return count


@njit(nogil=True, cache=True)
def brownian_paths(start, n, key, drift, sigma, phi0, horizon, exp_rate, dt, bisect,
                   out_idx, out_q0, out_qt):
    count = 0
    s2 = sigma * sigma
    two_pi = 2.0 * math.pi
    for p in range(n):
        i = start + p
        base = _mix64(key ^ _mix64(np.uint64(i) + _ONE))
        q0 = -math.log(_uniform(base, 0)) / phi0
        j = 1
        h = horizon
        if exp_rate > 0.0:
            h = -math.log(_uniform(base, 1)) / exp_rate
            j = 2
        threshold = -math.log(_uniform(base, j))
        j += 1
        steps = max(1, int(math.ceil(h / dt - 1e-9)))
        delta = h / steps
        half = 0.5 * delta
        hazard = 0.0
        x = q0
        alive = True
        for _ in range(steps):
            u1 = _uniform(base, j)
            u2 = _uniform(base, j + 1)
            j += 2
            rad = math.sqrt(-2.0 * math.log(u1))
            z1 = rad * math.cos(two_pi * u2)
            z2 = rad * math.sin(two_pi * u2)
            if bisect:
                mid = x + drift * half + sigma * math.sqrt(half) * z1
                end = mid + drift * half + sigma * math.sqrt(half) * z2
                if mid <= 0.0 or end <= 0.0:
                    alive = False
                    break
                hazard -= math.log1p(-math.exp(-2.0 * x * mid / (s2 * half)))
                hazard -= math.log1p(-math.exp(-2.0 * mid * end / (s2 * half)))
            else:
                end = x + drift * delta + sigma * math.sqrt(half) * (z1 + z2)
                if end <= 0.0:
                    alive = False
                    break
                hazard -= math.log1p(-math.exp(-2.0 * x * end / (s2 * delta)))
            if hazard >= threshold:
                alive = False
                break
            x = end
        if alive:
            out_idx[count] = i
            out_q0[count] = q0
            out_qt[count] = x
            count += 1
    return count
