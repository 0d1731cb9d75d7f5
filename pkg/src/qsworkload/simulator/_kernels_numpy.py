"""Vectorised numpy versions of the path kernels (same draws, same survivors)."""
import numpy as np

from ._rng import path_bases, uniforms


def _setup(start, n, key, exp_rate, horizon):
    idx = np.arange(start, start + n, dtype=np.int64)
    base = path_bases(key, idx)
    if exp_rate > 0.0:
        h = -np.log(uniforms(base, np.ones(n, dtype=np.uint64))) / exp_rate
        j = np.full(n, 2, dtype=np.uint64)
    else:
        h = np.full(n, float(horizon))
        j = np.ones(n, dtype=np.uint64)
    return idx, base, h, j


def _emit(idx, q0, q, alive, out_idx, out_q0, out_qt):
    k = int(alive.sum())
    out_idx[:k] = idx[alive]
    out_q0[:k] = q0[alive]
    out_qt[:k] = q[alive]
    return k


def cp_paths(start, n, key, sign, drift, lam, nu, rho, phi0, horizon, exp_rate,
             out_idx, out_q0, out_qt):
    idx, base, h, j = _setup(start, n, key, exp_rate, horizon)
    u = uniforms(base, np.zeros(n, dtype=np.uint64))
    if sign > 0:
        alive = u > 1.0 - rho
        q0 = np.zeros(n)
        q0[alive] = np.log(rho / (1.0 - u[alive])) / (nu * (1.0 - rho))
    else:
        alive = np.ones(n, dtype=bool)
        q0 = -np.log(u) / phi0
    q = q0.copy()
    tau = np.zeros(n)
    running = alive.copy()
    one = np.uint64(1)
    while running.any():
        a = np.flatnonzero(running)
        gap = -np.log(uniforms(base[a], j[a])) / lam
        j[a] += one
        done = tau[a] + gap >= h[a]
        f = a[done]
        q[f] += drift * (h[f] - tau[f])
        alive[f] = q[f] > 0.0
        running[f] = False
        c = a[~done]
        q[c] += drift * gap[~done]
        tau[c] += gap[~done]
        drained = q[c] <= 0.0
        alive[c[drained]] = False
        running[c[drained]] = False
        c = c[~drained]
        q[c] += sign * (-np.log(uniforms(base[c], j[c])) / nu)
        j[c] += one
        killed = q[c] <= 0.0
        alive[c[killed]] = False
        running[c[killed]] = False
    return _emit(idx, q0, q, alive, out_idx, out_q0, out_qt)


def brownian_paths(start, n, key, drift, sigma, phi0, horizon, exp_rate, dt, bisect,
                   out_idx, out_q0, out_qt):
    idx, base, h, j = _setup(start, n, key, exp_rate, horizon)
    one, two = np.uint64(1), np.uint64(2)
    q0 = -np.log(uniforms(base, np.zeros(n, dtype=np.uint64))) / phi0
    threshold = -np.log(uniforms(base, j))
    j = j + one
    steps = np.maximum(1, np.ceil(h / dt - 1e-9)).astype(np.int64)
    delta = h / steps
    half = 0.5 * delta
    s2 = sigma * sigma
    x = q0.copy()
    hazard = np.zeros(n)
    alive = np.ones(n, dtype=bool)
    k = 0
    while True:
        a = np.flatnonzero(alive & (steps > k))
        if a.size == 0:
            break
        u1 = uniforms(base[a], j[a])
        u2 = uniforms(base[a], j[a] + one)
        j[a] += two
        rad = np.sqrt(-2.0 * np.log(u1))
        z1 = rad * np.cos(2.0 * np.pi * u2)
        z2 = rad * np.sin(2.0 * np.pi * u2)
        xa, hf, dl = x[a], half[a], delta[a]
        with np.errstate(over="ignore", divide="ignore", invalid="ignore"):
            if bisect:
                mid = xa + drift * hf + sigma * np.sqrt(hf) * z1
                end = mid + drift * hf + sigma * np.sqrt(hf) * z2
                ok = (mid > 0.0) & (end > 0.0)
                inc = -np.log1p(-np.exp(-2.0 * xa * mid / (s2 * hf))) - np.log1p(-np.exp(-2.0 * mid * end / (s2 * hf)))
            else:
                end = xa + drift * dl + sigma * np.sqrt(hf) * (z1 + z2)
                ok = end > 0.0
                inc = -np.log1p(-np.exp(-2.0 * xa * end / (s2 * dl)))
        hz = hazard[a] + np.where(ok, inc, 0.0)
        ok &= hz < threshold[a]
        hazard[a] = hz
        alive[a] = ok
        x[a] = np.where(ok, end, x[a])
        k += 1
    return _emit(idx, q0, x, alive, out_idx, out_q0, out_qt)
