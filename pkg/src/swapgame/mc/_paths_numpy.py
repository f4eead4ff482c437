"""Vectorized twin of ``_paths_numba``: same draws per path, same outcomes."""
import math

import numpy as np

from ._paths_numba import CENSORED, CREEP_LOW, JUMP_LOW, UP
from ._rng import exponential_vec, normal_vec, stream_keys_vec, uniform_vec


def bridge_hit_time_vec(d1, d2, h, nu, keys, c, flip):
    with np.errstate(all="ignore"):
        m = d1 / d2
        shape = d1 * d1 / (nu * nu * h)
        z = normal_vec(keys, c, flip)
        a = m * z * z / (2.0 * shape)
        s = m / (1.0 + a + np.sqrt(a * a + 2.0 * a))
        reject = uniform_vec(keys, c + 2, flip) > m / (m + s)
        s = np.where(reject, m * m / s, s)
        out = h / (1.0 + 1.0 / s)
    return np.where(d2 <= 0.0, h, out)


def advance_vec(x, t, tj, c, lo, hi, mu, nu, lam, eta, horizon, dt, keys, flip, bridge):
    """Vectorized ``advance``; arrays are updated in place, kinds returned."""
    use_bridge = bridge and nu > 0.0
    var = nu * nu
    kind = np.full(x.shape, -1, dtype=np.int64)
    act = np.arange(x.size)
    while act.size:
        done = t[act] >= horizon
        if done.any():
            kind[act[done]] = CENSORED
            act = act[~done]
            if not act.size:
                break
        xa, ta, tja, ca = x[act], t[act], tj[act], c[act].copy()
        ka, fa = keys[act], flip[act]
        rem = horizon - ta
        to_jump = tja - ta
        jump_now = (to_jump <= dt) & (to_jump <= rem)
        h = np.where(jump_now, to_jump, np.minimum(dt, rem))
        if nu > 0.0:
            xn = xa + mu * h + nu * np.sqrt(h) * normal_vec(ka, ca, fa)
            ca += 2
        else:
            xn = xa + mu * h
        hit_lo = xn <= lo
        with np.errstate(all="ignore"):
            if use_bridge:
                need = ~hit_lo
                p = np.exp(-2.0 * (xa - lo) * (xn - lo) / (var * h))
                hit_lo = hit_lo | (need & (uniform_vec(ka, ca, fa) < p))
                ca += need
            hit_hi = np.zeros_like(hit_lo)
            if hi < math.inf:
                hit_hi = xn >= hi
                if use_bridge:
                    need = ~hit_hi
                    p = np.exp(-2.0 * (hi - xa) * (hi - xn) / (var * h))
                    hit_hi = hit_hi | (need & (uniform_vec(ka, ca, fa) < p))
                    ca += need
            t_lo = np.full(xa.shape, math.inf)
            t_hi = np.full(xa.shape, math.inf)
            if hit_lo.any():
                if use_bridge:
                    tl = bridge_hit_time_vec(xa - lo, np.abs(xn - lo), h, nu, ka, ca, fa)
                    ca += 3 * hit_lo
                else:
                    tl = h
                t_lo = np.where(hit_lo, tl, math.inf)
            if hit_hi.any():
                if use_bridge:
                    th = bridge_hit_time_vec(hi - xa, np.abs(hi - xn), h, nu, ka, ca, fa)
                    ca += 3 * hit_hi
                elif nu > 0.0:
                    th = h
                else:
                    th = (hi - xa) / mu
                t_hi = np.where(hit_hi, th, math.inf)
        exits = hit_lo | hit_hi
        low_first = hit_lo & (t_lo <= t_hi)
        up_first = exits & ~low_first
        for sel, level, tt, kk in ((low_first, lo, t_lo, CREEP_LOW), (up_first, hi, t_hi, UP)):
            if sel.any():
                idx = act[sel]
                x[idx] = level
                t[idx] = ta[sel] + tt[sel]
                c[idx] = ca[sel]
                kind[idx] = kk
        stay = ~exits
        xs, ts, cs = xn[stay], ta[stay] + h[stay], ca[stay]
        tjs = tja[stay]
        jn = jump_now[stay]
        jumped_low = np.zeros(xs.shape, dtype=bool)
        if jn.any():
            ks, fs = ka[stay][jn], fa[stay][jn]
            ts[jn] = tjs[jn]
            xs[jn] = xs[jn] - exponential_vec(eta, ks, cs[jn], fs)
            tjs[jn] = ts[jn] + exponential_vec(lam, ks, cs[jn] + 1, fs)
            cs[jn] += 2
            jumped_low[jn] = xs[jn] <= lo
        idx = act[stay]
        x[idx], t[idx], tj[idx], c[idx] = xs, ts, tjs, cs
        kind[idx[jumped_low]] = JUMP_LOW
        act = idx[~jumped_low]
    return kind


def simulate_batch_vec(x0, lo, hi, mu, nu, lam, eta, horizon, dt, dt_after, seed, n, antithetic, bridge, follow):
    i = np.arange(n, dtype=np.int64)
    if antithetic:
        pairs, flip = i // 2, (i % 2) == 1
    else:
        pairs, flip = i, np.zeros(n, dtype=bool)
    keys = stream_keys_vec(seed, pairs)
    c = np.zeros(n, dtype=np.int64)
    tj = np.full(n, math.inf)
    if lam > 0.0:
        tj = exponential_vec(lam, keys, c, flip)
        c += 1
    x = np.full(n, float(x0))
    t = np.zeros(n)
    if x0 <= lo:
        kind = np.full(n, CREEP_LOW, dtype=np.int64)
    elif x0 >= hi:
        kind = np.full(n, UP, dtype=np.int64)
    else:
        kind = advance_vec(x, t, tj, c, lo, hi, mu, nu, lam, eta, horizon, dt, keys, flip, bridge)
    t_exit, x_exit = t.copy(), x.copy()
    t_def = np.full(n, math.inf)
    dead = (kind != CENSORED) & (x <= 0.0)
    t_def[dead] = t[dead]
    if follow:
        sel = np.flatnonzero((kind != CENSORED) & (x > 0.0))
        if sel.size:
            xs, ts, tjs, cs = x[sel], t[sel], tj[sel], c[sel]
            k2 = advance_vec(xs, ts, tjs, cs, 0.0, math.inf, mu, nu, lam, eta, horizon, dt_after, keys[sel], flip[sel], bridge)
            ok = k2 != CENSORED
            t_def[sel[ok]] = ts[ok]
    return t_exit, x_exit, kind, t_def
