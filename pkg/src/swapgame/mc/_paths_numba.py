"""Per-path simulation loop (compiled by numba).

Exit kinds: 0 censored at the horizon, 1 up-crossing of ``hi`` (always by
creeping), 2 creeping down to ``lo``, 3 jump to or below ``lo``.
"""
import math

import numpy as np

from ._accel import njit
from ._rng import exponential, normal, stream_key, uniform

CENSORED, UP, CREEP_LOW, JUMP_LOW = 0, 1, 2, 3


@njit(cache=True)
def bridge_hit_time(d1, d2, h, nu, key, c, flip):
    """First passage time of a Brownian bridge that is known to hit the barrier.

    ``d1`` is the start distance, ``d2`` the end distance from the barrier.
    With s ~ IG(d1 / d2, d1^2 / (nu^2 h)) the hitting time is h s / (1 + s).
    Consumes three draws.
    """
    if d2 <= 0.0:
        return h
    m = d1 / d2
    shape = d1 * d1 / (nu * nu * h)
    z = normal(key, c, flip)
    a = m * z * z / (2.0 * shape)
    s = m / (1.0 + a + math.sqrt(a * a + 2.0 * a))
    if uniform(key, c + 2, flip) > m / (m + s):
        s = m * m / s
    return h / (1.0 + 1.0 / s)


@njit(cache=True)
def advance(x, t, tj, c, lo, hi, mu, nu, lam, eta, horizon, dt, key, flip, bridge):
    """Run one path until it leaves (lo, hi) or reaches the horizon."""
    use_bridge = bridge and nu > 0.0
    var = nu * nu
    while True:
        if t >= horizon:
            return x, t, tj, c, CENSORED
        rem = horizon - t
        to_jump = tj - t
        jump_now = to_jump <= dt and to_jump <= rem
        if jump_now:
            h = to_jump
        else:
            h = dt if dt < rem else rem
        if nu > 0.0:
            xn = x + mu * h + nu * math.sqrt(h) * normal(key, c, flip)
            c += 2
        else:
            xn = x + mu * h
        hit_lo = xn <= lo
        if not hit_lo and use_bridge:
            p = math.exp(-2.0 * (x - lo) * (xn - lo) / (var * h))
            hit_lo = uniform(key, c, flip) < p
            c += 1
        hit_hi = False
        if hi < math.inf:
            hit_hi = xn >= hi
            if not hit_hi and use_bridge:
                p = math.exp(-2.0 * (hi - x) * (hi - xn) / (var * h))
                hit_hi = uniform(key, c, flip) < p
                c += 1
        if hit_lo or hit_hi:
            t_lo = math.inf
            t_hi = math.inf
            if hit_lo:
                if use_bridge:
                    t_lo = bridge_hit_time(x - lo, abs(xn - lo), h, nu, key, c, flip)
                    c += 3
                else:
                    t_lo = h
            if hit_hi:
                if use_bridge:
                    t_hi = bridge_hit_time(hi - x, abs(hi - xn), h, nu, key, c, flip)
                    c += 3
                elif nu > 0.0:
                    t_hi = h
                else:
                    t_hi = (hi - x) / mu
            if t_lo <= t_hi:
                return lo, t + t_lo, tj, c, CREEP_LOW
            return hi, t + t_hi, tj, c, UP
        x = xn
        t = t + h
        if jump_now:
            t = tj
            x -= exponential(eta, key, c, flip)
            tj = t + exponential(lam, key, c + 1, flip)
            c += 2
            if x <= lo:
                return x, t, tj, c, JUMP_LOW


@njit(cache=True)
def simulate_batch(x0, lo, hi, mu, nu, lam, eta, horizon, dt, dt_after, seed, n, antithetic, bridge, follow):
    """Exit from (lo, hi) for ``n`` paths; optionally follow each exercised path to default.

    Returns (t_exit, x_exit, kind, t_default) with ``t_default = inf`` when
    default is not observed before the horizon.
    """
    t_exit = np.empty(n)
    x_exit = np.empty(n)
    kinds = np.empty(n, dtype=np.int64)
    t_def = np.empty(n)
    for i in range(n):
        if antithetic:
            pair = i // 2
            flip = (i % 2) == 1
        else:
            pair = i
            flip = False
        key = stream_key(seed, pair)
        c = 0
        tj = math.inf
        if lam > 0.0:
            tj = exponential(lam, key, c, flip)
            c += 1
        if x0 <= lo:
            x, t, kind = x0, 0.0, CREEP_LOW
        elif x0 >= hi:
            x, t, kind = x0, 0.0, UP
        else:
            x, t, tj, c, kind = advance(x0, 0.0, tj, c, lo, hi, mu, nu, lam, eta, horizon, dt, key, flip, bridge)
        t_exit[i] = t
        x_exit[i] = x
        kinds[i] = kind
        td = math.inf
        if kind != CENSORED and x <= 0.0:
            td = t
        elif follow and kind != CENSORED:
            x2, t2, tj, c, k2 = advance(x, t, tj, c, 0.0, math.inf, mu, nu, lam, eta, horizon, dt_after, key, flip, bridge)
            if k2 != CENSORED:
                td = t2
        t_def[i] = td
    return t_exit, x_exit, kinds, t_def
