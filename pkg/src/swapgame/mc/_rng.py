"""Counter-based random streams (splitmix64 finalizer).

Draw ``c`` of path stream ``key`` is ``mix64(key + (c + 1) * GOLDEN)``, so any
draw can be recomputed from ``(seed, path, counter)`` alone.  The scalar
functions are compiled by numba; the ``*_vec`` twins take uint64 arrays and
produce the same numbers.
"""
import math

import numpy as np

from ._accel import njit

GOLDEN = np.uint64(0x9E3779B97F4A7C15)
M1 = np.uint64(0xBF58476D1CE4E5B9)
M2 = np.uint64(0x94D049BB133111EB)
S12 = np.uint64(12)
S27 = np.uint64(27)
S30 = np.uint64(30)
S31 = np.uint64(31)
ONE = np.uint64(1)
INV52 = 2.0**-52
TWO_PI = 2.0 * math.pi


def _mix64(z):
    z = (z ^ (z >> S30)) * M1
    z = (z ^ (z >> S27)) * M2
    return z ^ (z >> S31)


mix64 = njit(cache=True)(_mix64)


@njit(cache=True)
def stream_key(seed, path):
    return mix64(mix64(np.uint64(seed)) ^ mix64((np.uint64(path) + ONE) * GOLDEN))


@njit(cache=True)
def uniform(key, c, flip):
    z = mix64(key + (np.uint64(c) + ONE) * GOLDEN)
    u = (float(z >> S12) + 0.5) * INV52
    return 1.0 - u if flip else u


@njit(cache=True)
def normal(key, c, flip):
    u1 = uniform(key, c, False)
    u2 = uniform(key, c + 1, False)
    z = math.sqrt(-2.0 * math.log(u1)) * math.cos(TWO_PI * u2)
    return -z if flip else z


@njit(cache=True)
def exponential(rate, key, c, flip):
    return -math.log(uniform(key, c, flip)) / rate


def stream_keys_vec(seed, paths):
    with np.errstate(over="ignore"):
        s = _mix64(np.full(paths.shape, seed, dtype=np.uint64))
        return _mix64(s ^ _mix64((paths.astype(np.uint64) + ONE) * GOLDEN))


def uniform_vec(keys, c, flip):
    with np.errstate(over="ignore"):
        z = _mix64(keys + (c.astype(np.uint64) + ONE) * GOLDEN)
    u = ((z >> S12).astype(np.float64) + 0.5) * INV52
    return np.where(flip, 1.0 - u, u)


def normal_vec(keys, c, flip):
    u1 = uniform_vec(keys, c, False)
    u2 = uniform_vec(keys, c + 1, False)
    z = np.sqrt(-2.0 * np.log(u1)) * np.cos(TWO_PI * u2)
    return np.where(flip, -z, z)


def exponential_vec(rate, keys, c, flip):
    return -np.log(uniform_vec(keys, c, flip)) / rate
