"""Complex dilogarithm Li2 on the principal branch (cut along [1, inf))."""

from __future__ import annotations

import cmath
import math

import numpy as np

PI2_6 = math.pi**2 / 6

# B_{2k} / (2k+1)! for the Bernoulli-type series in u = -log(1 - z)
_BERN = [1 / 6, -1 / 30, 1 / 42, -1 / 30, 5 / 66, -691 / 2730, 7 / 6, -3617 / 510, 43867 / 798, -174611 / 330,
         854513 / 138, -236364091 / 2730, 8553103 / 6, -23749461029 / 870]
_BERN_COEF = [b / math.factorial(2 * k + 3) for k, b in enumerate(_BERN)]


def _series(z: complex) -> complex:
    # sum z^k / k^2, |z| <= 1/2
    total = 0j
    term = z
    k = 1
    while True:
        add = term / (k * k)
        total += add
        if abs(add) < 1e-17 * max(abs(total), 1e-300):
            return total
        k += 1
        term *= z


def _bernoulli(z: complex) -> complex:
    # Li2(z) = u - u^2/4 + sum_k B_2k u^(2k+1)/(2k+1)!, u = -log(1 - z); fine for |u| < ~2
    u = -cmath.log(1 - z)
    u2 = u * u
    total = u - u2 / 4
    p = u * u2
    for c in _BERN_COEF:
        add = c * p
        total += add
        if abs(add) < 1e-17 * abs(total):
            break
        p *= u2
    return total


def _unit_disk(z: complex) -> complex:
    # |z| <= 1 from here on
    if abs(z) <= 0.5:
        return _series(z)
    if z.real > 0.5:
        # reflection pulls z towards 0 via 1 - z
        w = 1 - z
        if w == 0:
            return complex(PI2_6)
        return PI2_6 - cmath.log(z) * cmath.log(w) - _unit_disk(w) if abs(w) < abs(z) else _bernoulli(z)
    return _bernoulli(z)


def dilog(z) -> complex:
    """Li2(z) = sum_{k>=1} z^k / k^2, continued to the principal branch."""
    z = complex(z)
    if z == 0:
        return 0j
    if z == 1:
        return complex(PI2_6)
    if abs(z) > 1:
        # inversion: Li2(z) = -pi^2/6 - log(-z)^2/2 - Li2(1/z)
        val = -PI2_6 - 0.5 * cmath.log(-z) ** 2 - _unit_disk(1 / z)
        if z.imag == 0 and z.real > 1:
            # on the cut take the limit from below (Im -> 0-), matching the usual convention
            val = complex(val.real, -math.pi * math.log(z.real))
        return val
    return _unit_disk(z)


def dilog_array(z) -> np.ndarray:
    z = np.asarray(z, dtype=complex)
    return np.vectorize(dilog, otypes=[complex])(z)
