"""Kummer confluent hypergeometric function 1F1 for real arguments."""

from __future__ import annotations

import math

import numpy as np
from scipy.special import gammaln, gammasgn

SERIES_LIMIT = 30.0
_MAX_TERMS = 5000


def _is_nonpositive_int(x: float) -> bool:
    return x <= 0 and float(x).is_integer()


def _series(alpha: float, beta: float, z: float) -> float:
    term = 1.0
    total = 1.0
    comp = 0.0
    for k in range(_MAX_TERMS):
        term *= (alpha + k) / (beta + k) * z / (k + 1)
        # Kahan summation keeps the alternating or long sums honest
        y = term - comp
        t = total + y
        comp = (t - total) - y
        total = t
        if term == 0.0 or (abs(term) < 1e-17 * abs(total) and k > abs(alpha) + abs(z)):
            return total
    raise ArithmeticError(f"1F1 series did not converge for a={alpha}, b={beta}, z={z}")


def _asymptotic_sum(alpha: float, beta: float, z: float) -> float:
    # sum_k (b-a)_k (1-a)_k / k! z^-k, truncated at its smallest term
    total = 1.0
    term = 1.0
    prev = math.inf
    for k in range(200):
        nxt = term * (beta - alpha + k) * (1 - alpha + k) / ((k + 1) * z)
        if nxt == 0.0:
            break
        if abs(nxt) >= prev:
            break
        prev = abs(nxt)
        term = nxt
        total += term
        if abs(term) < 1e-17 * abs(total):
            break
    return total


def log_kummer_1f1(alpha: float, beta: float, z: float) -> tuple[float, float]:
    """Return (log|1F1|, sign) without overflow."""
    if _is_nonpositive_int(beta):
        raise ValueError(f"1F1 undefined for beta={beta} (nonpositive integer)")
    if z < 0:
        lg, sg = log_kummer_1f1(beta - alpha, beta, -z)
        return lg + z, sg
    if z <= SERIES_LIMIT or _is_nonpositive_int(alpha):
        v = _series(alpha, beta, z)
        if v == 0.0:
            return -math.inf, 0.0
        return math.log(abs(v)), math.copysign(1.0, v)
    s = _asymptotic_sum(alpha, beta, z)
    sign = gammasgn(beta) * gammasgn(alpha) * math.copysign(1.0, s)
    lg = gammaln(beta) - gammaln(alpha) + z + (alpha - beta) * math.log(z) + math.log(abs(s))
    return float(lg), float(sign)


def kummer_1f1(alpha: float, beta: float, z: float) -> float:
    """1F1(alpha; beta; z) = sum_k (alpha)_k / (beta)_k z^k / k!."""
    if _is_nonpositive_int(beta):
        raise ValueError(f"1F1 undefined for beta={beta} (nonpositive integer)")
    if z == 0:
        return 1.0
    if z < 0:
        return math.exp(z) * kummer_1f1(beta - alpha, beta, -z)
    if z <= SERIES_LIMIT or _is_nonpositive_int(alpha):
        return _series(alpha, beta, z)
    lg, sg = log_kummer_1f1(alpha, beta, z)
    return sg * math.exp(lg) if lg < 709.0 else sg * math.inf


def log_kummer_1f1_array(alpha: float, beta: float, z) -> np.ndarray:
    """Vectorised log 1F1 for alpha, beta > 0 and z >= 0 (the result is then positive)."""
    if not (alpha > 0 and beta > 0):
        raise ValueError("array form requires alpha, beta > 0")
    z = np.asarray(z, dtype=float)
    if np.any(z < 0):
        raise ValueError("array form requires z >= 0")
    out = np.empty_like(z)
    small = z <= SERIES_LIMIT
    if np.any(small):
        zs = z[small]
        term = np.ones_like(zs)
        total = np.ones_like(zs)
        for k in range(_MAX_TERMS):
            term = term * ((alpha + k) / (beta + k)) * zs / (k + 1)
            total = total + term
            if k > alpha + SERIES_LIMIT and np.all(term <= 1e-17 * total):
                break
        out[small] = np.log(total)
    for idx in np.flatnonzero(~small):
        out.flat[idx] = log_kummer_1f1(alpha, beta, float(z.flat[idx]))[0]
    return out
