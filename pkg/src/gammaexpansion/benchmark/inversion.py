"""Fourier inversion of characteristic functions by Abate-Whitt Euler summation."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.special import comb, gammaln

from .charfn import char_function
from .models import PURE_JUMP_OU, BuiltinModel

DEFAULT_M = 11
DEFAULT_N = 50
TAIL_TOL = 1e-11
MAX_TERMS = 1 << 17
_CHUNK = 4096


@dataclass(frozen=True)
class InversionConfig:
    euler_m: int = DEFAULT_M
    euler_n: int = DEFAULT_N
    step_h: float = 1.0

    def __post_init__(self):
        if int(self.euler_m) != self.euler_m or self.euler_m < 1:
            raise ValueError("euler_m must be a positive integer")
        if int(self.euler_n) != self.euler_n or self.euler_n < self.euler_m:
            raise ValueError("euler_n must be an integer >= euler_m")
        if not (math.isfinite(self.step_h) and self.step_h > 0):
            raise ValueError("step_h must be a positive finite number")

    @property
    def n_terms(self) -> int:
        return self.euler_n + self.euler_m


def euler_inversion(phi: Callable, x, cfg: InversionConfig) -> np.ndarray:
    """E(m, n, x) = sum_{k=0}^m C(m, k) 2^-m s_{n+k}(x).

    The constant term of s_n is h Re(phi(0)) / (2 pi), i.e. h / (2 pi) for a proper
    characteristic function; the general form lets remainders be inverted too.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    h, n, m = cfg.step_h, cfg.euler_n, cfg.euler_m
    k = np.arange(1, n + m + 1)
    vals = np.asarray(phi(k * h), dtype=complex)
    phi0 = float(np.real(np.asarray(phi(np.zeros(1)), dtype=complex)[0]))
    if not np.all(np.isfinite(vals)):
        raise FloatingPointError("non-finite characteristic function values")
    # binomial weights on the partial sums translate into per-term weights:
    # term k enters s_{n+j} for every j with n + j >= k
    w_sum = np.array([comb(m, j, exact=True) for j in range(m + 1)], dtype=float) / 2.0**m
    tail = np.cumsum(w_sum[::-1])[::-1]  # tail[j] = sum_{i >= j} w_sum[i]
    weights = np.ones(n + m)
    weights[n:] = tail[1:]
    weights[n - 1] = tail[0]
    coef_re = weights * vals.real
    coef_im = weights * vals.imag
    out = np.empty_like(x)
    for start in range(0, x.size, 256):
        xs = x[start : start + 256]
        total = np.zeros_like(xs)
        for c0 in range(0, k.size, _CHUNK):
            arg = np.outer(xs, k[c0 : c0 + _CHUNK] * h)
            total += np.cos(arg) @ coef_re[c0 : c0 + _CHUNK] + np.sin(arg) @ coef_im[c0 : c0 + _CHUNK]
        out[start : start + 256] = h * phi0 / (2 * math.pi) + (h / math.pi) * total
    if not np.all(np.isfinite(out)):
        raise FloatingPointError("non-finite partial sums")
    return out


def tail_mass(phi: Callable, cfg: InversionConfig, limit: int = MAX_TERMS, tol: float = TAIL_TOL) -> float:
    """Estimate of sum_{k > n+m} |phi(kh)| h / pi.

    Terms are summed chunk by chunk up to ``limit``; the rest is extrapolated from
    the local power-law decay of the last chunk.  Returns inf when the decay is too
    slow for the tail to be bounded that way.
    """
    start = cfg.n_terms + 1
    total = 0.0
    scale = cfg.step_h / math.pi
    while start <= limit:
        k = np.arange(start, min(start + _CHUNK, limit + 1))
        a = np.abs(phi(k * cfg.step_h))
        total += a.sum() * scale
        a0, a1 = a[0], a[-1]
        if a1 == 0.0 or a1 * scale * k.size < 1e-3 * tol:
            return total
        if k.size > 1 and a0 > a1:
            p = math.log(a0 / a1) / math.log(k[-1] / k[0])
            if p > 1.5:
                rest = a1 * k[-1] / (p - 1) * scale
                if rest < 1e-2 * tol:
                    return total + rest
        start = k[-1] + 1
    return math.inf


def scale_estimate(model: BuiltinModel, delta: float) -> float:
    """Standard deviation of X(delta), exact for the OU models and to leading order otherwise."""
    k = model.kappa
    f = (1 - math.exp(-2 * k * delta)) / (2 * k)
    diff2 = 0.0 if model.pure_jump else float(model.diffusion(model.x0)) ** 2
    return math.sqrt((diff2 + model.a / model.b**2) * f)


def gamma_tail_reach(shape: float, rate: float, level: float = 1e-17) -> float:
    """Smallest z beyond the mode where the Gamma(shape, rate) density drops below ``level``."""
    z = max((shape - 1) / rate, 0.0) + 1.0 / rate
    logpdf = lambda v: shape * math.log(rate) - gammaln(shape) + (shape - 1) * math.log(v) - rate * v
    while logpdf(z) > math.log(level):
        z *= 1.25
    return z


@dataclass(frozen=True)
class AutoConfig:
    cfg: InversionConfig
    tail: float
    certified: bool
    window: tuple


def window_step(model: BuiltinModel, delta: float, xmin: float, xmax: float):
    """Frequency step whose aliasing period covers [xmin, xmax] plus a pad on each side.

    The pad is the larger of 10 standard deviations and the gamma right-tail reach,
    since the gamma tail sits many deviations out for small a*delta.
    """
    if not xmax > xmin:
        raise ValueError("need xmax > xmin")
    pad = max(10 * scale_estimate(model, delta), gamma_tail_reach(model.a * delta, model.b))
    h = 2 * math.pi / (xmax - xmin + 2 * pad)
    return h, (xmin - pad, xmax + pad)


def choose_terms(phi: Callable, h: float, tol: float = TAIL_TOL, n0: int = DEFAULT_N, bound: Optional[Callable] = None):
    """Double euler_n until the truncated tail mass is below tol (or the term cap is hit).

    ``bound``, if given, majorizes |phi| and is used for the tail estimate instead.
    """
    if bound is not None:
        phi = bound
    n = n0
    while True:
        cfg = InversionConfig(DEFAULT_M, n, h)
        tm = tail_mass(phi, cfg, limit=min(MAX_TERMS, 64 * cfg.n_terms), tol=tol)
        if tm < tol:
            return cfg, tm, True
        if 2 * n + DEFAULT_M > MAX_TERMS:
            # slowly decaying transforms never certify; keep the largest n
            return cfg, tm, False
        n *= 2


def auto_config(model: BuiltinModel, delta: float, xmin: float, xmax: float, tol: float = TAIL_TOL) -> AutoConfig:
    h, window = window_step(model, delta, xmin, xmax)
    cfg, tm, ok = choose_terms(lambda w: char_function(model, delta, w), h, tol)
    return AutoConfig(cfg, tm, ok, window)


def invert_fourier(model: BuiltinModel, delta: float, x, cfg: Optional[InversionConfig] = None) -> np.ndarray:
    """Density of X(delta) given x0 by Euler-summed Fourier inversion of the exact transform."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if cfg is None:
        cfg = auto_config(model, delta, float(x.min()), float(x.max()) + 1e-12).cfg
    return euler_inversion(lambda w: char_function(model, delta, w), x, cfg)


@dataclass
class Benchmark:
    values: np.ndarray
    cfg: InversionConfig
    tail: float
    certified: bool
    subtracted_terms: int = 0

    def meta(self) -> dict:
        return {
            "euler_m": self.cfg.euler_m,
            "euler_n": self.cfg.euler_n,
            "step_h": self.cfg.step_h,
            "tail_mass": self.tail,
            "tail_certified": self.certified,
            "subtracted_gamma_terms": self.subtracted_terms,
        }


SUBTRACT_TERMS = 4


def fourier_benchmark(model: BuiltinModel, delta: float, x, tol: float = TAIL_TOL) -> Benchmark:
    """Reference density by Fourier inversion.

    For the pure-jump model the transform decays only like |w|^(-a delta), so the
    leading gamma terms of its mixture representation are subtracted in closed form
    and only the remainder, which decays like |w|^(-a delta - SUBTRACT_TERMS), is
    inverted numerically.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    xmin, xmax = float(x.min()), float(x.max())
    h, _ = window_step(model, delta, xmin, max(xmax, xmin + 1e-9))
    if model.id != PURE_JUMP_OU:
        phi = lambda w: char_function(model, delta, w)
        cfg, tm, ok = choose_terms(phi, h, tol)
        return Benchmark(euler_inversion(phi, x, cfg), cfg, tm, ok)
    c = pure_jump_series(model, delta)[:SUBTRACT_TERMS]
    shift = pure_jump_shift(model, delta)
    ad, b = model.a * delta, model.b

    def phi(w):
        w = np.asarray(w, dtype=float)
        base = 1 / (1 - 1j * w / b)
        lead = sum(ck * base ** (ad + k) for k, ck in enumerate(c)) * np.exp(1j * w * shift)
        return char_function(model, delta, w) - lead

    c_rest = pure_jump_series(model, delta)[SUBTRACT_TERMS:]

    def bound(w):
        # the remainder is exactly the rest of the gamma mixture
        mod = np.abs(1 / (1 - 1j * np.asarray(w, dtype=float) / b))
        return sum(abs(ck) * mod ** (ad + SUBTRACT_TERMS + k) for k, ck in enumerate(c_rest))

    cfg, tm, ok = choose_terms(phi, h, tol, bound=bound)
    vals = euler_inversion(phi, x, cfg) + _gamma_mixture(c, ad, b, x - shift)
    return Benchmark(vals, cfg, tm, ok, SUBTRACT_TERMS)


# pure-jump OU: exact density as a gamma mixture

def pure_jump_series(model: BuiltinModel, delta: float, n_terms: int = 60) -> np.ndarray:
    """Coefficients c_k with p(x) = sum_k c_k Gamma(a delta + k, b)(x - m(delta)).

    X(delta) - m(delta) = int e^{-kappa (delta - s)} dL(s).  With q = 1/(1 - i w / b) its
    transform is q^{a delta} exp(G(q)), G a power series in q with real coefficients
    g_0 = a kappa delta^2 / 2 and g_n = a (-1)^n / n int_0^delta (e^{kappa r} - 1)^n dr.
    """
    if model.id != PURE_JUMP_OU:
        raise ValueError("the gamma-mixture series applies to the pure-jump model only")
    k, a = model.kappa, model.a
    x, wt = leggauss(64)
    r = (x + 1) * delta / 2
    base = np.expm1(k * r)
    g = np.empty(n_terms)
    g[0] = a * k * delta**2 / 2
    for n in range(1, n_terms):
        g[n] = a * (-1) ** n / n * float(np.sum(wt * delta / 2 * base**n))
    c = np.empty(n_terms)
    c[0] = math.exp(g[0])
    for n in range(1, n_terms):
        j = np.arange(1, n + 1)
        c[n] = float(np.sum(j * g[j] * c[n - j])) / n
    return c


def pure_jump_shift(model: BuiltinModel, delta: float) -> float:
    """Deterministic part m(delta) = x0 e^{-kappa delta} + theta (1 - e^{-kappa delta})."""
    e = math.exp(-model.kappa * delta)
    return model.x0 * e + model.theta * (1 - e)


def _gamma_mixture(c, shape0: float, rate: float, z: np.ndarray) -> np.ndarray:
    out = np.zeros_like(z)
    pos = z > 0
    lz = np.log(z[pos])
    zp = z[pos]
    for n, cn in enumerate(c):
        if cn == 0.0:
            continue
        sh = shape0 + n
        out[pos] += cn * np.exp(sh * math.log(rate) - gammaln(sh) + (sh - 1) * lz - rate * zp)
    return out


def pure_jump_exact_density(model: BuiltinModel, delta: float, x, n_terms: int = 60) -> np.ndarray:
    """Exact transition density of the pure-jump model from the gamma-mixture series."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    c = pure_jump_series(model, delta, n_terms)
    return _gamma_mixture(c, model.a * delta, model.b, x - pure_jump_shift(model, delta))
