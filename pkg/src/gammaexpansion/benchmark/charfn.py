"""Exact characteristic functions E exp(i w X(t)) of the three benchmark models."""

from __future__ import annotations

import numpy as np
from numpy.polynomial.legendre import leggauss

from .dilog import dilog_array
from .models import PURE_JUMP_OU, SQRT_DIFFUSION, BuiltinModel


def _check_t(t: float) -> float:
    t = float(t)
    if not t > 0:
        raise ValueError("t must be positive")
    return t


def _unwound_log(z: np.ndarray) -> np.ndarray:
    """log z along an ordered path, with 2 pi jumps of the argument removed.

    The path starts at the first entry, which must lie on the principal branch.
    """
    if z.size < 2:
        return np.log(z)
    return np.log(np.abs(z)) + 1j * np.unwrap(np.angle(z))


def _ou_exponent(model: BuiltinModel, t: float, w: np.ndarray) -> np.ndarray:
    k = model.kappa
    decay = np.exp(-k * t)
    mean = decay * model.x0 + model.theta * (1 - decay)
    out = 1j * w * mean
    if model.id != PURE_JUMP_OU:
        out = out - w**2 * model.sigma**2 * (1 - np.exp(-2 * k * t)) / (4 * k)
    jump = dilog_array(1j * w * decay / model.b) - dilog_array(1j * w / model.b)
    return out - model.a / k * jump


def sqrt_beta(model: BuiltinModel, t: float, w):
    k, s2 = model.kappa, model.sigma**2
    e = np.exp(k * t)
    return 2j * w * k / (2 * k * e + 1j * w * s2 * (1 - e))


def sqrt_alpha(model: BuiltinModel, t: float, w: np.ndarray, unwind: bool = True) -> np.ndarray:
    """alpha(t) of the square-root model in the printed log / Li2 form (w > 0, sorted)."""
    k, th, s2, a, b = model.kappa, model.theta, model.sigma**2, model.a, model.b
    iw = 1j * w
    e = np.exp(k * t)
    c = 1 - 2 * k / (iw * s2)
    d = b * (2 * k - iw * s2) / (iw * (2 * k - b * s2))
    log = _unwound_log if unwind else np.log
    bracket = (
        2 * k * k * th * t
        + a * s2 * t * np.log(b)
        - (2 * k * th + a * s2 * t) * log(1 - e * c)
        + 2 * k * th * log(2 * k / (iw * s2))
        + a * s2 * t * (log(1 - e * d) - log(b - 2 * iw * k / (iw * s2 * (1 - e) + 2 * k * e)))
    )
    li = dilog_array(c) - dilog_array(e * c) - dilog_array(d) + dilog_array(e * d)
    return bracket / s2 + a / k * li


def sqrt_alpha_quadrature(model: BuiltinModel, t: float, w, nodes: int = 200) -> np.ndarray:
    """alpha(t) = int_0^t [kappa theta beta(s) - a log(1 - beta(s)/b)] ds, by Gauss-Legendre.

    Independent of the printed form; used as a cross-check.  Re(1 - beta/b) >= 1 on
    the whole path, so the principal log is continuous here.
    """
    t = _check_t(t)
    k, th, s2 = model.kappa, model.theta, model.sigma**2
    w = np.atleast_1d(np.asarray(w, dtype=float))
    g = 1j * w * s2 / (2 * k)
    drift = -(2 * k * th / s2) * np.log(1 - g * (1 - np.exp(-k * t)))
    x, wt = leggauss(nodes)
    s = (x + 1) * t / 2
    u = np.exp(-k * s)[:, None]
    beta = 1j * w[None, :] * u / (1 - g[None, :] * (1 - u))
    jump = -model.a * (wt[:, None] * t / 2 * np.log(1 - beta / model.b)).sum(axis=0)
    return drift + jump


def log_char_function(model: BuiltinModel, t: float, omega) -> np.ndarray:
    """log E exp(i w X(t)) for w > 0 on a continuous branch along increasing w."""
    t = _check_t(t)
    w = np.atleast_1d(np.asarray(omega, dtype=float))
    if np.any(w <= 0):
        raise ValueError("log_char_function expects w > 0")
    order = np.argsort(w, kind="stable")
    ws = w[order]
    if model.id == SQRT_DIFFUSION:
        # prepend a small anchor so the unwinding starts on the principal branch
        anchor = min(1e-3, 0.5 * ws[0])
        path = np.concatenate(([anchor], ws))
        val = sqrt_alpha(model, t, path) + sqrt_beta(model, t, path) * model.x0
        val = val[1:]
    else:
        val = _ou_exponent(model, t, ws)
    out = np.empty_like(val)
    out[order] = val
    return out


def char_function(model: BuiltinModel, t: float, omega) -> np.ndarray:
    """phi(t; w) = E exp(i w X(t)) for real w (scalar or array); phi(t; 0) = 1 exactly."""
    t = _check_t(t)
    w = np.asarray(omega, dtype=float)
    scalar = w.ndim == 0
    w = np.atleast_1d(w)
    out = np.ones(w.shape, dtype=complex)
    nz = w != 0
    if np.any(nz):
        aw = np.abs(w[nz])
        val = np.exp(log_char_function(model, t, aw))
        # phi(-w) = conj phi(w) for a real random variable
        val = np.where(w[nz] < 0, np.conj(val), val)
        if not np.all(np.isfinite(val)):
            raise FloatingPointError(f"non-finite characteristic function for {model.id} at t={t}")
        out[nz] = val
    return out[0] if scalar else out


def gaussian_char_function(mean: float, sd: float):
    def phi(w):
        w = np.asarray(w, dtype=float)
        return np.exp(1j * w * mean - 0.5 * (w * sd) ** 2)

    return phi


def gamma_char_function(shape: float, rate: float):
    def phi(w):
        w = np.asarray(w, dtype=float)
        return (1 - 1j * w / rate) ** (-shape)

    return phi
