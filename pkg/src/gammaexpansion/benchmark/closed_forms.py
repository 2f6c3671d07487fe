"""Published closed-form Omega_m for the three benchmark models, transcribed term by term.

These are deliberately independent of the expansion engine: nothing here touches the
iterated-integral machinery, so agreement between the two is a genuine cross-check.
"""

from __future__ import annotations

import math

import mpmath
import numpy as np

from ..special import log_kummer_1f1
from .models import CONSTANT_DIFFUSION, PURE_JUMP_OU, SQRT_DIFFUSION, BuiltinModel

PUBLISHED_ORDERS = {PURE_JUMP_OU: 3, CONSTANT_DIFFUSION: 3, SQRT_DIFFUSION: 2}


def _s_kernel(m: int, y: float, delta: float, a: float, b: float, shift: float, A: float, B: float) -> float:
    # (1/(2 sqrt(2 pi))) b^(a d)/Gamma(a d) A^(-1-r/2) exp(-(y - shift)^2/2)
    #   * [B Gamma(1 + r/2) 1F1(1 + r/2, 3/2, B^2/4A) + sqrt(A) Gamma((1+r)/2) 1F1((1+r)/2, 1/2, B^2/4A)]
    r = m + a * delta - 1.0
    z = B * B / (4.0 * A)
    log_pre = (
        -math.log(2.0 * math.sqrt(2.0 * math.pi))
        + a * delta * math.log(b)
        - math.lgamma(a * delta)
        - (1.0 + r / 2.0) * math.log(A)
        - 0.5 * (y - shift) ** 2
    )
    l1, s1 = log_kummer_1f1(1.0 + r / 2.0, 1.5, z)
    l2, s2 = log_kummer_1f1((1.0 + r) / 2.0, 0.5, z)
    t1 = B * s1 * math.exp(log_pre + math.lgamma(1.0 + r / 2.0) + l1)
    t2 = math.sqrt(A) * s2 * math.exp(log_pre + math.lgamma((1.0 + r) / 2.0) + l2)
    return t1 + t2


def _s_kernel_mp(m: int, y: float, delta: float, a: float, b: float, shift: float, A: float, B: float):
    # same expression in extended precision; the two 1F1 terms cancel for B << 0
    mp = mpmath.mp
    r = mp.mpf(m) + mp.mpf(a) * delta - 1
    A, B = mp.mpf(A), mp.mpf(B)
    z = B * B / (4 * A)
    pre = b ** (mp.mpf(a) * delta) / mp.gamma(mp.mpf(a) * delta) * A ** (-1 - r / 2)
    pre *= mp.exp(-mp.mpf(y - shift) ** 2 / 2) / (2 * mp.sqrt(2 * mp.pi))
    t1 = B * mp.gamma(1 + r / 2) * mp.hyp1f1(1 + r / 2, mp.mpf(3) / 2, z)
    t2 = mp.sqrt(A) * mp.gamma((1 + r) / 2) * mp.hyp1f1((1 + r) / 2, mp.mpf(1) / 2, z)
    return pre * (t1 + t2)


def _s_parameters(model: BuiltinModel, y: float, delta: float):
    k, th, sg, b, x0 = model.kappa, model.theta, model.sigma, model.b, model.x0
    if model.id == CONSTANT_DIFFUSION:
        A = 1.0 / (2.0 * sg**2 * delta)
        B = y / (sg * math.sqrt(delta)) - k * (th - x0) / sg**2 - b
        shift = k * (th - x0) * math.sqrt(delta) / sg
    elif model.id == SQRT_DIFFUSION:
        A = 1.0 / (2.0 * sg**2 * x0 * delta)
        B = y / (sg * math.sqrt(x0) * math.sqrt(delta)) - k * (th - x0) / (sg**2 * x0) - b
        shift = k * (th - x0) * math.sqrt(delta) / (sg * math.sqrt(x0))
    else:
        raise ValueError("S_m is only defined for the diffusion models")
    return A, B, shift


def s_function(model: BuiltinModel, m: int, y: float, delta: float, digits: int | None = None):
    """S_m(y) for the constant-diffusion and square-root models.

    With ``digits`` the kernel is evaluated by mpmath at that working precision and an
    mpf is returned.
    """
    A, B, shift = _s_parameters(model, y, delta)
    if digits is None:
        return _s_kernel(m, y, delta, model.a, model.b, shift, A, B)
    with mpmath.workdps(digits):
        return _s_kernel_mp(m, y, delta, model.a, model.b, shift, A, B)


def _model1(model: BuiltinModel, m: int, y: float, D: float) -> float:
    k, a, b = model.kappa, model.a, model.b
    e = model.eta
    aD = a * D
    u = y - e * D
    if u <= 0:
        return 0.0
    g = math.exp(aD * math.log(b) - math.lgamma(aD) - b * u)
    if m == 0:
        return g * u ** (aD - 1)
    if m == 1:
        return -g * u ** (aD - 2) / 2 * k * D * ((b * y - aD) * y + e * D * (1 - b * y))
    if m == 2:
        br = (
            b**2 * u**2 * (y**2 * (4 + 3 * aD) - 2 * y * e * D + e**2 * D**2)
            - 2 * b * (1 + aD) * u * (y**2 * (2 + 3 * aD) - 6 * e * D * y + e**2 * D**2)
            + (1 + aD) * (3 * a**2 * y**2 * D**2 + 2 * (2 - 5 * aD) * e * D * y + (2 + aD) * e**2 * D**2)
        )
        return g * u ** (aD - 3) / (24 * (1 + aD)) * k**2 * D**2 * br
    if m == 3:
        c0 = (
            b**3 * (2 + aD) * y**3
            - b**2 * (6 + aD * (8 + 3 * aD)) * y**2
            + b * (1 + aD) * (2 + aD * (4 + 3 * aD)) * y
            - aD**3 * (1 + aD)
        )
        c1 = (
            b**3 * (8 + 3 * aD) * y**3
            - b**2 * (26 + 3 * aD * (9 + 2 * aD)) * y**2
            + b * (1 + aD) * (6 + aD * (20 + 3 * aD)) * y
            - (1 + aD) * (2 + aD * (-6 + 7 * aD))
        )
        c2 = (
            b**3 * (13 + 3 * aD) * y**3
            - b**2 * (40 + 3 * aD * (11 + aD)) * y**2
            + b * (1 + aD) * (14 + 19 * aD) * y
            - (1 + aD) * (-4 + aD * (6 + aD))
        )
        c3 = b**3 * (11 + aD) * y**3 - b**2 * (27 + 17 * aD) * y**2 + 3 * b * (1 + aD) * (4 + aD) * y - aD * (1 + aD)
        br = (
            c0 * y**3
            - e * D * c1 * y**2
            + e**2 * D**2 * c2 * y
            - e**3 * D**3 * c3
            + b * e**4 * D**4 * (b * y * (-8 - 3 * aD + 5 * b * y) + 2 * (1 + aD))
            + b**2 * e**5 * D**5 * (1 - b * y)
        )
        return -g * u ** (aD - 4) / (48 * (1 + aD)) * k**3 * D**3 * br
    raise ValueError(m)


def _model2(model: BuiltinModel, m: int, y: float, D: float) -> list:
    # coefficients of S_0, S_1, ... in the published Omega_m
    k, sg, a = model.kappa, model.sigma, model.a
    e = model.eta
    aD = a * D
    rD = math.sqrt(D)
    if m == 0:
        return [1.0]
    if m == 1:
        c = k * rD / (2 * sg)
        return [c * (e * D * y + sg * rD * (1 - y**2)), c * y]
    if m == 2:
        c = k**2 / (24 * sg**4 * (1 + aD))
        return [
            c * sg**2 * D**2 * (1 + aD)
            * (e**2 * (1 + 3 * y**2) * D + 6 * e * sg * rD * (1 - y**2) * y + sg**2 * (1 - 10 * y**2 + 3 * y**4)),
            c * 2 * sg**2 * D**1.5 * (1 + aD) * (e * (1 + 3 * y**2) * rD + 3 * sg * (1 - y**2) * y),
            c * (e**2 * D - 2 * e * sg * rD * y + sg**2 * (aD + (4 + 3 * aD) * y**2)) * D,
            c * 2 * (e * D - sg * rD * y),
            c,
        ]
    if m == 3:
        c = k**3 * rD / (336 * sg**5 * (1 + aD))
        p5 = 7 * y
        p4 = 21 * e * D * y - sg * rD * (-4 + 3 * aD + 21 * y**2)
        p3 = (
            21 * e**2 * D * y
            + e * sg * rD * (5 - 9 * aD - 42 * y**2)
            + sg**2 * (-19 + 16 * aD + 7 * (4 + aD) * y**2) * y
        ) * D
        p2 = (
            7 * e**3 * D**1.5 * y
            - e**2 * sg * D * (2 + 9 * aD + 21 * y**2)
            + e * sg**2 * rD * y * (4 + 39 * aD + 21 * (2 + aD) * y**2)
            + sg**3 * (9 + 16 * aD - 7 * (4 + 3 * aD) * y**4 + (33 + 5 * aD) * y**2)
        ) * D**1.5
        p1 = sg * D**2 * (1 + aD) * (
            -3 * e**3 * D**1.5
            + 3 * e**2 * sg * D * (10 + 7 * y**2) * y
            + e * sg**2 * rD * (23 + 19 * y**2 - 42 * y**4)
            + sg**3 * (-16 - 67 * y**2 + 21 * y**4) * y
        )
        p0 = 7 * sg**2 * D**2.5 * (1 + aD) * (
            e**3 * D**1.5 * (1 + y**2) * y
            + e**2 * sg * D * (1 + 2 * y**2 - 3 * y**4)
            + e * sg**2 * rD * (-1 - 10 * y**2 + 3 * y**4) * y
            - sg**3 * (1 + 5 * y**2 - 7 * y**4 + y**6)
        )
        return [c * p for p in (p0, p1, p2, p3, p4, p5)]
    raise ValueError(m)


def _model3(model: BuiltinModel, m: int, y: float, D: float) -> list:
    k, th, sg, a, x0 = model.kappa, model.theta, model.sigma, model.a, model.x0
    e = model.eta
    aD = a * D
    rD = math.sqrt(D)
    # the printed polynomial factors are written in v = (x - x0)/(sigma sqrt(D)),
    # while S_m takes the standardized y = v / sqrt(x0)
    v = y * math.sqrt(x0)
    if m == 0:
        return [1.0]
    if m == 1:
        c = 1.0 / (4 * sg * x0**2 * rD)
        return [
            c * (k * e * (th + x0) * D**2 * v + 2 * k * th * sg * (x0 - v**2) * D**1.5 + sg**2 * (-3 * x0 + v**2) * D * v),
            c * (2 * k * th * D * v + 2 * sg * (x0 - v**2) * rD),
            c * v,
        ]
    if m == 2:
        c = 1.0 / (480 * sg**4 * x0**4 * D**2 * (1 + aD))
        p6 = 5.0
        p5 = 20 * (k * th * D - sg * rD * v)
        p4 = (
            10 * k**2 * (3 * th**2 - x0**2) * D**2
            - 60 * k * th * sg * D**1.5 * v
            + (15 * (3 + aD) * v**2 + (-12 + 17 * aD) * x0) * sg**2 * D
        )
        p3 = (
            20 * k**3 * th * (th**2 - x0**2) * D**3
            - 20 * k**2 * sg * (3 * th**2 - x0**2) * D**2.5 * v
            - 2 * k * sg**2 * ((7 + 6 * aD) * x0**2 + th * (x0 * (1 - 28 * aD) - 30 * (2 + aD) * v**2)) * D**2
            + 2 * sg**3 * (x0 * (38 + 9 * aD) - 10 * (4 + 3 * aD) * v**2) * D**1.5 * v
        )
        p2 = D**2 * (
            5 * k**4 * (th**2 - x0**2) ** 2 * D**2
            - 20 * k**3 * sg * th * (th**2 - x0**2) * D**1.5 * v
            + (
                e**2 * (30 * v**2 * (4 + 3 * aD) + x0 * (37 + 66 * aD))
                + 12 * k * e * x0 * (5 * v**2 * (4 + 3 * aD) + x0 * (4 + 9 * aD))
                + 20 * k**2 * x0**2 * (x0 * aD + (4 + 3 * aD) * v**2)
            )
            * sg**2
            * D
            + 2 * sg**3 * e * (-10 * v**2 * (10 + 9 * aD) + x0 * (77 + 48 * aD)) * rD * v
            + 4 * k * sg**3 * x0 * (-5 * v**2 * (10 + 9 * aD) + x0 * (48 + 33 * aD)) * rD * v
            - sg**4 * (-5 * (19 + 18 * aD) * v**4 + (281 + 252 * aD) * x0 * v**2 + (9 + 23 * aD) * x0**2)
        )
        p1 = sg**2 * (1 + aD) * D**2.5 * (
            -4 * k**3 * (th**2 - x0**2) * (3 * x0**2 - 8 * th * x0 - 15 * th * v**2) * D**1.5
            + 6 * sg * (e**2 * (23 * x0 - 30 * v**2) + 4 * k * e * x0 * (13 * x0 - 15 * v**2) + 20 * k**2 * x0**2 * (x0 - v**2)) * D * v
            + sg**2 * (e * (7 * x0**2 - 552 * x0 * v**2 + 180 * v**4) + 36 * k * x0 * (x0**2 - 16 * x0 * v**2 + 5 * v**4)) * rD
            + sg**3 * (-241 * x0**2 + 382 * x0 * v**2 - 60 * v**4) * v
        )
        p0 = 5 * sg**2 * (1 + aD) * D**3 * (
            k**2 * e**2 * (x0 + 3 * v**2) * (th + x0) ** 2 * D**2
            + 12 * k**2 * th * sg * e * (x0 - v**2) * (th + x0) * D**1.5 * v
            + 2 * sg**2 * D * (x0**2 - 10 * x0 * v**2 + 3 * v**4) * (3 * e**2 + 6 * k * e * x0 + 2 * k**2 * x0**2)
            - 4 * k * th * sg**3 * (15 * x0**2 - 20 * x0 * v**2 + 3 * v**4) * rD * v
            + 3 * sg**4 * (-3 * x0**3 + 21 * x0**2 * v**2 - 11 * x0 * v**4 + v**6)
        )
        return [c * p for p in (p0, p1, p2, p3, p4, p5, p6)]
    raise ValueError(m)


def s_coefficients(model: BuiltinModel, m: int, y: float, delta: float) -> list:
    """Polynomial factors P_k(y) with Omega_m(y) = sum_k P_k(y) S_k(y) (diffusion models)."""
    top = PUBLISHED_ORDERS[model.id]
    if not 0 <= m <= top:
        raise ValueError(f"closed forms for {model.id} are published for m <= {top}, got m={m}")
    if model.id == CONSTANT_DIFFUSION:
        return _model2(model, m, float(y), float(delta))
    if model.id == SQRT_DIFFUSION:
        return _model3(model, m, float(y), float(delta))
    raise ValueError("the pure-jump closed forms are not written in terms of S_m")


def closed_form_omega(model: BuiltinModel, m: int, y: float, delta: float, digits: int | None = None) -> float:
    """Omega_m(y) from the published expressions (y standardized for diffusion models).

    ``digits`` switches the S_m kernels and the final sum to mpmath at that precision;
    the printed form cancels badly in the far left tail when evaluated in doubles.
    """
    top = PUBLISHED_ORDERS[model.id]
    if not 0 <= m <= top:
        raise ValueError(f"closed forms for {model.id} are published for m <= {top}, got m={m}")
    if model.id == PURE_JUMP_OU:
        return _model1(model, m, float(y), float(delta))
    coeffs = s_coefficients(model, m, y, delta)
    if digits is None:
        return math.fsum(c * s_function(model, k, float(y), float(delta)) for k, c in enumerate(coeffs))
    with mpmath.workdps(digits):
        total = mpmath.fsum(mpmath.mpf(c) * s_function(model, k, float(y), float(delta), digits) for k, c in enumerate(coeffs))
        return float(total)


def closed_form_omega_array(model: BuiltinModel, m: int, y, delta: float, digits: int | None = None) -> np.ndarray:
    return np.array([closed_form_omega(model, m, yi, delta, digits) for yi in np.atleast_1d(y)])
