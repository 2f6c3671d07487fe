"""Independent oracle for the expansion coefficients Omega_m of the diffusion models.

Scaling drift, diffusion and jumps by eps gives a process X(eps) whose
characteristic function is known exactly.  The standardized variable
Y(eps) = (X(eps, delta) - x0) / (eps sigma(x0) sqrt(delta)) has Fourier transform
F(u; eps) = sum_m eps^m F_m(u), and Omega_m is the inverse transform of F_m.  The
eps-coefficients are taken with a Cauchy contour integral and the u-integral by
Gauss-Legendre panels.  Nothing here uses the iterated-integral machinery.
"""

import numpy as np
from numpy.polynomial.legendre import leggauss

from gammaexpansion.benchmark.models import CONSTANT_DIFFUSION, SQRT_DIFFUSION


def _log_transform(model, delta, u, eps, nodes=40):
    k, th, sg, a, b, x0 = model.kappa, model.theta, model.sigma, model.a, model.b, model.x0
    t, w = leggauss(nodes)
    r = (t + 1) * delta / 2
    w = w * delta / 2
    kp = eps * k
    if model.id == CONSTANT_DIFFUSION:
        s = sg * np.sqrt(delta)
        om = u / (eps * s)
        drift = 1j * om * (th - x0) * (1 - np.exp(-kp * delta))
        gauss = -(om * eps * sg) ** 2 * (1 - np.exp(-2 * kp * delta)) / (4 * kp)
        decay = np.exp(-kp * r)[:, None]
        jump = -a * (w[:, None] * np.log(1 - 1j * om * eps * decay / b)).sum(0)
        return drift + gauss + jump
    if model.id == SQRT_DIFFUSION:
        s = sg * np.sqrt(x0 * delta)
        sp = eps * sg
        om = u / (eps * s)

        def beta(t_):
            e = np.exp(-kp * t_)
            return 1j * om * e / (1 - 1j * om * sp**2 * (1 - e) / (2 * kp))

        br = beta(r[:, None])
        alpha = (w[:, None] * (kp * th * br - a * np.log(1 - eps * br / b))).sum(0)
        return alpha + x0 * (beta(delta) - 1j * om)
    raise ValueError("oracle covers the diffusion models only")


# roundoff favours a large radius; the square-root model's transform leaves its
# domain of analyticity sooner, so it needs a small one
CONTOUR_RADIUS = {CONSTANT_DIFFUSION: 4.0, SQRT_DIFFUSION: 0.25}


def transform_coefficients(model, delta, u, m_max, radius=None, n_contour=48):
    """F_0(u) .. F_m_max(u) by the trapezoid rule on |eps| = radius."""
    radius = CONTOUR_RADIUS[model.id] if radius is None else radius
    out = np.zeros((m_max + 1, u.size), dtype=complex)
    for j in range(n_contour):
        eps = radius * np.exp(2j * np.pi * j / n_contour)
        f = np.exp(_log_transform(model, delta, u, eps))
        for m in range(m_max + 1):
            out[m] += f * eps ** (-m) / n_contour
    return out


def omega_oracle(model, delta, y, m_max, u_max=40.0, panels=80, nodes=64):
    """Omega_0(y) .. Omega_m_max(y) as an array of shape (m_max + 1, len(y))."""
    t, w = leggauss(nodes)
    edges = np.linspace(0.0, u_max, panels + 1)
    u = np.concatenate([(t + 1) * (hi - lo) / 2 + lo for lo, hi in zip(edges[:-1], edges[1:])])
    wu = np.concatenate([w * (hi - lo) / 2 for lo, hi in zip(edges[:-1], edges[1:])])
    F = transform_coefficients(model, delta, u, m_max)
    y = np.atleast_1d(np.asarray(y, dtype=float))
    phase = np.exp(-1j * np.outer(y, u))
    return np.array([(phase * F[m]).real @ wu / np.pi for m in range(m_max + 1)])
