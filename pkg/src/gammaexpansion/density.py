"""Leading and higher-order terms of the density expansion and the assembled density.

Diffusion models are evaluated in the standardized variable y = (x - x0)/(sigma(x0) sqrt(delta)).
Every Omega_m there is a finite combination of Gaussian-gamma moment integrals

    M(n1, n2; y) = int_0^inf z1^n1 z2^n2 phi(z1) p_L(z2) dz2,  z1 = y - (mu(x0) delta + z2)/(sigma(x0) sqrt(delta)),

which we evaluate either in closed form (Gamma and Kummer 1F1) or by adaptive quadrature.
Pure-jump models use y = x - x0 and stay inside the family of gamma-type Laurent forms.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Dict, Sequence, Tuple

import numpy as np
from scipy import integrate as sint
from scipy.special import binom, gammaln

from .conditioning import compute_K, d1_operator
from .expansion import MAX_ORDER, ModelSpec, index_set
from .polynomials import BivariatePolynomial
from .special import log_kummer_1f1_array

ANALYTIC = "analytic-1F1"
QUADRATURE = "quadrature"
PURE_JUMP = "pure-jump"
PATHS = (ANALYTIC, QUADRATURE, PURE_JUMP)

# fall back to quadrature once the two 1F1 pieces cancel to below this fraction
CANCELLATION_LIMIT = 1e-4
QUAD_EPSREL = 1e-12
# relative size of the largest cancelling term that we accept in the moment regrouping
CONDITION_LIMIT = 1e5


class QuadratureError(ArithmeticError):
    def __init__(self, msg: str, estimate: float):
        super().__init__(f"{msg} (error estimate {estimate:.3g})")
        self.estimate = estimate


class GammaLaurentForm:
    """Q(z) z^(a delta - 1 + shift) exp(-b z) b^(a delta) / Gamma(a delta), with Q a polynomial."""

    __slots__ = ("shift", "poly", "a_delta", "b")

    def __init__(self, shift: int, poly: Sequence[float], a_delta: float, b: float):
        self.shift = int(shift)
        self.poly = np.trim_zeros(np.asarray(poly, dtype=float), "b")
        self.a_delta = float(a_delta)
        self.b = float(b)

    @property
    def exponent(self) -> float:
        return self.a_delta - 1.0 + self.shift

    def _compatible(self, other: "GammaLaurentForm"):
        if (self.a_delta, self.b) != (other.a_delta, other.b):
            raise ValueError("forms belong to different gamma laws")

    def __add__(self, other: "GammaLaurentForm") -> "GammaLaurentForm":
        self._compatible(other)
        k = min(self.shift, other.shift)
        p1 = np.concatenate([np.zeros(self.shift - k), self.poly])
        p2 = np.concatenate([np.zeros(other.shift - k), other.poly])
        n = max(len(p1), len(p2))
        total = np.zeros(n)
        total[: len(p1)] += p1
        total[: len(p2)] += p2
        return GammaLaurentForm(k, total, self.a_delta, self.b)

    def scale(self, c: float) -> "GammaLaurentForm":
        return GammaLaurentForm(self.shift, c * self.poly, self.a_delta, self.b)

    def derivative(self) -> "GammaLaurentForm":
        # d/dz [z^c e^{-bz} Q] = z^{c-1} e^{-bz} ((c - b z) Q + z Q')
        c = self.exponent
        q = self.poly
        if q.size == 0:
            return GammaLaurentForm(self.shift - 1, [], self.a_delta, self.b)
        out = np.zeros(q.size + 1)
        out[: q.size] += c * q
        out[1:] -= self.b * q
        out[1 : q.size] += np.arange(1, q.size) * q[1:]
        return GammaLaurentForm(self.shift - 1, out, self.a_delta, self.b)

    def is_singular_at_zero(self) -> bool:
        if self.poly.size == 0:
            return False
        lowest = int(np.flatnonzero(self.poly)[0])
        return self.exponent + lowest < 0

    def __call__(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        out = np.zeros(z.shape)
        pos = z > 0
        if self.poly.size and np.any(pos):
            zp = z[pos]
            log_pref = self.a_delta * math.log(self.b) - math.lgamma(self.a_delta)
            base = np.exp(log_pref + self.exponent * np.log(zp) - self.b * zp)
            out[pos] = base * np.polynomial.polynomial.polyval(zp, self.poly)
        at_zero = z == 0
        if np.any(at_zero) and self.poly.size:
            out[at_zero] = np.nan if self.is_singular_at_zero() else (
                self.poly[0] * self.b**self.a_delta / math.gamma(self.a_delta) if self.exponent == 0 else 0.0
            )
        return out

    def finite_part_integral(self) -> float:
        """Integral over (0, inf), continued analytically in the exponent where it diverges."""
        total = []
        for j, c in enumerate(self.poly):
            lam = self.exponent + j + 1.0
            if lam <= 0 and float(lam).is_integer():
                raise ValueError("finite part undefined at integer exponents")
            sign = 1.0
            lg = gammaln(lam)
            if lam < 0:
                sign = math.copysign(1.0, math.gamma(lam))
            total.append(c * sign * math.exp(lg - lam * math.log(self.b) - math.lgamma(self.a_delta) + self.a_delta * math.log(self.b)))
        return math.fsum(total)

    def __repr__(self):
        return f"GammaLaurentForm(shift={self.shift}, poly={self.poly.tolist()})"


def gamma_density(z, shape: float, rate: float) -> np.ndarray:
    """Gamma(shape, rate) density, zero off the positive half-line."""
    return GammaLaurentForm(0, [1.0], shape, rate)(z)


@dataclass
class DensityResult:
    x: np.ndarray
    partial_sums: np.ndarray  # (M + 1, n): column order m holds p^(m)
    terms: np.ndarray  # (M + 1, n): individual order-m contributions
    flags: np.ndarray  # bool, True where the value is outside support or singular
    path: str
    meta: Dict[str, object] = field(default_factory=dict)

    @property
    def order(self) -> int:
        return self.partial_sums.shape[0] - 1

    def density(self, m: int | None = None) -> np.ndarray:
        return self.partial_sums[self.order if m is None else m]


class OmegaEvaluator:
    """Caches the K polynomials for one (model, delta, order) and evaluates Omega_m."""

    def __init__(self, model: ModelSpec, delta: float, order: int, evaluation_path: str | None = None):
        if not (math.isfinite(delta) and delta > 0):
            raise ValueError(f"delta must be positive, got {delta}")
        if not 0 <= order <= MAX_ORDER:
            raise ValueError(f"order must be in 0..{MAX_ORDER}, got {order}")
        if evaluation_path is None:
            evaluation_path = PURE_JUMP if model.pure_jump else ANALYTIC
        if evaluation_path not in PATHS:
            raise ValueError(f"unknown evaluation path {evaluation_path!r}")
        if (evaluation_path == PURE_JUMP) != model.pure_jump:
            raise ValueError(f"path {evaluation_path!r} does not match the model's pure_jump flag")
        self.model = model
        self.delta = float(delta)
        self.order = order
        self.path = evaluation_path
        self.a_delta = model.gamma_a * self.delta
        self.b = model.gamma_b
        self.K: Dict[Tuple[int, Tuple[int, ...]], BivariatePolynomial] = {}
        for m in range(1, order + 1):
            for ell, j in index_set(m):
                self.K[(ell, j)] = compute_K(ell, j, model, self.delta)
        if model.pure_jump:
            self.scale = 1.0
            self._laurent = [self._pure_jump_form(m) for m in range(order + 1)]
        else:
            self.scale = model.sigma0 * math.sqrt(self.delta)
            self._q = [self._omega_polynomial(m) for m in range(order + 1)]
        self.fallback_count = 0
        self.conditioning_fallbacks = 0

    # ---- diffusion path -------------------------------------------------
    def _omega_polynomial(self, m: int) -> BivariatePolynomial:
        if m == 0:
            return BivariatePolynomial.constant(1.0)
        total = BivariatePolynomial()
        for ell, j in index_set(m):
            c = (-1) ** ell / math.factorial(ell) * self.scale ** (-ell)
            total = total + d1_operator(self.K[(ell, j)], ell).scale(c)
        return total

    def omega_polynomial(self, m: int) -> BivariatePolynomial:
        """Q_m with Omega_m(y) = int Q_m(z1, z2) phi(z1) p_L(z2) dz2."""
        return self._q[m]

    def _w(self, y):
        return np.asarray(y, dtype=float) - self.model.mu0 * self.delta / self.scale

    def base_moments(self, y, r_max: int, path: str | None = None) -> np.ndarray:
        """Rows r = 0..r_max of M(0, r; y), shape (r_max + 1, len(y))."""
        y = np.atleast_1d(np.asarray(y, dtype=float))
        path = path or self.path
        out = np.empty((r_max + 1, y.size))
        if path == QUADRATURE:
            for r in range(r_max + 1):
                out[r] = [moment_quadrature(self, 0, r, yi) for yi in y]
            return out
        for r in range(r_max + 1):
            vals, bad = _analytic_base(self, r, y)
            for idx in np.flatnonzero(bad):
                vals[idx] = moment_quadrature(self, 0, r, y[idx])
                self.fallback_count += 1
            out[r] = vals
        return out

    def moments_from_base(self, n1: int, n2: int, y, base: np.ndarray) -> np.ndarray:
        w = self._w(np.atleast_1d(y))
        terms = [binom(n1, k) * w ** (n1 - k) * (-1.0 / self.scale) ** k * base[n2 + k] for k in range(n1 + 1)]
        return np.sum(terms, axis=0)

    def omega_diffusion(self, m: int, y, path: str | None = None) -> np.ndarray:
        q = self._q[m]
        y = np.atleast_1d(np.asarray(y, dtype=float))
        r_max = max((n1 + n2 for n1, n2 in q.coeffs), default=0)
        base = self.base_moments(y, r_max, path)
        return self._combine(q, y, base, m)

    def _combine(self, q: BivariatePolynomial, y, base, m: int | None = None) -> np.ndarray:
        w = self._w(y)
        out = np.zeros(y.size)
        mag = np.zeros(y.size)
        # regroup Q(z1, z2) with z1 = w - z2/s into sum_r P_r(w) z2^r
        for (n1, n2), c in q.coeffs.items():
            for k in range(n1 + 1):
                t = c * binom(n1, k) * w ** (n1 - k) * (-1.0 / self.scale) ** k * base[n2 + k]
                out += t
                mag += np.abs(t)
        if m is not None:
            # far in the tails the regrouped sum cancels badly; integrate Q_m directly there
            with np.errstate(divide="ignore", invalid="ignore"):
                ill = mag > CONDITION_LIMIT * np.abs(out)
            for idx in np.flatnonzero(ill & (mag > 0)):
                out[idx] = omega_quadrature(self, m, float(y[idx]))
                self.conditioning_fallbacks += 1
        return out

    # ---- pure-jump path -------------------------------------------------
    def _pure_jump_form(self, m: int) -> GammaLaurentForm:
        base = GammaLaurentForm(0, [1.0], self.a_delta, self.b)
        if m == 0:
            return base
        total = GammaLaurentForm(0, [], self.a_delta, self.b)
        for ell, j in index_set(m):
            kpoly = self.K[(ell, j)].univariate_z2()
            form = GammaLaurentForm(0, kpoly, self.a_delta, self.b)
            for _ in range(ell):
                form = form.derivative()
            total = total + form.scale((-1) ** ell / math.factorial(ell))
        return total

    def laurent_form(self, m: int) -> GammaLaurentForm:
        return self._laurent[m]

    # ---- public evaluation ---------------------------------------------
    def omega(self, m: int, y, path: str | None = None) -> np.ndarray:
        if not 0 <= m <= self.order:
            raise ValueError(f"m must be in 0..{self.order}")
        if self.model.pure_jump:
            z = np.asarray(y, dtype=float) - self.model.mu0 * self.delta
            return self._laurent[m](np.atleast_1d(z))
        return self.omega_diffusion(m, y, path)


def _analytic_base(ev: OmegaEvaluator, r: int, y: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Closed form of M(0, r; y) and a mask of entries needing the fallback."""
    s = ev.scale
    nu = ev.a_delta + r
    w = ev._w(y)
    A = 1.0 / (2.0 * s * s)
    B = w / s - ev.b
    z = B * B / (4.0 * A)
    log_c = ev.a_delta * math.log(ev.b) - math.lgamma(ev.a_delta) - 0.5 * math.log(2 * math.pi)
    # int_0^inf z^(nu-1) e^(-A z^2 + B z) dz = A^(-nu/2)/2 [T1 + sign(B) T2]
    with np.errstate(divide="ignore"):
        log_t1 = math.lgamma(nu / 2) + log_kummer_1f1_array(nu / 2, 0.5, z)
        log_t2 = (
            np.log(np.abs(B)) - 0.5 * math.log(A) + math.lgamma((nu + 1) / 2)
            + log_kummer_1f1_array((nu + 1) / 2, 1.5, z)
        )
    top = np.maximum(log_t1, log_t2)
    mix = np.exp(log_t1 - top) + np.sign(B) * np.exp(log_t2 - top)
    bad = (B < 0) & (mix < CANCELLATION_LIMIT)
    with np.errstate(divide="ignore", invalid="ignore"):
        log_val = log_c - 0.5 * w * w - 0.5 * nu * math.log(A) - math.log(2.0) + top + np.log(np.abs(mix))
        vals = np.exp(log_val)
    bad |= ~np.isfinite(vals)
    vals[bad] = 0.0
    return vals, bad


def _quad_setup(ev: OmegaEvaluator, n1: int, n2: int, y: float):
    s = ev.scale
    nu = ev.a_delta + n2
    w = float(ev._w(y))
    B = w / s - ev.b
    # stationary point of z^(nu-1) exp(-(w - z/s)^2/2 - b z)
    disc = B * B + 4.0 * max(nu - 1.0, 0.0) / (s * s)
    peak = max(0.5 * s * s * (B + math.sqrt(disc)), 0.0)
    upper = peak + s * (15.0 + 4.0 * math.sqrt(n1 + n2 + nu + 1.0))
    log_c = ev.a_delta * math.log(ev.b) - math.lgamma(ev.a_delta) - 0.5 * math.log(2 * math.pi)
    return s, w, nu, peak, upper, log_c


def _poly_quadrature(ev: OmegaEvaluator, poly, deg: int, y: float, label: str, scalar=None) -> float:
    """int poly(z1, z2) phi(z1) p_L(z2) dz2 with z1 = w - z2/s, by adaptive quadrature.

    Uses z2 = t^(1/alpha), alpha = min(1, a delta), to remove the endpoint singularity.
    ``scalar`` is an optional float-only version of ``poly`` used inside the quadrature loop.
    """
    scalar = scalar or poly
    s, w, nu, peak, upper, log_c = _quad_setup(ev, 0, deg, y)
    alpha = min(1.0, ev.a_delta)
    t_exp = ev.a_delta / alpha - 1.0

    def log_base(z2):
        z1 = w - z2 / s
        return -0.5 * z1 * z1 - ev.b * z2 + (ev.a_delta - 1.0) * np.log(z2)

    probe = np.concatenate([np.geomspace(upper * 1e-12, upper, 400), [peak] if peak > 0 else []])
    with np.errstate(divide="ignore"):
        ref = float(np.max(log_base(probe) + np.log(np.abs(poly(w - probe / s, probe)) + 1e-300)))

    def f(t):
        if t <= 0:
            return 0.0
        z2 = t ** (1.0 / alpha)
        z1 = w - z2 / s
        return float(scalar(z1, z2)) * math.exp(-0.5 * z1 * z1 - ev.b * z2 - ref) * t**t_exp / alpha

    t_up = upper**alpha
    pts = [peak**alpha] if 0 < peak < upper else None
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", sint.IntegrationWarning)
        val, err = sint.quad(f, 0.0, t_up, points=pts, limit=500, epsabs=0.0, epsrel=QUAD_EPSREL)
        scale = math.exp(ref + log_c)
        if not math.isfinite(val) or err > 1e-6 * max(abs(val), 1e-300) and err * scale > 1e-14:
            # retry with a larger subdivision budget and a looser target before giving up
            val, err = sint.quad(f, 0.0, t_up, points=pts, limit=2000, epsabs=1e-300, epsrel=1e-10)
            if not math.isfinite(val) or err > 1e-6 * abs(val) and err * scale > 1e-12:
                raise QuadratureError(f"{label} quadrature failed at y={y}", err * scale)
    return val * scale


def moment_quadrature(ev: OmegaEvaluator, n1: int, n2: int, y: float, absolute: bool = False) -> float:
    """M(n1, n2; y) by adaptive quadrature."""
    if absolute:
        poly = lambda z1, z2: np.abs(z1) ** n1 * z2**n2
    else:
        poly = lambda z1, z2: z1**n1 * z2**n2
    return _poly_quadrature(ev, poly, n1 + n2, y, f"moment ({n1},{n2})")


def omega_quadrature(ev: OmegaEvaluator, m: int, y: float) -> float:
    """Omega_m(y) integrated directly against Q_m, avoiding the moment expansion."""
    q = ev.omega_polynomial(m)
    deg = max((n1 + n2 for n1, n2 in q.coeffs), default=0)
    return _poly_quadrature(ev, q, deg, y, f"Omega_{m}", q.scalar_function())


def moment_integral(ev: OmegaEvaluator, n1: int, n2: int, y: float, path: str | None = None) -> float:
    """int_0^inf z1^n1 z2^n2 phi(z1) p_L(z2) dz2 at a single y."""
    if ev.model.pure_jump:
        raise ValueError("moment integrals are defined for diffusion models only")
    if n1 < 0 or n2 < 0 or n1 + n2 > 12:
        raise ValueError("need 0 <= n1, n2 and n1 + n2 <= 12")
    path = path or ev.path
    if path == QUADRATURE:
        return moment_quadrature(ev, n1, n2, y)
    base = ev.base_moments([y], n1 + n2, ANALYTIC)
    return float(ev.moments_from_base(n1, n2, [y], base)[0])


def leading_term(ev: OmegaEvaluator, y) -> np.ndarray:
    if ev.model.pure_jump:
        raise ValueError("leading_term is the diffusion-path Omega_0; use pure_jump_term")
    return ev.omega(0, y)


def higher_term(ev: OmegaEvaluator, m: int, y) -> np.ndarray:
    if ev.model.pure_jump:
        raise ValueError("higher_term is the diffusion-path Omega_m; use pure_jump_term")
    if not 1 <= m <= ev.order:
        raise ValueError(f"m must be in 1..{ev.order}")
    return ev.omega(m, y)


def pure_jump_term(ev: OmegaEvaluator, m: int, y) -> np.ndarray:
    if not ev.model.pure_jump:
        raise ValueError("pure_jump_term requires a pure-jump model")
    return ev.omega(m, y)


def density(ev: OmegaEvaluator, x_grid: Sequence[float]) -> DensityResult:
    """Order-0..M approximations of the transition density on x_grid."""
    x = np.asarray(x_grid, dtype=float)
    if x.ndim != 1 or x.size == 0 or not np.all(np.isfinite(x)):
        raise ValueError("x_grid must be a non-empty finite 1-d sequence")
    if np.any(np.diff(x) <= 0):
        raise ValueError("x_grid must be strictly increasing")
    x0 = ev.model.x0
    terms = np.empty((ev.order + 1, x.size))
    if ev.model.pure_jump:
        y = x - x0
        # grid points within rounding of the support edge are the edge itself
        edge = ev.model.mu0 * ev.delta
        near = np.abs(y - edge) <= 8 * np.finfo(float).eps * np.maximum(np.abs(x), abs(x0))
        y = np.where(near, edge, y)
        for m in range(ev.order + 1):
            terms[m] = ev.omega(m, y)
        flags = y - ev.model.mu0 * ev.delta <= 0
        terms[:, flags] = np.where(np.isnan(terms[:, flags]), np.nan, 0.0)
    else:
        y = (x - x0) / ev.scale
        qs = ev._q
        r_max = max(max((n1 + n2 for n1, n2 in q.coeffs), default=0) for q in qs)
        base = ev.base_moments(y, r_max)
        for m, q in enumerate(qs):
            terms[m] = ev._combine(q, y, base, m) / ev.scale
        flags = np.zeros(x.size, dtype=bool)
    flags |= ~np.isfinite(terms).all(axis=0)
    return DensityResult(
        x=x,
        partial_sums=np.cumsum(terms, axis=0),
        terms=terms,
        flags=flags,
        path=ev.path,
        meta={
            "order": ev.order,
            "delta": ev.delta,
            "fallbacks": ev.fallback_count,
            "conditioning_fallbacks": ev.conditioning_fallbacks,
        },
    )


def s_coefficients(ev: OmegaEvaluator, m: int, y: float) -> np.ndarray:
    """P_r(y) with Omega_m(y) = sum_r P_r(y) M(0, r; y) (diffusion path)."""
    q = ev.omega_polynomial(m)
    w = float(ev._w(y))
    r_max = max((n1 + n2 for n1, n2 in q.coeffs), default=0)
    out = np.zeros(r_max + 1)
    for (n1, n2), c in q.coeffs.items():
        for k in range(n1 + 1):
            out[n2 + k] += c * binom(n1, k) * w ** (n1 - k) * (-1.0 / ev.scale) ** k
    return out
