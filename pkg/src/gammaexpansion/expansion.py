"""Pathwise expansion terms X_m of the epsilon-scaled SDE as iterated-integral expressions."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import List, Sequence, Tuple

from .ito_algebra import TIME, WIENER, IntegralExpression, integrate, multiply

MAX_ORDER = 4

DRIFT = "drift"
DIFFUSION = "diffusion"


class ModelError(ValueError):
    pass


@dataclass(frozen=True)
class ModelSpec:
    """Numeric input to the expansion: derivatives of drift and diffusion at x0.

    ``drift_derivs[k]`` is the k-th derivative of mu at x0, likewise
    ``diffusion_derivs`` for sigma.  ``gamma_a`` and ``gamma_b`` are the shape rate
    and rate of the gamma process, whose marginal at time t is Gamma(a t, b).
    """

    x0: float
    drift_derivs: Tuple[float, ...]
    diffusion_derivs: Tuple[float, ...]
    gamma_a: float
    gamma_b: float
    pure_jump: bool = False

    def __post_init__(self):
        object.__setattr__(self, "drift_derivs", tuple(float(v) for v in self.drift_derivs))
        object.__setattr__(self, "diffusion_derivs", tuple(float(v) for v in self.diffusion_derivs))
        for name in ("gamma_a", "gamma_b"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise ModelError(f"{name} must be finite and > 0, got {v}")
        if not self.drift_derivs:
            raise ModelError("drift_derivs must contain at least mu(x0)")
        if self.pure_jump:
            if any(v != 0.0 for v in self.diffusion_derivs):
                raise ModelError("pure-jump model must have identically zero diffusion")
        else:
            if not self.diffusion_derivs or not self.diffusion_derivs[0] > 0:
                raise ModelError("diffusion model requires sigma(x0) > 0")

    @property
    def mu0(self) -> float:
        return self.drift_derivs[0]

    @property
    def sigma0(self) -> float:
        return self.diffusion_derivs[0] if self.diffusion_derivs else 0.0

    def derivative(self, kind: str, k: int) -> float:
        if kind == DIFFUSION and self.pure_jump:
            return 0.0
        arr = self.drift_derivs if kind == DRIFT else self.diffusion_derivs
        if k >= len(arr):
            raise ModelError(f"missing {kind} derivative of order {k} at x0 (only {len(arr) - 1} supplied)")
        return arr[k]


@lru_cache(maxsize=None)
def index_set(m: int) -> Tuple[Tuple[int, Tuple[int, ...]], ...]:
    """Ordered compositions of m as (ell, (j_1, ..., j_ell)); 2**(m-1) of them."""
    if m < 1:
        raise ValueError(f"index set is defined for m >= 1, got {m}")
    out = []
    # a composition of m is a subset of the m-1 cut points
    for cuts in product((False, True), repeat=m - 1):
        parts, run = [], 1
        for cut in cuts:
            if cut:
                parts.append(run)
                run = 1
            else:
                run += 1
        parts.append(run)
        out.append((len(parts), tuple(parts)))
    out.sort(key=lambda t: (t[0], t[1]))
    return tuple(out)


def _product_of_terms(terms: Sequence[IntegralExpression], js: Tuple[int, ...]) -> IntegralExpression:
    out = terms[js[0] - 1]
    for j in js[1:]:
        out = multiply(out, terms[j - 1])
    return out


def coefficient_process(
    model: ModelSpec, m: int, kind: str, lower_terms: Sequence[IntegralExpression]
) -> IntegralExpression:
    """Order-m coefficient of mu(X(eps, s)) or sigma(X(eps, s)) in powers of eps."""
    if kind not in (DRIFT, DIFFUSION):
        raise ValueError(f"kind must be {DRIFT!r} or {DIFFUSION!r}")
    if m == 0:
        return IntegralExpression.constant(model.derivative(kind, 0))
    if len(lower_terms) < m:
        raise ValueError(f"need X_1..X_{m}, got {len(lower_terms)} terms")
    total = IntegralExpression()
    for ell, js in index_set(m):
        d = model.derivative(kind, ell)
        if d == 0.0:
            continue
        total = total + _product_of_terms(lower_terms, js).scale(d / math.factorial(ell))
    return total


def first_term(model: ModelSpec) -> IntegralExpression:
    pairs = {
        (0, ((TIME, 0),)): model.mu0,
        (1, ()): 1.0,
    }
    if not model.pure_jump:
        pairs[(0, ((WIENER, 0),))] = model.sigma0
    return IntegralExpression(pairs)


@lru_cache(maxsize=64)
def _expansion_terms(model: ModelSpec, m: int) -> Tuple[IntegralExpression, ...]:
    if m == 1:
        return (first_term(model),)
    lower = list(_expansion_terms(model, m - 1))
    mu = coefficient_process(model, m - 1, DRIFT, lower)
    x_m = integrate(mu, TIME)
    if not model.pure_jump:
        sig = coefficient_process(model, m - 1, DIFFUSION, lower)
        x_m = x_m + integrate(sig, WIENER)
    return tuple(lower) + (x_m,)


def expansion_term(model: ModelSpec, m: int) -> IntegralExpression:
    """X_m as a linear combination of iterated integrals (memoized per model)."""
    if m < 1:
        raise ValueError("expansion terms are indexed from 1 (X_0 is the constant x0)")
    if m > MAX_ORDER + 1:
        raise ValueError(f"expansion terms beyond X_{MAX_ORDER + 1} are not supported")
    return _expansion_terms(model, m)[m - 1]


def expansion_terms(model: ModelSpec, m_max: int) -> List[IntegralExpression]:
    return [expansion_term(model, m) for m in range(1, m_max + 1)]
