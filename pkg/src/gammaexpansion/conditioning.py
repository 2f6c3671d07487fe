"""Conditional expectations of products of expansion terms given W(delta) and L(delta).

The pipeline is: expand the product into iterated integrals, replace the Brownian
motion by a Brownian bridge pinned at W(delta) = z1 sqrt(delta), absorb the B(delta)
factors into the integrals, discard the martingale pieces, and finally integrate the
gamma-bridge moments over the time simplex.  The result is an exact bivariate
polynomial K(z1, z2).
"""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Dict, Iterable, List, Sequence, Tuple

from .expansion import ModelSpec, expansion_term
from .ito_algebra import TIME, WIENER, Index, IntegralExpression, multiply
from .polynomials import BivariatePolynomial, SimplexPolynomial

BRIDGE = 1  # dB level inside a bridge term index
MAX_ELL = 4


@dataclass(frozen=True)
class BridgeTerm:
    coeff: float
    z1_power: int
    b_delta_power: int
    pending_l_power: int
    index: Index  # integrators: 0 = ds, 1 = dB

    def n_bridge_levels(self) -> int:
        return sum(1 for i, _ in self.index if i == BRIDGE)


def bridge_expand(e: IntegralExpression, delta: float) -> List[BridgeTerm]:
    """Rewrite each dW level as dB - B(delta)/delta ds + z1/sqrt(delta) ds."""
    if not delta > 0:
        raise ValueError("delta must be positive")
    inv_d = 1.0 / delta
    inv_sqrt = 1.0 / math.sqrt(delta)
    out = []
    for (p, idx), c in e.items():
        options = []
        for i, n in idx:
            if i == WIENER:
                options.append(
                    (
                        ((BRIDGE, n), 1.0, 0, 0),
                        ((TIME, n), -inv_d, 0, 1),
                        ((TIME, n), inv_sqrt, 1, 0),
                    )
                )
            else:
                options.append((((TIME, n), 1.0, 0, 0),))
        for choice in product(*options):
            coeff = c
            k1 = kb = 0
            levels = []
            for level, f, dz, db in choice:
                coeff *= f
                k1 += dz
                kb += db
                levels.append(level)
            out.append(BridgeTerm(coeff, k1, kb, p, tuple(levels)))
    return out


def _times_b_delta(index: Index) -> List[Index]:
    # one application of B(delta) * J = sum of insertions + bracket flips
    out = [index[:pos] + ((BRIDGE, 0),) + index[pos:] for pos in range(len(index) + 1)]
    for pos, (i, n) in enumerate(index):
        if i == BRIDGE:
            out.append(index[:pos] + ((TIME, n),) + index[pos + 1 :])
    return out


@lru_cache(maxsize=None)
def _reduce_full(k: int, index: Index) -> Tuple[Tuple[Index, int], ...]:
    if k == 0:
        return ((index, 1),)
    acc: Dict[Index, int] = defaultdict(int)
    for nxt in _times_b_delta(index):
        for idx, c in _reduce_full(k - 1, nxt):
            acc[idx] += c
    return tuple(acc.items())


def eliminate_b_factor(t: BridgeTerm) -> List[BridgeTerm]:
    """Absorb every B(delta) factor of ``t`` into its J-integral (all resulting terms)."""
    if t.b_delta_power == 0:
        return [t]
    return [
        BridgeTerm(t.coeff * c, t.z1_power, 0, t.pending_l_power, idx)
        for idx, c in _reduce_full(t.b_delta_power, t.index)
    ]


def drop_martingale(terms: Iterable[BridgeTerm]) -> List[BridgeTerm]:
    """Keep only pure-time terms; any dB level has zero conditional mean."""
    out = []
    for t in terms:
        if t.b_delta_power:
            raise ValueError("B(delta) factors must be eliminated first")
        if t.n_bridge_levels() == 0:
            out.append(t)
    return out


@lru_cache(maxsize=None)
def _reduce_surviving(k: int, index: Index) -> Tuple[Tuple[Index, int], ...]:
    # same as _reduce_full followed by drop_martingale, pruned early: each factor
    # adds or removes exactly one dB level, so we need k >= d and k - d even
    d = sum(1 for i, _ in index if i == BRIDGE)
    if d > k or (k - d) % 2:
        return ()
    if k == 0:
        return ((index, 1),)
    acc: Dict[Index, int] = defaultdict(int)
    for nxt in _times_b_delta(index):
        for idx, c in _reduce_surviving(k - 1, nxt):
            acc[idx] += c
    return tuple((i, c) for i, c in acc.items() if c)


def gamma_condition(index: Index, gamma_a: float, delta: float) -> Tuple[SimplexPolynomial, int]:
    """E[prod L(s_k)^{n_k} | L(delta)] / L(delta)^{m_h} as a polynomial in the s_k."""
    if any(i != TIME for i, _ in index):
        raise ValueError("gamma conditioning applies to pure-time indices only")
    h = len(index)
    poly = SimplexPolynomial.constant(h, 1.0)
    m = 0
    for k, (_, n) in enumerate(index):
        for r in range(m, m + n):
            poly = poly.times_linear(k, gamma_a, float(r))
        m += n
    denom = math.prod(gamma_a * delta + r for r in range(m))
    return poly.scale(1.0 / denom), m


def simplex_integrate(p: SimplexPolynomial, h: int, delta: float) -> float:
    """Integral of p over 0 < s_1 < ... < s_h < delta, exact for monomials."""
    if p.h != h:
        raise ValueError("polynomial dimension does not match h")
    if h == 0:
        return p()
    vals = []
    for exps, c in p.coeffs.items():
        denom = 1.0
        total = 0
        for k, e in enumerate(exps):
            total += e + 1
            denom *= total
        vals.append(c * delta**total / denom)
    return math.fsum(vals)


@lru_cache(maxsize=None)
def _time_expectation(index: Index, gamma_a: float, delta: float) -> Tuple[float, int]:
    poly, m = gamma_condition(index, gamma_a, delta)
    return simplex_integrate(poly, len(index), delta), m


@lru_cache(maxsize=None)
def _conditional_integral(index: Index, gamma_a: float, delta: float) -> BivariatePolynomial:
    # E[I_index(delta) | W(delta) = z1 sqrt(delta), L(delta) = z2]
    e = IntegralExpression.integral(index)
    pairs = []
    for t in bridge_expand(e, delta):
        for idx, c in _reduce_surviving(t.b_delta_power, t.index):
            val, m = _time_expectation(idx, gamma_a, delta)
            pairs.append(((t.z1_power, m), t.coeff * c * val))
    return BivariatePolynomial.from_pairs(pairs)


def conditional_expectation(e: IntegralExpression, gamma_a: float, delta: float) -> BivariatePolynomial:
    """E[e(delta) | W(delta) = z1 sqrt(delta), L(delta) = z2] as a polynomial."""
    pairs = []
    for (p, idx), c in e.items():
        for (k1, k2), v in _conditional_integral(idx, float(gamma_a), float(delta)).coeffs.items():
            pairs.append(((k1, k2 + p), c * v))
    return BivariatePolynomial.from_pairs(pairs)


def product_expression(model: ModelSpec, j: Sequence[int]) -> IntegralExpression:
    out = expansion_term(model, j[0] + 1)
    for ji in j[1:]:
        out = multiply(out, expansion_term(model, ji + 1))
    return out


def compute_K(ell: int, j: Sequence[int], model: ModelSpec, delta: float) -> BivariatePolynomial:
    """K_(ell, j)(z1, z2) = E[prod X_{j_i + 1}(delta) | W(delta) = z1 sqrt(delta), L(delta) = z2]."""
    j = tuple(int(v) for v in j)
    if ell != len(j):
        raise ValueError(f"ell={ell} but j has length {len(j)}")
    if ell < 1 or any(v < 1 for v in j):
        raise ValueError("ell and all j_i must be >= 1")
    if ell > MAX_ELL:
        raise ValueError(f"ell > {MAX_ELL} is not supported")
    return conditional_expectation(product_expression(model, j), model.gamma_a, delta)


def d1_operator(p: BivariatePolynomial, ell: int) -> BivariatePolynomial:
    """Apply u -> du/dz1 - z1 u, ell times."""
    if ell < 1:
        raise ValueError("ell must be >= 1")
    out = p
    for _ in range(ell):
        out = out.d_z1() - out.times_z1()
    return out
