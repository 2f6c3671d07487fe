"""Small exact-structure polynomial containers with float coefficients."""

from __future__ import annotations

import math
from collections import defaultdict
from typing import Dict, Iterable, Tuple

import numpy as np


class BivariatePolynomial:
    """Polynomial in (z1, z2) stored as {(n1, n2): coefficient}."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Dict[Tuple[int, int], float] | None = None):
        self.coeffs = {k: float(v) for k, v in (coeffs or {}).items() if v != 0.0}

    @classmethod
    def from_pairs(cls, pairs: Iterable[Tuple[Tuple[int, int], float]]) -> "BivariatePolynomial":
        buckets = defaultdict(list)
        for k, v in pairs:
            buckets[k].append(v)
        return cls({k: math.fsum(v) for k, v in buckets.items()})

    @classmethod
    def constant(cls, c: float) -> "BivariatePolynomial":
        return cls({(0, 0): c})

    def __add__(self, other: "BivariatePolynomial") -> "BivariatePolynomial":
        return BivariatePolynomial.from_pairs(list(self.coeffs.items()) + list(other.coeffs.items()))

    def __sub__(self, other):
        return self + other.scale(-1.0)

    def scale(self, c: float) -> "BivariatePolynomial":
        return BivariatePolynomial({k: c * v for k, v in self.coeffs.items()})

    def __mul__(self, other):
        if not isinstance(other, BivariatePolynomial):
            return self.scale(float(other))
        pairs = []
        for (a1, a2), ca in self.coeffs.items():
            for (b1, b2), cb in other.coeffs.items():
                pairs.append(((a1 + b1, a2 + b2), ca * cb))
        return BivariatePolynomial.from_pairs(pairs)

    __rmul__ = __mul__

    def d_z1(self) -> "BivariatePolynomial":
        return BivariatePolynomial({(n1 - 1, n2): n1 * c for (n1, n2), c in self.coeffs.items() if n1 > 0})

    def times_z1(self) -> "BivariatePolynomial":
        return BivariatePolynomial({(n1 + 1, n2): c for (n1, n2), c in self.coeffs.items()})

    def degree_z1(self) -> int:
        return max((n1 for n1, _ in self.coeffs), default=-1)

    def degree_z2(self) -> int:
        return max((n2 for _, n2 in self.coeffs), default=-1)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __call__(self, z1, z2):
        z1 = np.asarray(z1, dtype=float)
        z2 = np.asarray(z2, dtype=float)
        out = np.zeros(np.broadcast(z1, z2).shape)
        for (n1, n2), c in self.coeffs.items():
            out = out + c * z1**n1 * z2**n2
        return out

    def scalar_function(self):
        """A plain-float evaluator, much cheaper than __call__ inside scalar quadrature loops."""
        items = [(n1, n2, float(c)) for (n1, n2), c in self.coeffs.items()]
        return lambda z1, z2: sum(c * z1**n1 * z2**n2 for n1, n2, c in items)

    def univariate_z2(self) -> np.ndarray:
        """Ascending coefficients in z2; requires no z1 dependence."""
        if self.degree_z1() > 0:
            raise ValueError("polynomial depends on z1")
        deg = max(self.degree_z2(), 0)
        out = np.zeros(deg + 1)
        for (_, n2), c in self.coeffs.items():
            out[n2] += c
        return out

    def isclose(self, other: "BivariatePolynomial", rtol=1e-12, atol=1e-14) -> bool:
        keys = set(self.coeffs) | set(other.coeffs)
        return all(
            math.isclose(self.coeffs.get(k, 0.0), other.coeffs.get(k, 0.0), rel_tol=rtol, abs_tol=atol)
            for k in keys
        )

    def __repr__(self):
        items = sorted(self.coeffs.items())
        return "BivariatePolynomial(" + ", ".join(f"{c:+.6g} z1^{a} z2^{b}" for (a, b), c in items) + ")"


class SimplexPolynomial:
    """Polynomial in ordered time variables s_1 < ... < s_h: {exponent tuple: coeff}."""

    __slots__ = ("h", "coeffs")

    def __init__(self, h: int, coeffs: Dict[Tuple[int, ...], float] | None = None):
        self.h = h
        self.coeffs = {}
        for k, v in (coeffs or {}).items():
            if len(k) != h:
                raise ValueError(f"exponent tuple {k} does not have length {h}")
            if v != 0.0:
                self.coeffs[tuple(k)] = float(v)

    @classmethod
    def constant(cls, h: int, c: float = 1.0) -> "SimplexPolynomial":
        return cls(h, {(0,) * h: c})

    def times_linear(self, var: int, slope: float, offset: float) -> "SimplexPolynomial":
        """Multiply by (slope * s_var + offset), var counted from 0."""
        acc = defaultdict(float)
        for exps, c in self.coeffs.items():
            if slope != 0.0:
                up = list(exps)
                up[var] += 1
                acc[tuple(up)] += c * slope
            if offset != 0.0:
                acc[exps] += c * offset
        return SimplexPolynomial(self.h, acc)

    def scale(self, c: float) -> "SimplexPolynomial":
        return SimplexPolynomial(self.h, {k: c * v for k, v in self.coeffs.items()})

    def __call__(self, *s) -> float:
        return math.fsum(c * math.prod(si**e for si, e in zip(s, exps)) for exps, c in self.coeffs.items())
