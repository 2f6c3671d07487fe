"""Algebra of iterated Ito integrals with gamma-process integrand powers.

An iterated integral is identified by a tuple of levels ``((i1, n1), ..., (ih, nh))``
ordered from the innermost to the outermost integration.  ``i`` is the integrator
(``TIME = 0`` for ds, ``WIENER = 1`` for dW) and ``n`` is the power of L(s) that
multiplies the integrand at that level.  The empty tuple is the constant 1.

A term additionally carries a *pending* L-power ``p``: a factor L(t)^p evaluated at
the current time of the term, not yet absorbed into an integration level.  This is
how the standalone L(t) of the first expansion term is represented.
"""

from __future__ import annotations

import math
from collections import defaultdict
from functools import lru_cache
from typing import Dict, Iterable, Iterator, Tuple

import numpy as np

TIME = 0
WIENER = 1

Level = Tuple[int, int]
Index = Tuple[Level, ...]
TermKey = Tuple[int, Index]  # (pending L-power, index)


def make_index(integrators: Iterable[int], powers: Iterable[int]) -> Index:
    """Build an index from the two parallel sequences used in the literature."""
    integrators = tuple(integrators)
    powers = tuple(powers)
    if len(integrators) != len(powers):
        raise ValueError("integrator and power sequences differ in length")
    for i, n in zip(integrators, powers):
        if i not in (TIME, WIENER):
            raise ValueError(f"integrator tag must be 0 or 1, got {i}")
        if n < 0:
            raise ValueError(f"L-power must be nonnegative, got {n}")
    return tuple(zip(integrators, powers))


def _sort_key(key: TermKey):
    pending, index = key
    return (len(index), index, pending)


class IntegralExpression:
    """Immutable linear combination of (pending power, iterated integral) terms."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Dict[TermKey, float] | None = None):
        items = {}
        for key, c in (terms or {}).items():
            if c != 0.0:
                if not math.isfinite(c):
                    raise ValueError(f"non-finite coefficient for term {key}")
                items[key] = float(c)
        self._terms = dict(sorted(items.items(), key=lambda kv: _sort_key(kv[0])))
        self._hash = None

    @classmethod
    def from_pairs(cls, pairs: Iterable[Tuple[TermKey, float]]) -> "IntegralExpression":
        """Merge possibly repeated keys with compensated summation."""
        buckets: Dict[TermKey, list] = defaultdict(list)
        for key, c in pairs:
            buckets[key].append(c)
        return cls({k: math.fsum(v) for k, v in buckets.items()})

    @classmethod
    def constant(cls, c: float) -> "IntegralExpression":
        return cls({(0, ()): c})

    @classmethod
    def integral(cls, index: Index, coeff: float = 1.0, pending: int = 0) -> "IntegralExpression":
        return cls({(pending, tuple(index)): coeff})

    @classmethod
    def pending_power(cls, p: int, coeff: float = 1.0) -> "IntegralExpression":
        return cls({(p, ()): coeff})

    @property
    def terms(self) -> Dict[TermKey, float]:
        return dict(self._terms)

    def items(self) -> Iterator[Tuple[TermKey, float]]:
        return iter(self._terms.items())

    def __len__(self):
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __eq__(self, other):
        if not isinstance(other, IntegralExpression):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(tuple(self._terms.items()))
        return self._hash

    def isclose(self, other: "IntegralExpression", rtol=1e-12, atol=1e-14) -> bool:
        keys = set(self._terms) | set(other._terms)
        return all(
            math.isclose(self._terms.get(k, 0.0), other._terms.get(k, 0.0), rel_tol=rtol, abs_tol=atol)
            for k in keys
        )

    def __add__(self, other: "IntegralExpression") -> "IntegralExpression":
        return IntegralExpression.from_pairs(list(self.items()) + list(other.items()))

    def __sub__(self, other: "IntegralExpression") -> "IntegralExpression":
        return self + other.scale(-1.0)

    def __neg__(self):
        return self.scale(-1.0)

    def scale(self, c: float) -> "IntegralExpression":
        return IntegralExpression({k: c * v for k, v in self.items()})

    def __mul__(self, other):
        if isinstance(other, IntegralExpression):
            return multiply(self, other)
        return self.scale(float(other))

    __rmul__ = __mul__

    def max_levels(self) -> int:
        return max((len(idx) for (_, idx) in self._terms), default=0)

    def __repr__(self):
        if not self._terms:
            return "IntegralExpression(0)"
        parts = []
        for (p, idx), c in self.items():
            i = tuple(l[0] for l in idx)
            n = tuple(l[1] for l in idx)
            tag = f"I{i},{n}" if idx else "1"
            if p:
                tag = f"L^{p}*" + tag
            parts.append(f"{c:+.6g}*{tag}")
        return "IntegralExpression(" + " ".join(parts) + ")"


@lru_cache(maxsize=None)
def _index_product(a: Index, b: Index) -> Tuple[Tuple[Index, float], ...]:
    # Recursive Ito product of two iterated integrals evaluated at the same time.
    if not a:
        return ((b, 1.0),)
    if not b:
        return ((a, 1.0),)
    if b < a:
        return _index_product(b, a)
    a_head, (ia, na) = a[:-1], a[-1]
    b_head, (ib, nb) = b[:-1], b[-1]
    acc: Dict[Index, float] = defaultdict(float)
    for idx, c in _index_product(a, b_head):
        acc[idx + ((ib, nb),)] += c
    for idx, c in _index_product(a_head, b):
        acc[idx + ((ia, na),)] += c
    if ia == WIENER and ib == WIENER:
        for idx, c in _index_product(a_head, b_head):
            acc[idx + ((TIME, na + nb),)] += c
    return tuple((k, v) for k, v in acc.items() if v != 0.0)


def multiply(e1: IntegralExpression, e2: IntegralExpression) -> IntegralExpression:
    """Exact product of two expressions as a linear combination of iterated integrals."""
    pairs = []
    for (p1, a), c1 in e1.items():
        for (p2, b), c2 in e2.items():
            for idx, c in _index_product(a, b):
                pairs.append(((p1 + p2, idx), c1 * c2 * c))
    return IntegralExpression.from_pairs(pairs)


def integrate(e: IntegralExpression, integrator: int) -> IntegralExpression:
    """Integrate a running-time process once more, against ds (0) or dW (1).

    The pending L-power of each term becomes the L-exponent of the new outer level.
    """
    if integrator not in (TIME, WIENER):
        raise ValueError(f"integrator tag must be 0 or 1, got {integrator}")
    return IntegralExpression.from_pairs(
        ((0, idx + ((integrator, p),)), c) for (p, idx), c in e.items()
    )


def power(e: IntegralExpression, k: int) -> IntegralExpression:
    out = IntegralExpression.constant(1.0)
    for _ in range(k):
        out = multiply(out, e)
    return out


class PathEvaluator:
    """Evaluate iterated integrals pathwise by left-point Euler sums.

    ``dW`` has shape (paths, steps); ``L`` has shape (paths, steps + 1) and holds
    the gamma process on the grid including time 0.
    """

    def __init__(self, dt: float, dW: np.ndarray, L: np.ndarray):
        self.dt = float(dt)
        self.dW = np.asarray(dW, dtype=float)
        self.L = np.asarray(L, dtype=float)
        if self.L.shape[1] != self.dW.shape[1] + 1:
            raise ValueError("L must have one more column than dW")
        self._cache: Dict[Index, np.ndarray] = {}

    def running(self, index: Index) -> np.ndarray:
        """Values of the integral at every grid time, shape (paths, steps + 1)."""
        if index in self._cache:
            return self._cache[index]
        paths, steps = self.dW.shape
        if not index:
            val = np.ones((paths, steps + 1))
        else:
            inner = self.running(index[:-1])
            i, n = index[-1]
            incr = self.dW if i == WIENER else self.dt
            integrand = inner[:, :-1] * self.L[:, :-1] ** n * incr
            val = np.zeros((paths, steps + 1))
            np.cumsum(integrand, axis=1, out=val[:, 1:])
        self._cache[index] = val
        return val

    def terminal(self, e: IntegralExpression) -> np.ndarray:
        total = np.zeros(self.dW.shape[0])
        for (p, idx), c in e.items():
            total += c * self.L[:, -1] ** p * self.running(idx)[:, -1]
        return total
