"""Monte Carlo oracles: Euler paths, gamma-bridge sampling and shared-noise expansions."""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence

import numpy as np

from ..expansion import ModelSpec, expansion_term
from ..ito_algebra import PathEvaluator
from .models import SQRT_DIFFUSION, BuiltinModel

DEFAULT_STEPS = 200
# paths are generated in fixed blocks; block k always draws from substream (seed, k),
# so results do not depend on how the blocks are scheduled
BLOCK = 1024


def block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=(int(block),)))


@dataclass
class Noise:
    """Brownian and gamma increments on a uniform grid, shape (paths, steps)."""

    dt: float
    dW: np.ndarray
    dL: np.ndarray

    @property
    def L(self) -> np.ndarray:
        out = np.zeros((self.dL.shape[0], self.dL.shape[1] + 1))
        np.cumsum(self.dL, axis=1, out=out[:, 1:])
        return out


def _block_noise(seed: int, blk: int, n_steps: int, dt: float, a: float, b: float):
    rng = block_rng(seed, blk)
    # always draw a full block so the first paths do not depend on n_paths
    w = rng.standard_normal((BLOCK, n_steps)) * np.sqrt(dt)
    g = rng.gamma(a * dt, 1.0 / b, size=(BLOCK, n_steps))
    return w, g


def _check(n_paths: int, n_steps: int, delta: float):
    if n_steps < 1 or n_paths < 1:
        raise ValueError("n_steps and n_paths must be >= 1")
    if not delta > 0:
        raise ValueError("delta must be positive")


def simulate_noise(n_paths: int, n_steps: int, delta: float, a: float, b: float, seed: int) -> Noise:
    _check(n_paths, n_steps, delta)
    dt = delta / n_steps
    dW = np.empty((n_paths, n_steps))
    dL = np.empty((n_paths, n_steps))
    for blk, start in enumerate(range(0, n_paths, BLOCK)):
        stop = min(start + BLOCK, n_paths)
        w, g = _block_noise(seed, blk, n_steps, dt, a, b)
        dW[start:stop] = w[: stop - start]
        dL[start:stop] = g[: stop - start]
    return Noise(dt, dW, dL)


def euler_paths(model: BuiltinModel, noise: Noise, eps: float = 1.0, x_start: Optional[float] = None) -> np.ndarray:
    """Terminal values of X(eps) with dX = eps [mu(X) dt + sigma(X) dW + dL], Euler scheme.

    The square-root model uses full truncation, sigma sqrt(max(X, 0)).
    """
    x = np.full(noise.dW.shape[0], model.x0 if x_start is None else x_start, dtype=float)
    sqrt_model = model.id == SQRT_DIFFUSION
    pure = model.pure_jump
    for k in range(noise.dW.shape[1]):
        step = model.drift(x) * noise.dt + noise.dL[:, k]
        if not pure:
            sig = model.sigma * np.sqrt(np.maximum(x, 0.0)) if sqrt_model else model.sigma
            step = step + sig * noise.dW[:, k]
        x = x + eps * step
    return x


def simulate_paths(
    model: BuiltinModel, delta: float, n_steps: int = DEFAULT_STEPS, n_paths: int = 10_000, seed: int = 0
) -> np.ndarray:
    """Samples of X(delta) given X(0) = x0 by Euler-Maruyama with exact gamma increments."""
    _check(n_paths, n_steps, delta)
    dt = delta / n_steps
    out = np.empty(n_paths)
    # same substreams as simulate_noise, but one block in memory at a time
    for blk, start in enumerate(range(0, n_paths, BLOCK)):
        stop = min(start + BLOCK, n_paths)
        w, g = _block_noise(seed, blk, n_steps, dt, model.a, model.b)
        out[start:stop] = euler_paths(model, Noise(dt, w[: stop - start], g[: stop - start]))
    return out


def expansion_paths(spec: ModelSpec, noise: Noise, m_max: int) -> List[np.ndarray]:
    """Pathwise X_1(delta) .. X_m_max(delta) by left-point sums on the same noise."""
    ev = PathEvaluator(noise.dt, noise.dW, noise.L)
    return [ev.terminal(expansion_term(spec, m)) for m in range(1, m_max + 1)]


def truncation_residuals(model: BuiltinModel, noise: Noise, eps_values: Sequence[float], order: int) -> np.ndarray:
    """|X(eps) - x0 - sum_{m <= order} eps^m X_m| per path, shape (len(eps_values), paths)."""
    terms = expansion_paths(model.to_model_spec(), noise, order)
    out = []
    for eps in eps_values:
        approx = model.x0 + sum(eps**m * t for m, t in enumerate(terms, start=1))
        out.append(np.abs(euler_paths(model, noise, eps) - approx))
    return np.array(out)


def loglog_slope(eps_values: Sequence[float], residuals: np.ndarray) -> float:
    """Least-squares slope of log residual against log eps."""
    return float(np.polyfit(np.log(eps_values), np.log(residuals), 1)[0])


def gamma_bridge_sample(
    rng: np.random.Generator, a: float, delta: float, z2: float, times: Sequence[float], n: int
) -> np.ndarray:
    """Samples of (L(s_1), ..., L(s_h)) given L(delta) = z2, for 0 < s_1 < ... < s_h < delta.

    Walks backwards: L(s_k) = L(s_{k+1}) * Beta(a s_k, a (s_{k+1} - s_k)).
    """
    t = np.asarray(times, dtype=float)
    if t.ndim != 1 or np.any(np.diff(t) <= 0) or t[0] <= 0 or t[-1] >= delta:
        raise ValueError("times must be strictly increasing inside (0, delta)")
    out = np.empty((n, t.size))
    upper = np.full(n, float(z2))
    nxt = delta
    for k in range(t.size - 1, -1, -1):
        upper = upper * rng.beta(a * t[k], a * (nxt - t[k]), size=n)
        out[:, k] = upper
        nxt = t[k]
    return out
