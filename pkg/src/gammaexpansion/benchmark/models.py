"""The three mean-reverting gamma-driven models used as benchmarks."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Dict

from ..expansion import MAX_ORDER, ModelError, ModelSpec

PURE_JUMP_OU = "pure-jump-ou"
CONSTANT_DIFFUSION = "constant-diffusion"
SQRT_DIFFUSION = "sqrt-diffusion"
MODEL_IDS = (PURE_JUMP_OU, CONSTANT_DIFFUSION, SQRT_DIFFUSION)

# short aliases accepted on the command line
ALIASES = {"1": PURE_JUMP_OU, "2": CONSTANT_DIFFUSION, "3": SQRT_DIFFUSION}


@dataclass(frozen=True)
class BuiltinModel:
    """dX = kappa (theta - X) dt + sigma(X) dW + dL with L a Gamma(a t, b) process."""

    id: str
    kappa: float = 0.6
    theta: float = 0.02
    sigma: float = 0.3
    a: float = 100.0
    b: float = 10.0
    x0: float = 0.3

    def __post_init__(self):
        if self.id not in MODEL_IDS:
            raise ModelError(f"unknown model id {self.id!r}; choose from {', '.join(MODEL_IDS)}")
        for name in ("kappa", "a", "b"):
            if not getattr(self, name) > 0:
                raise ModelError(f"{name} must be > 0")
        if self.id != PURE_JUMP_OU and not self.sigma > 0:
            raise ModelError("sigma must be > 0")
        if self.id == SQRT_DIFFUSION and not self.x0 > 0:
            raise ModelError("sqrt-diffusion requires x0 > 0")

    @property
    def pure_jump(self) -> bool:
        return self.id == PURE_JUMP_OU

    @property
    def eta(self) -> float:
        return self.kappa * (self.theta - self.x0)

    def drift(self, x):
        return self.kappa * (self.theta - x)

    def diffusion(self, x):
        if self.id == PURE_JUMP_OU:
            return 0.0 * x
        if self.id == CONSTANT_DIFFUSION:
            return self.sigma + 0.0 * x
        import numpy as np

        return self.sigma * np.sqrt(np.maximum(x, 0.0))

    def diffusion_derivs(self, n: int = MAX_ORDER + 1):
        if self.id == PURE_JUMP_OU:
            return (0.0,) * (n + 1)
        if self.id == CONSTANT_DIFFUSION:
            return (self.sigma,) + (0.0,) * n
        # d^k/dx^k sigma x^(1/2) = sigma (1/2)_k-falling x^(1/2 - k)
        out = []
        coef = 1.0
        for k in range(n + 1):
            out.append(self.sigma * coef * self.x0 ** (0.5 - k))
            coef *= 0.5 - k
        return tuple(out)

    def to_model_spec(self) -> ModelSpec:
        n = MAX_ORDER + 1
        drift = (self.kappa * (self.theta - self.x0), -self.kappa) + (0.0,) * (n - 1)
        return ModelSpec(
            x0=self.x0,
            drift_derivs=drift,
            diffusion_derivs=self.diffusion_derivs(n),
            gamma_a=self.a,
            gamma_b=self.b,
            pure_jump=self.pure_jump,
        )

    def mean(self, t: float) -> float:
        """E X(t), from m' = kappa (theta - m) + a/b."""
        level = self.theta + self.a / (self.b * self.kappa)
        return level + math.exp(-self.kappa * t) * (self.x0 - level)

    def with_params(self, **kw) -> "BuiltinModel":
        return replace(self, **kw)

    def params(self) -> Dict[str, float]:
        out = {"kappa": self.kappa, "theta": self.theta, "a": self.a, "b": self.b, "x0": self.x0}
        if not self.pure_jump:
            out["sigma"] = self.sigma
        return out


def builtin(model_id: str, **params) -> BuiltinModel:
    model_id = ALIASES.get(str(model_id), model_id)
    return BuiltinModel(model_id, **params)
