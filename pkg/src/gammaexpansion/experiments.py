"""Grids, expansion evaluation and the max-relative-error table against the Fourier benchmark."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Sequence

import numpy as np

from .benchmark.inversion import fourier_benchmark, scale_estimate
from .benchmark.models import BuiltinModel
from .density import DensityResult, OmegaEvaluator, density
from .expansion import ModelSpec

# region D keeps points where the benchmark density is at least this fraction of its peak
REGION_LEVEL = 1e-3
DEFAULT_POINTS = 801


class EmptyRegionError(ValueError):
    pass


def support_edge(spec: ModelSpec, delta: float) -> float:
    """Left end of the expansion's support, x0 + mu(x0) delta (pure-jump models)."""
    return spec.x0 + spec.mu0 * delta


def default_grid(model: BuiltinModel, delta: float, n: int = DEFAULT_POINTS) -> np.ndarray:
    """Uniform grid over [mean - 8 sd, mean + 12 sd], started at the support edge for pure-jump models."""
    mean = model.mean(delta)
    sd = scale_estimate(model, delta)
    lo, hi = mean - 8 * sd, mean + 12 * sd
    if model.pure_jump:
        lo = max(lo, support_edge(model.to_model_spec(), delta))
    return np.linspace(lo, hi, n)


def expansion_density(spec: ModelSpec, delta: float, order: int, x) -> DensityResult:
    return density(OmegaEvaluator(spec, delta, order), x)


@dataclass
class ErrorTable:
    delta: float
    orders: List[int]
    errors: Dict[int, float]
    region_size: int
    x: np.ndarray
    fourier: np.ndarray
    result: DensityResult
    bench_meta: dict = field(default_factory=dict)


def region_mask(
    p_ref: np.ndarray, flags: np.ndarray | None = None, level: float = REGION_LEVEL, peak: float | None = None
) -> np.ndarray:
    """Points with p_ref >= level * peak; peak defaults to the grid maximum."""
    ok = np.isfinite(p_ref)
    if flags is not None:
        ok &= ~flags
    if not np.any(ok):
        raise EmptyRegionError("no usable benchmark values on the grid")
    if peak is None:
        peak = np.max(p_ref[ok])
    mask = ok & (p_ref >= level * peak) & (p_ref > 0)
    if not np.any(mask):
        raise EmptyRegionError("region D is empty on this grid")
    return mask


def max_relative_errors(model: BuiltinModel, delta: float, orders: Sequence[int], x=None) -> ErrorTable:
    """max over D of |p^(M) - p_fourier| / p_fourier for each requested M.

    The threshold for D is relative to the density's peak on the default grid, so a
    user grid that misses the bulk gives an empty region rather than a tail-only one.
    """
    orders = sorted(set(int(m) for m in orders))
    peak = None
    if x is not None:
        x = np.asarray(x, dtype=float)
        peak = float(np.max(fourier_benchmark(model, delta, default_grid(model, delta)).values))
    else:
        x = default_grid(model, delta)
    res = expansion_density(model.to_model_spec(), delta, max(orders), x)
    bench = fourier_benchmark(model, delta, x)
    mask = region_mask(bench.values, res.flags, peak=peak)
    errors = {}
    for m in orders:
        p = res.density(m)
        errors[m] = float(np.max(np.abs(p[mask] - bench.values[mask]) / bench.values[mask]))
    return ErrorTable(float(delta), orders, errors, int(mask.sum()), x, bench.values, res, bench.meta())
