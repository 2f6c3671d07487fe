"""Validation checks shared by the ``validate`` command and the test suite.

Every check returns a :class:`Check`; statistical checks take a Monte Carlo budget and
report the standard error they achieved, so a reduced budget shows up as a wider band.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Callable, Dict, Iterable, List, Sequence

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import integrate, stats
from scipy.special import roots_jacobi

from .benchmark.charfn import char_function, gamma_char_function, gaussian_char_function
from .benchmark.closed_forms import PUBLISHED_ORDERS, closed_form_omega_array
from .benchmark.inversion import (
    DEFAULT_M,
    InversionConfig,
    choose_terms,
    euler_inversion,
    fourier_benchmark,
    gamma_tail_reach,
    pure_jump_shift,
    scale_estimate,
)
from .benchmark.models import CONSTANT_DIFFUSION, PURE_JUMP_OU, SQRT_DIFFUSION, BuiltinModel, builtin
from .benchmark.simulate import (
    BLOCK,
    Noise,
    gamma_bridge_sample,
    loglog_slope,
    simulate_noise,
    simulate_paths,
    truncation_residuals,
)
from .conditioning import compute_K, gamma_condition, product_expression, simplex_integrate
from .density import OmegaEvaluator, _analytic_base, moment_quadrature
from .expansion import expansion_term
from .ito_algebra import TIME, PathEvaluator, multiply

SIGMA_BAND = 3.0
PAPER_DELTAS = (Fraction(1, 12), Fraction(1, 52), Fraction(1, 252))
DEFAULT_MC_PATHS = 100_000


@dataclass
class Check:
    name: str
    passed: bool
    measured: float
    tolerance: float
    details: Dict[str, object] = field(default_factory=dict)

    def as_dict(self) -> dict:
        d = asdict(self)
        d["status"] = "pass" if self.passed else "fail"
        del d["passed"]
        return d


def _z_score(diff: np.ndarray, target: float = 0.0) -> tuple:
    """Mean, standard error and |z| of a sample against a target value.

    A sample that is constant up to rounding (a deterministic moment) is compared exactly,
    to relative 1e-12, instead of through a meaningless z-score.
    """
    mean = float(np.mean(diff))
    se = float(np.std(diff, ddof=1) / math.sqrt(diff.size))
    off = abs(mean - target)
    ref = max(abs(target), abs(mean))
    if se <= 1e-13 * ref:
        return mean, se, 0.0 if off <= 1e-12 * ref else math.inf
    return mean, se, off / se


def _label(delta) -> str:
    return str(Fraction(delta).limit_denominator(10_000))


# ---------------------------------------------------------------- Monte Carlo on the algebra

def _coarsen(noise: Noise) -> Noise:
    return Noise(2 * noise.dt, noise.dW[:, 0::2] + noise.dW[:, 1::2], noise.dL[:, 0::2] + noise.dL[:, 1::2])


def _richardson_blocks(model: BuiltinModel, delta: float, n_paths: int, n_steps: int, seed: int):
    """Yield (fine noise, fine evaluator, coarse evaluator) per block of paths."""
    for blk in range(max(1, math.ceil(n_paths / BLOCK))):
        fine = simulate_noise(BLOCK, n_steps, delta, model.a, model.b, seed * 7919 + blk)
        coarse = _coarsen(fine)
        yield fine, PathEvaluator(fine.dt, fine.dW, fine.L), PathEvaluator(coarse.dt, coarse.dW, coarse.L)


def _paired_check(name: str, diffs: np.ndarray, scale: float, n_steps: int, details: dict) -> Check:
    # left-point sums carry an O(dt) bias; Richardson extrapolation leaves an O(dt^2)
    # remainder, allowed for as (dt_coarse / delta)^2 times the size of the compared quantity
    mean, se, _ = _z_score(diffs)
    allowance = scale / (n_steps / 2) ** 2
    band = SIGMA_BAND * se + allowance
    details = dict(details, mean_difference=mean, standard_error=se, discretization_allowance=allowance,
                   n_paths=int(diffs.size), scale=scale)
    return Check(name, abs(mean) <= band, abs(mean), band, details)


def check_algebra_products(model_id: str, n_paths: int = 20_480, seed: int = 11, delta=Fraction(1, 52),
                           n_steps: int = 200) -> List[Check]:
    """multiply(X_i, X_j) evaluated pathwise equals X_i * X_j, Richardson-corrected means at 3 sigma."""
    model = builtin(model_id)
    spec = model.to_model_spec()
    delta = float(delta)
    X = {m: expansion_term(spec, m) for m in (1, 2, 3)}
    pairs = [(1, 1), (1, 2), (2, 2), (1, 3)]
    prods = {p: multiply(X[p[0]], X[p[1]]) for p in pairs}
    diffs: Dict[tuple, list] = {p: [] for p in pairs}
    sizes: Dict[tuple, list] = {p: [] for p in pairs}
    for _, fine, coarse in _richardson_blocks(model, delta, n_paths, n_steps, seed):
        for p in pairs:
            vals = []
            for ev in (fine, coarse):
                direct = ev.terminal(X[p[0]]) * ev.terminal(X[p[1]])
                vals.append(ev.terminal(prods[p]) - direct)
            diffs[p].append(2 * vals[0] - vals[1])
            sizes[p].append(np.abs(fine.terminal(prods[p])))
    out = []
    for p in pairs:
        d = np.concatenate(diffs[p])
        scale = float(np.mean(np.concatenate(sizes[p])))
        out.append(_paired_check(f"algebra-product/{model.id}/X{p[0]}*X{p[1]}", d, scale, n_steps, {"delta": delta}))
    return out


TEST_FUNCTIONS: Dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "one": np.ones_like,
    "identity": lambda z: z,
    "square": lambda z: z * z,
}
CONDITIONING_INDICES = [(1,), (2,), (1, 1), (3,), (1, 2), (2, 1), (4,)]


def check_conditioning(model_id: str, n_paths: int = 20_480, seed: int = 13, delta=Fraction(1, 52),
                       n_steps: int = 200) -> List[Check]:
    """E[prod X_{j_i+1} g(z1) h(z2)] = E[K(z1, z2) g h] for ell + sum j <= 5 and g, h in {1, id, square}."""
    model = builtin(model_id)
    spec = model.to_model_spec()
    delta = float(delta)
    prods = {j: product_expression(spec, j) for j in CONDITIONING_INDICES}
    ks = {j: compute_K(len(j), j, spec, delta) for j in CONDITIONING_INDICES}
    keys = [(j, g, h) for j in CONDITIONING_INDICES for g in TEST_FUNCTIONS for h in TEST_FUNCTIONS]
    diffs: Dict[tuple, list] = {k: [] for k in keys}
    sizes: Dict[tuple, list] = {k: [] for k in keys}
    for noise, fine, coarse in _richardson_blocks(model, delta, n_paths, n_steps, seed):
        z1 = noise.dW.sum(axis=1) / math.sqrt(delta)
        z2 = noise.dL.sum(axis=1)
        for j in CONDITIONING_INDICES:
            pf, pc = fine.terminal(prods[j]), coarse.terminal(prods[j])
            path_val = 2 * pf - pc
            kval = ks[j](z1, z2)
            for g, h in itertools.product(TEST_FUNCTIONS, TEST_FUNCTIONS):
                w = TEST_FUNCTIONS[g](z1) * TEST_FUNCTIONS[h](z2)
                diffs[(j, g, h)].append((path_val - kval) * w)
                sizes[(j, g, h)].append(np.abs(pf * w))
    out = []
    for j in CONDITIONING_INDICES:
        worst = None
        for g, h in itertools.product(TEST_FUNCTIONS, TEST_FUNCTIONS):
            c = _paired_check("", np.concatenate(diffs[(j, g, h)]),
                              float(np.mean(np.concatenate(sizes[(j, g, h)]))), n_steps, {"g": g, "h": h})
            ratio = c.measured / c.tolerance if c.tolerance > 0 else (0.0 if c.measured == 0 else math.inf)
            if worst is None or ratio > worst[0]:
                worst = (ratio, c)
        c = worst[1]
        c.name = f"conditioning/{model.id}/ell={len(j)},j={list(j)}"
        c.details["delta"] = delta
        out.append(c)
    return out


SIMPLEX_RTOL = 1e-9


def _nquad_simplex(poly, h: int, delta: float) -> float:
    # variables ordered s_1 < ... < s_h < delta; nquad integrates the first argument innermost
    def bounds(k):
        return lambda *outer: (0.0, outer[0] if outer else delta)

    ranges = [bounds(k) for k in range(h)]
    val, _ = integrate.nquad(lambda *s: poly(*s), ranges, opts={"epsabs": 0.0, "epsrel": 1e-12})
    return val


def check_gamma_bridge(n_samples: int = DEFAULT_MC_PATHS, seed: int = 17, a: float = 100.0,
                       delta=Fraction(1, 52), z2: float = 0.25, max_h: int = 3, max_power: int = 2,
                       simplex: bool = True) -> List[Check]:
    """Closed-form gamma-bridge moments at fixed times against Beta-walk sampling.

    With ``simplex`` the time-ordered integral of each moment polynomial is also checked
    against adaptive cubature.
    """
    delta = float(delta)
    rng = np.random.default_rng(seed)
    out = []
    for h in range(1, max_h + 1):
        times = np.sort(rng.uniform(0, delta, h))
        for powers in itertools.product(range(max_power + 1), repeat=h):
            poly, m = gamma_condition(tuple((TIME, n) for n in powers), a, delta)
            exact = poly(*times) * z2**m
            s = gamma_bridge_sample(rng, a, delta, z2, times, n_samples)
            v = np.prod(s ** np.array(powers), axis=1)
            _, se, z = _z_score(v, exact)
            out.append(Check(f"gamma-bridge/fixed-times/h={h},n={list(powers)}", z <= SIGMA_BAND, z, SIGMA_BAND,
                             {"times": times.tolist(), "exact": exact, "standard_error": se, "n_samples": n_samples}))
            if not simplex:
                continue
            # time-ordered integral of the same polynomial: exact antiderivatives vs nquad
            exact = simplex_integrate(poly, h, delta)
            num = _nquad_simplex(poly, h, delta)
            err = abs(exact - num) / abs(num)
            out.append(Check(f"simplex-integral/h={h},n={list(powers)}", err <= SIMPLEX_RTOL, err, SIMPLEX_RTOL,
                             {"exact": exact, "nquad": num}))
    return out


# ---------------------------------------------------------------- deterministic checks

CLOSED_FORM_RTOL = 1e-10
CLOSED_FORM_DIGITS = 40


def closed_form_grid(model: BuiltinModel, delta: float, n: int = 50) -> np.ndarray:
    """y-grid over +-5 standardized units (for the pure-jump model, +-5 sd around the mean, inside the support)."""
    if not model.pure_jump:
        return np.linspace(-5, 5, n)
    sd = scale_estimate(model, delta)
    mean = model.mean(delta) - model.x0
    edge = model.eta * delta
    return np.linspace(max(mean - 5 * sd, edge + 0.01 * sd), mean + 5 * sd, n)


def check_closed_forms(model_id: str, deltas: Iterable = PAPER_DELTAS, closed_form: Callable | None = None) -> List[Check]:
    """Engine Omega_m against the transcribed published expressions, pointwise relative."""
    closed_form = closed_form or closed_form_omega_array
    model = builtin(model_id)
    spec = model.to_model_spec()
    top = PUBLISHED_ORDERS[model.id]
    out = []
    for delta in deltas:
        d = float(delta)
        ev = OmegaEvaluator(spec, d, top)
        y = closed_form_grid(model, d)
        for m in range(top + 1):
            eng = ev.omega(m, y)
            pub = closed_form(model, m, y, d, CLOSED_FORM_DIGITS)
            with np.errstate(divide="ignore", invalid="ignore"):
                rel = np.abs(eng - pub) / np.abs(pub)
            rel = np.where((eng == pub), 0.0, rel)
            worst = float(np.max(rel)) if np.all(np.isfinite(rel)) else math.inf
            k = int(np.argmax(np.where(np.isfinite(rel), rel, np.inf)))
            out.append(Check(
                f"closed-form/{model.id}/m={m}/delta={_label(delta)}", worst <= CLOSED_FORM_RTOL, worst, CLOSED_FORM_RTOL,
                {"worst_y": float(y[k]), "engine": float(eng[k]), "published": float(pub[k]),
                 "scale_relative": float(np.max(np.abs(eng - pub)) / np.max(np.abs(pub)))},
            ))
    return out


def _panels(lo: float, hi: float, n_panels: int, nodes: int = 16):
    x, w = leggauss(nodes)
    edges = np.linspace(lo, hi, n_panels + 1)
    half = np.diff(edges)[:, None] / 2
    mid = (edges[:-1] + edges[1:])[:, None] / 2
    return (mid + half * x).ravel(), (half * w).ravel()


def _edge_nodes(length: float, alpha: float, rate: float, n_panels: int = 100, nodes: int = 60):
    """Nodes and weights for int_0^length f(z) dz when f ~ z^(alpha - 1) g(z), g smooth.

    Gauss-Jacobi with weight z^(alpha - 1) on [0, 2/rate], Gauss-Legendre panels beyond.
    """
    cut = min(length, 2.0 / rate)
    x, w = roots_jacobi(nodes, 0.0, alpha - 1.0)
    z = (x + 1) * cut / 2
    # the Jacobi weight (1 + x)^(alpha - 1) is divided back out so that f itself is passed in
    wt = w * (cut / 2) ** alpha / z ** (alpha - 1)
    if length > cut:
        z2, w2 = _panels(cut, length, n_panels)
        z, wt = np.concatenate([z, z2]), np.concatenate([wt, w2])
    return z, wt


NORMALIZATION_TOL = 1e-5
MASS_TOL = 1e-6
ZERO_MASS_TOL = 1e-6


def check_normalization(model_id: str, delta=Fraction(1, 52), max_order: int = 3) -> List[Check]:
    """int p^(M) dx = 1 for M <= max_order; also reports int Omega_m for each m >= 1."""
    model = builtin(model_id)
    spec = model.to_model_spec()
    d = float(delta)
    ev = OmegaEvaluator(spec, d, max_order)
    out = []
    if model.pure_jump:
        masses, notes = [], []
        for m in range(max_order + 1):
            form = ev.laurent_form(m)
            lowest = form.exponent + (int(np.flatnonzero(form.poly)[0]) if form.poly.size else 0)
            fp = form.finite_part_integral() if form.poly.size else 0.0
            if form.poly.size and lowest <= -1:
                masses.append(math.inf)
                notes.append({"m": m, "integrable": False, "edge_exponent": lowest, "finite_part": fp})
            else:
                masses.append(fp)
                notes.append({"m": m, "integrable": True, "integral": fp})
        for M in range(max_order + 1):
            total = math.fsum(masses[: M + 1]) if all(math.isfinite(v) for v in masses[: M + 1]) else math.inf
            err = abs(total - 1.0)
            finite_part = math.fsum(n.get("finite_part", n.get("integral", 0.0)) for n in notes[: M + 1])
            out.append(Check(f"normalization/{model.id}/M={M}/delta={_label(delta)}", err <= NORMALIZATION_TOL, err,
                             NORMALIZATION_TOL, {"mass": total, "finite_part_mass": finite_part, "terms": notes[: M + 1]}))
        return out
    # diffusion: Gauss-Legendre panels in y over the Gaussian core plus the gamma right tail,
    # cut where the gamma density is below 1e-12 (the mass beyond is ~1e-13)
    s = ev.scale
    w_shift = spec.mu0 * d / s
    lo = w_shift - 14.0
    hi = w_shift + gamma_tail_reach(ev.a_delta, ev.b, 1e-12) / s + 14.0
    y, wt = _panels(lo, hi, int(math.ceil(hi - lo)))
    integrals = [float(np.dot(wt, ev.omega(m, y))) for m in range(max_order + 1)]
    for M in range(max_order + 1):
        total = math.fsum(integrals[: M + 1])
        err = abs(total - 1.0)
        out.append(Check(f"normalization/{model.id}/M={M}/delta={_label(delta)}", err <= NORMALIZATION_TOL, err,
                         NORMALIZATION_TOL, {"mass": total, "omega_integrals": integrals[: M + 1],
                                             "y_range": [lo, hi]}))
    return out


def check_benchmark_mass(model_id: str, delta=Fraction(1, 52)) -> Check:
    """The Fourier benchmark density integrates to one."""
    model = builtin(model_id)
    d = float(delta)
    sd = scale_estimate(model, d)
    reach = gamma_tail_reach(model.a * d, model.b, 1e-20)
    if model.pure_jump:
        shift = pure_jump_shift(model, d)
        length = reach + 40 * model.kappa * sd
        z, wt = _edge_nodes(length, model.a * d, model.b)
        x = shift + z
    else:
        mean = model.mean(d)
        lo = mean - 14 * sd
        hi = mean + reach + 14 * sd
        x, wt = _panels(lo, hi, 200)
    bench = fourier_benchmark(model, d, x)
    mass = float(np.dot(wt, bench.values))
    err = abs(mass - 1.0)
    return Check(f"benchmark-mass/{model.id}/delta={_label(delta)}", err <= MASS_TOL, err, MASS_TOL,
                 dict(bench.meta(), mass=mass))


DUAL_RTOL = 1e-8


def check_dual_path(model_id: str, deltas: Iterable = PAPER_DELTAS, n_points: int = 20, r_max: int = 8,
                    joint_degree: int = 4) -> List[Check]:
    """Closed-form (1F1) and quadrature moment integrals agree wherever the closed form is used."""
    model = builtin(model_id)
    spec = model.to_model_spec()
    out = []
    for delta in deltas:
        d = float(delta)
        ev = OmegaEvaluator(spec, d, 0)
        y = np.linspace(-5, 5, n_points)
        worst, skipped, compared, at = 0.0, 0, 0, None
        for r in range(r_max + 1):
            vals, bad = _analytic_base(ev, r, y)
            for i in np.flatnonzero(~bad):
                q = moment_quadrature(ev, 0, r, float(y[i]))
                rel = abs(vals[i] - q) / abs(q)
                compared += 1
                if rel > worst:
                    worst, at = rel, (0, r, float(y[i]))
            skipped += int(bad.sum())
        for n1 in range(1, joint_degree + 1):
            for n2 in range(joint_degree + 1 - n1):
                base = np.empty((n1 + n2 + 1, y.size))
                bad_any = np.zeros(y.size, dtype=bool)
                for r in range(n1 + n2 + 1):
                    base[r], bad = _analytic_base(ev, r, y)
                    bad_any |= bad
                vals = ev.moments_from_base(n1, n2, y, base)
                for i in np.flatnonzero(~bad_any):
                    q = moment_quadrature(ev, n1, n2, float(y[i]))
                    # absolute moment sets the scale when the signed moment passes through zero
                    ref = moment_quadrature(ev, n1, n2, float(y[i]), absolute=True)
                    rel = abs(vals[i] - q) / ref
                    compared += 1
                    if rel > worst:
                        worst, at = rel, (n1, n2, float(y[i]))
        out.append(Check(f"dual-path/{model.id}/delta={_label(delta)}", worst <= DUAL_RTOL, worst, DUAL_RTOL,
                         {"compared": compared, "fallback_points": skipped, "worst_at_n1_n2_y": at}))
    return out


GAUSS_ATOL = 1e-8
GAMMA_RTOL = 1e-6


def check_inversion_gaussian(mean: float = 0.3, sd: float = 0.04) -> Check:
    phi = gaussian_char_function(mean, sd)
    x = np.linspace(mean - 6 * sd, mean + 6 * sd, 121)
    h = 2 * math.pi / (12 * sd + 20 * sd)
    cfg, tail, ok = choose_terms(phi, h)
    err = float(np.max(np.abs(euler_inversion(phi, x, cfg) - stats.norm.pdf(x, mean, sd))))
    return Check("inversion/gaussian", err <= GAUSS_ATOL, err, GAUSS_ATOL,
                 {"mean": mean, "sd": sd, "euler_n": cfg.euler_n, "step_h": h, "tail_mass": tail})


def check_inversion_gamma(shape: float, rate: float = 10.0, euler_n: int = 100_000) -> Check:
    """Gamma(shape, rate) density recovered at interior points (1%..99% quantiles)."""
    phi = gamma_char_function(shape, rate)
    lo, hi = stats.gamma.ppf([0.01, 0.99], shape, scale=1 / rate)
    x = np.linspace(lo, hi, 50)
    period = (hi - lo) + 2 * gamma_tail_reach(shape, rate)
    cfg = InversionConfig(DEFAULT_M, euler_n, 2 * math.pi / period)
    exact = stats.gamma.pdf(x, shape, scale=1 / rate)
    err = float(np.max(np.abs(euler_inversion(phi, x, cfg) - exact) / exact))
    return Check(f"inversion/gamma/shape={shape:.4g}", err <= GAMMA_RTOL, err, GAMMA_RTOL,
                 {"rate": rate, "euler_n": euler_n, "step_h": cfg.step_h})


def check_simulation(model_id: str, n_paths: int = DEFAULT_MC_PATHS, seed: int = 19, delta=Fraction(1, 52),
                     omega: float = 5.0) -> Check:
    """Euler sample mean and empirical characteristic function against the exact values."""
    model = builtin(model_id)
    d = float(delta)
    x = simulate_paths(model, d, n_paths=n_paths, seed=seed)
    _, se, z_mean = _z_score(x, model.mean(d))
    e = np.exp(1j * omega * x)
    phi = char_function(model, d, omega)
    z_re = _z_score(e.real, phi.real)[2]
    z_im = _z_score(e.imag, phi.imag)[2]
    z = max(z_mean, z_re, z_im)
    return Check(f"simulation/{model.id}/delta={_label(delta)}", z <= SIGMA_BAND, z, SIGMA_BAND,
                 {"n_paths": n_paths, "mean_z": z_mean, "charfn_z": [z_re, z_im], "mean_standard_error": se})


SLOPE_EPS = (0.4, 0.2, 0.1)
SLOPE_MARGIN = 0.7


def check_order_slope(model_id: str = CONSTANT_DIFFUSION, orders: Sequence[int] = (1, 2), n_paths: int = 2000,
                      n_steps: int = 400, seed: int = 23, delta=Fraction(1, 52)) -> List[Check]:
    """log-log slope of |X(eps) - x0 - sum eps^m X_m| against eps, per path and pooled."""
    model = builtin(model_id)
    noise = simulate_noise(n_paths, n_steps, float(delta), model.a, model.b, seed)
    out = []
    for M in orders:
        res = truncation_residuals(model, noise, SLOPE_EPS, M)
        logs = np.log(res)
        x = np.log(SLOPE_EPS)
        per_path = np.polyfit(x, logs, 1)[0]
        median = float(np.median(per_path))
        pooled = loglog_slope(SLOPE_EPS, res.mean(axis=1))
        need = M + SLOPE_MARGIN
        measured = min(median, pooled)
        out.append(Check(f"order-slope/{model.id}/M={M}", measured >= need, measured, need,
                         {"per_path_median": median, "pooled": pooled, "n_paths": n_paths, "n_steps": n_steps,
                          "eps": list(SLOPE_EPS)}))
    return out


# ---------------------------------------------------------------- suite

GROUPS = ("algebra", "conditioning", "gamma-bridge", "closed-form", "normalization", "benchmark-mass",
          "dual-path", "inversion", "simulation", "order-slope")
ALL_MODELS = (PURE_JUMP_OU, CONSTANT_DIFFUSION, SQRT_DIFFUSION)


def run_suite(mc_paths: int = DEFAULT_MC_PATHS, seed: int = 0, groups: Iterable[str] = GROUPS) -> List[Check]:
    """Everything the ``validate`` command reports; ``mc_paths`` scales every Monte Carlo check."""
    groups = set(groups)
    unknown = groups - set(GROUPS)
    if unknown:
        raise ValueError(f"unknown check groups {sorted(unknown)}")
    algebra_paths = max(BLOCK, mc_paths // 5)
    checks: List[Check] = []
    for mid in ALL_MODELS:
        if "algebra" in groups:
            checks += check_algebra_products(mid, algebra_paths, seed + 11)
        if "conditioning" in groups:
            checks += check_conditioning(mid, algebra_paths, seed + 13)
    if "gamma-bridge" in groups:
        checks += check_gamma_bridge(mc_paths, seed + 17)
    for mid in ALL_MODELS:
        if "closed-form" in groups:
            checks += check_closed_forms(mid)
        if "normalization" in groups:
            checks += check_normalization(mid)
        if "benchmark-mass" in groups:
            checks.append(check_benchmark_mass(mid))
    if "dual-path" in groups:
        for mid in (CONSTANT_DIFFUSION, SQRT_DIFFUSION):
            checks += check_dual_path(mid)
    if "inversion" in groups:
        checks.append(check_inversion_gaussian())
        checks.append(check_inversion_gamma(100.0 / 12))
        checks.append(check_inversion_gamma(100.0 / 52))
    if "simulation" in groups:
        for mid in ALL_MODELS:
            checks.append(check_simulation(mid, mc_paths, seed + 19))
    if "order-slope" in groups:
        checks += check_order_slope(n_paths=max(200, mc_paths // 50), seed=seed + 23)
    return checks


def report(checks: Sequence[Check], **extra) -> dict:
    failed = [c.name for c in checks if not c.passed]
    return {"schema": 1, **extra, "passed": not failed, "n_checks": len(checks), "failed": failed,
            "checks": [c.as_dict() for c in checks]}
