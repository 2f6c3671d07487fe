import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from gammaexpansion.benchmark.charfn import (
    char_function,
    gamma_char_function,
    gaussian_char_function,
    sqrt_alpha,
    sqrt_alpha_quadrature,
)
from gammaexpansion.benchmark.closed_forms import closed_form_omega, closed_form_omega_array
from gammaexpansion.benchmark.dilog import dilog, dilog_array
from gammaexpansion.benchmark.inversion import (
    InversionConfig,
    euler_inversion,
    fourier_benchmark,
    pure_jump_exact_density,
    pure_jump_series,
)
from gammaexpansion.benchmark.models import MODEL_IDS, builtin
from gammaexpansion.benchmark.simulate import simulate_noise, simulate_paths
from gammaexpansion.density import OmegaEvaluator
from gammaexpansion.expansion import ModelError
from gammaexpansion.experiments import default_grid
from gammaexpansion.validation import check_benchmark_mass, check_simulation

from oracles import omega_oracle

D = 1 / 52


# ---- dilogarithm

def test_dilog_special_values():
    assert dilog(0) == 0
    assert abs(dilog(1) - math.pi**2 / 6) < 1e-15
    assert abs(dilog(-1) + math.pi**2 / 12) < 1e-15
    assert abs(dilog(0.5) - (math.pi**2 / 12 - math.log(2) ** 2 / 2)) < 1e-15


@settings(max_examples=150, deadline=None)
@given(st.floats(-6, 6), st.floats(-6, 6))
def test_dilog_against_mpmath(re, im):
    z = complex(re, im)
    if abs(im) < 1e-9 and re > 1:
        # on the branch cut; approach from above as mpmath does
        z = complex(re, 0.0)
    ref = complex(mpmath.polylog(2, z))
    got = dilog(z)
    assert abs(got - ref) <= 1e-12 * max(1.0, abs(ref))


def test_dilog_array_matches_scalar():
    z = np.array([0.3 + 0.2j, -4.0, 2.5 - 1j, 0.99j])
    assert np.allclose(dilog_array(z), [dilog(v) for v in z], rtol=1e-15)


# ---- characteristic functions

@pytest.mark.parametrize("model_id", MODEL_IDS)
def test_char_function_at_zero(model_id):
    assert char_function(builtin(model_id), D, 0.0) == 1 + 0j


@pytest.mark.parametrize("model_id", MODEL_IDS)
def test_char_function_modulus(model_id):
    w = np.linspace(-500, 500, 2001)
    assert np.all(np.abs(char_function(builtin(model_id), D, w)) <= 1 + 1e-12)


@pytest.mark.parametrize("model_id", MODEL_IDS)
def test_char_function_mean(model_id):
    bm = builtin(model_id)
    h = 1e-4
    d = (char_function(bm, D, h) - char_function(bm, D, -h)) / (2j * h)
    level = bm.theta + bm.a / (bm.b * bm.kappa)
    mean = level + math.exp(-bm.kappa * D) * (bm.x0 - level)
    assert abs(d.real - mean) < 1e-7


def test_sqrt_alpha_branch_tracking():
    bm = builtin("sqrt-diffusion")
    w = np.linspace(0.1, 400, 300)
    assert np.allclose(sqrt_alpha(bm, 1 / 12, w), sqrt_alpha_quadrature(bm, 1 / 12, w), rtol=1e-9, atol=1e-9)


# ---- published closed forms

def test_closed_form_range_is_enforced():
    with pytest.raises(ValueError):
        closed_form_omega(builtin("sqrt-diffusion"), 3, 0.0, D)


def test_closed_form_model1_leading_term():
    bm = builtin("pure-jump-ou")
    aD, edge = bm.a * D, bm.eta * D
    y = edge + 0.1
    ref = bm.b**aD * (y - edge) ** (aD - 1) * math.exp(-bm.b * (y - edge)) / math.gamma(aD)
    assert math.isclose(closed_form_omega(bm, 0, y, D), ref, rel_tol=1e-13)


def test_closed_form_leading_term_is_gaussian_gamma_convolution():
    # Omega_0 for the diffusion models is the density of normal + scaled gamma
    from scipy import integrate

    for model_id in ("constant-diffusion", "sqrt-diffusion"):
        bm = builtin(model_id)
        s = bm.sigma * math.sqrt(D * (bm.x0 if model_id == "sqrt-diffusion" else 1.0))
        for y in (-1.0, 0.5, 3.0):
            f = lambda u: stats.norm.pdf(y - (bm.eta * D + u) / s) * stats.gamma.pdf(u, bm.a * D, scale=1 / bm.b)
            ref = integrate.quad(f, 0, np.inf, epsabs=1e-14, epsrel=1e-12, limit=200)[0]
            assert math.isclose(closed_form_omega(bm, 0, y, D), ref, rel_tol=1e-9)


@pytest.mark.parametrize("model_id,top", [("constant-diffusion", 3), ("sqrt-diffusion", 2)])
@pytest.mark.parametrize("delta", [1 / 12, 1 / 52, 1 / 252])
def test_engine_matches_independent_oracle(model_id, top, delta):
    bm = builtin(model_id)
    y = np.linspace(-3, 5, 9)
    ref = omega_oracle(bm, delta, y, top)
    ev = OmegaEvaluator(bm.to_model_spec(), delta, top)
    for m in range(top + 1):
        err = np.max(np.abs(ev.omega(m, y) - ref[m])) / np.max(np.abs(ref[m]))
        assert err < 1e-7, (m, err)


@pytest.mark.parametrize("model_id,m", [("constant-diffusion", 3), ("sqrt-diffusion", 2)])
def test_oracle_rejects_printed_top_order(model_id, m):
    # the oracle sides with the engine where the printed expression disagrees
    bm = builtin(model_id)
    y = np.linspace(-3, 5, 9)
    ref = omega_oracle(bm, D, y, m)[m]
    printed = closed_form_omega_array(bm, m, y, D, digits=40)
    assert np.max(np.abs(printed - ref)) / np.max(np.abs(ref)) > 1e-3


# ---- Fourier inversion

def test_gaussian_inversion():
    mean, sd = 0.3, 0.04
    cfg = InversionConfig(step_h=2 * math.pi / (30 * sd), euler_n=200)
    x = np.linspace(mean - 6 * sd, mean + 6 * sd, 101)
    got = euler_inversion(gaussian_char_function(mean, sd), x, cfg)
    assert np.max(np.abs(got - stats.norm.pdf(x, mean, sd))) < 1e-8


def test_gamma_inversion_interior():
    shape, rate = 100 / 12, 10.0
    dist = stats.gamma(shape, scale=1 / rate)
    x = np.linspace(dist.ppf(0.01), dist.ppf(0.99), 41)
    span = dist.ppf(1 - 1e-12)
    cfg = InversionConfig(step_h=2 * math.pi / (4 * span), euler_n=4000)
    got = euler_inversion(gamma_char_function(shape, rate), x, cfg)
    assert np.max(np.abs(got / dist.pdf(x) - 1)) < 1e-6


def test_inversion_config_validation():
    with pytest.raises(ValueError):
        InversionConfig(euler_m=0)
    with pytest.raises(ValueError):
        InversionConfig(euler_m=11, euler_n=5)
    with pytest.raises(ValueError):
        InversionConfig(step_h=-1.0)


def test_pure_jump_mixture_is_a_density():
    bm = builtin("pure-jump-ou")
    c = pure_jump_series(bm, D)
    assert math.isclose(c.sum(), 1.0, rel_tol=1e-12)
    # mean of the mixture: shift + sum c_k (a delta + k) / b
    e = math.exp(-bm.kappa * D)
    shift = bm.x0 * e + bm.theta * (1 - e)
    mean = shift + float(np.sum(c * (bm.a * D + np.arange(c.size)))) / bm.b
    assert math.isclose(mean, bm.mean(D), rel_tol=1e-12)


@pytest.mark.parametrize("delta", [1 / 12, 1 / 52, 1 / 252])
def test_pure_jump_fourier_matches_exact(delta):
    bm = builtin("pure-jump-ou")
    x = default_grid(bm, delta, 201)[1:]
    exact = pure_jump_exact_density(bm, delta, x)
    bench = fourier_benchmark(bm, delta, x).values
    keep = exact > 1e-3 * exact.max()
    assert np.max(np.abs(bench[keep] / exact[keep] - 1)) < 1e-8


@pytest.mark.parametrize("model_id", MODEL_IDS)
def test_benchmark_mass(model_id):
    c = check_benchmark_mass(model_id)
    assert c.passed, c.measured


@pytest.mark.parametrize("model_id", MODEL_IDS)
def test_benchmark_nonnegative_on_region(model_id):
    bm = builtin(model_id)
    x = default_grid(bm, D, 401)
    v = fourier_benchmark(bm, D, x).values
    keep = v >= 1e-3 * v.max()
    assert np.all(v[keep] > 0)


# ---- Monte Carlo simulator

def test_models_validate_parameters():
    with pytest.raises(ModelError):
        builtin("sqrt-diffusion", x0=0.0)
    with pytest.raises(ModelError):
        builtin("constant-diffusion", kappa=-1.0)
    with pytest.raises(ModelError):
        builtin("nope")


@pytest.mark.parametrize("model_id", MODEL_IDS)
def test_simulation_mean_and_charfn(model_id):
    c = check_simulation(model_id, n_paths=20_000, seed=4)
    assert c.passed, c.details


def test_pure_jump_lower_bound():
    bm = builtin("pure-jump-ou")
    x = simulate_paths(bm, D, 200, 20_000, seed=1)
    assert x.min() >= bm.x0 - bm.kappa * max(bm.x0 - bm.theta, 0) * D * 1.1


def test_simulation_is_reproducible_and_prefix_stable():
    bm = builtin("sqrt-diffusion")
    a = simulate_paths(bm, D, 50, 3000, seed=9)
    b = simulate_paths(bm, D, 50, 3000, seed=9)
    c = simulate_paths(bm, D, 50, 1500, seed=9)
    assert np.array_equal(a, b)
    assert np.array_equal(a[:1500], c)
    assert not np.array_equal(a, simulate_paths(bm, D, 50, 3000, seed=10))


def test_noise_matches_simulator_substreams():
    bm = builtin("constant-diffusion")
    noise = simulate_noise(2000, 30, D, bm.a, bm.b, seed=2)
    assert noise.dW.shape == (2000, 30) and np.all(noise.dL >= 0)
    assert noise.L.shape == (2000, 31) and np.all(noise.L[:, 0] == 0)


def test_simulation_rejects_bad_budget():
    with pytest.raises(ValueError):
        simulate_paths(builtin("1"), D, 0, 10)
