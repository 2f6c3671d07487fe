import numpy as np
import pytest

from gammaexpansion.benchmark.models import builtin
from gammaexpansion.benchmark.simulate import loglog_slope, simulate_noise, truncation_residuals
from gammaexpansion.expansion import (
    DIFFUSION,
    DRIFT,
    ModelError,
    ModelSpec,
    coefficient_process,
    expansion_term,
    expansion_terms,
    index_set,
)
from gammaexpansion.ito_algebra import IntegralExpression, make_index, multiply

KAPPA, THETA, SIGMA, X0 = 0.6, 0.02, 0.3, 0.3
ETA = KAPPA * (THETA - X0)


def I(integrators, powers, coeff=1.0):
    return IntegralExpression.integral(make_index(integrators, powers), coeff)


def test_index_set_examples():
    assert set(index_set(1)) == {(1, (1,))}
    assert set(index_set(2)) == {(1, (2,)), (2, (1, 1))}
    assert set(index_set(3)) == {(1, (3,)), (2, (1, 2)), (2, (2, 1)), (3, (1, 1, 1))}


@pytest.mark.parametrize("m", range(1, 13))
def test_index_set_size(m):
    s = index_set(m)
    assert len(s) == 2 ** (m - 1)
    assert all(sum(j) == m and len(j) == ell for ell, j in s)


def test_index_set_rejects_zero():
    with pytest.raises(ValueError):
        index_set(0)


def test_coefficient_process_examples():
    spec = builtin("sqrt-diffusion").to_model_spec()
    x1, x2 = expansion_terms(spec, 2)
    assert coefficient_process(spec, 0, DRIFT, []) == IntegralExpression.constant(spec.mu0)
    assert coefficient_process(spec, 1, DRIFT, [x1]).isclose(x1.scale(-KAPPA))
    d1, d2 = spec.diffusion_derivs[1], spec.diffusion_derivs[2]
    expected = x2.scale(d1) + multiply(x1, x1).scale(d2 / 2)
    assert coefficient_process(spec, 2, DIFFUSION, [x1, x2]).isclose(expected)


def test_first_term_is_three_terms():
    spec = builtin("constant-diffusion").to_model_spec()
    x1 = expansion_term(spec, 1)
    expected = I([0], [0], ETA) + I([1], [0], SIGMA) + IntegralExpression.pending_power(1)
    assert x1 == expected


def test_model1_second_term():
    spec = builtin("pure-jump-ou").to_model_spec()
    expected = (I([0, 0], [0, 0], ETA) + I([0], [1])).scale(-KAPPA)
    assert expansion_term(spec, 2).isclose(expected)


def test_model2_second_term():
    spec = builtin("constant-diffusion").to_model_spec()
    expected = (I([0, 0], [0, 0], ETA) + I([1, 0], [0, 0], SIGMA) + I([0], [1])).scale(-KAPPA)
    assert expansion_term(spec, 2).isclose(expected)


@pytest.mark.parametrize("model_id", ["pure-jump-ou", "constant-diffusion", "sqrt-diffusion"])
def test_level_counts_and_pending_powers(model_id):
    spec = builtin(model_id).to_model_spec()
    for m, x in enumerate(expansion_terms(spec, 4), start=1):
        assert x.max_levels() <= m
        if m >= 2:
            assert all(p == 0 for (p, _) in x.terms)


def test_constant_coefficients_have_no_corrections():
    spec = ModelSpec(0.1, (0.2, 0.0, 0.0, 0.0), (0.3, 0.0, 0.0, 0.0), 5.0, 2.0)
    for m in range(2, 5):
        assert expansion_term(spec, m).is_zero()


def test_missing_derivative_is_named():
    spec = ModelSpec(0.1, (0.2, -0.5), (0.3, 0.0), 5.0, 2.0)
    expansion_term(spec, 2)
    with pytest.raises(ModelError, match="drift derivative of order 2"):
        expansion_term(spec, 3)


@pytest.mark.parametrize(
    "kw",
    [
        dict(gamma_a=0.0),
        dict(gamma_b=float("inf")),
        dict(diffusion_derivs=(0.0,)),
        dict(pure_jump=True),
    ],
)
def test_model_spec_validation(kw):
    base = dict(x0=0.1, drift_derivs=(0.2,), diffusion_derivs=(0.3,), gamma_a=5.0, gamma_b=2.0)
    base.update(kw)
    with pytest.raises(ModelError):
        ModelSpec(**base)


def test_expansion_term_rejects_order_zero():
    with pytest.raises(ValueError):
        expansion_term(builtin("1").to_model_spec(), 0)


def test_truncation_residual_scaling():
    # shared noise: residual of the order-M truncation shrinks like eps^(M+1)
    model = builtin("constant-diffusion")
    noise = simulate_noise(256, 400, 1 / 52, model.a, model.b, seed=2)
    eps = (0.4, 0.2, 0.1)
    for order in (1, 2):
        res = truncation_residuals(model, noise, eps, order)
        slope = loglog_slope(eps, np.median(res, axis=1))
        assert slope >= order + 0.7
