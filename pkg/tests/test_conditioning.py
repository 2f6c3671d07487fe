import math
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.polynomial import hermite_e
from scipy import integrate as sint

from gammaexpansion.benchmark.models import builtin
from gammaexpansion.benchmark.simulate import gamma_bridge_sample
from gammaexpansion.conditioning import (
    BRIDGE,
    BridgeTerm,
    bridge_expand,
    compute_K,
    d1_operator,
    drop_martingale,
    eliminate_b_factor,
    gamma_condition,
    simplex_integrate,
)
from gammaexpansion.expansion import ModelSpec
from gammaexpansion.ito_algebra import TIME, WIENER, IntegralExpression, make_index
from gammaexpansion.polynomials import BivariatePolynomial, SimplexPolynomial
from gammaexpansion.validation import check_conditioning, check_gamma_bridge

D = 1 / 52


def test_bridge_expand_single_wiener_level():
    terms = bridge_expand(IntegralExpression.integral(make_index([WIENER], [0])), D)
    got = {(t.index, t.coeff, t.z1_power, t.b_delta_power) for t in terms}
    assert got == {
        (((BRIDGE, 0),), 1.0, 0, 0),
        (((TIME, 0),), -1 / D, 0, 1),
        (((TIME, 0),), 1 / math.sqrt(D), 1, 0),
    }


def test_bridge_expand_keeps_time_terms():
    terms = bridge_expand(IntegralExpression.integral(make_index([TIME], [1])), D)
    assert terms == [BridgeTerm(1.0, 0, 0, 0, ((TIME, 1),))]


def test_bridge_expand_two_levels_gives_nine_terms():
    assert len(bridge_expand(IntegralExpression.integral(make_index([1, 1], [0, 0])), D)) == 9


def _weights(terms):
    out = Counter()
    for t in terms:
        out[t.index] += t.coeff
    return out


def test_eliminate_b_on_bridge_level():
    t = BridgeTerm(1.0, 0, 1, 0, ((BRIDGE, 0),))
    assert _weights(eliminate_b_factor(t)) == Counter({((BRIDGE, 0), (BRIDGE, 0)): 2, ((TIME, 0),): 1})
    assert all(s.b_delta_power == 0 for s in eliminate_b_factor(t))


def test_eliminate_b_on_time_level():
    t = BridgeTerm(1.0, 0, 1, 0, ((TIME, 1),))
    assert _weights(eliminate_b_factor(t)) == Counter({((BRIDGE, 0), (TIME, 1)): 1, ((TIME, 1), (BRIDGE, 0)): 1})


def test_eliminate_b_identity_without_factor():
    t = BridgeTerm(2.0, 1, 0, 0, ((TIME, 0),))
    assert eliminate_b_factor(t) == [t]


def test_drop_martingale():
    bridge = BridgeTerm(1.0, 0, 0, 0, ((BRIDGE, 0),))
    timed = BridgeTerm(1.0, 0, 0, 0, ((TIME, 1),))
    assert drop_martingale([bridge]) == []
    assert drop_martingale([timed]) == [timed]
    assert drop_martingale([bridge, timed, bridge]) == [timed]
    with pytest.raises(ValueError):
        drop_martingale([BridgeTerm(1.0, 0, 1, 0, ())])


def test_gamma_condition_examples():
    a = 100.0
    p, m = gamma_condition(((TIME, 1),), a, D)
    assert m == 1 and math.isclose(p(0.3 * D), 0.3, rel_tol=1e-14)
    p, m = gamma_condition(((TIME, 1), (TIME, 1)), a, D)
    s1, s2 = 0.2 * D, 0.7 * D
    assert m == 2
    assert math.isclose(p(s1, s2), a * s1 * (a * s2 + 1) / (a * D * (a * D + 1)), rel_tol=1e-14)
    p, m = gamma_condition(((TIME, 0),), a, D)
    assert m == 0 and p.coeffs == {(0,): 1.0}


def test_gamma_condition_zero_powers_is_one():
    p, m = gamma_condition(((TIME, 0),) * 3, 7.0, D)
    assert m == 0 and p.coeffs == {(0, 0, 0): 1.0}


def test_gamma_bridge_marginal_mean():
    rng = np.random.default_rng(0)
    a, z2, s = 100.0, 0.25, 0.3 * D
    x = gamma_bridge_sample(rng, a, D, z2, [s], 50_000)[:, 0]
    # L(s) / L(delta) ~ Beta(a s, a (delta - s))
    sd = z2 * math.sqrt((a * s) * (a * (D - s)) / ((a * D) ** 2 * (a * D + 1)))
    assert abs(x.mean() - z2 * s / D) < 4 * sd / math.sqrt(x.size)


def test_simplex_examples():
    assert math.isclose(simplex_integrate(SimplexPolynomial.constant(2), 2, D), D**2 / 2)
    assert math.isclose(simplex_integrate(SimplexPolynomial(2, {(1, 0): 1.0}), 2, D), D**3 / 6)
    assert math.isclose(simplex_integrate(SimplexPolynomial(1, {(1,): 1 / D}), 1, D), D / 2)


@pytest.mark.parametrize("h", range(1, 7))
def test_simplex_volume(h):
    assert math.isclose(simplex_integrate(SimplexPolynomial.constant(h), h, 0.7), 0.7**h / math.factorial(h))


@settings(max_examples=25, deadline=None)
@given(
    st.integers(1, 3).flatmap(
        lambda h: st.dictionaries(
            st.tuples(*[st.integers(0, 2)] * h), st.integers(-3, 3).filter(bool).map(float), min_size=1, max_size=3
        ).map(lambda c: SimplexPolynomial(h, c))
    )
)
def test_simplex_against_nquad(p):
    h, delta = p.h, 0.8
    bounds = [lambda *outer: [0.0, outer[0]] for _ in range(h - 1)] + [[0.0, delta]]
    ref = sint.nquad(lambda *s: p(*s), bounds, opts={"epsabs": 1e-13, "epsrel": 1e-12})[0]
    assert math.isclose(simplex_integrate(p, h, delta), ref, rel_tol=1e-9, abs_tol=1e-12)


def test_K_model2_first_order():
    bm = builtin("constant-diffusion")
    k, s, eta = bm.kappa, bm.sigma, bm.eta
    K = compute_K(1, (1,), bm.to_model_spec(), D)
    c = -k * D / 2
    expected = BivariatePolynomial({(0, 0): c * eta * D, (1, 0): c * s * math.sqrt(D), (0, 1): c})
    assert K.isclose(expected)


def test_K_vanishes_for_constant_coefficients():
    spec = ModelSpec(0.1, (0.2, 0.0, 0.0), (0.3, 0.0, 0.0), 100.0, 10.0)
    assert compute_K(1, (1,), spec, D).is_zero()


def test_K_pure_jump_has_no_z1():
    K = compute_K(2, (1, 1), builtin("pure-jump-ou").to_model_spec(), D)
    assert K.degree_z1() <= 0 and K.degree_z2() <= 2 and not K.is_zero()


def test_compute_K_argument_checks():
    spec = builtin("2").to_model_spec()
    with pytest.raises(ValueError):
        compute_K(2, (1,), spec, D)
    with pytest.raises(ValueError):
        compute_K(5, (1, 1, 1, 1, 1), spec, D)


def test_d1_examples():
    one = BivariatePolynomial.constant(1.0)
    z1 = BivariatePolynomial({(1, 0): 1.0})
    assert d1_operator(one, 1).isclose(BivariatePolynomial({(1, 0): -1.0}))
    assert d1_operator(one, 2).isclose(BivariatePolynomial({(2, 0): 1.0, (0, 0): -1.0}))
    assert d1_operator(z1, 1).isclose(BivariatePolynomial({(0, 0): 1.0, (2, 0): -1.0}))


@pytest.mark.parametrize("ell", range(1, 7))
def test_d1_gives_hermite(ell):
    got = d1_operator(BivariatePolynomial.constant(1.0), ell)
    he = hermite_e.herme2poly([0] * ell + [1])
    expected = BivariatePolynomial({(n, 0): (-1) ** ell * c for n, c in enumerate(he)})
    assert got.isclose(expected)


@settings(max_examples=30, deadline=None)
@given(
    st.dictionaries(st.tuples(st.integers(0, 3), st.integers(0, 2)), st.integers(-3, 3).filter(bool).map(float), min_size=1),
    st.integers(1, 4),
)
def test_d1_degree_and_derivative_identity(coeffs, ell):
    p = BivariatePolynomial(coeffs)
    q = d1_operator(p, ell)
    assert q.degree_z1() == p.degree_z1() + ell
    # D1^ell(u) phi = d^ell/dz1^ell (u phi); check at one point by finite differences of order ell
    z2, z, h = 0.7, 0.4, 1e-2
    f = lambda t: float(p(t, z2)) * math.exp(-t * t / 2)
    grid = [f(z + (k - ell / 2) * h) for k in range(ell + 1)]
    fd = sum((-1) ** (ell - k) * math.comb(ell, k) * g for k, g in enumerate(grid)) / h**ell
    exact = float(q(z, z2)) * math.exp(-z * z / 2)
    assert math.isclose(fd, exact, rel_tol=1e-3, abs_tol=1e-3 * max(1.0, abs(exact)))


@pytest.mark.parametrize("model_id", ["pure-jump-ou", "constant-diffusion", "sqrt-diffusion"])
def test_conditioning_monte_carlo(model_id):
    checks = check_conditioning(model_id, n_paths=4096, seed=7)
    assert not [(c.name, c.measured) for c in checks if not c.passed]


def test_gamma_bridge_small_budget():
    checks = check_gamma_bridge(n_samples=20_000, seed=3)
    assert not [(c.name, c.measured) for c in checks if not c.passed]
