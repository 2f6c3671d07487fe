import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gammaexpansion.special import kummer_1f1, log_kummer_1f1, log_kummer_1f1_array


@pytest.mark.parametrize("a,b", [(0.5, 0.5), (1.3, 1.5), (4.0, 0.5)])
def test_at_zero(a, b):
    assert kummer_1f1(a, b, 0.0) == 1.0


@pytest.mark.parametrize("z", [-5.0, -0.5, 0.3, 2.0, 25.0, 60.0])
def test_exponential_identity(z):
    assert math.isclose(kummer_1f1(1.0, 1.0, z), math.exp(z), rel_tol=1e-12)


@pytest.mark.parametrize("z", [-5.0, 0.3, 2.0, 25.0, 60.0])
def test_expm1_identity(z):
    assert math.isclose(kummer_1f1(1.0, 2.0, z), math.expm1(z) / z, rel_tol=1e-12)


def test_rejects_nonpositive_integer_beta():
    with pytest.raises(ValueError):
        kummer_1f1(1.0, -2.0, 1.0)
    with pytest.raises(ValueError):
        log_kummer_1f1(1.0, 0.0, 1.0)


@settings(max_examples=80, deadline=None)
@given(st.floats(0.05, 12.0), st.sampled_from([0.5, 1.5]), st.floats(0.0, 30.0))
def test_series_region_against_mpmath(a, b, z):
    ref = float(mpmath.hyp1f1(a, b, z))
    assert math.isclose(kummer_1f1(a, b, z), ref, rel_tol=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.floats(0.05, 12.0), st.sampled_from([0.5, 1.5]), st.floats(30.0, 5000.0))
def test_log_form_large_argument(a, b, z):
    lg, sign = log_kummer_1f1(a, b, z)
    ref = mpmath.hyp1f1(a, b, z)
    assert sign == 1.0
    # log-space: absolute error in the log is relative error in the value
    assert abs(lg - float(mpmath.log(ref))) <= 1e-12 * max(1.0, abs(lg))


def test_array_form_matches_scalar():
    z = np.array([0.0, 0.7, 29.0, 31.0, 400.0])
    got = log_kummer_1f1_array(2.3, 1.5, z)
    ref = [log_kummer_1f1(2.3, 1.5, v)[0] for v in z]
    assert np.allclose(got, ref, rtol=1e-13, atol=1e-13)
