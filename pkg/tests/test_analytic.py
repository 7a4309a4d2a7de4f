import math

import mpmath
import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from spinshape.analytic import (
    NotABoundState,
    SeriesDomainError,
    bound_state_count,
    case1_spectrum,
    continuum_threshold,
    energy_level,
    hyp2f1,
    is_admissible,
    level_table,
    phi1_closed_form,
    phi_closed_form,
)
from spinshape.fields import ModelParams, parameter_flow


def test_energy_level_examples():
    assert energy_level(2.5, 1.0, 0) == 0.0
    assert energy_level(2.5, 1.0, 1) == pytest.approx(32 / 9, rel=1e-15)
    assert energy_level(2.0, 0.0, 1) == 3.0
    with pytest.raises(NotABoundState):
        energy_level(2.5, 1.0, 2)


def test_bound_state_count_examples():
    assert bound_state_count(2.5, 1.0) == 2
    assert bound_state_count(0.5, 2.0) == 0
    assert bound_state_count(3.5, 0.0) == 4


def test_threshold_examples():
    assert continuum_threshold(2.5, 1.0) == 4.0
    assert continuum_threshold(3.0, 0.0) == 9.0
    assert continuum_threshold(3.0, -2.0) == continuum_threshold(3.0, 2.0)


def test_level_table():
    t = level_table(2.5, 1.0)
    assert [lv.n for lv in t.levels] == [0, 1]
    assert t.threshold == 4.0 and not t.broken
    assert level_table(0.5, 2.0).broken


def test_case1_spectrum():
    assert case1_spectrum(1.0, 0.3, 0.7, 0) == 0.0
    assert case1_spectrum(1.0, 1.0, 1.0, 2) == 4.0
    with pytest.raises(ValueError):
        case1_spectrum(1.0, 1.0, 1.0, -1)


admissible = st.tuples(st.floats(0.6, 9.0), st.floats(-8.0, 8.0), st.integers(0, 9)).filter(
    lambda t: is_admissible(*t)
)


@given(admissible)
def test_energy_equals_telescoped_flow(args):
    gamma, beta, n = args
    eps = sum(s.epsilon for s in parameter_flow(ModelParams(gamma, beta), n))
    e = energy_level(gamma, beta, n)
    assert e == pytest.approx(eps, rel=1e-13, abs=1e-13 * gamma**2)


@given(admissible)
def test_levels_below_threshold(args):
    gamma, beta, n = args
    assert energy_level(gamma, beta, n) < continuum_threshold(gamma, beta)


@given(st.floats(0.6, 9.0), st.floats(-8.0, 8.0))
def test_levels_increase(gamma, beta):
    count = bound_state_count(gamma, beta)
    levels = [energy_level(gamma, beta, n) for n in range(count)]
    assert all(a < b for a, b in zip(levels, levels[1:]))
    assert not is_admissible(gamma, beta, count)


@given(st.floats(1.5, 6.0), st.floats(1e-4, 1e-2))
def test_small_beta_limit(gamma, beta):
    n = 1
    e0 = gamma**2 - (gamma - n) ** 2
    d = energy_level(gamma, beta, n) - e0
    slope = 0.25 * (1 - gamma**2 / (gamma - n) ** 2)
    assert d == pytest.approx(slope * beta**2, rel=1e-6)


def test_hyp2f1_examples():
    assert hyp2f1(0.3, 0.2, 0.7, 0) == 1
    assert hyp2f1(0, 5.0, 0.5 - 0.5j, 0.4 + 0.2j) == 1
    assert hyp2f1(1, 1, 2, 0.3) == pytest.approx(-math.log(0.7) / 0.3, rel=1e-14)


def test_hyp2f1_errors():
    with pytest.raises(SeriesDomainError):
        hyp2f1(1, 1, 2, 0.9999)
    with pytest.raises(ZeroDivisionError):
        hyp2f1(1, 1, -2, 0.3)


@given(
    st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False),
    st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False),
    st.floats(0.1, 3.0),
    st.floats(-3, 3),
    st.floats(0, 0.9),
    st.floats(0, 2 * math.pi),
)
def test_hyp2f1_against_mpmath(a, b, cr, ci, r, theta):
    c = complex(cr, ci)
    xi = r * complex(math.cos(theta), math.sin(theta))
    ref = complex(mpmath.hyp2f1(a, b, c, xi))
    got = hyp2f1(a, b, c, xi)
    assert abs(got - ref) <= 1e-11 * max(1.0, abs(ref))


def test_phi_closed_form_examples():
    p = ModelParams(2.5, 1.0, 1.0)
    assert phi1_closed_form(0.0, p) == pytest.approx(hyp2f1(0.5, -0.5, 0.5 - 0.5j, 0.5), rel=1e-15)
    zero_beta = ModelParams(2.0, 0.0, 1.3)
    for z in (-1.0, 0.2, 1.1):
        assert phi1_closed_form(z, zero_beta) == pytest.approx(math.exp(-0.65 * math.atan(math.sinh(z))), rel=1e-15)
        assert phi_closed_form(z, zero_beta)[1] == 0
    with pytest.raises(SeriesDomainError):
        phi1_closed_form(1.5, p)


@pytest.mark.parametrize("branch", [1, 2])
@pytest.mark.parametrize("beta_n,lam", [(1.5, 1.0), (5 / 3, 1.0), (0.7, -2.0)])
def test_phi1_solves_second_order_equation(branch, beta_n, lam):
    """Eliminating phi2 from the first-order pair gives
    phi1'' = (g^2/4 + beta_n^2/4 - g'/2) phi1; checked with a 5-point stencil."""
    p = ModelParams(3.0, beta_n, lam)
    h = 1e-3
    for z in np.linspace(-1.0, 1.0, 9):
        f = [phi1_closed_form(z + k * h, p, branch) for k in (-2, -1, 0, 1, 2)]
        d2 = (-f[0] + 16 * f[1] - 30 * f[2] + 16 * f[3] - f[4]) / (12 * h * h)
        g = lam / math.cosh(z)
        dg = -lam * math.tanh(z) / math.cosh(z)
        rhs = (g * g / 4 + beta_n**2 / 4 - dg / 2) * f[2]
        assert abs(d2 - rhs) < 1e-6 * max(1.0, abs(f[2]))
