import math
from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from holderbound.expr import parse
from holderbound.quadrature import Interval, QuadratureConfig, integrate

CFG = QuadratureConfig()


def tol(value, cfg=CFG):
    return max(cfg.abs_tol, cfg.rel_tol * abs(value))


def test_identity():
    res = integrate(lambda x: x, Interval(0, 1))
    assert res.value == pytest.approx(0.5, abs=1e-14)
    assert res.converged and res.error_estimate >= 0


def test_sine():
    assert integrate(math.sin, Interval(0, math.pi)).value == pytest.approx(2.0, abs=1e-12)


def _kinked_moment_oracle() -> Fraction:
    # exact piecewise antiderivative of |1 - 2x|^3 x split at 1/2
    t = sp.symbols("t")
    left = sp.integrate((1 - 2 * t) ** 3 * t, (t, 0, sp.Rational(1, 2)))
    right = sp.integrate((2 * t - 1) ** 3 * t, (t, sp.Rational(1, 2), 1))
    return Fraction(str(left + right))


def test_kinked_integrand_matches_piecewise_oracle():
    exact = _kinked_moment_oracle()
    assert exact == Fraction(1, 8)
    f = parse("abs(1 - 2*x)^3 * x")
    for bps in ([0.5], []):
        res = integrate(f, Interval(0, 1), breakpoints=bps)
        assert res.value == pytest.approx(float(exact), abs=1e-10)


def test_breakpoint_outside_interval_ignored():
    a = integrate(math.exp, Interval(0, 1), breakpoints=[-1.0, 0.0, 1.0, 2.0])
    b = integrate(math.exp, Interval(0, 1))
    assert a.value == b.value


def test_nonconvergence_is_flagged_not_raised():
    cfg = QuadratureConfig(rel_tol=1e-14, abs_tol=1e-300, max_subdivisions=1)
    res = integrate(lambda x: math.sqrt(abs(x - 0.3137)), Interval(0, 1), cfg)
    assert not res.converged
    assert res.subdivisions_used == 1
    assert res.value == pytest.approx(0.0, abs=1.0)


def test_domain_error_propagates():
    from holderbound.expr import DomainError

    with pytest.raises(DomainError):
        integrate(parse("ln(x)"), Interval(-1, 1))


def test_error_estimate_bounds_error_on_smooth_family():
    for k in range(1, 8):
        f = lambda x, k=k: math.cos(k * x) * math.exp(x)
        exact = (math.exp(2) * (math.cos(2 * k) + k * math.sin(2 * k)) - 1) / (1 + k * k)
        res = integrate(f, Interval(0, 2))
        assert abs(res.value - exact) <= max(res.error_estimate, 1e-15)
        assert abs(res.value - exact) <= tol(res.value)


@pytest.mark.parametrize("bad", [dict(rel_tol=0), dict(abs_tol=-1), dict(max_subdivisions=0)])
def test_config_validation(bad):
    with pytest.raises(ValueError):
        QuadratureConfig(**bad)


@pytest.mark.parametrize("a, b", [(1, 1), (2, 1), (0, math.inf), (math.nan, 1)])
def test_interval_validation(a, b):
    with pytest.raises(ValueError):
        Interval(a, b)


SMOOTH = [parse(t) for t in ("x^3 - 2*x", "exp(-x^2)", "sin(3*x) + 2", "abs(x - 0.3)*x", "sqrt(1 + x^2)")]


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(SMOOTH), st.floats(-10, 10))
def test_linearity(f, c):
    iv = Interval(-1.0, 1.5)
    base = integrate(f, iv, breakpoints=[0.3]).value
    scaled = integrate(lambda x: c * f(x), iv, breakpoints=[0.3]).value
    assert abs(scaled - c * base) <= 2 * tol(c * base)


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(SMOOTH), st.floats(0.01, 0.99))
def test_additivity(f, frac):
    a, b = -1.0, 1.5
    m = a + frac * (b - a)
    whole = integrate(f, Interval(a, b), breakpoints=[0.3]).value
    parts = integrate(f, Interval(a, m), breakpoints=[0.3]).value + integrate(f, Interval(m, b), breakpoints=[0.3]).value
    assert abs(whole - parts) <= 2 * tol(whole)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([parse("abs(sin(5*x))"), parse("x^2"), parse("exp(x) - 1 + abs(x)")]),
       st.floats(-5, 4))
def test_nonnegative_integrand_gives_nonnegative_value(f, a):
    assert integrate(f, Interval(a, a + 1)).value >= -CFG.abs_tol
