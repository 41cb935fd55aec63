from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from epdyn.exceptions import IllPosedFitError
from epdyn.dynamics import TimeSeries, linear_grid, log_grid
from epdyn.fitting import (
    HALF_POWERS,
    envelope_maxima,
    fit_half_powers,
    fit_integer_powers,
    fit_powers,
    loglog_slope,
    oscillation_minima,
)
from epdyn.models import ModelSpec

MODEL = ModelSpec.end_dot(0.0, 0.0)


def series(t, p):
    return TimeSeries(np.asarray(t, float), np.asarray(p, float), "synthetic", MODEL)


class TestExactRecovery:
    def test_linear_member_of_half_basis(self):
        t = linear_grid(10.0, 0.05)
        fit = fit_half_powers(series(t, 1 + 0.5 * t))
        expect = np.zeros(6)
        expect[1] = 0.5
        assert np.allclose(fit.coefficients, expect, atol=1e-10)
        assert fit.rms < 1e-12

    def test_integer_polynomial(self):
        t = linear_grid(5.0, 0.05)
        fit = fit_integer_powers(series(t, 1 - t + 0.1 * t * t))
        assert np.allclose(fit.coefficients, [-1, 0.1, 0, 0, 0, 0], atol=1e-10)

    @given(st.lists(st.floats(-1, 1), min_size=6, max_size=6))
    @settings(max_examples=25, deadline=None)
    def test_half_power_roundtrip(self, coeffs):
        t = linear_grid(4.0, 0.02)
        p = 1 + sum(c * t ** float(e) for c, e in zip(coeffs, HALF_POWERS))
        fit = fit_half_powers(series(t, p))
        assert np.allclose(fit.coefficients, coeffs, atol=1e-7)


class TestProperties:
    def setup_method(self):
        t = linear_grid(30.0, 0.05)
        self.s = series(t, np.exp(-0.1 * t) * (1 + 0.05 * np.sin(t)))

    def test_residual_orthogonal_to_basis(self):
        fit = fit_half_powers(self.s)
        X = np.column_stack([fit.times ** float(e) for e in fit.exponents])
        proj = X.T @ fit.residuals / (np.linalg.norm(X, axis=0) * np.linalg.norm(fit.residuals))
        assert np.max(np.abs(proj)) < 1e-8

    def test_rms_definition_and_window(self):
        fit = fit_half_powers(self.s, (2.0, 20.0))
        assert fit.rms == pytest.approx(np.sqrt(np.mean(fit.residuals ** 2)))
        assert fit.window == (2.0, 20.0)
        assert fit.times[0] == 2.0 and fit.times[-1] == 20.0
        assert np.allclose(fit.evaluate(fit.times) - 1, self.s.window(2.0, 20.0).values - 1 - fit.residuals)

    def test_deterministic(self):
        a = fit_half_powers(self.s)
        b = fit_half_powers(self.s)
        assert a.coefficients.tobytes() == b.coefficients.tobytes()

    def test_basis_nesting(self):
        rms = [fit_powers(self.s, None, HALF_POWERS[:k]).rms for k in range(1, 7)]
        assert all(b <= a * (1 + 1e-12) for a, b in zip(rms, rms[1:]))

    def test_as_dict(self):
        fit = fit_half_powers(self.s)
        assert list(fit.as_dict()) == ["1/2", "1", "3/2", "2", "5/2", "3"]


class TestIllPosed:
    def test_too_few_samples(self):
        with pytest.raises(IllPosedFitError):
            fit_half_powers(series(np.linspace(0, 1, 20), np.ones(20)))

    def test_rank_deficient(self):
        t = linear_grid(5.0, 0.05)
        with pytest.raises(IllPosedFitError) as info:
            fit_powers(series(t, 1 + t), None, (Fraction(1), Fraction(1)))
        assert info.value.rank is not None and info.value.rank < 2

    def test_condition_limit(self):
        t = linear_grid(5.0, 0.05)
        with pytest.raises(IllPosedFitError):
            fit_half_powers(series(t, 1 + t), condition_limit=10.0)

    def test_window_outside_support(self):
        with pytest.raises(ValueError):
            fit_half_powers(series(linear_grid(5.0), np.ones(101)), (0.0, 10.0))
        with pytest.raises(ValueError):
            fit_half_powers(series(linear_grid(5.0), np.ones(101)), (3.0, 1.0))


class TestSlope:
    def test_exact_power(self):
        t = log_grid(1.0, 1e3, 20)
        assert loglog_slope(series(t, t ** -3.0)) == pytest.approx(-3.0, abs=1e-12)

    def test_envelope_of_oscillation(self):
        t = np.linspace(50, 500, 20001)
        p = np.cos(2 * t + np.pi / 4) ** 2 / t ** 3
        p = p + 1e-30
        assert loglog_slope(series(t, p)) == pytest.approx(-3.0, abs=0.01)

    def test_rejects_nonpositive(self):
        t = np.linspace(1, 10, 50)
        with pytest.raises(ValueError):
            loglog_slope(series(t, np.cos(t)))

    def test_extrema(self):
        t = np.linspace(0, 10, 10001)
        p = 1 + np.cos(2 * t)
        tmax, _ = envelope_maxima(series(t, p))
        assert np.allclose(tmax, np.pi * np.arange(1, 4), atol=1e-3)
        tmin = oscillation_minima(series(t, p))
        assert np.allclose(tmin, np.pi / 2 + np.pi * np.arange(3), atol=1e-6)
