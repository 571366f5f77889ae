"""Grids, trapezoid quadrature, and band-limited synthesis vs closed forms.

Oracles used here are all independent of the library: the Gaussian integral
sqrt(pi), the Fourier pair rectangle <-> sin(x)/(pi x), and the Gaussian
transform pair exp(-x^2) <-> sqrt(pi) exp(-xi^2/4).
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import subexp_wavelets as sw
from subexp_wavelets.numerics import NumericsError


def _gaussian_samples(lo=-10.0, hi=10.0, n=2001):
    g = sw.Grid1D.from_interval(lo, hi, n)
    x = g.points()
    return g, sw.SampledFunction(g, np.exp(-x * x))


class TestGrid1D:
    def test_points_extent_last(self):
        g = sw.Grid1D(-2.0, 0.5, 9)
        assert np.array_equal(g.points(), -2.0 + 0.5 * np.arange(9))
        assert g.extent == 4.0
        assert g.last == 2.0

    def test_invalid_parameters_rejected(self):
        with pytest.raises(NumericsError):
            sw.Grid1D(0.0, -1.0, 5)
        with pytest.raises(NumericsError):
            sw.Grid1D(0.0, 1.0, 1)
        with pytest.raises(NumericsError):
            sw.Grid1D.from_interval(1.0, 1.0, 5)

    def test_trapezoid_weights_sum_to_extent(self):
        g = sw.Grid1D.from_interval(0.0, 3.0, 7)
        assert np.isclose(np.sum(g.trapezoid_weights()), 3.0, atol=1e-15)

    def test_index_of_roundtrip(self):
        g = sw.Grid1D(-5.0, 0.25, 41)
        idx = g.index_of(g.points())
        assert np.array_equal(idx, np.arange(41))


class TestQuadrature:
    def test_gaussian_integral(self):
        # decays below 1e-43 at the window edge: trapezoid is superalgebraic
        _, f = _gaussian_samples()
        assert abs(sw.integrate(f) - np.sqrt(np.pi)) < 1e-13

    def test_inner_product_conjugate_symmetry(self):
        g = sw.Grid1D.from_interval(-8.0, 8.0, 1601)
        x = g.points()
        f = sw.SampledFunction(g, np.exp(-x * x) * (1 + 1j * x))
        h = sw.SampledFunction(g, np.exp(-0.5 * x * x) * (x - 2j))
        assert abs(sw.inner_product(f, h) - np.conj(sw.inner_product(h, f))) < 1e-12

    def test_pairing_is_bilinear_and_symmetric(self):
        g = sw.Grid1D.from_interval(-8.0, 8.0, 1601)
        x = g.points()
        f = sw.SampledFunction(g, np.exp(-x * x) * (1 + 1j * x))
        h = sw.SampledFunction(g, np.exp(-0.5 * x * x))
        assert abs(sw.pairing(f, h) - sw.pairing(h, f)) < 1e-14

    def test_norm_of_gaussian(self):
        # ||exp(-x^2)||_2 = (pi/2)^(1/4)
        _, f = _gaussian_samples()
        assert abs(sw.norm_l2(f) - (np.pi / 2) ** 0.25) < 1e-13

    def test_grid_mismatch_rejected(self):
        _, f = _gaussian_samples()
        _, h = _gaussian_samples(n=1001)
        with pytest.raises(NumericsError):
            sw.inner_product(f, h)

    @given(alpha=st.floats(min_value=-100.0, max_value=100.0,
                           allow_nan=False, allow_infinity=False))
    @settings(max_examples=25, deadline=None)
    def test_integrate_scaling_linearity(self, alpha):
        g, f = _gaussian_samples(n=401)
        scaled = sw.SampledFunction(g, alpha * f.values)
        assert abs(sw.integrate(scaled) - alpha * sw.integrate(f)) < 1e-10


class TestSpectrumOnBand:
    def _rect(self, n=20001):
        g = sw.Grid1D.from_interval(-1.0, 1.0, n)
        return sw.SpectrumOnBand(band=(-1.0, 1.0), grid=g,
                                 values=np.ones(n, dtype=complex),
                                 declared_support=((-1.0, 1.0),))

    def test_literal_zero_enforcement(self):
        g = sw.Grid1D.from_interval(-2.0, 2.0, 101)
        vals = np.ones(101, dtype=complex)  # nonzero beyond [-1, 1]
        with pytest.raises(NumericsError):
            sw.SpectrumOnBand(band=(-2.0, 2.0), grid=g, values=vals,
                              declared_support=((-1.0, 1.0),))

    def test_support_must_sit_inside_band(self):
        g = sw.Grid1D.from_interval(-1.0, 1.0, 11)
        with pytest.raises(NumericsError):
            sw.SpectrumOnBand(band=(-1.0, 1.0), grid=g,
                              values=np.zeros(11, dtype=complex),
                              declared_support=((-1.0, 3.0),))

    def test_synthesis_matches_sinc(self):
        # (1/2pi) int_{-1}^{1} e^{i x xi} dxi = sin(x) / (pi x)
        spec = self._rect()
        x = np.array([0.5, 1.0, 2.0, 3.3, -4.7])
        got = sw.synthesize_values(spec, x)
        want = np.sin(x) / (np.pi * x)
        assert np.max(np.abs(got - want)) < 1e-7
        assert np.max(np.abs(got.imag)) < 1e-9

    def test_spectral_derivative_matches_closed_form(self):
        spec = self._rect()
        x = np.array([0.7, 1.9, -2.6])
        got = sw.spectral_derivative(spec, 1, x)
        want = (x * np.cos(x) - np.sin(x)) / (np.pi * x * x)
        assert np.max(np.abs(got - want)) < 1e-7

    def test_derivative_order_cap(self):
        spec = self._rect(n=101)
        with pytest.raises(NumericsError):
            sw.synthesize_values(spec, [0.0], order=61)


class TestForwardTransform:
    def test_gaussian_pair(self):
        # F[exp(-x^2)](xi) = sqrt(pi) exp(-xi^2 / 4)
        _, f = _gaussian_samples(n=4001)
        xi = np.linspace(-4.0, 4.0, 17)
        got = sw.forward_transform_values(f, xi)
        want = np.sqrt(np.pi) * np.exp(-xi * xi / 4.0)
        assert np.max(np.abs(got - want)) < 1e-12

    def test_roundtrip_through_band(self):
        # forward transform of a band-limited synthesis returns the spectrum
        g = sw.Grid1D.from_interval(-1.0, 1.0, 4001)
        xi = g.points()
        amp = np.zeros(g.count, dtype=complex)
        inner = np.abs(xi) < 1.0
        amp[inner] = np.exp(-1.0 / (1.0 - xi[inner] ** 2))
        spec = sw.SpectrumOnBand(band=(-1.0, 1.0), grid=g, values=amp,
                                 declared_support=((-1.0, 1.0),))
        xg = sw.Grid1D.from_interval(-220.0, 220.0, 14001)
        f = sw.synthesize(spec, xg)
        probe = np.linspace(-0.8, 0.8, 9)
        got = sw.forward_transform_values(f, probe)
        want = np.interp(probe, xi, amp.real)
        assert np.max(np.abs(got - want)) < 1e-6
