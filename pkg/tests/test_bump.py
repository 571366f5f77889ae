"""Seed bump: closed-form values, primitive table, and regularity heuristics."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import subexp_wavelets as sw
from subexp_wavelets.bump import BumpError, TARGET_INTEGRAL


@pytest.fixture(scope="module")
def bump():
    return sw.build_bump(1.0, 2.0)


class TestProfile:
    def test_closed_form_values(self, bump):
        # profile is N exp(-1 / (1 - x^2)) for rho = 2; check against the
        # stored normalization constant directly
        assert np.isclose(bump(0.0), bump.norm_constant * np.exp(-1.0),
                          rtol=1e-14)
        assert np.isclose(bump(0.5), bump.norm_constant * np.exp(-4.0 / 3.0),
                          rtol=1e-14)

    def test_support_is_exact(self, bump):
        assert bump(1.0) == 0.0
        assert bump(-1.0) == 0.0
        assert bump(1.5) == 0.0
        assert np.all(bump(np.linspace(1.0, 50.0, 100)) == 0.0)

    def test_even_symmetry(self, bump):
        x = np.linspace(0.0, 1.0, 257)
        assert np.array_equal(bump(x), bump(-x))

    def test_total_mass(self, bump):
        # independent quadrature of the normalized profile
        x = np.linspace(-1.0, 1.0, 200001)
        total = np.trapezoid(bump(x), dx=x[1] - x[0])
        assert abs(total - TARGET_INTEGRAL) < 1e-10


class TestCumulative:
    def test_endpoints_are_pinned(self, bump):
        assert bump.cumulative(-1.0) == 0.0
        assert bump.cumulative(1.0) == TARGET_INTEGRAL
        assert bump.cumulative(-5.0) == 0.0
        assert bump.cumulative(7.0) == TARGET_INTEGRAL

    def test_midpoint_is_half_mass(self, bump):
        assert abs(bump.cumulative(0.0) - TARGET_INTEGRAL / 2) < 1e-15

    @given(x=st.floats(min_value=-1.0, max_value=1.0,
                       allow_nan=False, allow_infinity=False))
    @settings(max_examples=100, deadline=None)
    def test_reflection_identity(self, bump, x):
        # symmetric knot table makes this hold to machine precision; the
        # bell orthonormality identities downstream rely on it
        got = bump.cumulative(x) + bump.cumulative(-x)
        assert abs(got - TARGET_INTEGRAL) < 1e-13

    def test_monotone_nondecreasing(self, bump):
        # the endpoint knot is pinned to the exact mass, which can sit one
        # ulp below the accumulated sum: allow that much backlash
        x = np.linspace(-1.1, 1.1, 2001)
        c = bump.cumulative(x)
        assert float(np.min(np.diff(c))) >= -1e-13


class TestValidation:
    def test_width_constraint(self):
        with pytest.raises(BumpError, match="pi/3"):
            sw.build_bump(1.2, 2.0)
        with pytest.raises(BumpError):
            sw.build_bump(0.0, 2.0)

    def test_order_constraint(self):
        with pytest.raises(BumpError, match="exceed 1"):
            sw.build_bump(1.0, 1.0)


class TestRegularityCertificate:
    def test_reference_bump_passes(self, bump):
        report = sw.certify_gevrey(bump, 10)
        assert report["passes"]
        assert len(report["ratios"]) == 11

    def test_order_cap(self, bump):
        with pytest.raises(BumpError):
            sw.certify_gevrey(bump, 21)

    def test_higher_order_decays_faster(self):
        # the derivative-growth ratio of the smoother family (rho = 3) decays
        # relative to the rougher one (rho = 1.2) as the order grows
        r_rough = sw.certify_gevrey(sw.build_bump(1.0, 1.2), 10)["ratios"]
        r_smooth = sw.certify_gevrey(sw.build_bump(1.0, 3.0), 10)["ratios"]
        assert r_smooth[10] / r_rough[10] < r_smooth[5] / r_rough[5]
