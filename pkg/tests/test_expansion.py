"""Tensor atoms, coefficient windows, partial sums, duals, Parseval checks."""

import csv
import json

import numpy as np
import pytest

import subexp_wavelets as sw
from subexp_wavelets.expansion import ExpansionError


class TestIndices:
    def test_bit_validation(self):
        with pytest.raises(ExpansionError):
            sw.WaveletIndex(epsilon=(2,), m=0, n=(0,))
        with pytest.raises(ExpansionError):
            sw.WaveletIndex(epsilon=(0,), m=0, n=(0,))  # all-zero pattern
        with pytest.raises(ExpansionError):
            sw.WaveletIndex(epsilon=(1, 0), m=0, n=(0,))  # dimension mismatch

    def test_window_size_formula(self):
        assert len(sw.IndexWindow(2, 8)) == 1 * 5 * 17
        assert len(sw.IndexWindow(1, 2, d=2)) == 3 * 3 * 25

    def test_window_enumeration_complete(self):
        w = sw.IndexWindow(1, 1)
        indices = list(w.indices())
        assert len(indices) == len(w)
        assert len(set(indices)) == len(w)

    def test_empty_window_rejected(self):
        with pytest.raises(ExpansionError):
            sw.IndexWindow(-1, 2)


class TestCoefficientSet:
    def test_missing_coefficient_rejected(self):
        w = sw.IndexWindow(0, 1)
        with pytest.raises(ExpansionError, match="missing"):
            sw.CoefficientSet(window=w, coefficients={})

    def test_nonfinite_rejected(self):
        w = sw.IndexWindow(0, 0)
        idx = sw.WaveletIndex(epsilon=(1,), m=0, n=(0,))
        with pytest.raises(ExpansionError):
            sw.CoefficientSet(window=w, coefficients={idx: float("nan")})


class TestAtoms:
    def test_unit_norm_1d(self, ws, expansion_grid):
        idx = sw.WaveletIndex(epsilon=(1,), m=2, n=(3,))
        vals = sw.tensor_atom(ws, idx, expansion_grid.points())
        norm = np.sqrt(np.sum(vals ** 2) * expansion_grid.spacing)
        assert abs(norm - 1.0) < 1e-9

    def test_unit_norm_2d(self, ws):
        g = sw.Grid1D.from_interval(-20.0, 20.0, 1281)
        idx = sw.WaveletIndex(epsilon=(1, 0), m=1, n=(2, -1))
        pts = np.stack(np.meshgrid(g.points(), g.points(), indexing="ij"),
                       axis=-1).reshape(-1, 2)
        vals = sw.tensor_atom(ws, idx, pts)
        norm = np.sqrt(np.sum(vals ** 2) * g.spacing ** 2)
        assert abs(norm - 1.0) < 1e-6

    def test_matches_scaled_translate(self, ws):
        x = np.linspace(-2.0, 2.0, 33)
        idx = sw.WaveletIndex(epsilon=(1,), m=3, n=(-5,))
        got = sw.tensor_atom(ws, idx, x)
        want = 2.0 ** 1.5 * ws.interpolator("psi")(8.0 * x + 5.0)
        assert np.max(np.abs(got - want)) < 1e-13


class TestContinuousTransform:
    def test_scale_validated(self, ws, band_function):
        with pytest.raises(ExpansionError, match="positive"):
            sw.cwt(ws, band_function, 0.0, 0.0)

    def test_zero_mean_annihilates_constants(self, ws, expansion_grid):
        # int psi = 0: the transform of the constant 1 is pure truncation
        # error of the analyzing window at this scale
        one = sw.SampledFunction(expansion_grid, np.ones(expansion_grid.count))
        assert abs(sw.cwt(ws, one, 0.3, 0.7)) < 1e-8

    def test_dyadic_samples_equal_coefficients(self, ws, band_function):
        # the two coefficient routes inside analyze agree to 1e-9 or raise
        cs = sw.analyze(ws, band_function, sw.IndexWindow(2, 4),
                        cross_check=True)
        assert len(cs.coefficients) == len(sw.IndexWindow(2, 4))


class TestAnalysis:
    def test_single_coefficient_oracle(self, ws, band_function, expansion_grid):
        cs = sw.analyze(ws, band_function, sw.IndexWindow(2, 8),
                        cross_check=False)
        idx = sw.WaveletIndex(epsilon=(1,), m=1, n=(3,))
        atom = sw.tensor_atom(ws, idx, expansion_grid.points())
        manual = np.dot(band_function.values * expansion_grid.trapezoid_weights(),
                        atom)
        assert abs(cs.coefficients[idx] - manual) < 1e-13

    def test_dimension_mismatch(self, ws, band_function):
        with pytest.raises(ExpansionError):
            sw.analyze(ws, band_function, sw.IndexWindow(1, 1, d=2))

    def test_partial_sum_error_shrinks_with_window(self, ws, band_function,
                                                   expansion_grid):
        errs = []
        for (M, N) in ((2, 8), (4, 16)):
            cs = sw.analyze(ws, band_function, sw.IndexWindow(M, N),
                            cross_check=False)
            ps = sw.synthesize_partial(ws, cs, expansion_grid)
            errs.append(np.max(np.abs(ps.values - band_function.values)))
        assert errs[1] < errs[0]

    def test_bessel_inequality(self, ws, band_function):
        gap = sw.bessel_gap(ws, band_function, sw.IndexWindow(2, 8))
        assert gap["excess"] <= 1e-9
        assert gap["coefficient_energy"] > 0.9  # most energy captured

    def test_2d_separable_coefficients(self, ws):
        from subexp_wavelets.testfuncs import gaussian, sample_2d
        g = sw.Grid1D.from_interval(-16.0, 16.0, 1025)
        f2 = sample_2d(gaussian(), gaussian(), g, g)
        w = sw.IndexWindow(1, 2, d=2)
        cs = sw.analyze(ws, f2, w)
        idx = sw.WaveletIndex(epsilon=(1, 1), m=0, n=(1, -1))
        pts = np.stack(np.meshgrid(g.points(), g.points(), indexing="ij"),
                       axis=-1).reshape(-1, 2)
        atom = sw.tensor_atom(ws, idx, pts).reshape(1025, 1025)
        wts = g.trapezoid_weights()
        manual = np.sum(f2.values * atom * wts[:, None] * wts[None, :])
        assert abs(cs.coefficients[idx] - manual) < 1e-12


class TestParseval:
    def test_self_pairing_of_wavelet(self, ws, expansion_grid):
        # f = g = the mother wavelet: the pairing is ||psi||^2 = 1 and the
        # window (2, 4) already contains all significant coefficients
        f = sw.SampledFunction(expansion_grid,
                               ws.evaluate_psi(expansion_grid.points()))
        chk = sw.parseval_check(ws, f, f, sw.IndexWindow(2, 4))
        assert abs(chk["lhs"] - 1.0) < 1e-10
        assert chk["gap"] < 1e-10

    def test_point_mass_dual(self, ws, expansion_grid):
        # f = delta at x0: lhs is g(x0), coefficients are atom values at x0
        x0 = 0.35
        delta = sw.DualRepresentative(points=np.array([x0]),
                                      weights=np.array([1.0]))
        g = sw.SampledFunction(expansion_grid,
                               ws.evaluate_psi(expansion_grid.points()))
        idx = sw.WaveletIndex(epsilon=(1,), m=1, n=(-2,))
        want = ws.atom_values(1, 1, -2, np.array([x0]))[0]
        assert abs(delta.coefficient(ws, idx) - want) < 1e-14
        # pair() reads g through a cubic spline of its samples: O(h^4)
        assert abs(delta.pair(g) - ws.evaluate_psi(x0)[0]) < 1e-7

    def test_derivative_dual_moves_onto_partner(self, ws, expansion_grid):
        # delta' pairs to minus the derivative of the partner at the point
        x0 = -0.6
        dual = sw.DualRepresentative(points=np.array([x0]),
                                     weights=np.array([1.0]),
                                     derivative_order=1)
        g = sw.SampledFunction(expansion_grid,
                               ws.evaluate_psi(expansion_grid.points()))
        want = -ws.evaluate_psi(np.array([x0]), 1)[0]
        # spline-derivative accuracy is O(h^3) on the 1/128 sample grid
        assert abs(dual.pair(g) - want) < 1e-4


class TestSerialization:
    def test_csv_roundtrip(self, ws, band_function, tmp_path):
        from subexp_wavelets.expansion import (coefficients_header,
                                               coefficients_to_csv)
        w = sw.IndexWindow(1, 2)
        cs = sw.analyze(ws, band_function, w, cross_check=False,
                        source_descriptor="band")
        path = tmp_path / "coeffs.csv"
        coefficients_to_csv(cs, path)
        with open(path) as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["epsilon_bits", "m", "n_1", "re", "im"]
        assert len(rows) == 1 + len(w)
        header = json.loads(coefficients_header(cs, ws))
        assert header["window"] == {"M": 1, "N": 2, "d": 1}
        assert header["certificate_digest"] == ws.certificate_digest()
        assert header["source"] == "band"
