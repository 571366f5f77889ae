"""Uniform grids, trapezoid quadrature, and direct band-limited synthesis.

Everything downstream (wavelet construction, projections, expansions) runs on
these primitives.  Conventions fixed here once and for all:

* forward transform  ``F g(xi) = int g(x) exp(-i x xi) dx``,
* inverse transform carries the single ``1/(2 pi)`` factor,
* all integrals are composite trapezoid sums on uniform grids.  For smooth
  integrands that vanish at both grid ends the rule is the periodic trapezoid
  rule and converges faster than any power of the spacing.

Values are complex throughout, even when a quantity is analytically real;
realness is asserted by tests, never assumed by code.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

DERIVATIVE_ORDER_CAP = 60


class NumericsError(ValueError):
    """Raised on invalid grids, samples, or operation parameters."""


@dataclass(frozen=True)
class Grid1D:
    """Uniform grid ``x_i = origin + i * spacing`` for ``0 <= i < count``."""

    origin: float
    spacing: float
    count: int

    def __post_init__(self):
        if not (self.spacing > 0):
            raise NumericsError("grid spacing must be positive")
        if self.count < 2:
            raise NumericsError("grid needs at least 2 points")

    @classmethod
    def from_interval(cls, lo: float, hi: float, count: int) -> "Grid1D":
        if not (hi > lo):
            raise NumericsError("empty interval")
        return cls(origin=lo, spacing=(hi - lo) / (count - 1), count=count)

    def points(self) -> np.ndarray:
        return self.origin + self.spacing * np.arange(self.count)

    @property
    def extent(self) -> float:
        return self.spacing * (self.count - 1)

    @property
    def last(self) -> float:
        return self.origin + self.extent

    def trapezoid_weights(self) -> np.ndarray:
        w = np.full(self.count, self.spacing)
        w[0] *= 0.5
        w[-1] *= 0.5
        return w

    def index_of(self, x: np.ndarray) -> np.ndarray:
        """Nearest grid index of each ``x`` (no bounds check)."""
        return np.rint((np.asarray(x, dtype=float) - self.origin) / self.spacing).astype(np.int64)


def _as_grids(grid) -> tuple[Grid1D, ...]:
    if isinstance(grid, Grid1D):
        return (grid,)
    return tuple(grid)


@dataclass(frozen=True)
class SampledFunction:
    """Complex values on a uniform grid (or a product of up to 3 grids)."""

    grid: object  # Grid1D or tuple of Grid1D
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        grids = _as_grids(self.grid)
        if not 1 <= len(grids) <= 3:
            raise NumericsError("dimension must be 1, 2, or 3")
        vals = np.asarray(self.values, dtype=complex)
        shape = tuple(g.count for g in grids)
        if vals.shape != shape:
            if vals.size == int(np.prod(shape)):
                vals = vals.reshape(shape)
            else:
                raise NumericsError("values length does not match grid point count")
        if not (np.all(np.isfinite(vals.real)) and np.all(np.isfinite(vals.imag))):
            raise NumericsError("invalid samples")
        object.__setattr__(self, "values", vals)

    @property
    def grids(self) -> tuple[Grid1D, ...]:
        return _as_grids(self.grid)

    @property
    def dimension(self) -> int:
        return len(self.grids)


@dataclass(frozen=True)
class SpectrumOnBand:
    """Fourier-side function with exact compact-support bookkeeping.

    ``declared_support`` is a union of at most two closed intervals inside
    ``band``; values are *literal* zeros at grid points outside it.
    """

    band: tuple[float, float]
    grid: Grid1D
    values: np.ndarray = field(repr=False)
    declared_support: tuple[tuple[float, float], ...]

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex)
        if vals.shape != (self.grid.count,):
            raise NumericsError("values length does not match grid point count")
        if not (np.all(np.isfinite(vals.real)) and np.all(np.isfinite(vals.imag))):
            raise NumericsError("invalid samples")
        if not 1 <= len(self.declared_support) <= 2:
            raise NumericsError("declared_support must be 1 or 2 intervals")
        lo, hi = self.band
        for (slo, shi) in self.declared_support:
            if slo < lo - 1e-12 or shi > hi + 1e-12:
                raise NumericsError("band does not contain declared_support")
        outside = ~self.support_mask()
        if np.any(vals[outside] != 0):
            raise NumericsError("nonzero spectrum value outside declared_support")
        object.__setattr__(self, "values", vals)

    def support_mask(self) -> np.ndarray:
        xi = self.grid.points()
        mask = np.zeros(self.grid.count, dtype=bool)
        for (slo, shi) in self.declared_support:
            mask |= (xi >= slo - 1e-12) & (xi <= shi + 1e-12)
        return mask


def integrate(f: SampledFunction) -> complex:
    """Trapezoid approximation of the integral of ``f`` over its grid extent."""
    out = f.values
    for axis, g in reversed(list(enumerate(f.grids))):
        w = g.trapezoid_weights()
        out = np.tensordot(out, w, axes=([axis], [0]))
    return complex(out)


def inner_product(f: SampledFunction, g: SampledFunction) -> complex:
    """Sesquilinear L2 product ``int f conj(g)``; grids must match exactly."""
    if f.grids != g.grids:
        raise NumericsError("grid mismatch")
    return integrate(SampledFunction(f.grid, f.values * np.conj(g.values)))


def pairing(f: SampledFunction, g: SampledFunction) -> complex:
    """Bilinear dual pairing ``int f g`` (no conjugation)."""
    if f.grids != g.grids:
        raise NumericsError("grid mismatch")
    return integrate(SampledFunction(f.grid, f.values * g.values))


def norm_l2(f: SampledFunction) -> float:
    return float(np.sqrt(inner_product(f, f).real))


def synthesize_values(spec: SpectrumOnBand, x_points, order: int = 0,
                      chunk: int = 2048) -> np.ndarray:
    """Evaluate ``(1/2pi) int (i xi)^order spec(xi) exp(i x xi) dxi`` at ``x_points``.

    The quadrature runs only over grid points inside the declared support
    (the rest are exact zeros).  Direct O(N*M); deterministic summation order.
    """
    if order < 0 or order > DERIVATIVE_ORDER_CAP:
        raise NumericsError("derivative order cap")
    x = np.atleast_1d(np.asarray(x_points, dtype=float))
    if x.size == 0:
        raise NumericsError("no evaluation points")
    if not np.all(np.isfinite(x)):
        raise NumericsError("invalid samples")
    mask = spec.support_mask()
    xi = spec.grid.points()[mask]
    w = spec.grid.trapezoid_weights()[mask]
    amp = spec.values[mask] * w
    if order:
        amp = amp * (1j * xi) ** order
    amp = amp / (2.0 * np.pi)
    out = np.empty(x.shape, dtype=complex)
    for i in range(0, x.size, chunk):
        xs = x[i:i + chunk]
        out[i:i + chunk] = np.exp(1j * np.outer(xs, xi)) @ amp
    return out


def synthesize(spec: SpectrumOnBand, x_grid: Grid1D) -> SampledFunction:
    """Inverse-transform ``spec`` onto a physical grid."""
    return SampledFunction(x_grid, synthesize_values(spec, x_grid.points()))


def spectral_derivative(spec: SpectrumOnBand, order: int, x_points) -> np.ndarray:
    """Derivative of the band-limited synthesis, computed exactly as the
    synthesis of ``(i xi)^order * spec`` (no finite differencing)."""
    return synthesize_values(spec, x_points, order=order)


def forward_transform_values(f: SampledFunction, xi_points) -> np.ndarray:
    """Trapezoid approximation of ``int f(x) exp(-i x xi) dx`` (1-D only)."""
    if f.dimension != 1:
        raise NumericsError("forward transform implemented for 1-D samples")
    (g,) = f.grids
    x = g.points()
    amp = f.values * g.trapezoid_weights()
    xi = np.atleast_1d(np.asarray(xi_points, dtype=float))
    out = np.empty(xi.shape, dtype=complex)
    chunk = 2048
    for i in range(0, xi.size, chunk):
        out[i:i + chunk] = np.exp(-1j * np.outer(xi[i:i + chunk], x)) @ amp
    return out
