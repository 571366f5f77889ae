"""Library of analytic test functions used by experiments and the CLI.

Gaussians and their derivatives (closed forms via Hermite polynomials), and
"band" functions whose Fourier transform is a compactly supported bump on a
chosen frequency interval — the natural moment-vanishing inputs for the
expansion experiments, since their spectra avoid the origin entirely.
"""

from __future__ import annotations

import re

import numpy as np
from numpy.polynomial.hermite import hermval

from .numerics import Grid1D, SampledFunction


class TestFunctionError(ValueError):
    pass


def gaussian(center: float = 0.0, scale: float = 1.0):
    """x -> exp(-((x - center)/scale)^2)."""
    def f(x):
        u = (np.asarray(x, dtype=float) - center) / scale
        return np.exp(-u * u)
    f.description = f"gaussian(center={center},scale={scale})"
    return f


def gaussian_derivative(order: int):
    """k-th derivative of exp(-x^2): (-1)^k H_k(x) exp(-x^2)."""
    if order < 0:
        raise TestFunctionError("derivative order must be nonnegative")
    e_k = np.zeros(order + 1)
    e_k[order] = 1.0

    def f(x):
        x = np.asarray(x, dtype=float)
        return (-1.0) ** order * hermval(x, e_k) * np.exp(-x * x)
    f.description = f"gaussian-d{order}"
    return f


def gevrey_band(xi0: float, xi1: float, rho: float = 2.0,
                n_quad: int = 4096):
    """Real function whose spectrum is a Gevrey bump on [xi0, xi1] (+ mirror).

    f(x) = (1/pi) int_{xi0}^{xi1} A(xi) cos(x xi) dxi with
    A(xi) = exp(-(1 - u^2)^{-1/(rho-1)}), u the affine map of [xi0, xi1] onto
    [-1, 1]; normalized to unit L2 norm.  When 0 < xi0 all moments vanish.
    """
    if not (xi1 > xi0 >= 0):
        raise TestFunctionError("need 0 <= xi0 < xi1")
    if rho <= 1:
        raise TestFunctionError("Gevrey order must exceed 1")
    xi = np.linspace(xi0, xi1, n_quad)
    u = (2 * xi - xi0 - xi1) / (xi1 - xi0)
    amp = np.zeros(n_quad)
    inner = np.abs(u) < 1
    amp[inner] = np.exp(-(1.0 - u[inner] ** 2) ** (-1.0 / (rho - 1.0)))
    w = np.full(n_quad, xi[1] - xi[0])
    w[0] *= 0.5
    w[-1] *= 0.5
    norm = np.sqrt(np.sum(amp * amp * w) / np.pi)
    coeff = amp * w / (np.pi * norm)

    def f(x):
        x = np.asarray(x, dtype=float)
        scalar = x.ndim == 0
        pts = np.atleast_1d(x)
        out = np.empty(pts.size)
        chunk = 4096
        for i in range(0, pts.size, chunk):
            out[i:i + chunk] = np.cos(np.outer(pts[i:i + chunk], xi)) @ coeff
        return float(out[0]) if scalar else out
    f.description = f"gevrey-band({xi0:.6g},{xi1:.6g})"
    f.band = (xi0, xi1)
    return f


def sample(fn, grid: Grid1D) -> SampledFunction:
    return SampledFunction(grid, np.asarray(fn(grid.points()), dtype=complex))


def sample_2d(fn_x, fn_y, gx: Grid1D, gy: Grid1D) -> SampledFunction:
    vals = np.outer(fn_x(gx.points()), fn_y(gy.points()))
    return SampledFunction((gx, gy), vals.astype(complex))


_PI_TOKEN = re.compile(r"^(-?\d*\.?\d*)\s*pi$")


def parse_scalar(token: str) -> float:
    """Parse '2pi', 'pi', '1.5pi', or a plain decimal."""
    token = token.strip().lower()
    match = _PI_TOKEN.match(token)
    if match:
        mult = match.group(1)
        if mult in ("", "-"):
            mult += "1"
        return float(mult) * np.pi
    try:
        return float(token)
    except ValueError as exc:
        raise TestFunctionError(f"cannot parse scalar {token!r}") from exc


def parse_spec(spec: str):
    """Resolve a CLI test-function descriptor to a callable.

    Supported: 'gaussian', 'gaussian:center,scale', 'gaussian-d<k>',
    'gevrey-band:xi0,xi1[,rho]'.
    """
    name, _, args = spec.partition(":")
    name = name.strip().lower()
    if name == "gaussian":
        if args:
            parts = [parse_scalar(p) for p in args.split(",")]
            if len(parts) == 1:
                return gaussian(scale=parts[0])
            return gaussian(center=parts[0], scale=parts[1])
        return gaussian()
    match = re.match(r"^gaussian-d(\d+)$", name)
    if match:
        return gaussian_derivative(int(match.group(1)))
    if name == "gevrey-band":
        parts = [parse_scalar(p) for p in args.split(",") if p.strip()]
        if len(parts) == 2:
            return gevrey_band(parts[0], parts[1])
        if len(parts) == 3:
            return gevrey_band(parts[0], parts[1], rho=parts[2])
        raise TestFunctionError("gevrey-band needs xi0,xi1[,rho]")
    raise TestFunctionError(f"unknown test function {spec!r}")
