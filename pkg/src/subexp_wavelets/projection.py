"""Multiresolution projection kernels, projections, and their certificates.

The level-0 kernel is the lattice sum ``q_0(x, y) = sum_k phi(x - k) phi(y - k)``
(phi is real, so no conjugates survive), and ``q_m(x, y) = 2^{md} q_0(2^m x,
2^m y)``.  Projections are computed in coefficient form,
``sum_k <f, phi_{m,k}> phi_{m,k}``, which keeps every table lookup near the
origin regardless of the level; the kernel form is retained for spot checks.

Also here: the iterated-primitive decomposition ``g = d^r/dy^r g_r`` for a
function with vanishing moments, built from one-sided tail integrals
(``-int_y^inf (y-w)^{r-1} g`` for y > 0, the mirrored prefix form for y < 0).
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass
from math import lgamma

import numpy as np
from scipy.integrate import cumulative_simpson

from . import metrics, numerics
from .construction import TABLE_HALF, WaveletSystem
from .metrics import DecayFit, SeminormParams
from .numerics import Grid1D, SampledFunction

logger = logging.getLogger(__name__)

_TAIL_TARGET = 1e-12
BOUNDARY_MASS_WARN = 1e-8


class ProjectionError(ValueError):
    pass


def _phi_envelope(ws: WaveletSystem) -> DecayFit:
    """Subexponential envelope of |phi| on [5, 40], exponent fixed at 1/rho2."""
    grid, vals = ws.dense_table("phi")
    x = grid.points()
    sel = (x >= 5.0) & (x <= 40.0)
    samples = np.column_stack([x[sel], np.abs(vals[sel])])
    return metrics.subexp_decay_fit(samples, "fixed", rho=ws.rho2)


def _default_truncation(ws: WaveletSystem, fit: DecayFit) -> tuple[int, float]:
    """Smallest K whose lattice-tail estimate drops below 1e-12.

    Each dropped term is a product of two phi factors at distance > K from
    their centers, so the tail is summed with the envelope squared.
    """
    def tail(K):
        j = np.arange(K + 1, K + 400, dtype=float)
        term = (fit.amplitude_C * np.exp(-fit.rate_c * j ** fit.exponent)) ** 2
        return 2.0 * float(np.sum(term))

    for K in range(4, int(TABLE_HALF)):
        if tail(K) < _TAIL_TARGET:
            return K, tail(K)
    raise ProjectionError("no truncation radius reaches the tail target")


@dataclass(frozen=True)
class ProjectionKernel:
    ws: WaveletSystem
    level: int
    truncation_radius: int
    dimension: int
    tail_bound: float

    def __post_init__(self):
        if self.dimension not in (1, 2):
            raise ProjectionError("dimension must be 1 or 2")


def build_kernel(ws: WaveletSystem, level: int = 0, dimension: int = 1,
                 truncation_radius: int | None = None) -> ProjectionKernel:
    fit = _phi_envelope(ws)
    if truncation_radius is None:
        truncation_radius, tail = _default_truncation(ws, fit)
    else:
        j = np.arange(truncation_radius + 1, truncation_radius + 400, dtype=float)
        tail = 2.0 * float(np.sum(
            (fit.amplitude_C * np.exp(-fit.rate_c * j ** fit.exponent)) ** 2))
    return ProjectionKernel(ws=ws, level=level, truncation_radius=truncation_radius,
                            dimension=dimension, tail_bound=tail)


# ---------------------------------------------------------------------------
# kernel evaluation
# ---------------------------------------------------------------------------

def _kernel_eval_1d(pk: ProjectionKernel, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """q_level on scalar coordinates (already broadcast to a common shape)."""
    scale = 2.0 ** pk.level
    su, sv = scale * u, scale * v
    if np.max(np.abs(su - sv), initial=0.0) + pk.truncation_radius > TABLE_HALF:
        raise ProjectionError("kernel window")
    phi = pk.ws.interpolator("phi")
    lo = int(np.floor(min(su.min(), sv.min()))) - pk.truncation_radius
    hi = int(np.ceil(max(su.max(), sv.max()))) + pk.truncation_radius
    out = np.zeros_like(su)
    for k in range(lo, hi + 1):
        # terms beyond the truncation radius of *both* points are dropped
        near = (np.abs(su - k) <= pk.truncation_radius) | \
               (np.abs(sv - k) <= pk.truncation_radius)
        if np.any(near):
            out[near] += phi(su[near] - k) * phi(sv[near] - k)
    return scale * out


def kernel_eval(pk: ProjectionKernel, x, y):
    """Truncated lattice sum q_m(x, y); tensor product of 1-D factors in d = 2."""
    if pk.dimension == 1:
        u, v = np.broadcast_arrays(np.asarray(x, dtype=float),
                                   np.asarray(y, dtype=float))
        scalar = u.ndim == 0
        out = _kernel_eval_1d(pk, np.atleast_1d(u).astype(float),
                              np.atleast_1d(v).astype(float))
        return float(out[0]) if scalar else out
    x = np.atleast_2d(np.asarray(x, dtype=float))
    y = np.atleast_2d(np.asarray(y, dtype=float))
    out = np.ones(max(x.shape[0], y.shape[0]))
    for i in range(2):
        u, v = np.broadcast_arrays(x[:, i], y[:, i])
        out = out * _kernel_eval_1d(pk, u.astype(float), v.astype(float))
    return out


# ---------------------------------------------------------------------------
# projection
# ---------------------------------------------------------------------------

def _coefficient_project_1d(pk: ProjectionKernel, f: SampledFunction) -> np.ndarray:
    (grid,) = f.grids
    x = grid.points()
    scale = 2.0 ** pk.level
    if scale * grid.extent < 1.0:
        raise ProjectionError("window too small for level shifts")
    fw = f.values * grid.trapezoid_weights()
    phi = pk.ws.interpolator("phi")
    lo = int(np.floor(scale * x[0])) - pk.truncation_radius
    hi = int(np.ceil(scale * x[-1])) + pk.truncation_radius
    amp = 2.0 ** (pk.level / 2.0)
    out = np.zeros(x.size, dtype=complex)
    for start in range(lo, hi + 1, 512):
        ks = np.arange(start, min(start + 512, hi + 1))
        A = amp * phi(scale * x[None, :] - ks[:, None])  # atoms phi_{m,k} on grid
        out += (A @ fw) @ A
    return out


def project(pk: ProjectionKernel, f: SampledFunction,
            method: str = "coefficient") -> SampledFunction:
    """Orthogonal projection of ``f`` onto the level-m resolution space.

    ``method="coefficient"`` (default) computes sum_k <f, phi_{m,k}> phi_{m,k};
    ``method="kernel"`` integrates f against the kernel row by row and is only
    meant for cross-checks on small grids.
    """
    boundary = boundary_mass(f)
    if boundary > BOUNDARY_MASS_WARN:
        logger.warning("project: boundary mass %.3e visible at window edges",
                       boundary)
    if pk.dimension == 1:
        if method == "coefficient":
            return SampledFunction(f.grid, _coefficient_project_1d(pk, f))
        if method == "kernel":
            (grid,) = f.grids
            vals = project_at(pk, f, grid.points())
            return SampledFunction(f.grid, vals)
        raise ProjectionError(f"unknown projection method {method!r}")
    # d = 2, separable: apply the 1-D projection along each axis
    gx, gy = f.grids
    pk1 = ProjectionKernel(ws=pk.ws, level=pk.level,
                           truncation_radius=pk.truncation_radius, dimension=1,
                           tail_bound=pk.tail_bound)
    vals = f.values
    rows = np.array([_coefficient_project_1d(
        pk1, SampledFunction(gy, vals[i, :])) for i in range(gx.count)])
    cols = np.array([_coefficient_project_1d(
        pk1, SampledFunction(gx, rows[:, j])) for j in range(gy.count)]).T
    return SampledFunction(f.grid, cols)


def project_at(pk: ProjectionKernel, f: SampledFunction, x_points) -> np.ndarray:
    """Kernel-form projection values int f(y) q_m(x, y) dy at chosen points."""
    (grid,) = f.grids
    y = grid.points()
    fw = f.values * grid.trapezoid_weights()
    x_points = np.atleast_1d(np.asarray(x_points, dtype=float))
    out = np.empty(x_points.size, dtype=complex)
    for i, xp in enumerate(x_points):
        row = _kernel_eval_1d(pk, np.full(y.size, xp), y.copy())
        out[i] = np.dot(fw, row)
    return out


def boundary_mass(f: SampledFunction) -> float:
    """Largest |f| over the outermost 1% of grid points on every axis."""
    vals = np.abs(f.values)
    worst = 0.0
    for axis, g in enumerate(f.grids):
        edge = max(1, g.count // 100)
        sl = [slice(None)] * vals.ndim
        for cut in (slice(0, edge), slice(-edge, None)):
            sl[axis] = cut
            worst = max(worst, float(np.max(vals[tuple(sl)])))
    return worst


# ---------------------------------------------------------------------------
# certificates
# ---------------------------------------------------------------------------

def kernel_decay_certificate(pk: ProjectionKernel, probe_count: int = 16,
                             u_max: float = 20.0, n_u: int = 401) -> DecayFit:
    """Envelope fit of sup_x |q_0(x, x + u)| with the exponent pinned to 1/rho2.

    By integer-shift invariance x only needs to range over one period [0, 1).
    """
    xs = np.linspace(0.0, 1.0, probe_count, endpoint=False)
    u = np.linspace(0.0, u_max, n_u)
    sup = np.zeros(n_u)
    for xp in xs:
        row = np.abs(_kernel_eval_1d(pk, np.full(n_u, xp), xp + u))
        sup = np.maximum(sup, row)
    samples = np.column_stack([u, sup])
    try:
        return metrics.subexp_decay_fit(samples, "fixed", rho=pk.ws.rho2)
    except metrics.MetricsError as exc:
        raise ProjectionError(f"degenerate fit: {exc}") from exc


def _phi_lattice_moments(ws: WaveletSystem, max_degree: int) -> np.ndarray:
    """M_j = int phi(u) u^j du over the long-range table, j = 0..max_degree."""
    grid, vals = ws.wide_table("phi")
    u = grid.points()
    w = grid.trapezoid_weights()
    return np.array([np.dot(vals * w, u ** j) for j in range(max_degree + 1)])


def polynomial_reproduction(pk: ProjectionKernel, max_degree: int) -> dict:
    """Deviation of int q_0(x, y) (y - x)^alpha dy from its ideal value.

    The y-integral is expanded per lattice site: with u = y - k it splits into
    translate moments M_j of phi, leaving the absolutely convergent sum
    sum_k phi(x - k) * sum_j C(alpha, j) (k - x)^(alpha - j) M_j, which the
    long-range table covers to |k - x| ~ 1400 (no y-truncation error at all).
    Ideal values: 1 at degree 0, 0 for 1 <= alpha <= max_degree.
    """
    if max_degree > 6:
        raise ProjectionError("polynomial degree capped at 6")
    ws = pk.ws
    M = _phi_lattice_moments(ws, max_degree)
    grid, table = ws.wide_table("phi")
    # probes on the table lattice so every phi(x - k) is an exact table read
    xs = np.arange(32) / 16.0
    kmax = int(grid.last) - 3
    ks = np.arange(-kmax, kmax + 1)
    idx_base = grid.index_of(xs[:, None] - ks[None, :])
    phi_vals = table[idx_base]  # (32, nk)
    dev = {}
    for alpha in range(max_degree + 1):
        js = np.arange(alpha + 1)
        binom = np.exp(lgamma(alpha + 1) - np.array(
            [lgamma(j + 1) + lgamma(alpha - j + 1) for j in js]))
        km = ks[None, :] - xs[:, None]
        inner = np.zeros_like(phi_vals)
        for j in js:
            inner += binom[j] * M[j] * km ** (alpha - j)
        total = np.sum(phi_vals * inner, axis=1)
        target = 1.0 if alpha == 0 else 0.0
        dev[alpha] = float(np.max(np.abs(total - target)))
    return {"max_deviation_per_degree": dev, "probes": 32,
            "lattice_extent": int(kmax)}


def mra_convergence_experiment(ws: WaveletSystem, f: SampledFunction,
                               levels, seminorm_params: SeminormParams,
                               seminorm_probes=None) -> list[dict]:
    """Rows (m, sup_error, seminorm, boundary_mass) for q_m f across levels.

    sup_error is the grid sup of |q_m f - f|; the seminorm column is the
    fixed-(h, c) weighted estimate of q_m f, whose boundedness across m is the
    second ingredient of the projection-convergence argument.
    """
    if seminorm_probes is None:
        seminorm_probes = np.linspace(-8.0, 8.0, 161)
    bmass = boundary_mass(f)
    rows = []
    for m in levels:
        pk = build_kernel(ws, level=m, dimension=1)
        qf = project(pk, f)
        sup_err = float(np.max(np.abs(qf.values - f.values)))
        handle = _projection_handle(pk, f)
        sem = metrics.seminorm_estimate(handle, seminorm_params, seminorm_probes)
        rows.append({"m": int(m), "sup_error": sup_err, "seminorm": sem,
                     "boundary_mass": bmass})
    return rows


def _projection_handle(pk: ProjectionKernel, f: SampledFunction):
    """(x, order) handle for q_m f: derivatives fall on the atoms exactly."""
    (grid,) = f.grids
    x = grid.points()
    scale = 2.0 ** pk.level
    fw = f.values * grid.trapezoid_weights()
    phi0 = pk.ws.interpolator("phi")
    lo = int(np.floor(scale * x[0])) - pk.truncation_radius
    hi = int(np.ceil(scale * x[-1])) + pk.truncation_radius
    ks = np.arange(lo, hi + 1)
    amp = 2.0 ** (pk.level / 2.0)
    coeffs = None

    def handle(pts, order=0):
        nonlocal coeffs
        if coeffs is None:
            cs = []
            for start in range(0, ks.size, 512):
                kc = ks[start:start + 512]
                cs.append(amp * phi0(scale * x[None, :] - kc[:, None]) @ fw)
            coeffs = np.concatenate(cs)
        phi_d = pk.ws.interpolator("phi", order)
        pts = np.atleast_1d(np.asarray(pts, dtype=float))
        out = np.zeros(pts.size, dtype=complex)
        damp = amp * scale ** order
        for start in range(0, ks.size, 512):
            kc = ks[start:start + 512]
            A = damp * phi_d(scale * pts[None, :] - kc[:, None])
            out += coeffs[start:start + 512] @ A
        return out

    return handle


def convergence_csv(rows: list[dict], path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["m", "sup_error", "seminorm", "boundary_mass"])
        for row in rows:
            writer.writerow([row["m"], repr(row["sup_error"]),
                             repr(row["seminorm"]), repr(row["boundary_mass"])])


# ---------------------------------------------------------------------------
# iterated primitives
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PrimitiveDecomposition:
    r: int
    g: SampledFunction
    g_r: SampledFunction
    bound_constants: dict


def _moment_table(vals: np.ndarray, x: np.ndarray, w: np.ndarray, r: int):
    return np.array([np.dot(vals * w, x ** j) for j in range(r + 1)])


def primitive_decomposition_1d(g: SampledFunction, r: int,
                               rho: float = 2.0) -> PrimitiveDecomposition:
    """Write g as the r-th derivative of a single primitive g_r.

    Requires the moments of g through order r to vanish (else the one-sided
    primitives fail to decay); verifies d^r g_r = g by repeated 4th-order
    stencil differentiation and records a fitted decay bound for g_r.
    """
    if r < 1:
        raise ProjectionError("order r must be >= 1")
    (grid,) = g.grids
    x = grid.points()
    h = grid.spacing
    vals = np.real_if_close(g.values, tol=1e6)
    if np.iscomplexobj(vals):
        vals = vals.real
    w = grid.trapezoid_weights()
    moments = _moment_table(vals, x, w, r)
    scales = np.array([max(1.0, abs(np.dot(np.abs(vals) * w, np.abs(x) ** j)))
                       for j in range(r + 1)])
    if np.any(np.abs(moments) / scales > 1e-8):
        raise ProjectionError("moment precondition")

    # prefix integrals P_j(y) = int_{x_min}^y w^j g(w) dw (Simpson)
    prefix = [cumulative_simpson(vals * x ** j, dx=h, initial=0.0)
              for j in range(r)]
    totals = [p[-1] for p in prefix]
    # binomial expansion of (y - w)^{r-1}; right form uses the tail integrals
    fact = np.exp(lgamma(r))
    left = np.zeros_like(x)
    right = np.zeros_like(x)
    for j in range(r):
        binom = np.exp(lgamma(r) - lgamma(j + 1) - lgamma(r - j))
        term = binom * x ** (r - 1 - j) * (-1.0) ** j
        left += term * prefix[j]
        right += term * (prefix[j] - totals[j])
    # right form: -int_y^inf (y-w)^{r-1} g = sum_j term_j (P_j - T_j)
    g_r = SampledFunction(grid, np.where(x > 0, right, left) / fact)

    # verification: r-fold 4th-order first-derivative stencil, interior only
    d = g_r.values.real.copy()
    for _ in range(r):
        dd = np.full_like(d, np.nan)
        dd[2:-2] = (d[:-4] - 8 * d[1:-3] + 8 * d[3:-1] - d[4:]) / (12 * h)
        d = dd
    interior = slice(2 * r, x.size - 2 * r)
    mismatch = float(np.max(np.abs(d[interior] - vals[interior])))
    ref = max(float(np.max(np.abs(vals))), 1e-30)
    if mismatch / ref > 1e-5:
        raise ProjectionError("decomposition failed")

    if np.max(np.abs(g_r.values)) > 0:
        try:
            half = x.size // 2
            fit = metrics.subexp_decay_fit(
                np.column_stack([x[half:], np.abs(g_r.values[half:])]),
                "fixed", rho=rho)
            bounds = {"amplitude_C": fit.amplitude_C, "rate_c": fit.rate_c,
                      "exponent": fit.exponent, "r_squared": fit.r_squared}
        except metrics.MetricsError:
            bounds = {"amplitude_C": float(np.max(np.abs(g_r.values))),
                      "rate_c": 0.0, "exponent": 1.0 / rho, "r_squared": 0.0}
    else:
        bounds = {"amplitude_C": 0.0, "rate_c": 0.0, "exponent": 1.0 / rho,
                  "r_squared": 1.0}
    bounds["derivative_mismatch"] = mismatch / ref
    return PrimitiveDecomposition(r=r, g=g, g_r=g_r, bound_constants=bounds)
