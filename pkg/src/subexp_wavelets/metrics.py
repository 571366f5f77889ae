"""Weighted seminorms, decay-rate fitting, and sequence-norm certificates.

Three families of measurements live here:

* discretized Gelfand--Shilov seminorms
  ``sup_x sup_beta (h^beta / beta!^rho1) e^{c |x|^{1/rho2}} |f^(beta)(x)|``,
* subexponential envelope fits ``|f(x)| ~ C exp(-c x^{1/rho})`` with the
  exponent either pinned to ``1/rho2`` or grid-searched,
* weighted sup norms on wavelet coefficient sets penalizing large ``|m|``
  and large ``|n / 2^m|``, and the largest feasible weight scale ``k``.

Every sup over an infinite set is reported as a lower bound from finite
probes; reports never claim certified upper bounds.
"""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import dataclass, field
from math import lgamma

import numpy as np

logger = logging.getLogger(__name__)

OVERFLOW_EXPONENT = 700.0  # e^x limit in double precision
ENVELOPE_FLOOR = 1e-14
_BISECTION_CAP = 64.0


class MetricsError(ValueError):
    pass


# ---------------------------------------------------------------------------
# seminorms
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SeminormParams:
    rho1: float
    rho2: float
    h: float
    c: float
    max_beta: int

    def __post_init__(self):
        if self.rho2 <= 0 or self.h <= 0 or self.c <= 0:
            raise MetricsError("rho2, h, c must be positive")
        if self.rho1 < 0 or self.max_beta < 0:
            raise MetricsError("rho1 and max_beta must be nonnegative")


def seminorm_estimate(f, params: SeminormParams, probe_points) -> float:
    """Lower bound for the weighted seminorm of ``f`` over finite probes.

    ``f`` is a handle ``(x, order) -> values`` (spectral differentiation
    upstream, no finite differencing here).  Probes whose decay weight
    overflows double precision are excluded and logged.
    """
    x = np.atleast_1d(np.asarray(probe_points, dtype=float))
    exponent = params.c * np.abs(x) ** (1.0 / params.rho2)
    keep = exponent <= OVERFLOW_EXPONENT
    if not np.all(keep):
        logger.info("seminorm_estimate: %d probes excluded (weight overflow)",
                    int(np.sum(~keep)))
    x = x[keep]
    if x.size == 0:
        return 0.0
    weight = np.exp(exponent[keep])
    best = 0.0
    for beta in range(params.max_beta + 1):
        # h^beta / beta!^rho1 via logs; harmless at these sizes but uniform
        scale = np.exp(beta * np.log(params.h) - params.rho1 * lgamma(beta + 1))
        vals = np.abs(np.asarray(f(x, beta)))
        best = max(best, float(np.max(scale * weight * vals)))
    return best


# ---------------------------------------------------------------------------
# decay fitting
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DecayFit:
    amplitude_C: float
    rate_c: float
    exponent: float
    r_squared: float
    n_envelope_points: int

    def to_json_dict(self) -> dict:
        return {"amplitude_C": self.amplitude_C, "rate_c": self.rate_c,
                "exponent": self.exponent, "r_squared": self.r_squared,
                "n_envelope_points": self.n_envelope_points}


def _upper_envelope(x: np.ndarray, v: np.ndarray):
    """Oscillation peaks (when there are enough), then running max from right.

    Raw log-fitting of an oscillating |f| is biased by near-zeros, so local
    maxima are extracted first; monotone data has no interior maxima and is
    used whole.  The running max then discards anything shadowed from the
    right.
    """
    if x.size >= 3:
        interior = (v[1:-1] >= v[:-2]) & (v[1:-1] >= v[2:])
        if int(np.sum(interior)) >= 10:
            keep = np.concatenate([[False], interior, [False]])
            x, v = x[keep], v[keep]
    running = np.maximum.accumulate(v[::-1])[::-1]
    on_env = v >= running
    return x[on_env], v[on_env]


def _linear_fit(t: np.ndarray, logv: np.ndarray):
    A = np.column_stack([np.ones_like(t), -t])
    sol, *_ = np.linalg.lstsq(A, logv, rcond=None)
    resid = logv - A @ sol
    ss_tot = float(np.sum((logv - logv.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid ** 2)) / ss_tot if ss_tot > 0 else 0.0
    return float(sol[0]), float(sol[1]), r2


def subexp_decay_fit(samples, exponent_mode: str = "fixed",
                     rho: float = 2.0) -> DecayFit:
    """Fit ``log |f| = log C - c x^{1/rho}`` to the decay envelope.

    ``samples`` is an (N, 2) table of (x, |f(x)|).  With
    ``exponent_mode="free"`` the exponent 1/rho is grid-searched over
    rho in [1, 4] (step 0.05) maximizing R^2.
    """
    samples = np.asarray(samples, dtype=float)
    x, v = samples[:, 0], np.abs(samples[:, 1])
    order = np.argsort(x)
    x, v = x[order], v[order]
    ex, ev = _upper_envelope(x, v)
    mask = (ev > ENVELOPE_FLOOR) & (ex > 0)
    ex, ev = ex[mask], ev[mask]
    if ex.size < 10:
        raise MetricsError("insufficient envelope")
    logv = np.log(ev)
    if exponent_mode == "fixed":
        rhos = [rho]
    elif exponent_mode == "free":
        rhos = np.arange(1.0, 4.0 + 1e-9, 0.05)
    else:
        raise MetricsError(f"unknown exponent_mode {exponent_mode!r}")
    best = None
    for r in rhos:
        logC, c, r2 = _linear_fit(ex ** (1.0 / r), logv)
        if best is None or r2 > best[3]:
            best = (logC, c, 1.0 / r, r2)
    logC, c, expo, r2 = best
    return DecayFit(amplitude_C=float(np.exp(logC)), rate_c=c, exponent=expo,
                    r_squared=r2, n_envelope_points=int(ex.size))


def fit_scatter_csv(samples, path) -> None:
    """Dump the (x, |f|) scatter used for a fit, for external plotting."""
    samples = np.asarray(samples, dtype=float)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x", "abs_f"])
        for row in samples:
            writer.writerow([repr(float(row[0])), repr(float(row[1]))])


# ---------------------------------------------------------------------------
# sequence norms on coefficient sets
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SequenceNormParams:
    s: float
    t: float
    rho1: float
    rho2: float
    k: float = 1.0

    def __post_init__(self):
        if not self.t > self.rho2:
            raise MetricsError("requires t > rho2")
        if not self.s > self.rho1:
            raise MetricsError("requires s > rho1")
        if self.k < 0:
            raise MetricsError("weight scale k must be nonnegative")


def index_weight(index, params: SequenceNormParams) -> float:
    """w(lambda) = (2^-m)^(1/(t-rho2)) + (2^m)^(1/(s-rho1)) + |n 2^-m|^(1/t)."""
    m = index.m
    n = np.asarray(index.n, dtype=float)
    shift = float(np.sqrt(np.sum(n * n))) * 2.0 ** (-m)  # Euclidean |n|
    return ((2.0 ** (-m)) ** (1.0 / (params.t - params.rho2))
            + (2.0 ** m) ** (1.0 / (params.s - params.rho1))
            + shift ** (1.0 / params.t))


def sequence_norm(coeffs, params: SequenceNormParams) -> float:
    """sup over the window of |c_lambda| exp(k w(lambda))."""
    best = 0.0
    skipped = 0
    for index, c in coeffs.coefficients.items():
        mag = abs(c)
        arg = params.k * index_weight(index, params)
        if arg > OVERFLOW_EXPONENT:
            if mag > 1e-300:
                return float("inf")
            skipped += 1
            continue
        best = max(best, mag * float(np.exp(arg)))
    if skipped:
        logger.info("sequence_norm: %d negligible entries skipped (weight overflow)",
                    skipped)
    return best


class FeasibleK(float):
    """Largest feasible weight scale; ``vacuous`` marks an all-zero input."""

    def __new__(cls, value, vacuous=False):
        obj = super().__new__(cls, value)
        obj.vacuous = vacuous
        return obj


def max_feasible_k(coeffs, params: SequenceNormParams, budget: float) -> FeasibleK:
    """Bisection (to 1e-3) for the largest k with sequence_norm <= budget."""
    if all(abs(c) == 0.0 for c in coeffs.coefficients.values()):
        return FeasibleK(_BISECTION_CAP, vacuous=True)

    def norm_at(k):
        p = SequenceNormParams(s=params.s, t=params.t, rho1=params.rho1,
                               rho2=params.rho2, k=k)
        return sequence_norm(coeffs, p)

    if norm_at(_BISECTION_CAP) <= budget:
        return FeasibleK(_BISECTION_CAP)
    lo, hi = 0.0, _BISECTION_CAP
    if norm_at(1e-9) > budget:
        return FeasibleK(0.0)
    while hi - lo > 1e-3:
        mid = 0.5 * (lo + hi)
        if norm_at(mid) <= budget:
            lo = mid
        else:
            hi = mid
    return FeasibleK(lo)


# ---------------------------------------------------------------------------
# half-plane transform norm probe
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HalfplaneParams:
    h: float
    t: float
    tau1: float
    tau2: float
    max_alpha: int = 2
    max_beta: int = 2

    def __post_init__(self):
        if self.h <= 0 or self.t <= 0 or self.tau1 <= 0 or self.tau2 <= 0:
            raise MetricsError("h, t, tau1, tau2 must be positive")
        if self.max_alpha > 2 or self.max_beta > 2:
            raise MetricsError("scale/shift derivative orders capped at 2")


def halfplane_norm_probe(ws, f, params: HalfplaneParams, samples) -> float:
    """Weighted sup of the wavelet transform of ``f`` over half-plane samples.

    Phi(b, a) = (1/a) int f(x) psi((x - b)/a) dx.  Shift derivatives go onto
    the analyzing atom (exact, via the dense derivative tables); scale
    derivatives use central differences in log a.  Finiteness of this probe
    over growing sample sets is the desk-scale witness that the transform
    maps into the weighted half-plane space continuously.
    """
    from . import numerics

    (grid,) = f.grids
    x = grid.points()
    fw = f.values * grid.trapezoid_weights()

    def phi_b_deriv(b, a, beta):
        atom = ws.interpolator("psi", beta)
        vals = atom((x - b) / a)
        return ((-1.0) ** beta / a ** (beta + 1)) * np.dot(fw, vals)

    delta = 1e-3  # log-scale step for d/da stencils
    best = 0.0
    for (b, a) in samples:
        if not a > 0:
            raise MetricsError("scale samples must have a > 0")
        warg = params.h * (a ** (1.0 / params.tau1)
                           + a ** (-1.0 / params.tau2)
                           + abs(b) ** (1.0 / params.t))
        if warg > OVERFLOW_EXPONENT:
            logger.info("halfplane_norm_probe: sample (%g, %g) excluded", b, a)
            continue
        weight = float(np.exp(warg))
        for beta in range(params.max_beta + 1):
            p0 = phi_b_deriv(b, a, beta)
            pp = phi_b_deriv(b, a * np.exp(delta), beta)
            pm = phi_b_deriv(b, a * np.exp(-delta), beta)
            d1_log = (pp - pm) / (2 * delta)
            d2_log = (pp - 2 * p0 + pm) / delta ** 2
            derivs = [p0, d1_log / a, (d2_log - d1_log) / a ** 2]
            for alpha in range(params.max_alpha + 1):
                best = max(best, weight * abs(derivs[alpha]))
    return best


def decay_fit_report(fit: DecayFit, label: str) -> str:
    doc = {"label": label, "fit": fit.to_json_dict(),
           "note": "lower-bound probe fit, not a certified bound"}
    return json.dumps(doc, sort_keys=True, indent=2)
