"""Convolution of monotone step functions with smoothing kernels, and the
two-sided recovery bounds.

The central identity: for an admissible test function rho and a nondecreasing
step function F (midpoint convention at jumps),

    F(tau) - rho_T*F(tau) = rho_{T,1}*F'(tau),

and the signed kernel rho_{T,1} is dominated by the nonnegative kernel
rho_{delta,0}/(c1*delta) for every T >= delta, which yields computable
lower/upper envelopes for F from its smoothed profile alone.  All convolutions
against atomic F' reduce to finite sums of cumulative-kernel evaluations, so
no oscillatory quadrature is involved.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .mollifier import TestFunction
from .quadrature import panel_rule


class StepFunction:
    """Nondecreasing pure-jump function with the midpoint convention.

    F(tau) = base + sum of weights of jumps strictly below tau, plus half the
    weight of a jump exactly at tau.  Coinciding jump locations are merged at
    construction.  ``degree`` is the declared polynomial growth bound used by
    the convolution admissibility check (finite jump sets are bounded, so the
    default 0 is correct unless the instance stands in for a growing family).
    """

    def __init__(self, locations, weights, base: float = 0.0, degree: int = 0):
        locations = np.asarray(locations, dtype=float).ravel()
        weights = np.asarray(weights, dtype=float).ravel()
        if locations.shape != weights.shape:
            raise ValueError("locations and weights must have equal length")
        if locations.size and not np.all(np.isfinite(locations)):
            raise ValueError("jump locations must be finite")
        if np.any(weights <= 0):
            raise ValueError("jump weights must be strictly positive")
        if degree < 0:
            raise ValueError("declared degree must be nonnegative")
        order = np.argsort(locations, kind="stable")
        locations = locations[order]
        weights = weights[order]
        if locations.size:
            keep_at = np.concatenate([[True], np.diff(locations) > 0])
            idx = np.cumsum(keep_at) - 1
            merged_loc = locations[keep_at]
            merged_w = np.zeros(merged_loc.size)
            np.add.at(merged_w, idx, weights)
        else:
            merged_loc = locations
            merged_w = weights
        self.locations = merged_loc
        self.weights = merged_w
        self.locations.setflags(write=False)
        self.weights.setflags(write=False)
        self.base = float(base)
        self.degree = int(degree)
        self._cumw = np.concatenate([[0.0], np.cumsum(merged_w)])

    def __repr__(self):
        return (f"StepFunction({self.locations.size} jumps, "
                f"total={self.total_weight:.6g}, base={self.base:.6g})")

    @property
    def total_weight(self) -> float:
        return float(self._cumw[-1])

    def __call__(self, tau):
        tau = np.asarray(tau, dtype=float)
        scalar = tau.ndim == 0
        lo = np.searchsorted(self.locations, tau, side="left")
        hi = np.searchsorted(self.locations, tau, side="right")
        vals = self.base + self._cumw[lo] + 0.5 * (self._cumw[hi] - self._cumw[lo])
        return float(vals) if scalar else vals

    def integral(self, a: float, b: float) -> float:
        """Exact int_a^b F(mu) dmu (b >= a)."""
        if b < a:
            raise ValueError("integration endpoints out of order")
        contrib = np.clip(b - np.maximum(self.locations, a), 0.0, None)
        return self.base * (b - a) + float(np.dot(self.weights, contrib))

    # -- I/O -----------------------------------------------------------------

    def to_csv(self, path) -> None:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["location", "weight"])
        for loc, w in zip(self.locations, self.weights):
            writer.writerow([f"{loc:.12g}", f"{w:.12g}"])
        Path(path).write_text(buf.getvalue())

    @classmethod
    def from_csv(cls, path) -> "StepFunction":
        rows = list(csv.reader(Path(path).read_text().splitlines()))
        if not rows or rows[0] != ["location", "weight"]:
            raise ValueError("step-function CSV must start with "
                             "'location,weight' header")
        locs, ws = [], []
        for row in rows[1:]:
            if not row:
                continue
            locs.append(float(row[0]))
            ws.append(float(row[1]))
        return cls(locs, ws)


def random_ensemble(seed: int, count: int = 200, max_jumps: int = 20,
                    loc_range=(-5.0, 5.0), weight_cap: float = 2.0):
    """Deterministic ensemble of random step functions from a 64-bit seed."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        n = int(rng.integers(1, max_jumps + 1))
        locs = rng.uniform(loc_range[0], loc_range[1], size=n)
        ws = weight_cap * (1.0 - rng.random(size=n))  # in (0, cap]
        out.append(StepFunction(locs, ws))
    return out


@dataclass(frozen=True)
class SmoothingParams:
    """Smoothing window delta, envelope scale T >= delta, shift epsilon and
    the averaging knob theta used by the counting-function chain bound."""

    delta: float = 1.0
    T: float = 1.0
    epsilon: float = 1.0
    theta: float = 1.0

    def __post_init__(self):
        if not self.delta > 0:
            raise ValueError("delta must be positive")
        if self.T < self.delta:
            raise ValueError("T must satisfy T >= delta")
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if not self.theta > 0:
            raise ValueError("theta must be positive")


@dataclass(frozen=True)
class Bounds:
    lower: float
    upper: float
    margin: float = 0.0

    def __iter__(self):
        yield self.lower
        yield self.upper

    def contains(self, value: float, slack: float = 0.0) -> bool:
        pad = self.margin + slack
        return self.lower - pad <= value <= self.upper + pad


def _check_admissible(rho: TestFunction, F: StepFunction) -> None:
    if F.degree >= 2 * rho.decay_order:
        raise ValueError(
            f"declared growth degree {F.degree} needs decay order "
            f"m > {F.degree / 2:g}; this test function has m = {rho.decay_order}")
    if abs(rho.c0 - 1.0) > 1e-6:
        raise ValueError("test function must be normalized to unit mass")


def conv_F(rho: TestFunction, T: float, F: StepFunction, tau):
    """Smoothed profile rho_T*F(tau) = base*c0 + sum_i w_i * cdf(T*(tau - tau_i))."""
    if T <= 0:
        raise ValueError("T must be positive")
    _check_admissible(rho, F)
    tau = np.asarray(tau, dtype=float)
    scalar = tau.ndim == 0
    x = T * (np.atleast_1d(tau)[:, None] - F.locations)
    vals = F.base * rho.c0 + rho.cdf(x.ravel()).reshape(x.shape) @ F.weights
    return float(vals[0]) if scalar else vals


def conv_Fprime(rho: TestFunction, delta: float, k: int, F: StepFunction, tau):
    """Kernel sum rho_{delta,k}*F'(tau) = sum_i w_i rho_{delta,k}(tau - tau_i)."""
    _check_admissible(rho, F)
    tau = np.asarray(tau, dtype=float)
    scalar = tau.ndim == 0
    x = np.atleast_1d(tau)[:, None] - F.locations
    vals = rho.kernel_scaled(delta, k, x.ravel()).reshape(x.shape) @ F.weights
    return float(vals[0]) if scalar else vals


def conv_F_integral(rho: TestFunction, T: float, F: StepFunction,
                    a: float, b: float) -> float:
    """Exact int_a^b rho_T*F(mu) dmu via the iterated-tail kernel.

    Uses the antiderivative of the smoothed step: int_0^x cdf = c0*x_+ +
    rho_{1,2}(x) - rho_{1,2}(0), evaluated per jump, so no quadrature error
    enters averaged bounds.
    """
    if b < a:
        raise ValueError("integration endpoints out of order")
    _check_admissible(rho, F)
    if rho.decay_order < 1:
        raise ValueError("exact smoothed integrals need decay order m >= 1")

    def anti(x):
        return rho.c0 * np.clip(x, 0.0, None) + rho.kernel(2, x)

    xb = T * (b - F.locations)
    xa = T * (a - F.locations)
    per_jump = (anti(xb) - anti(xa)) / T
    return F.base * rho.c0 * (b - a) + float(np.dot(F.weights, per_jump))


def tauber_identity_residual(rho: TestFunction, T: float, F: StepFunction, tau):
    """|F - rho_T*F - rho_{T,1}*F'| at tau; zero in exact arithmetic."""
    lhs = F(tau) - conv_F(rho, T, F, tau)
    rhs = conv_Fprime(rho, T, 1, F, tau)
    return np.abs(lhs - rhs)


def _error_term(rho, delta, F, tau):
    return conv_Fprime(rho, delta, 0, F, tau) / (rho.c1 * delta)


def _margin(rho, F) -> float:
    budget = rho.tail_budget0 + (rho.tail_budget1 or 0.0) + 1e-12
    return float((abs(F.base) + F.total_weight) * (budget + 1e-11))


def pointwise_bounds(rho: TestFunction, params: SmoothingParams,
                     F: StepFunction, tau) -> Bounds:
    """Two-sided envelope rho_T*F(tau) -+ rho_{delta,0}*F'(tau)/(c1*delta).

    Valid whenever rho is admissible with decay order m >= 1; the true F(tau)
    lies inside up to the attached numeric margin.
    """
    mid = conv_F(rho, params.T, F, tau)
    err = _error_term(rho, params.delta, F, tau)
    lo, hi = mid - err, mid + err
    if np.ndim(lo):
        raise ValueError("pointwise_bounds takes a scalar tau; loop or "
                         "vectorize externally")
    return Bounds(float(lo), float(hi), _margin(rho, F))


def signed_kernel_bounds(rho: TestFunction, delta: float,
                         F: StepFunction, tau) -> Bounds:
    """The T = delta envelope written as two signed-kernel convolutions.

    The kernels rho_delta^+- = rho_delta -+ delta*tau*rho_delta(tau)/c1 have
    cumulative integrals cdf(delta x) -+ rho_{1,0}(delta x)/c1, which is how
    they are evaluated here; algebraically this equals pointwise_bounds at
    T = delta.
    """
    _check_admissible(rho, F)
    tau = float(tau)
    x = delta * (tau - F.locations)
    plus = rho.cdf(x) - rho.kernel(0, x) / rho.c1
    minus = rho.cdf(x) + rho.kernel(0, x) / rho.c1
    lo = F.base * rho.c0 + float(np.dot(F.weights, plus))
    hi = F.base * rho.c0 + float(np.dot(F.weights, minus))
    return Bounds(lo, hi, _margin(rho, F))


def weighted_interval_bounds(rho: TestFunction, params: SmoothingParams,
                             F: StepFunction, a: float, b: float,
                             f, f_prime) -> Bounds:
    """Bounds for int_a^b f(tau) [F - rho_T*F](tau) dtau, f >= 0 nondecreasing.

    lower = -f(b) D(b) / (T delta), upper = (f(a) D(a) + int_a^b f' D) / (T delta)
    with D = rho_{delta,0}*F'.  The weight integral uses composite quadrature
    split at the jump locations (D is C^1 but has curvature kinks there).
    """
    if b <= a:
        raise ValueError("interval endpoints out of order")
    probe = np.linspace(a, b, 65)
    fv = np.asarray(f(probe), dtype=float)
    fpv = np.asarray(f_prime(probe), dtype=float)
    if np.any(fv < -1e-12) or np.any(fpv < -1e-12):
        raise ValueError("weight must be nonnegative and nondecreasing on [a, b]")
    T, delta = params.T, params.delta
    D_b = conv_Fprime(rho, delta, 0, F, b)
    D_a = conv_Fprime(rho, delta, 0, F, a)
    inner = np.unique(np.concatenate(
        [[a, b], F.locations[(F.locations > a) & (F.locations < b)]]))
    edges = np.unique(np.concatenate(
        [np.linspace(inner[i], inner[i + 1], 9) for i in range(inner.size - 1)]))
    nodes, wq = panel_rule(edges, 12)
    integral = float(np.dot(
        np.asarray(f_prime(nodes), dtype=float)
        * conv_Fprime(rho, delta, 0, F, nodes), wq))
    lower = -fv[-1] * D_b / (T * delta)
    upper = (fv[0] * D_a + integral) / (T * delta)
    return Bounds(float(lower), float(upper), _margin(rho, F))


def corridor_bounds(rho: TestFunction, params: SmoothingParams,
                    F: StepFunction, tau) -> Bounds:
    """Shift/average refinement of the pointwise envelope.

    Lower bound at tau: the better of the epsilon-average of rho_T*F over
    [tau - eps, tau] and the shifted value rho_T*F(tau - eps), both minus
    the scaled error term; upper bound symmetric on the right.
    """
    tau = float(tau)
    T, delta, eps = params.T, params.delta, params.epsilon
    D = conv_Fprime(rho, delta, 0, F, tau)
    corr = D / (eps * T * delta)
    avg_lo = conv_F_integral(rho, T, F, tau - eps, tau) / eps - corr
    shift_lo = conv_F(rho, T, F, tau - eps) - corr
    avg_hi = conv_F_integral(rho, T, F, tau, tau + eps) / eps + corr
    shift_hi = conv_F(rho, T, F, tau + eps) + corr
    return Bounds(float(max(avg_lo, shift_lo)), float(min(avg_hi, shift_hi)),
                  _margin(rho, F))
