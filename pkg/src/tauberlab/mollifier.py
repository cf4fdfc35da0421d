"""Admissible smoothing test functions and their derived kernels.

A *test function* rho here is an even, nonnegative density with unit mass,
polynomial decay rho(tau) = O(<tau>^(-2m-2)) for its decay order m, and a
numerically certified band limit: the Fourier transform
fhat(t) = (2*pi)^(-1/2) * int exp(-i*t*tau) f(tau) dtau is supported in
[-1, 1] up to a stated tolerance.

Two constructions are provided:

* ``build_gamma`` -- an explicit sinc-power average with decay order l - 1;
  all of its truncated-range tail integrals have closed forms in terms of
  sine/cosine integrals, so moments and kernels are exact to quadrature
  accuracy despite the slow decay.
* ``solve_zeta`` / ``build_rho_from_zeta`` -- the square of the cosine
  transform of the lowest clamped mode of the 2m-th derivative operator on a
  unit interval, which minimizes the top even moment among this class.

Derived one-sided cumulative kernels (``eval_kernel``):

* k=1: signed tail mass, int_tau^inf rho for tau > 0, odd, zero at zero;
* k=0: tail first moment, int_tau^inf mu*rho(mu) dmu, even;
* k=2: iterated tail mass, equal to k0(tau) - tau*k1(tau) for tau >= 0;
* "density": the rescaled density delta*rho(delta*tau) itself.

The scaled family is rho_{delta,k}(tau) = delta^(1-k) * rho_{1,k}(delta*tau).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import numpy as np
from numpy.polynomial import legendre as npleg
from scipy.interpolate import BPoly
from scipy.linalg import eigh

from .quadrature import gauss_legendre, panel_rule
from .trigtails import cos_sin_power_tails

SQRT_2PI = math.sqrt(2.0 * math.pi)

#: scan offset and relative tolerance used by the band-limit certificate
BAND_ETA = 1e-3
BAND_REL_TOL = 1e-6

_FORMAT_VERSION = 1


def _as_array(tau):
    arr = np.asarray(tau, dtype=float)
    return arr, arr.ndim == 0


# ---------------------------------------------------------------------------
# sinc-power family
# ---------------------------------------------------------------------------


class _GammaFamily:
    """Unnormalized sinc-power average and its exact tail integrals.

    gamma(tau) = int_{-pi/2}^{pi/2} w(tau/(2l) + s) ds with
    w(u) = (sin(u)/u)^(2l).  The window length equals the period of
    sin^(2l), which makes gamma positive, even and slowly oscillating with
    envelope <tau>^(-2l).
    """

    def __init__(self, l: int):
        self.l = int(l)
        self.twol = 2 * self.l
        x, w = gauss_legendre(64)
        self.s_nodes = 0.5 * np.pi * x
        self.s_weights = 0.5 * np.pi * w
        # cosine expansion sin^(2l)(u) = b[0] + sum_j b[j] cos(2 j u)
        b = np.zeros(self.l + 1)
        b[0] = math.comb(self.twol, self.l) / 4.0 ** self.l
        for j in range(1, self.l + 1):
            b[j] = 2.0 * (-1) ** j * math.comb(self.twol, self.l + j) / 4.0 ** self.l
        self.fourier = b

    def _w(self, u):
        return np.sinc(u / np.pi) ** self.twol

    def value(self, tau):
        tau = np.abs(np.asarray(tau, dtype=float))
        u = tau[..., None] / self.twol + self.s_nodes
        return np.dot(self._w(u), self.s_weights)

    def derivative(self, tau):
        t = np.asarray(tau, dtype=float)
        u = np.abs(t) / self.twol
        d = (self._w(u + np.pi / 2) - self._w(u - np.pi / 2)) / self.twol
        return np.where(t < 0, -d, d)

    def power_tail(self, j: int, A) -> np.ndarray:
        """Exact int_A^inf tau^j gamma(tau) dtau for integer 0 <= j <= 2l - 2."""
        if not 0 <= j <= self.twol - 2:
            raise ValueError("tail moment order out of the convergent range")
        A = np.asarray(A, dtype=float)
        if np.any(A <= self.l * np.pi):
            raise ValueError("tail start must exceed l*pi")
        B = A[..., None] / self.twol + self.s_nodes
        total = np.zeros(B.shape)
        for i in range(j + 1):
            p = self.twol - i
            G = self.fourier[0] * B ** (1 - p) / (p - 1)
            for k in range(1, self.l + 1):
                I, _ = cos_sin_power_tails(p, 2 * k, B)
                G = G + self.fourier[k] * I
            total += math.comb(j, i) * (-self.s_nodes) ** (j - i) * G
        out = self.twol ** (j + 1) * np.dot(total, self.s_weights)
        return out

    def oscillatory_tail(self, t, A: float) -> np.ndarray:
        """Exact int_A^inf cos(t*tau) gamma(tau) dtau for t > 0 (vectorized)."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        B = A / self.twol + self.s_nodes            # (ns,)
        a = self.twol * t[:, None]                  # (nt, 1)
        acc_c = np.zeros((t.size, self.s_nodes.size))
        acc_s = np.zeros_like(acc_c)
        for k in range(self.l + 1):
            Ip, Jp = cos_sin_power_tails(self.twol, a + 2 * k, B)
            Im, Jm = cos_sin_power_tails(self.twol, a - 2 * k, B)
            acc_c += self.fourier[k] * 0.5 * (Ip + Im)
            acc_s += self.fourier[k] * 0.5 * (Jp + Jm)
        phase = self.twol * np.outer(t, self.s_nodes)
        inner = np.cos(phase) * acc_c + np.sin(phase) * acc_s
        return self.twol * np.dot(inner, self.s_weights)


# ---------------------------------------------------------------------------
# clamped modes of the 2m-th derivative operator on (-1/2, 1/2)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ZetaSolution:
    """Lowest even clamped mode of d^(2m)/dt^(2m) on (-1/2, 1/2).

    ``nu_tilde`` is the minimized Rayleigh quotient ||zeta^(m)||^2 / ||zeta||^2
    over even functions vanishing to order m at both endpoints, and
    ``nu = nu_tilde**(1/(2m))``.  ``leg_coeffs`` are Legendre coefficients in
    the stretched variable u = 2t, so the mode is even and clamped exactly.
    """

    m: int
    nu_tilde: float
    nu: float
    leg_coeffs: tuple
    deriv_norms: tuple
    grid: tuple
    values: tuple
    basis_size: int
    history: tuple

    def __call__(self, t):
        t, scalar = _as_array(t)
        out = np.zeros_like(t)
        inside = np.abs(t) <= 0.5
        if np.any(inside):
            out[inside] = npleg.legval(2.0 * t[inside], np.asarray(self.leg_coeffs))
        return float(out) if scalar else out


def rayleigh_polynomial_bound(m: int) -> float:
    """Rayleigh quotient of the polynomial trial mode (1/4 - t^2)^m."""
    return (math.factorial(4 * m + 1) * math.factorial(m) ** 2
            / (math.factorial(2 * m + 1) * math.factorial(2 * m)))


def crude_root_bound(m: int) -> float:
    """Coarse cap nu <= 2m * 3^(1/(2m)), valid for m >= 2."""
    return 2.0 * m * 3.0 ** (1.0 / (2 * m))


@lru_cache(maxsize=None)
def solve_zeta(m: int, rel_tol: float = 1e-9) -> ZetaSolution:
    """Minimize the clamped Rayleigh quotient by an even polynomial basis.

    Basis functions are (1/4 - t^2)^m times even Legendre polynomials in 2t,
    which satisfy the endpoint conditions and the parity exactly; the basis is
    enriched until the lowest generalized eigenvalue is stable to ``rel_tol``.
    """
    if not isinstance(m, int) or not 1 <= m <= 6:
        raise ValueError("decay order m must be an integer in 1..6")
    # (1 - u^2)^m as Legendre coefficients, u = 2t
    poly = np.polynomial.polynomial.polypow([1.0, 0.0, -1.0], m)
    weight = npleg.poly2leg(poly)
    u_nodes, u_w = npleg.leggauss(200)

    def basis_coeffs(J):
        out = []
        for j in range(J + 1):
            e = np.zeros(2 * j + 1)
            e[-1] = 1.0
            out.append(npleg.legmul(weight, e))
        return out

    history = []
    prev = None
    solution = None
    for J in (6, 10, 14, 18, 22, 26):
        basis = basis_coeffs(J)
        V0 = np.array([npleg.legval(u_nodes, c) for c in basis])
        Vm = np.array([npleg.legval(u_nodes, npleg.legder(c, m)) for c in basis])
        B = 0.5 * (V0 * u_w) @ V0.T
        A = 2.0 ** (2 * m - 1) * (Vm * u_w) @ Vm.T
        A = 0.5 * (A + A.T)
        B = 0.5 * (B + B.T)
        w, v = eigh(A, B)
        nu_tilde = float(w[0])
        history.append((J + 1, nu_tilde))
        vec = v[:, 0]
        vec = vec / math.sqrt(float(vec @ B @ vec))
        coeffs = np.zeros(max(len(c) for c in basis))
        for cj, c in zip(vec, basis):
            coeffs[: len(c)] += cj * c
        if npleg.legval(0.0, coeffs) < 0:
            coeffs = -coeffs
            vec = -vec
        solution = (nu_tilde, coeffs)
        if prev is not None and abs(nu_tilde - prev) <= rel_tol * abs(nu_tilde):
            break
        prev = nu_tilde
    else:
        raise RuntimeError(
            "clamped eigensolve did not stabilize; last iterates: "
            f"{history[-2:]}"
        )

    nu_tilde, coeffs = solution
    deriv_norms = []
    for k in range(m + 1):
        dk = npleg.legder(coeffs, k) if k else coeffs
        vals = npleg.legval(u_nodes, dk)
        deriv_norms.append(float(2.0 ** (2 * k - 1) * np.dot(vals * vals, u_w)))
    # reported eigenvalue consistent with the stored norms
    nu_tilde = deriv_norms[m] / deriv_norms[0]
    grid = np.linspace(-0.5, 0.5, 401)
    values = npleg.legval(2.0 * grid, coeffs)
    return ZetaSolution(
        m=m,
        nu_tilde=nu_tilde,
        nu=nu_tilde ** (1.0 / (2 * m)),
        leg_coeffs=tuple(coeffs),
        deriv_norms=tuple(deriv_norms),
        grid=tuple(grid),
        values=tuple(values),
        basis_size=history[-1][0],
        history=tuple(history),
    )


# ---------------------------------------------------------------------------
# the TestFunction container
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BandLimitCertificate:
    eta: float
    value: float
    hat_zero: float
    truncation: float

    @property
    def relative(self) -> float:
        return self.value / self.hat_zero


class TestFunction:
    """Tabulated admissible density with cumulative kernels and moments.

    Immutable after construction; all evaluations are pure.  Cumulative
    integrals int_0^tau rho and int_0^tau mu*rho(mu) dmu are stored on a
    uniform-capped grid with quintic Hermite interpolation (values plus two
    derivatives at the nodes), and completed beyond the table by closed-form
    tails: exact sine/cosine-integral formulas for the sinc-power family, a
    fitted two-level damped-trigonometric model otherwise.
    """

    def __init__(self, family, params, decay_order, evaluator, evaluator_prime,
                 tau_max, frequencies, gamma_family=None, scale=1.0,
                 zeta=None, precomputed=None):
        self.family = family
        self.params = dict(params)
        self.decay_order = int(decay_order)
        self._eval = evaluator
        self._eval_prime = evaluator_prime
        self.tau_max = float(tau_max)
        self._freqs = tuple(frequencies)
        self._gamma = gamma_family
        self._scale = float(scale)
        self.zeta = zeta
        self._certificate = None
        self._hat_prime_certificate = None

        head = np.arange(0.0, 3.0, 0.075)
        body = np.arange(3.0, self.tau_max, 0.3)
        edges = np.unique(np.concatenate([head, body, [self.tau_max]]))
        self.grid = edges
        order = 12
        self._qnodes, self._qweights = panel_rule(edges, order)
        rho_q = self._eval(self._qnodes)
        if precomputed is None:
            panels = edges.size - 1
            block = (rho_q * self._qweights).reshape(panels, order).sum(axis=1)
            cum0 = np.concatenate([[0.0], np.cumsum(block)])
            block1 = (self._qnodes * rho_q * self._qweights).reshape(panels, order).sum(axis=1)
            cum1 = np.concatenate([[0.0], np.cumsum(block1)])
        else:
            cum0 = np.asarray(precomputed["cum0"], dtype=float)
            cum1 = np.asarray(precomputed["cum1"], dtype=float)
            if cum0.size != edges.size:
                raise ValueError("stored cumulative table does not match the grid")
        self._rho_q = rho_q
        self._cum0_nodes = cum0
        self._cum1_nodes = cum1

        self._fit_tail_model()

        tail0, budget0 = self.tail(0, self.tau_max)
        self.half0 = float(cum0[-1] + tail0)
        self.tail_budget0 = float(budget0)
        if self.decay_order >= 1:
            tail1, budget1 = self.tail(1, self.tau_max)
            self.half1 = float(cum1[-1] + tail1)
            self.tail_budget1 = float(budget1)
        else:
            self.half1 = None
            self.tail_budget1 = None

        rho_g = self._eval(edges)
        rho_p_g = self._eval_prime(edges)
        self._cum0 = BPoly.from_derivatives(
            edges, np.column_stack([cum0, rho_g, rho_p_g]))
        self._cum1 = BPoly.from_derivatives(
            edges, np.column_stack([cum1, edges * rho_g, rho_g + edges * rho_p_g]))

        self.moments = {}
        self.moment_budgets = {}
        self.moments[0.0] = 2.0 * self.half0
        self.moment_budgets[0.0] = 2.0 * self.tail_budget0
        if self.decay_order >= 1:
            self.moments[1.0] = 2.0 * self.half1
            self.moment_budgets[1.0] = 2.0 * self.tail_budget1
            for kappa in range(2, 2 * self.decay_order + 1):
                self.moment(float(kappa))

    # -- tail machinery ----------------------------------------------------

    def _fit_tail_model(self):
        """Damped-trigonometric model of rho beyond the table.

        For the clamped-mode family the model is exact: squaring the
        endpoint (integration-by-parts) expansion of the cosine transform
        gives rho(tau) = sum_q tau^-q (a_q + b_q cos tau + c_q sin tau) with
        coefficients from the mode's boundary derivatives and a rigorously
        bounded remainder.  Other families get a least-squares fit at the
        family's tail frequencies whose extrapolation error is estimated
        out-of-sample.  The residual power law is carried as a budget.
        """
        p0 = 2 * self.decay_order + 2
        if self.zeta is not None:
            self._analytic_zeta_tail()
        else:
            lo = max(0.4 * self.tau_max, self.tau_max - 60.0 * np.pi)
            split = lo + 0.75 * (self.tau_max - lo)
            mask = (self._qnodes >= lo) & (self._qnodes <= split)
            t = self._qnodes[mask]
            y = self._rho_q[mask]
            cols = []
            meta = []
            for p in (p0, p0 + 1):
                damp = t ** (-p)
                cols.append(damp)
                meta.append((p, 0.0, "const"))
                for f in self._freqs:
                    cols.append(damp * np.cos(f * t))
                    meta.append((p, f, "cos"))
                    cols.append(damp * np.sin(f * t))
                    meta.append((p, f, "sin"))
            X = np.column_stack(cols)
            coef, *_ = np.linalg.lstsq(X, y, rcond=None)
            self._tail_coef = coef
            self._tail_meta = meta
            # out-of-sample misfit on the held-out outer band
            hold = self._qnodes > split
            th = self._qnodes[hold]
            resid = self._rho_q[hold] - self._model_value(th)
            self._misfit_power = p0 + 2
            self._tail_misfit = float(np.max(np.abs(resid) * th ** self._misfit_power)) \
                if th.size else 0.0
        self._envelope = float(np.max(self._rho_q * (1.0 + self._qnodes ** 2) ** (p0 / 2.0)))

    def _analytic_zeta_tail(self):
        """Exact tail model for rho = (cosine transform of zeta)^2.

        Repeated integration by parts of int_0^{1/2} cos(tau t) zeta(t) dt
        leaves sin(tau/2)*S(tau) + cos(tau/2)*C(tau) with S, C polynomial in
        1/tau built from the endpoint derivatives zeta^(j)(1/2); squaring
        yields constant/cos(tau)/sin(tau) columns at integer inverse powers.
        """
        z = self.zeta
        m = z.m
        coeffs = np.asarray(z.leg_coeffs)
        # endpoint derivatives up to the remainder order
        n_pairs = (m + 7) // 2 + 1          # include j = 0 .. 2*n_pairs - 1
        K_rem = 2 * n_pairs                  # remainder derivative order
        b = []
        for j in range(K_rem + 1):
            if j < m:
                b.append(0.0)  # clamped endpoint: exact zeros, skip roundoff
                continue
            dj = npleg.legder(coeffs, j) if j else coeffs
            b.append(2.0 ** j * float(npleg.legval(1.0, dj)))
        # S: powers tau^-(2k+1), sign (-1)^k, coefficient b[2k]
        # C: powers tau^-(2k+2), sign (-1)^k, coefficient b[2k+1]
        S = {}
        C = {}
        for k in range(n_pairs):
            if b[2 * k]:
                S[2 * k + 1] = (-1.0) ** k * b[2 * k]
            if b[2 * k + 1]:
                C[2 * k + 2] = (-1.0) ** k * b[2 * k + 1]

        def series_product(u, v):
            out = {}
            for pu, cu in u.items():
                for pv, cv in v.items():
                    out[pu + pv] = out.get(pu + pv, 0.0) + cu * cv
            return out

        SS = series_product(S, S)
        CC = series_product(C, C)
        SC = series_product(S, C)
        two_over_pi = 2.0 / math.pi
        cols = {}

        def add(power, kind, value):
            if value != 0.0:
                cols[(power, kind)] = cols.get((power, kind), 0.0) + value

        for p, vc in SS.items():
            add(p, "const", two_over_pi * 0.5 * vc)
            add(p, "cos", -two_over_pi * 0.5 * vc)
        for p, vc in CC.items():
            add(p, "const", two_over_pi * 0.5 * vc)
            add(p, "cos", two_over_pi * 0.5 * vc)
        for p, vc in SC.items():
            add(p, "sin", two_over_pi * vc)
        self._tail_coef = np.array([v for (_, _), v in sorted(cols.items())])
        self._tail_meta = [(p, 1.0 if kind != "const" else 0.0, kind)
                           for (p, kind), _ in sorted(cols.items())]
        # remainder bound: |rho - model| <= C_mis * tau^-p_mis beyond A0
        A0 = 0.5 * self.tau_max
        dK = npleg.legder(coeffs, K_rem)
        u_nodes, u_w = npleg.leggauss(120)
        vals = npleg.legval(u_nodes, dK)
        norm_K = math.sqrt(2.0 ** (2 * K_rem - 1) * float(np.dot(vals * vals, u_w)))
        r_bar = norm_K / math.sqrt(2.0)
        z_bar = sum(abs(bj) * A0 ** (m - j) for j, bj in enumerate(b[:K_rem]) if j >= m)
        self._misfit_power = m + 1 + K_rem
        self._tail_misfit = two_over_pi * (
            2.0 * z_bar * r_bar + r_bar ** 2 * A0 ** (m + 1 - K_rem))

    def _model_value(self, tau):
        tau = np.asarray(tau, dtype=float)
        out = np.zeros_like(tau)
        for c, (p, f, kind) in zip(self._tail_coef, self._tail_meta):
            damp = tau ** (-float(p))
            if kind == "const":
                out += c * damp
            elif kind == "cos":
                out += c * damp * np.cos(f * tau)
            else:
                out += c * damp * np.sin(f * tau)
        return out

    def _model_tail(self, kappa: float, A) -> tuple:
        """(int_A^inf tau^kappa * model dtau, budget) from the tail model."""
        A = np.asarray(A, dtype=float)
        val = np.zeros_like(A)
        budget = np.zeros_like(A)
        integer = float(kappa).is_integer()
        for c, (p, f, kind) in zip(self._tail_coef, self._tail_meta):
            q = p - kappa
            if kind == "const":
                val += c * A ** (1.0 - q) / (q - 1.0)
            elif integer:
                I, J = cos_sin_power_tails(int(round(q)), f, A)
                val += c * (I if kind == "cos" else J)
            else:
                budget += abs(c) * A ** (1.0 - q) / (q - 1.0)
        pm = self._misfit_power
        budget += self._tail_misfit * A ** (kappa - pm + 1.0) / (pm - 1.0 - kappa)
        return val, budget

    def tail(self, kappa: float, A) -> tuple:
        """(int_A^inf tau^kappa rho dtau, error budget) for A >= table range."""
        if self._gamma is not None and float(kappa).is_integer():
            j = int(round(kappa))
            if 0 <= j <= 2 * self.decay_order:
                exact = self._scale * self._gamma.power_tail(j, A)
                return exact, np.zeros_like(np.asarray(A, dtype=float)) + 1e-15 * np.abs(exact)
        return self._model_tail(float(kappa), A)

    # -- pointwise density -------------------------------------------------

    def rho(self, tau):
        tau, scalar = _as_array(tau)
        a = np.abs(tau)
        out = np.empty_like(a)
        inside = a <= self.tau_max
        if np.any(inside):
            out[inside] = self._eval(a[inside])
        if np.any(~inside):
            if self._gamma is not None:
                out[~inside] = self._eval(a[~inside])
            else:
                out[~inside] = self._model_value(a[~inside])
        return float(out) if scalar else out

    __call__ = rho

    def rho_prime(self, tau):
        tau, scalar = _as_array(tau)
        out = self._eval_prime(tau)
        return float(out) if scalar else out

    # -- cumulative tables and kernels --------------------------------------

    def _cum(self, j: int, x):
        """int_0^x mu^j rho(mu) dmu for x >= 0 (vectorized)."""
        x = np.asarray(x, dtype=float)
        half = self.half0 if j == 0 else self.half1
        interp = self._cum0 if j == 0 else self._cum1
        out = np.empty_like(x)
        inside = x <= self.tau_max
        if np.any(inside):
            out[inside] = interp(x[inside])
        if np.any(~inside):
            tail, _ = self.tail(j, x[~inside])
            out[~inside] = half - tail
        return out

    def cdf(self, x):
        """int_{-inf}^x rho, the smoothed-step profile."""
        x, scalar = _as_array(x)
        out = self.half0 + np.sign(x) * self._cum(0, np.abs(x))
        return float(out) if scalar else out

    def kernel(self, k, x):
        """Unscaled cumulative kernels rho_{1,k}; k in {0, 1, 2, 'density'}."""
        x, scalar = _as_array(x)
        if k == "density":
            out = self.rho(x)
            return float(out) if scalar else out
        if k == 1:
            mass = self.half0 - self._cum(0, np.abs(x))
            out = np.where(x == 0.0, 0.0, np.sign(x) * mass)
            return float(out) if scalar else out
        if self.decay_order < 1:
            raise ValueError(
                "kernels k=0 and k=2 need decay order m >= 1 "
                f"(this test function has m = {self.decay_order})")
        a = np.abs(x)
        k0 = self.half1 - self._cum(1, a)
        if k == 0:
            out = k0
        elif k == 2:
            out = k0 - a * (self.half0 - self._cum(0, a))
        else:
            raise ValueError("kernel index must be 0, 1, 2 or 'density'")
        return float(out) if scalar else out

    def kernel_scaled(self, delta: float, k, x):
        """rho_{delta,k}(x) = delta^(1-k) rho_{1,k}(delta x); density scales as
        delta*rho(delta x)."""
        if delta <= 0:
            raise ValueError("scale delta must be positive")
        x, scalar = _as_array(x)
        if k == "density":
            out = delta * self.rho(delta * x)
        else:
            out = delta ** (1 - k) * self.kernel(k, delta * x)
        return float(out) if scalar else out

    # -- moments -------------------------------------------------------------

    @property
    def c0(self) -> float:
        return self.moments[0.0]

    @property
    def c1(self) -> float:
        if self.decay_order < 1:
            raise ValueError("first moment diverges at decay order m = 0")
        return self.moments[1.0]

    def moment(self, kappa: float) -> float:
        """Absolute moment int |mu|^kappa rho(mu) dmu, cached.

        Admissible window: -1 < kappa < 2m + 1.
        """
        kappa = float(kappa)
        if not -1.0 < kappa < 2 * self.decay_order + 1:
            raise ValueError(
                f"moment order {kappa} outside (-1, {2 * self.decay_order + 1})")
        key = kappa
        if key in self.moments:
            return self.moments[key]
        base = 2.0 * float(np.dot(self._qnodes ** kappa * self._qweights, self._rho_q))
        tail, budget = self.tail(kappa, self.tau_max)
        value = base + 2.0 * float(tail)
        self.moments[key] = value
        self.moment_budgets[key] = 2.0 * float(budget)
        return value

    # -- spectral certificates ------------------------------------------------

    def _hat_quadrature(self, t_grid, kind: str = "cos"):
        """int_0^A trig(t tau) tau^j rho(tau) dtau on oscillation-sized panels.

        ``kind='cos'`` integrates cos(t*tau)*rho; ``kind='sin'`` integrates
        tau*sin(t*tau)*rho (the transform of the first-moment weight).
        """
        A = self.tau_max
        if self._gamma is not None:
            p0 = 2 * self.decay_order + 2
            target = 0.1 * BAND_REL_TOL * self.c0
            A = max(A, float(self._envelope / target) ** (1.0 / p0))
            A = min(A, 4000.0)
        t_hi = float(np.max(t_grid))
        width = max(0.25, 1.5 / t_hi)
        n = int(np.ceil(A / width))
        nodes, weights = panel_rule(np.linspace(0.0, A, n + 1), 10)
        w = weights * self._eval(nodes)
        if kind == "sin":
            vals = np.sin(np.outer(t_grid, nodes)) @ (nodes * w)
        else:
            vals = np.cos(np.outer(t_grid, nodes)) @ w
        return A, vals

    def band_limit(self, eta: float = BAND_ETA, t_hi: float = 4.0,
                   n_scan: int = 160) -> BandLimitCertificate:
        """sup |rhohat(t)| over |t| >= 1 + eta, plus the truncation allowance."""
        if self._certificate is not None and self._certificate.eta == eta:
            return self._certificate
        t_grid = np.linspace(1.0 + eta, t_hi, n_scan)
        A, vals = self._hat_quadrature(t_grid)
        if self._gamma is not None:
            tail = self._scale * self._gamma.oscillatory_tail(t_grid, A)
            vals = vals + tail
            trunc = 1e-14 * self.c0
        else:
            rho_A = float(self.rho(A))
            p0 = 2 * self.decay_order + 2
            prime_env = float(np.max(np.abs(self._eval_prime(self._qnodes[self._qnodes > 0.6 * self.tau_max]))
                                     * self._qnodes[self._qnodes > 0.6 * self.tau_max] ** p0))
            trunc = (rho_A + prime_env * A ** (1 - p0) / (p0 - 1)) / (1.0 + eta)
        sup = float(np.max(np.abs(vals)))
        cert = BandLimitCertificate(
            eta=eta,
            value=(2.0 / SQRT_2PI) * (sup + trunc),
            hat_zero=self.c0 / SQRT_2PI,
            truncation=(2.0 / SQRT_2PI) * trunc,
        )
        self._certificate = cert
        return cert

    def band_limit_derivative(self, eta: float = BAND_ETA, t_hi: float = 4.0,
                              n_scan: int = 160) -> BandLimitCertificate:
        """sup |rhohat'(t)| beyond the band; controls the k=0 kernel transform.

        The transform of the scaled k=0 kernel satisfies
        |rhohat_{delta,0}(t)| = delta |rhohat'(t/delta)| / |t|, so a small
        derivative beyond |t| = 1 certifies the kernel band limit for every
        delta at once.
        """
        if self.decay_order < 1:
            raise ValueError("derivative certificate needs decay order m >= 1")
        if self._hat_prime_certificate is not None and \
                self._hat_prime_certificate.eta == eta:
            return self._hat_prime_certificate
        t_grid = np.linspace(1.0 + eta, t_hi, n_scan)
        A, vals = self._hat_quadrature(t_grid, kind="sin")
        tail0, _ = self.tail(1, A)
        trunc = float(A * self.rho(A) + tail0)
        sup = float(np.max(np.abs(vals)))
        cert = BandLimitCertificate(
            eta=eta,
            value=(2.0 / SQRT_2PI) * (sup + trunc),
            hat_zero=self.moment(2.0) / SQRT_2PI,
            truncation=(2.0 / SQRT_2PI) * trunc,
        )
        self._hat_prime_certificate = cert
        return cert

    def decay_slope(self, lo: float = 10.0, hi: float = 100.0, bins: int = 12) -> float:
        """Log-log slope of the oscillation envelope of rho on [lo, hi]."""
        edges = np.geomspace(lo, hi, bins + 1)
        centers = np.sqrt(edges[:-1] * edges[1:])
        peaks = np.empty(bins)
        for i in range(bins):
            t = np.linspace(edges[i], edges[i + 1], 160)
            peaks[i] = np.max(self.rho(t))
        slope = np.polyfit(np.log(centers), np.log(peaks), 1)[0]
        return float(slope)

    # -- serialization ---------------------------------------------------------

    def to_dict(self) -> dict:
        cert = self.band_limit()
        data = {
            "format_version": _FORMAT_VERSION,
            "family": self.family,
            "params": self.params,
            "decay_order": self.decay_order,
            "tau_max": self.tau_max,
            "scale": self._scale,
            "grid": self.grid.tolist(),
            "cum0": self._cum0_nodes.tolist(),
            "cum1": self._cum1_nodes.tolist(),
            "half0": self.half0,
            "half1": self.half1,
            "moments": {repr(k): v for k, v in sorted(self.moments.items())},
            "band_limit": {
                "eta": cert.eta,
                "value": cert.value,
                "hat_zero": cert.hat_zero,
                "truncation": cert.truncation,
            },
        }
        if self.zeta is not None:
            data["zeta"] = {
                "m": self.zeta.m,
                "nu_tilde": self.zeta.nu_tilde,
                "nu": self.zeta.nu,
                "leg_coeffs": list(self.zeta.leg_coeffs),
                "deriv_norms": list(self.zeta.deriv_norms),
            }
        return data

    def save(self, path):
        Path(path).write_text(json.dumps(self.to_dict(), indent=1, sort_keys=True))


# ---------------------------------------------------------------------------
# constructors
# ---------------------------------------------------------------------------


def build_gamma(l: int, normalize: bool = True) -> TestFunction:
    """Sinc-power test function of band limit 1 and decay order l - 1.

    With ``normalize`` the density integrates to one; otherwise the raw

    window average is returned (unit mass and the moment calculus then do not
    apply, only parity, decay and the band limit).
    """
    if not isinstance(l, int) or l < 1:
        raise ValueError("sinc-power order l must be a positive integer "
                         "(l = 0 decays too slowly to be usable)")
    fam = _GammaFamily(l)
    tau_max = 200.0
    if normalize:
        edges = np.unique(np.concatenate([
            np.arange(0.0, 3.0, 0.075), np.arange(3.0, tau_max, 0.3), [tau_max]]))
        nodes, weights = panel_rule(edges, 12)
        c0_raw = 2.0 * (float(np.dot(fam.value(nodes), weights))
                        + float(fam.power_tail(0, tau_max)))
        scale = 1.0 / c0_raw
    else:
        scale = 1.0
    return TestFunction(
        family="gamma",
        params={"l": l, "normalize": bool(normalize)},
        decay_order=l - 1,
        evaluator=lambda tau: scale * fam.value(tau),
        evaluator_prime=lambda tau: scale * fam.derivative(tau),
        tau_max=tau_max,
        frequencies=[j / l for j in range(1, l + 1)],
        gamma_family=fam,
        scale=scale,
    )


_ZETA_TAU_MAX = {1: 420.0, 2: 330.0, 3: 270.0, 4: 240.0, 5: 220.0, 6: 210.0}


def build_rho_from_zeta(z: ZetaSolution) -> TestFunction:
    """Square of the cosine transform of a clamped mode; decay order z.m."""
    m = z.m
    tau_max = _ZETA_TAU_MAX[m]
    panels = max(8, int(np.ceil(tau_max / 16.0)))
    t_nodes, t_w = panel_rule(np.linspace(0.0, 0.5, panels + 1), 12)
    zeta_vals = npleg.legval(2.0 * t_nodes, np.asarray(z.leg_coeffs))
    w0 = t_w * zeta_vals
    w1 = t_nodes * w0
    factor = math.sqrt(2.0 / math.pi)

    def zhat(tau):
        return factor * (np.cos(np.outer(tau, t_nodes)) @ w0)

    def zhat_prime(tau):
        return -factor * (np.sin(np.outer(tau, t_nodes)) @ w1)

    def evaluator(tau):
        tau = np.abs(np.asarray(tau, dtype=float))
        flat = tau.ravel()
        out = np.empty_like(flat)
        for start in range(0, flat.size, 16384):
            sl = slice(start, start + 16384)
            out[sl] = zhat(flat[sl]) ** 2
        return out.reshape(tau.shape)

    def evaluator_prime(tau):
        t = np.asarray(tau, dtype=float)
        a = np.abs(t).ravel()
        out = np.empty_like(a)
        for start in range(0, a.size, 16384):
            sl = slice(start, start + 16384)
            out[sl] = 2.0 * zhat(a[sl]) * zhat_prime(a[sl])
        out = out.reshape(t.shape)
        return np.where(t < 0, -out, out)

    return TestFunction(
        family="zeta",
        params={"m": m},
        decay_order=m,
        evaluator=evaluator,
        evaluator_prime=evaluator_prime,
        tau_max=tau_max,
        frequencies=[1.0],
        zeta=z,
    )


def load_testfunction(path) -> TestFunction:
    """Rebuild a serialized test function; tables are reused, not recomputed."""
    data = json.loads(Path(path).read_text())
    if data.get("format_version") != _FORMAT_VERSION:
        raise ValueError(f"unsupported test-function format: "
                         f"{data.get('format_version')!r}")
    family = data["family"]
    if family == "gamma":
        fresh = build_gamma(int(data["params"]["l"]),
                            bool(data["params"]["normalize"]))
        return fresh
    if family == "zeta":
        zd = data["zeta"]
        z = solve_zeta(int(zd["m"]))
        return build_rho_from_zeta(z)
    raise ValueError(f"unknown test-function family {family!r}")


# ---------------------------------------------------------------------------
# module-level operation wrappers and the axiom certificate
# ---------------------------------------------------------------------------


def moment(rho: TestFunction, kappa: float) -> float:
    return rho.moment(kappa)


def eval_kernel(rho: TestFunction, delta: float, k, tau):
    """Scaled kernel rho_{delta,k}(tau); k='density' gives delta*rho(delta*tau)."""
    return rho.kernel_scaled(delta, k, tau)


@dataclass(frozen=True)
class CheckResult:
    name: str
    value: float
    threshold: float | None
    ok: bool
    note: str = ""


def certify(rho: TestFunction, mass_tol: float = 1e-8) -> list:
    """Numerically certify the admissibility axioms and family inequalities."""
    checks = []
    m = rho.decay_order
    normalized = rho.family != "gamma" or rho.params.get("normalize", True)

    if normalized:
        err = abs(rho.c0 - 1.0)
        checks.append(CheckResult("unit_mass", err, mass_tol, err <= mass_tol))
    else:
        checks.append(CheckResult("unit_mass", rho.c0, None, True,
                                  note="unnormalized by request"))

    probe = np.linspace(0.0, min(50.0, rho.tau_max), 257)
    even_err = float(np.max(np.abs(rho.rho(probe) - rho.rho(-probe))))
    checks.append(CheckResult("evenness", even_err, 0.0, even_err <= 0.0))

    min_val = float(np.min(rho._rho_q))
    checks.append(CheckResult("nonnegative", min_val, 0.0, min_val >= -1e-15))

    slope = rho.decay_slope()
    slope_cap = -(2 * m + 2) + 0.3
    checks.append(CheckResult("decay_slope", slope, slope_cap, slope <= slope_cap))
    checks.append(CheckResult("envelope_constant", rho._envelope, None,
                              math.isfinite(rho._envelope)))

    cert = rho.band_limit()
    cap = BAND_REL_TOL * cert.hat_zero
    checks.append(CheckResult("band_limit", cert.value, cap, cert.value <= cap))

    if m >= 1 and normalized:
        kappas = [float(k) for k in range(2 * m + 1)]
        kappas += [k for k in (0.5, 1.5) if k < 2 * m + 1]
        vals = {k: rho.moment(k) for k in kappas}
        worst = 0.0
        for r in kappas:
            for k in kappas:
                if r <= k:
                    lhs, rhs = vals[r] ** k, vals[k] ** r
                    worst = max(worst, (lhs - rhs) / max(1.0, abs(rhs)))
        checks.append(CheckResult("moment_convexity", worst, 1e-7, worst <= 1e-7))

    if rho.family == "zeta":
        c1 = rho.c1
        checks.append(CheckResult("first_moment_floor", c1, math.pi / 2,
                                  c1 >= math.pi / 2 - 1e-9))
        z = rho.zeta
        ray = rayleigh_polynomial_bound(z.m)
        checks.append(CheckResult("rayleigh_cap", z.nu_tilde, ray,
                                  z.nu_tilde <= ray * (1 + 1e-12)))
        if z.m >= 2:
            cap_nu = crude_root_bound(z.m)
            checks.append(CheckResult("crude_root_cap", z.nu, cap_nu,
                                      z.nu <= cap_nu))
    return checks
