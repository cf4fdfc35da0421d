"""Explicit bounds for step functions that grow like tau_+^n.

When the cosine transform of F' agrees with that of n*tau_+^(n-1) below the
smoothing frequency 1/delta (the caller owns that hypothesis; it holds
identically for the model F_0 = tau_+^n, and for spectral counting data at
delta equal to the interior distance), the smoothed profile and the k=0
kernel convolution are pinched between moment polynomials.  Combining the
pinch with the pointwise recovery envelope gives fully explicit power-law
bounds whose constants come from the clamped-mode eigenvalue root nu.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .mollifier import TestFunction, solve_zeta


@dataclass(frozen=True)
class PowerParams:
    """Growth degree n, its parity flag sigma, the minimal admissible decay
    order m_n > n/2, and the eigenvalue root nu for that order."""

    n: int
    sigma: int
    m_n: int
    nu: float


def classify(n: int) -> PowerParams:
    """Parity flag and minimal decay order for growth degree n."""
    if not isinstance(n, int) or n < 0:
        raise ValueError("growth degree n must be a nonnegative integer")
    sigma = 1 if n % 2 == 0 else 0
    m_n = (n + 1) // 2 if n % 2 == 1 else (n + 2) // 2
    return PowerParams(n=n, sigma=sigma, m_n=m_n, nu=solve_zeta(m_n).nu)


def p_poly(sign: str, n: int, tau: float, mu: float) -> float:
    """Symmetrized power polynomials.

    '+' : ((tau+mu)^n + (tau-mu)^n)/2       (even in mu)
    '-' : (mu(tau+mu)^n - mu(tau-mu)^n)/2   (even in mu as well)
    """
    if n < 0:
        raise ValueError("degree must be nonnegative")
    if sign == "+":
        return 0.5 * ((tau + mu) ** n + (tau - mu) ** n)
    if sign == "-":
        return 0.5 * (mu * (tau + mu) ** n - mu * (tau - mu) ** n)
    raise ValueError("sign must be '+' or '-'")


def _moment_expansion(rho: TestFunction, sign: str, n: int,
                      delta: float, tau: float) -> float:
    """int P_n^sign(tau, mu/delta) rho(mu) dmu via the even-moment table."""
    total = 0.0
    if sign == "+":
        for j in range(0, n + 1, 2):
            total += math.comb(n, j) * tau ** (n - j) * delta ** (-j) * rho.moment(j)
    else:
        for j in range(1, n + 1, 2):
            total += (math.comb(n, j) * tau ** (n - j)
                      * delta ** (-(j + 1)) * rho.moment(j + 1))
    return total


@dataclass(frozen=True)
class ModelSandwich:
    """Moment-polynomial pinch of the smoothed power model at one (delta, tau).

    The pinched quantities are the convolutions with the odd symmetrization
    G(tau) = F(tau) - F(-tau), which coincides with F on tau > 0 and is what
    the recovery identity controls for right-supported F:
    ``conv_lower <= rho_delta*G(tau) <= conv_upper`` and
    ``prime_upper >= rho_{delta,0}*G'(tau)``.  For odd n the pinch collapses
    to an equality.  The ``*_coarse`` fields are the weaker single-binomial
    forms implied by the sharp ones.
    """

    conv_lower: float
    conv_upper: float
    prime_upper: float
    conv_lower_coarse: float
    conv_upper_coarse: float
    prime_upper_coarse: float


def model_sandwich(rho: TestFunction, n: int, delta: float, tau: float) -> ModelSandwich:
    """Evaluate the moment pinch for growth degree n at (delta, tau > 0)."""
    if tau <= 0:
        raise ValueError("the pinch holds for tau > 0 only")
    if delta <= 0:
        raise ValueError("delta must be positive")
    m = rho.decay_order
    if 2 * m <= n:
        raise ValueError(
            f"growth degree {n} needs decay order m > {n / 2:g}; "
            f"this test function has m = {m}")
    sigma = 1 if n % 2 == 0 else 0
    plus = _moment_expansion(rho, "+", n, delta, tau)
    minus = _moment_expansion(rho, "-", n, delta, tau)
    conv_upper = plus
    conv_lower = plus - sigma * delta ** (-n) * rho.moment(n)
    prime_upper = delta ** 2 * (minus + sigma * delta ** (-n - 1) * rho.moment(n + 1))

    coarse_sum = 0.0
    coarse_prime = 0.0
    for i in range(0, n):
        binom = math.comb(n - 1, i) * tau ** (n - 1 - i) * delta ** (-i)
        coarse_sum += binom * rho.moment(i + 1)
        coarse_prime += binom * rho.moment(i + 2)
    conv_upper_coarse = tau ** n + n * delta ** (-1) * coarse_sum
    prime_upper_coarse = n * coarse_prime
    return ModelSandwich(
        conv_lower=conv_lower,
        conv_upper=conv_upper,
        prime_upper=prime_upper,
        conv_lower_coarse=tau ** n,
        conv_upper_coarse=conv_upper_coarse,
        prime_upper_coarse=prime_upper_coarse,
    )


def weyl_pointwise(n: int, delta: float, tau: float, nu: float):
    """Explicit power-law envelope for F(tau) itself.

    lower = tau^n - (2/pi) nu^2 n delta^-1 (tau + nu/delta)^(n-1);
    upper adds the same shape with constant (2/pi) nu^2 + nu.
    """
    shape = n * delta ** (-1) * (tau + nu / delta) ** (n - 1)
    lower = tau ** n - (2.0 / math.pi) * nu ** 2 * shape
    upper = tau ** n + ((2.0 / math.pi) * nu ** 2 + nu) * shape
    return lower, upper


def riesz_bounds(n: int, delta: float, lam: float, nu: float):
    """Explicit bounds for int_0^{lam^2} F(sqrt(mu)) dmu around 2 lam^(n+2)/(n+2)."""
    if lam <= 0:
        raise ValueError("lam must be positive")
    main = 2.0 * lam ** (n + 2) / (n + 2)
    lower = main - 2.0 * n * nu ** 2 * delta ** (-2) * lam * (lam + nu / delta) ** (n - 1)
    upper = main + (n + 1) * nu ** 2 * delta ** (-2) * (lam + nu / delta) ** n
    return lower, upper


def cubic_sandwich(eps: float, delta: float, tau: float, d1: float, d2: float):
    """Two-sided cubic-growth bounds from the shifted envelope at T = delta.

    ``d1`` and ``d2`` are the squared L2 norms of the first and second
    derivatives of a clamped mode with m = 2.  Both bounds blow up like 1/eps
    as the shift is removed.
    """
    if eps <= 0 or delta <= 0 or tau <= 0:
        raise ValueError("eps, delta and tau must be positive")
    poly_lo = tau ** 3 - 1.5 * eps * tau ** 2 + eps ** 2 * tau - 0.25 * eps ** 3
    poly_hi = tau ** 3 + 1.5 * eps * tau ** 2 + eps ** 2 * tau + 0.25 * eps ** 3
    d1_lo = 1.5 / delta ** 2 * (tau - tau ** 2 / eps - 0.5 * eps) * d1
    d1_hi = 1.5 / delta ** 2 * (tau + tau ** 2 / eps + 0.5 * eps) * d1
    tail = d2 / (eps * delta ** 4)
    return poly_lo + d1_lo - tail, poly_hi + d1_hi + tail
