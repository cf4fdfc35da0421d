"""Closed-form tail integrals of power-damped trigonometric integrands.

Provides ``int_B^inf u**(-p) * cos(c*u) du`` and the sine analogue for
integer p >= 1 via the sine/cosine integrals and an upward recurrence in p.
These make truncated-range quadrature of slowly decaying oscillatory
densities exact instead of relying on brute-force range extension.
"""

from __future__ import annotations

import numpy as np
from scipy.special import sici


def cos_sin_power_tails(p: int, c, B):
    """Tail integrals (I, J) with I = int_B^inf u^-p cos(cu) du, J the sine one.

    Broadcasts over ``c`` and ``B``.  ``c`` may be negative (I is even in c,
    J odd) or zero, but c == 0 requires p >= 2 for convergence.
    """
    if p < 1:
        raise ValueError("power p must be a positive integer")
    c = np.asarray(c, dtype=float)
    B = np.asarray(B, dtype=float)
    if np.any(B <= 0):
        raise ValueError("tail start B must be positive")
    sign = np.sign(c)
    ac = np.abs(c)
    zero = ac == 0.0
    if np.any(zero) and p == 1:
        raise ValueError("c = 0 diverges at p = 1")
    phase = np.where(zero, 1.0, ac * B)  # dummy phase where c == 0
    si, ci = sici(phase)
    cos_b = np.cos(phase)
    sin_b = np.sin(phase)
    I = np.where(zero, np.inf, -ci)
    J = np.where(zero, 0.0, np.pi / 2.0 - si)
    for q in range(2, p + 1):
        head = B ** (1 - q) / (q - 1)
        I, J = (
            np.where(zero, head, cos_b * head - ac / (q - 1) * J),
            np.where(zero, 0.0, sin_b * head + ac / (q - 1) * I),
        )
    return I, sign * J
