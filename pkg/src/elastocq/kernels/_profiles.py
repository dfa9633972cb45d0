"""Radial profile functions of the Laplace-domain Green tensor.

With ``zeta = s r / c_s`` and ``beta = c_s / c_p`` the tensor reads

    E(z) = (P(zeta) I + Q(zeta) zhat zhat^T) / (4 pi mu r)

    P = exp(-zeta) + N / zeta**2,   N = A(zeta) - A(beta zeta),  A(w) = exp(-w) (1 + w)
    Q = O / zeta**2,                O = B(beta zeta) - B(zeta),  B(w) = exp(-w) (3 + 3w + w**2)

Both quotients cancel catastrophically for small ``zeta``; there the Taylor
series is used instead.  Every profile ``F`` is returned together with
``zeta F'`` and ``zeta**2 F''``, which is all the radial calculus needs.
"""

from __future__ import annotations

from functools import lru_cache
from math import factorial

import numpy as np

# Switch to the series when |zeta| < SERIES_THRESHOLD.
SERIES_THRESHOLD = 0.25
SERIES_TERMS = 18

FULL, STATIC_SUBTRACTED, SHEAR_FREE = 0, 1, 2


@lru_cache(maxsize=64)
def series_coefficients(beta: float, mode: int = FULL, terms: int = SERIES_TERMS):
    """Taylor coefficients of the P- and Q-profiles.

    ``mode`` selects the full profiles, the profiles minus their static
    limits, or ``P - exp(-zeta)`` in place of ``P``.
    Returns two arrays of shape (3, terms): rows are the coefficients of
    ``F``, ``zeta F'`` and ``zeta**2 F''``.
    """
    m = np.arange(terms)
    p = np.empty(terms)
    q = np.empty(terms)
    for k in range(terms):
        n = k + 2
        c = (-1) ** n * (1 - n) * (1 - beta ** n) / factorial(n)
        d = (-1) ** n * (n - 1) * (n - 3) * (beta ** n - 1) / factorial(n)
        p[k] = c + ((-1) ** k / factorial(k) if mode != SHEAR_FREE else 0.0)
        q[k] = d
    if mode == STATIC_SUBTRACTED:
        p[0] = 0.0
        q[0] = 0.0
    scale = np.stack([np.ones(terms), m, m * (m - 1.0)])
    return scale * p, scale * q


def static_limits(beta: float) -> tuple[float, float]:
    """``P(0)`` and ``Q(0)``, the Kelvin-tensor coefficients."""
    return 0.5 * (1.0 + beta ** 2), 0.5 * (1.0 - beta ** 2)


def _horner(coef, z):
    out = np.full(z.shape, coef[-1], dtype=complex)
    for c in coef[-2::-1]:
        out = out * z + c
    return out


def profiles(zeta: np.ndarray, beta: float, mode: int = FULL, nder: int = 2):
    """Evaluate ``(F, zeta F', zeta**2 F'')`` for the P- and Q-profiles.

    Returns
    -------
    P, Q : ndarray, shape (nder + 1,) + zeta.shape
    """
    zeta = np.asarray(zeta, dtype=complex)
    P = np.empty((nder + 1,) + zeta.shape, dtype=complex)
    Q = np.empty_like(P)
    small = np.abs(zeta) < SERIES_THRESHOLD
    if small.any():
        zs = zeta[small]
        pc, qc = series_coefficients(beta, mode)
        for k in range(nder + 1):
            P[k][small] = _horner(pc[k], zs)
            Q[k][small] = _horner(qc[k], zs)
    big = ~small
    if big.any():
        z = zeta[big]
        e1 = np.exp(-z)
        e2 = np.exp(-beta * z)
        bz = beta * z
        b2 = beta * beta
        u = 1.0 / (z * z)
        z2 = z * z
        N = e1 * (1.0 + z) - e2 * (1.0 + bz)
        O = e2 * (3.0 + 3.0 * bz + bz * bz) - e1 * (3.0 + 3.0 * z + z2)
        P[0][big] = u * N
        Q[0][big] = u * O
        if nder >= 1:
            N1 = z2 * (b2 * e2 - e1)
            O1 = z2 * ((1.0 + z) * e1 - b2 * (1.0 + bz) * e2)
            P[1][big] = u * (N1 - 2.0 * N)
            Q[1][big] = u * (O1 - 2.0 * O)
        if nder >= 2:
            N2 = z2 * ((z - 1.0) * e1 - b2 * (bz - 1.0) * e2)
            O2 = z2 * (b2 * (bz * bz - bz - 1.0) * e2 - (z2 - z - 1.0) * e1)
            P[2][big] = u * (N2 - 4.0 * N1 + 6.0 * N)
            Q[2][big] = u * (O2 - 4.0 * O1 + 6.0 * O)
        if mode != SHEAR_FREE:
            P[0][big] += e1
            if nder >= 1:
                P[1][big] -= z * e1
            if nder >= 2:
                P[2][big] += z2 * e1
        if mode == STATIC_SUBTRACTED:
            p0, q0 = static_limits(beta)
            P[0][big] -= p0
            Q[0][big] -= q0
    return P, Q
