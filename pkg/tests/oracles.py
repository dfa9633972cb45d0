"""Independent reference computations shared by the tests."""

from __future__ import annotations

import numpy as np
from scipy.special import roots_legendre


def laplace_triangle_potential(x, tri):
    """Closed-form ``int_T dy / |x - y|`` for a flat triangle ``tri`` (3, 3).

    Edge-sum formula with the solid-angle correction for off-plane points.
    """
    x = np.atleast_2d(np.asarray(x, dtype=float))
    a, b, c = np.asarray(tri, dtype=float)
    n = np.cross(b - a, c - a)
    n /= np.linalg.norm(n)
    h = (x - a) @ n
    rho = x - h[:, None] * n
    out = np.zeros(len(x))
    ah = np.abs(h)
    for p, q in ((a, b), (b, c), (c, a)):
        e = (q - p) / np.linalg.norm(q - p)
        m = np.cross(e, n)  # outward in-plane normal for counter-clockwise vertices
        lp = (q - rho) @ e
        lm = (p - rho) @ e
        t0 = (p - rho) @ m
        r02 = t0 ** 2 + h ** 2
        Rp = np.sqrt(lp ** 2 + r02)
        Rm = np.sqrt(lm ** 2 + r02)
        with np.errstate(divide="ignore", invalid="ignore"):
            r0 = np.sqrt(r02)
            logt = np.where(r0 > 1e-300, t0 * (np.arcsinh(lp / r0) - np.arcsinh(lm / r0)), 0.0)
            at = np.arctan2(t0 * lp, r02 + ah * Rp) - np.arctan2(t0 * lm, r02 + ah * Rm)
        out += logt - ah * np.where(ah > 0, at, 0.0)
    return out


def graded_triangle_rule(tri, corner=0, n=40, grading=3.0):
    """Collapsed Gauss rule on ``tri`` graded towards vertex ``corner``.

    Returns physical points and weights.
    """
    tri = np.roll(np.asarray(tri, dtype=float), -corner, axis=0)
    t, w = roots_legendre(n)
    t = 0.5 * (t + 1)
    w = 0.5 * w
    # radial grading r = t**g
    r = t ** grading
    wr = w * grading * t ** (grading - 1)
    R, S = np.meshgrid(r, t, indexing="ij")
    W = np.outer(wr, w) * R
    u = (R * (1 - S)).ravel()
    v = (R * S).ravel()
    a, b, c = tri
    pts = a + u[:, None] * (b - a) + v[:, None] * (c - a)
    area2 = np.linalg.norm(np.cross(b - a, c - a))
    return pts, W.ravel() * area2
