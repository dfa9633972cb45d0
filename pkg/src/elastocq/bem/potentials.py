"""Off-surface evaluation of the single- and double-layer potentials.

``S Lambda(x) = int E(x, y) Lambda(y) dy`` for P0 tractions and
``D Phi(x) = int T(x, y)^T Phi(y) dy`` for P1 displacements, where column ``i``
of ``T`` is the traction at ``y`` of ``y -> E(x, y) e_i``.

Panels are integrated with a rule chosen by the distance from the target:

* far panels (more than ``far_factor`` diameters): degree-4 triangle rule;
* intermediate panels: degree-8 rule;
* near panels (within ``near_factor`` diameters): the panel is split into
  three triangles around the orthogonal projection of the target and each is
  integrated in polar-like coordinates with sinh-graded radial and angular
  variables, which resolves the near-singular kernel at any height.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass

import numpy as np

from .. import kernels
from ..kernels import as_frequency
from ..materials import IsotropicExterior
from ..mesh import SurfaceMesh
from ..quadrature import gauss_legendre01, gauss_triangle

log = logging.getLogger(__name__)


class NearSurfaceWarning(UserWarning):
    """Target closer to the surface than the reliable quadrature distance."""


@dataclass(frozen=True)
class PotentialQuadrature:
    """Settings of the off-surface potential quadrature.

    Targets are processed ``chunk`` at a time, reduced so that a chunk
    covers at most ``max_pairs`` target-panel pairs.
    """

    near_factor: float = 1.5
    far_factor: float = 4.0
    radial_points: int = 12
    angular_points: int = 12
    warn_distance: float = 0.1
    chunk: int = 64
    max_pairs: int = 20_480

    def targets_per_chunk(self, n_panels: int) -> int:
        return max(1, min(self.chunk, self.max_pairs // max(1, n_panels)))


def _sinh_map(t, w, center, scale):
    """Map Gauss points on [0, 1] to [0, 1] graded around ``center``.

    ``center``/``scale`` broadcast against the trailing axis of ``t``; returns
    the mapped points and Jacobian-weighted weights.
    """
    a = np.arcsinh((0.0 - center) / scale)
    b = np.arcsinh((1.0 - center) / scale)
    u = a + (b - a) * t
    x = center + scale * np.sinh(u)
    jac = scale * np.cosh(u) * (b - a)
    return x, w * jac


def _near_rule(x, tri, pq: PotentialQuadrature):
    """Points, weights and barycentrics for one target and many near panels.

    Parameters
    ----------
    x : (3,) target shared by all panels, or (m, 3) with one target per panel.
    tri : (m, 3, 3) panel vertices.

    Returns arrays of shapes (m, Q, 3), (m, Q) and (m, Q, 3).
    """
    m = tri.shape[0]
    a, b, c = tri[:, 0], tri[:, 1], tri[:, 2]
    nrm = np.cross(b - a, c - a)
    dbl = np.linalg.norm(nrm, axis=1)
    n = nrm / dbl[:, None]
    xb = np.broadcast_to(x, a.shape)
    height = np.einsum("md,md->m", xb - a, n)
    p = xb - height[:, None] * n
    eps = np.maximum(np.abs(height), 1e-300)
    tr, wr = gauss_legendre01(pq.radial_points)
    ta, wa = gauss_legendre01(pq.angular_points)
    pts, wts, bars = [], [], []
    for k in range(3):
        A = tri[:, (k + 1) % 3]
        B = tri[:, (k + 2) % 3]
        e = B - A
        le2 = np.einsum("md,md->m", e, e)
        # signed doubled area of (p, A, B) relative to the panel orientation
        sub = np.einsum("md,md->m", np.cross(A - p, B - p), n)
        # angular grading around the point of AB closest to p
        tau0 = np.einsum("md,md->m", p - A, e) / le2
        foot = A + tau0[:, None] * e
        dline = np.linalg.norm(p - foot, axis=1)
        scale_a = np.maximum(np.sqrt(dline ** 2 + eps ** 2) / np.sqrt(le2), 1e-12)
        tau, wtau = _sinh_map(ta[None, :], wa[None, :], tau0[:, None], scale_a[:, None])
        edge_pt = A[:, None, :] + tau[:, :, None] * e[:, None, :]          # (m, na, 3)
        L = np.linalg.norm(edge_pt - p[:, None, :], axis=2)                 # (m, na)
        delta = np.maximum(eps[:, None] / np.maximum(L, 1e-300), 1e-14)
        rho, wrho = _sinh_map(tr[None, None, :], wr[None, None, :], 0.0 * delta[:, :, None],
                              delta[:, :, None])
        y = p[:, None, None, :] + rho[..., None] * (edge_pt[:, :, None, :] - p[:, None, None, :])
        w = wtau[:, :, None] * wrho * rho * sub[:, None, None]
        pts.append(y.reshape(m, -1, 3))
        wts.append(w.reshape(m, -1))
    y = np.concatenate(pts, axis=1)
    w = np.concatenate(wts, axis=1)
    # barycentric coordinates of the (possibly extended) plane points
    e1, e2 = b - a, c - a
    d = y - a[:, None, :]
    g11 = np.einsum("md,md->m", e1, e1)
    g12 = np.einsum("md,md->m", e1, e2)
    g22 = np.einsum("md,md->m", e2, e2)
    det = g11 * g22 - g12 ** 2
    r1 = np.einsum("mqd,md->mq", d, e1)
    r2 = np.einsum("mqd,md->mq", d, e2)
    u = (g22[:, None] * r1 - g12[:, None] * r2) / det[:, None]
    v = (g11[:, None] * r2 - g12[:, None] * r1) / det[:, None]
    bary = np.stack([1 - u - v, u, v], axis=-1)
    return y, w, bary


def _classify(x, surface, pq):
    c = surface.centroids
    dist = np.linalg.norm(x[:, None, :] - c[None, :, :], axis=2) - 0.5 * surface.diameters[None, :]
    ratio = dist / surface.diameters[None, :]
    return ratio


def layer_rules(surface: SurfaceMesh, x: np.ndarray, pq: PotentialQuadrature | None = None):
    """Quadrature nodes over all panels for every target in ``x``.

    Returns ``(target, panel, y, w, bary)`` with one row per node.
    """
    pq = pq or PotentialQuadrature()
    x = np.atleast_2d(np.asarray(x, dtype=float))
    verts = surface.vertices[surface.triangles]
    jac = 2.0 * surface.areas
    ratio = _classify(x, surface, pq)
    out = []
    for order, mask in ((4, ratio >= pq.far_factor),
                        (8, (ratio >= pq.near_factor) & (ratio < pq.far_factor))):
        ti, pi = np.nonzero(mask)
        if ti.size == 0:
            continue
        rule = gauss_triangle(order)
        nq = len(rule)
        y = np.einsum("qa,mad->mqd", rule.points, verts[pi])
        w = jac[pi][:, None] * rule.weights[None, :]
        bary = np.broadcast_to(rule.points, (pi.size, nq, 3))
        out.append((np.repeat(ti, nq), np.repeat(pi, nq), y.reshape(-1, 3), w.ravel(),
                    bary.reshape(-1, 3)))
    ti_all, pi_all = np.nonzero(ratio < pq.near_factor)
    for k in np.unique(ti_all):
        panels = pi_all[ti_all == k]
        y, w, bary = _near_rule(x[k], verts[panels], pq)
        nq = w.shape[1]
        out.append((np.full(panels.size * nq, k), np.repeat(panels, nq), y.reshape(-1, 3),
                    w.ravel(), bary.reshape(-1, 3)))
    cols = list(zip(*out))
    return tuple(np.concatenate(c) for c in cols)


def _distance_warning(surface, x, pq):
    if x.size == 0:
        return
    ratio = _classify(x, surface, pq).min(axis=1)
    if np.any(ratio < pq.warn_distance):
        warnings.warn("target within 0.1 panel diameters of the surface; potential accuracy "
                      "relies on the near-field rule", NearSurfaceWarning, stacklevel=3)


def _chunks(x, size):
    for k in range(0, x.shape[0], size):
        yield k, x[k:k + size]


def _p1_values(surface, panels, bary, Phi):
    """Interpolated P1 density at nodes, shape (n, 3)."""
    P = np.asarray(Phi).reshape(-1, 3)
    vid = surface.triangles[panels]
    return np.einsum("na,nad->nd", bary, P[vid])


def potential_single(surface: SurfaceMesh, Lam, x, s, mat: IsotropicExterior,
                     pq: PotentialQuadrature | None = None, warn: bool = True) -> np.ndarray:
    """Single-layer potential of a P0 traction density at targets ``x`` (n, 3)."""
    pq = pq or PotentialQuadrature()
    s = as_frequency(s).s
    x = np.atleast_2d(np.asarray(x, dtype=float))
    if warn:
        _distance_warning(surface, x, pq)
    L = np.asarray(Lam, dtype=complex).reshape(-1, 3)
    out = np.zeros((x.shape[0], 3), dtype=complex)
    for k0, xc in _chunks(x, pq.targets_per_chunk(surface.n_triangles)):
        ti, pi, y, w, _ = layer_rules(surface, xc, pq)
        E = kernels.green(xc[ti] - y, s, mat)
        val = np.einsum("n,nij,nj->ni", w, E, L[pi])
        for d in range(3):
            out[k0:k0 + xc.shape[0], d] += (np.bincount(ti, val[:, d].real, xc.shape[0])
                                             + 1j * np.bincount(ti, val[:, d].imag, xc.shape[0]))
    return out


def _double_density(surface, pi, bary, Phi):
    return _p1_values(surface, pi, bary, np.asarray(Phi, dtype=complex))


def potential_double(surface: SurfaceMesh, Phi, x, s, mat: IsotropicExterior,
                     pq: PotentialQuadrature | None = None, warn: bool = True) -> np.ndarray:
    """Double-layer potential of a P1 displacement density at targets ``x``."""
    pq = pq or PotentialQuadrature()
    s = as_frequency(s).s
    x = np.atleast_2d(np.asarray(x, dtype=float))
    if warn:
        _distance_warning(surface, x, pq)
    out = np.zeros((x.shape[0], 3), dtype=complex)
    for k0, xc in _chunks(x, pq.targets_per_chunk(surface.n_triangles)):
        ti, pi, y, w, bary = layer_rules(surface, xc, pq)
        g = kernels.green_grad(xc[ti] - y, s, mat)
        T = kernels.traction_y(g, surface.normals[pi], mat.lam, mat.mu)
        dens = _double_density(surface, pi, bary, Phi)
        val = np.einsum("n,nji,nj->ni", w, T, dens)
        _scatter(out, k0, ti, val, xc.shape[0])
    return out


def _scatter(out, k0, ti, val, n):
    flat = val.reshape(val.shape[0], -1)
    res = np.empty((n, flat.shape[1]), dtype=complex)
    for d in range(flat.shape[1]):
        res[:, d] = np.bincount(ti, flat[:, d].real, n) + 1j * np.bincount(ti, flat[:, d].imag, n)
    out[k0:k0 + n] += res.reshape((n,) + out.shape[1:])


def gradient_single(surface: SurfaceMesh, Lam, x, s, mat: IsotropicExterior,
                    pq: PotentialQuadrature | None = None) -> np.ndarray:
    """``G[n, k, i] = d_k (S Lambda)_i`` at targets."""
    pq = pq or PotentialQuadrature()
    s = as_frequency(s).s
    x = np.atleast_2d(np.asarray(x, dtype=float))
    L = np.asarray(Lam, dtype=complex).reshape(-1, 3)
    out = np.zeros((x.shape[0], 3, 3), dtype=complex)
    for k0, xc in _chunks(x, pq.targets_per_chunk(surface.n_triangles)):
        ti, pi, y, w, _ = layer_rules(surface, xc, pq)
        g = kernels.green_grad(xc[ti] - y, s, mat)
        val = np.einsum("n,nkij,nj->nki", w, g, L[pi])
        _scatter(out, k0, ti, val, xc.shape[0])
    return out


def gradient_double(surface: SurfaceMesh, Phi, x, s, mat: IsotropicExterior,
                    pq: PotentialQuadrature | None = None) -> np.ndarray:
    """``G[n, c, i] = d_c (D Phi)_i`` at targets."""
    pq = pq or PotentialQuadrature()
    s = as_frequency(s).s
    x = np.atleast_2d(np.asarray(x, dtype=float))
    lam, mu = mat.lam, mat.mu
    out = np.zeros((x.shape[0], 3, 3), dtype=complex)
    for k0, xc in _chunks(x, pq.targets_per_chunk(surface.n_triangles)):
        ti, pi, y, w, bary = layer_rules(surface, xc, pq)
        h = kernels.green_hess(xc[ti] - y, s, mat)          # h[n, c, k, i, j]
        ny = surface.normals[pi]
        div = np.einsum("nckik->nci", h)
        T = lam * np.einsum("nj,nci->ncji", ny, div)
        T += mu * np.einsum("nk,nckij->ncji", ny, h)
        T += mu * np.einsum("nl,ncjil->ncji", ny, h)
        T = -T
        dens = _double_density(surface, pi, bary, Phi)
        val = np.einsum("n,ncji,nj->nci", w, T, dens)
        _scatter(out, k0, ti, val, xc.shape[0])
    return out


def traction_from_gradient(G: np.ndarray, normal: np.ndarray, mat: IsotropicExterior) -> np.ndarray:
    """Traction ``sigma(u) n`` from ``G[n, k, i] = d_k u_i``."""
    normal = np.broadcast_to(normal, (G.shape[0], 3))
    div = np.einsum("nkk->n", G)
    strain_t = G + np.swapaxes(G, 1, 2)
    return mat.lam * div[:, None] * normal + mat.mu * np.einsum("nki,nk->ni", strain_t, normal)
