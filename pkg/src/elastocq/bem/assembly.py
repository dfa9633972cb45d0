"""Dense Galerkin matrices of the boundary integral operators.

Discrete spaces: P0 tractions (dof ``3 * triangle + i``) and continuous P1
displacements (dof ``3 * vertex + j``).  Matrices:

* ``V`` (P0 x P0): single-layer operator.
* ``K`` (P0 x P1): double-layer operator without the identity part.  The
  traction kernel is integrated by parts against the trial hat functions so
  that only weakly singular kernels remain.
* ``Kp = K.T`` (P1 x P0): adjoint double layer (the bilinear pairing is
  symmetric).
* ``W`` (P1 x P1): hypersingular operator as a bilinear form.  The static
  part uses the integration-by-parts form with surface curls of the basis
  functions; the dynamic remainder is the double traction of the difference
  between the dynamic and static Green tensors.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .. import kernels
from ..kernels import STATIC_SUBTRACTED, ComplexFrequency, as_frequency
from ..materials import IsotropicExterior
from ..mesh import SurfaceMesh
from ..spaces import _vector_kron, p0p1_mass, p1p1_mass
from .plan import PairPlan, QuadratureSettings

log = logging.getLogger(__name__)


class AssemblyError(RuntimeError):
    """Non-finite values produced while integrating a panel pair."""

    def __init__(self, test: int, trial: int, operator: str):
        self.pair = (int(test), int(trial))
        super().__init__(f"non-finite {operator} entry for panel pair ({test}, {trial})")


def hat_gradients(surface: SurfaceMesh) -> np.ndarray:
    """Surface gradients of the three barycentric functions, shape (nt, 3, 3)."""
    v = surface.vertices[surface.triangles]
    n = surface.normals
    dbl = 2.0 * surface.areas[:, None]
    g = np.empty_like(v)
    for a in range(3):
        e = v[:, (a + 2) % 3] - v[:, (a + 1) % 3]
        g[:, a] = np.cross(n, e) / dbl
    return g


def surface_mass01(surface: SurfaceMesh):
    """Vector P0 x P1 mass matrix ``<mu, phi>``."""
    return _vector_kron(p0p1_mass(surface))


def surface_mass11(surface: SurfaceMesh):
    return _vector_kron(p1p1_mass(surface))


@dataclass
class BoundaryOperatorSet:
    """Galerkin matrices of V, K, K' and W at one frequency."""

    V: np.ndarray
    K: np.ndarray
    W: np.ndarray
    frequency: ComplexFrequency
    surface: SurfaceMesh

    @property
    def Kp(self) -> np.ndarray:
        return self.K.T

    @property
    def s(self) -> complex:
        return self.frequency.s


_PLANS: dict = {}
_STATIC: dict = {}


def pair_plan(surface: SurfaceMesh, settings: QuadratureSettings | None = None) -> PairPlan:
    """Cached pair plan for a surface and rule settings."""
    settings = settings or QuadratureSettings()
    key = (surface.content_hash(), settings)
    if key not in _PLANS:
        _PLANS[key] = PairPlan(surface, settings)
    return _PLANS[key]


def _accumulate(out: np.ndarray, flat_index: np.ndarray, values: np.ndarray) -> None:
    idx = flat_index.ravel()
    vals = values.ravel()
    size = out.size
    acc = np.bincount(idx, weights=vals.real, minlength=size)
    if np.iscomplexobj(out):
        acc = acc + 1j * np.bincount(idx, weights=vals.imag, minlength=size)
    out += acc.reshape(out.shape)


def _check(values, batch, name):
    bad = ~np.isfinite(values.reshape(values.shape[0], -1)).all(axis=1)
    if bad.any():
        k = int(np.argmax(bad))
        raise AssemblyError(batch.test[k], batch.trial[k], name)


def _p1_index(surface, panels, nv3):
    """Flat P1 dof numbers ``3 * vertex + j`` of the local vertices, (m, 3, 3)."""
    return 3 * surface.triangles[panels][:, :, None] + np.arange(3)[None, None, :]


def _static_w(plan: PairPlan, mat: IsotropicExterior) -> np.ndarray:
    """Elastostatic hypersingular form, assembled once per mesh and material."""
    surface = plan.surface
    key = (surface.content_hash(), plan.settings, mat.lam, mat.mu)
    if key in _STATIC:
        return _STATIC[key]
    lam, mu = mat.lam, mat.mu
    n = surface.normals
    g = hat_gradients(surface)
    # m[t, a, i, :] = n_i g_a - n g_a[i]
    mvec = (n[:, None, :, None] * g[:, :, None, :]
            - n[:, None, None, :] * g[:, :, :, None])
    curl = np.cross(n[:, None, :], g)
    nv3 = 3 * surface.n_vertices
    W0 = np.zeros((nv3, nv3))
    kel = 1.0 / (8.0 * np.pi * mu * (lam + 2.0 * mu))
    for b in plan.batches():
        z = (b.x - b.y).reshape(-1, 3)
        r = np.linalg.norm(z, axis=1)
        zh = z / r[:, None]
        w = b.w.ravel()
        m = b.test.size
        G = (w / (4.0 * np.pi * r)).reshape(m, -1).sum(axis=1)
        wr = (w * kel / r)
        U = ((lam + 3.0 * mu) * np.eye(3)[None] * wr.reshape(m, -1).sum(axis=1)[:, None, None]
             + (lam + mu) * np.einsum("n,ni,nj->nij", wr, zh, zh).reshape(m, -1, 3, 3).sum(axis=1))
        t, u = b.test, b.trial
        mx, my = mvec[t], mvec[u]
        loc = mu * G[:, None, None, None, None] * np.einsum(
            "mak,mbk,ij->maibj", curl[t], curl[u], np.eye(3))
        kern = 2.0 * mu * G[:, None, None] * np.eye(3)[None] - 4.0 * mu * mu * U
        loc += np.einsum("maic,mcd,mbjd->maibj", mx, kern, my)
        loc += mu * G[:, None, None, None, None] * np.einsum("majk,mbik->maibj", mx, my)
        _check(loc, b, "static hypersingular")
        rows = _p1_index(surface, t, nv3)[:, :, :, None, None]
        cols = _p1_index(surface, u, nv3)[:, None, None, :, :]
        _accumulate(W0, rows * nv3 + cols, loc)
    _STATIC[key] = W0
    return W0


def assemble_operators(surface: SurfaceMesh, s, mat: IsotropicExterior,
                       quad: QuadratureSettings | None = None,
                       which: str = "VKW") -> BoundaryOperatorSet:
    """Assemble the dense Galerkin matrices of V(s), K(s) and W(s).

    Parameters
    ----------
    surface : SurfaceMesh
        Closed, outward-oriented boundary.
    s : complex
        Laplace parameter with positive real part.
    mat : IsotropicExterior
        Exterior material.
    quad : QuadratureSettings, optional
        Rule orders.
    which : str
        Subset of ``"VKW"`` to assemble; the others are returned as ``None``.
    """
    freq = as_frequency(s)
    s = freq.s
    plan = pair_plan(surface, quad)
    nt, nv = surface.n_triangles, surface.n_vertices
    n0, n1 = 3 * nt, 3 * nv
    V = np.zeros((n0, n0), dtype=complex) if "V" in which else None
    K = np.zeros((n0, n1), dtype=complex) if "K" in which else None
    W = np.zeros((n1, n1), dtype=complex) if "W" in which else None
    V4 = V.reshape(nt, 3, nt, 3) if V is not None else None
    normals = surface.normals
    g = hat_gradients(surface)
    for b in plan.batches():
        t, u = b.test, b.trial
        Vl, Kl, Wl = kernels.pair_blocks(b, normals[t], normals[u], g[u], s, mat, which)
        if V is not None:
            _check(Vl, b, "single-layer")
            V4[t, :, u, :] = Vl
        if K is not None:
            _check(Kl, b, "double-layer")
            rows = (3 * t[:, None] + np.arange(3))[:, :, None, None]
            cols = _p1_index(surface, u, n1)[:, None, :, :]
            _accumulate(K, rows * n1 + cols, Kl)
        if W is not None:
            _check(Wl, b, "hypersingular")
            rows = _p1_index(surface, t, n1)[:, :, :, None, None]
            cols = _p1_index(surface, u, n1)[:, None, None, :, :]
            _accumulate(W, rows * n1 + cols, Wl)
    # the singular rules are not symmetric under exchanging the panels
    if V is not None:
        V = 0.5 * (V + V.T)
    if W is not None:
        W += _static_w(plan, mat)
        W = 0.5 * (W + W.T)
    return BoundaryOperatorSet(V, K, W, freq, surface)
