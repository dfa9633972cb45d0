"""Probe-based checks of the jump relations and one-sided trace identities.

Limits onto the surface are not computable directly, so the layer potentials
are evaluated at paired points ``x +- eps n`` above interior quadrature
points of every panel and extrapolated to ``eps -> 0`` with Richardson's
rule over ``eps, eps / 2, eps / 4``, which removes the first- and
second-order terms of the one-sided expansions.  The jump of a quantity is
its interior limit minus its exterior limit.

The checked relations, for a P0 traction density ``Lambda`` and a P1
displacement density ``Phi``:

* ``[gamma S Lambda] = 0`` and ``[T S Lambda] = Lambda``;
* ``[gamma D Phi] = -Phi`` and ``[T D Phi] = 0``;
* ``T^+ S Lambda = (-1/2 I + K') Lambda`` tested with P1 hat functions;
* ``gamma^+ D Phi = (1/2 I + K) Phi`` tested with P0 indicator functions.

Pointwise defects are measured against the smooth density the discrete
coefficients were projected from, so they converge with the projection
error; the tested one-sided identities compare against the assembled
Galerkin matrices.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import kernels
from ..kernels import as_frequency
from ..materials import IsotropicExterior
from ..mesh import SurfaceMesh
from ..quadrature import gauss_triangle
from .assembly import BoundaryOperatorSet
from .potentials import (PotentialQuadrature, _near_rule, _p1_values, gradient_double,
                         layer_rules, traction_from_gradient)


@dataclass(frozen=True)
class ProbeSettings:
    """Probe offsets ``eps = offset * h * {1, 1/2, 1/4}`` and the base-point rule.

    ``rule_order`` is the degree of the triangle rule whose points carry the
    probes; it also integrates the tested identities.
    """

    offset: float = 1e-3
    rule_order: int = 2
    potential: PotentialQuadrature = PotentialQuadrature()


@dataclass(frozen=True)
class ProbeSet:
    """Base points on the surface with panel normals, weights and barycentrics."""

    points: np.ndarray
    normals: np.ndarray
    panels: np.ndarray
    bary: np.ndarray
    weights: np.ndarray

    def __len__(self):
        return self.points.shape[0]


def probe_set(surface: SurfaceMesh, order: int = 2) -> ProbeSet:
    """Interior quadrature points of every panel; weights include the area."""
    rule = gauss_triangle(order)
    nq = len(rule)
    v = surface.vertices[surface.triangles]
    pts = np.einsum("qa,tad->tqd", rule.points, v).reshape(-1, 3)
    w = (2.0 * surface.areas[:, None] * rule.weights[None, :]).ravel()
    panels = np.repeat(np.arange(surface.n_triangles), nq)
    bary = np.tile(rule.points, (surface.n_triangles, 1))
    return ProbeSet(pts, surface.normals[panels], panels, bary, w)


def richardson(f1, f2, f4):
    """Limit of ``f(eps) = f0 + a eps + b eps^2`` from ``f(eps), f(eps/2), f(eps/4)``."""
    return (np.asarray(f1) - 6.0 * np.asarray(f2) + 8.0 * np.asarray(f4)) / 3.0


def _accumulate(out, ti, vals, n):
    flat = vals.reshape(vals.shape[0], -1)
    res = np.empty((n, flat.shape[1]), dtype=complex)
    for d in range(flat.shape[1]):
        res[:, d] = np.bincount(ti, flat[:, d].real, n) + 1j * np.bincount(ti, flat[:, d].imag, n)
    out += res.reshape(out.shape)


def _node_fields(surface, L, Phi, x, ti, pi, y, w, bary, s, mat, n):
    """Accumulate ``S Lambda``, its gradient and ``D Phi`` from explicit nodes."""
    sv = np.zeros((n, 3), dtype=complex)
    sg = np.zeros((n, 3, 3), dtype=complex)
    dv = np.zeros((n, 3), dtype=complex)
    if ti.size == 0:
        return sv, sg, dv
    z = x[ti] - y
    g = kernels.green_grad(z, s, mat)
    if L is not None:
        wl = w[:, None] * L[pi]
        _accumulate(sv, ti, np.einsum("nij,nj->ni", kernels.green(z, s, mat), wl), n)
        _accumulate(sg, ti, np.einsum("nkij,nj->nki", g, wl), n)
    if Phi is not None:
        T = kernels.traction_y(g, surface.normals[pi], mat.lam, mat.mu)
        dens = _p1_values(surface, pi, bary, Phi)
        _accumulate(dv, ti, np.einsum("n,nji,nj->ni", w, T, dens), n)
    return sv, sg, dv


def layer_fields(surface: SurfaceMesh, Lam, Phi, x, s, mat: IsotropicExterior,
                 pq: PotentialQuadrature | None = None, exclude=None):
    """``S Lambda``, its gradient and ``D Phi`` at ``x`` from one kernel pass.

    Returns arrays (n, 3), (n, 3, 3) with ``G[n, k, i] = d_k (S Lambda)_i`` and
    (n, 3).  Either density may be ``None``.  ``exclude[k]`` optionally names a
    panel left out of the integral for target ``k``.
    """
    pq = pq or PotentialQuadrature()
    s = as_frequency(s).s
    x = np.atleast_2d(np.asarray(x, dtype=float))
    L = None if Lam is None else np.asarray(Lam, dtype=complex).reshape(-1, 3)
    Phi = None if Phi is None else np.asarray(Phi, dtype=complex)
    parts = []
    step = pq.targets_per_chunk(surface.n_triangles)
    for k0 in range(0, x.shape[0], step):
        xc = x[k0:k0 + step]
        ti, pi, y, w, bary = layer_rules(surface, xc, pq)
        if exclude is not None:
            keep = pi != np.asarray(exclude)[k0 + ti]
            ti, pi, y, w, bary = ti[keep], pi[keep], y[keep], w[keep], bary[keep]
        parts.append(_node_fields(surface, L, Phi, xc, ti, pi, y, w, bary, s, mat,
                                  xc.shape[0]))
    return tuple(np.concatenate(p) for p in zip(*parts))


def own_panel_fields(surface: SurfaceMesh, Lam, Phi, x, panels, s, mat: IsotropicExterior,
                     pq: PotentialQuadrature | None = None):
    """Contributions of a single panel per target, with the near-singular rule."""
    pq = pq or PotentialQuadrature()
    s = as_frequency(s).s
    x = np.atleast_2d(np.asarray(x, dtype=float))
    panels = np.asarray(panels)
    L = None if Lam is None else np.asarray(Lam, dtype=complex).reshape(-1, 3)
    Phi = None if Phi is None else np.asarray(Phi, dtype=complex)
    parts = []
    # one near rule per target; bound the nodes held at once
    step = 8 * pq.chunk
    for k0 in range(0, x.shape[0], step):
        xc, pc = x[k0:k0 + step], panels[k0:k0 + step]
        y, w, bary = _near_rule(xc, surface.vertices[surface.triangles[pc]], pq)
        nq = w.shape[1]
        ti = np.repeat(np.arange(xc.shape[0]), nq)
        parts.append(_node_fields(surface, L, Phi, xc, ti, np.repeat(pc, nq), y.reshape(-1, 3),
                                  w.ravel(), bary.reshape(-1, 3), s, mat, xc.shape[0]))
    return tuple(np.concatenate(p) for p in zip(*parts))


@dataclass
class OneSidedLimits:
    """Extrapolated interior (``minus``) and exterior (``plus``) limits at the probes."""

    probes: ProbeSet
    single_minus: np.ndarray
    single_plus: np.ndarray
    traction_minus: np.ndarray
    traction_plus: np.ndarray
    double_minus: np.ndarray
    double_plus: np.ndarray


def one_sided_limits(surface: SurfaceMesh, Lam, Phi, s, mat: IsotropicExterior,
                     settings: ProbeSettings | None = None) -> OneSidedLimits:
    """Richardson-extrapolated one-sided limits of ``S Lambda``, ``T S Lambda`` and ``D Phi``.

    Only the panel carrying a probe contributes a term that is discontinuous
    across the surface.  It is evaluated at the offset points and
    extrapolated; all other panels give functions that are smooth in the
    offset, so their limit is their value at the base point itself.
    """
    settings = settings or ProbeSettings()
    pq = settings.potential
    ps = probe_set(surface, settings.rule_order)
    m = len(ps)
    eps0 = settings.offset * surface.h
    offsets = eps0 * np.array([1.0, 0.5, 0.25])
    rest = layer_fields(surface, Lam, Phi, ps.points, s, mat, pq, exclude=ps.panels)
    # outward normals: the exterior side is +n
    x = np.concatenate([ps.points + side * e * ps.normals
                        for side in (-1.0, 1.0) for e in offsets])
    own = own_panel_fields(surface, Lam, Phi, x, np.tile(ps.panels, 6), s, mat, pq)

    def split(a):
        a = a.reshape((6, m) + a.shape[1:])
        return richardson(*a[:3]), richardson(*a[3:])

    (sm, sp_), (gm, gp), (dm, dp) = (split(a) for a in own)
    sv, sg, dv = rest
    return OneSidedLimits(ps, sm + sv, sp_ + sv,
                          traction_from_gradient(gm + sg, ps.normals, mat),
                          traction_from_gradient(gp + sg, ps.normals, mat), dm + dv, dp + dv)


def _l2(values, weights):
    return float(np.sqrt(np.sum(weights[:, None] * np.abs(values) ** 2)))


def _panel_values(surface, Lam, ps):
    return np.asarray(Lam, dtype=complex).reshape(-1, 3)[ps.panels]


@dataclass(frozen=True)
class JumpResiduals:
    """Relative L2 residuals of the jump relations and the tested one-sided identities.

    ``single_trace_jump`` is ``||[gamma S Lambda]|| / ||S Lambda||``;
    ``single_traction_jump`` is ``||[T S Lambda] - lambda|| / ||lambda||``
    against the smooth density; ``double_trace_jump`` is
    ``||[gamma D Phi] + phi|| / ||phi||``; ``adjoint_identity`` and
    ``double_identity`` are the tested one-sided identities relative to the
    size of the Galerkin right side.
    """

    single_trace_jump: float
    single_traction_jump: float
    double_trace_jump: float
    adjoint_identity: float
    double_identity: float
    h: float

    def to_dict(self):
        return dict(self.__dict__)

    @property
    def convergent(self) -> dict:
        """The four residuals expected to converge under refinement."""
        return {"single_traction_jump": self.single_traction_jump,
                "double_trace_jump": self.double_trace_jump,
                "adjoint_identity": self.adjoint_identity,
                "double_identity": self.double_identity}


def _p1_test(surface, ps, values):
    """``<values, eta_j>`` for every vector P1 hat function, by probe quadrature."""
    out = np.zeros(3 * surface.n_vertices, dtype=complex)
    vid = surface.triangles[ps.panels]                                   # (m, 3)
    loc = np.einsum("m,ma,mi->mai", ps.weights, ps.bary, values)
    np.add.at(out, (3 * vid[:, :, None] + np.arange(3)).ravel(), loc.ravel())
    return out


def _p0_test(surface, ps, values):
    """``<values, mu_k>`` for every vector P0 indicator."""
    out = np.zeros((surface.n_triangles, 3), dtype=complex)
    np.add.at(out, ps.panels, ps.weights[:, None] * values)
    return out.ravel()


def jump_residuals(ops: BoundaryOperatorSet, Lam, Phi, lam_exact, phi_exact,
                   mat: IsotropicExterior, settings: ProbeSettings | None = None) -> JumpResiduals:
    """Evaluate all jump and one-sided residuals for projected smooth densities.

    Parameters
    ----------
    ops : BoundaryOperatorSet
        Galerkin matrices at the test frequency.
    Lam, Phi : array
        P0 and P1 coefficient vectors.
    lam_exact, phi_exact : callable
        The smooth densities ``f(points) -> (n, 3)`` behind the coefficients.
    """
    surface = ops.surface
    lim = one_sided_limits(surface, Lam, Phi, ops.s, mat, settings)
    ps = lim.probes
    w = ps.weights
    lam_pts = np.asarray(lam_exact(ps.points))
    phi_pts = np.asarray(phi_exact(ps.points))
    s_jump = lim.single_minus - lim.single_plus
    t_jump = lim.traction_minus - lim.traction_plus
    d_jump = lim.double_minus - lim.double_plus
    M01 = surface_mass01_dense(surface)
    # exterior traction of S tested with hats against (-1/2 M01^T + K^T) Lambda
    lhs_a = _p1_test(surface, ps, lim.traction_plus)
    rhs_a = (-0.5 * M01.T + ops.K.T) @ np.asarray(Lam, dtype=complex)
    lhs_b = _p0_test(surface, ps, lim.double_plus)
    rhs_b = (0.5 * M01 + ops.K) @ np.asarray(Phi, dtype=complex)
    return JumpResiduals(
        single_trace_jump=_l2(s_jump, w) / _l2(0.5 * (lim.single_minus + lim.single_plus), w),
        single_traction_jump=_l2(t_jump - lam_pts, w) / _l2(lam_pts, w),
        double_trace_jump=_l2(d_jump + phi_pts, w) / _l2(phi_pts, w),
        adjoint_identity=float(np.linalg.norm(lhs_a - rhs_a) / np.linalg.norm(rhs_a)),
        double_identity=float(np.linalg.norm(lhs_b - rhs_b) / np.linalg.norm(rhs_b)),
        h=surface.h)


def surface_mass01_dense(surface: SurfaceMesh) -> np.ndarray:
    from .assembly import surface_mass01
    return surface_mass01(surface).toarray()


def jump_test_single(surface: SurfaceMesh, Lam, s, mat: IsotropicExterior,
                     lam_exact=None, settings: ProbeSettings | None = None):
    """``(||[gamma S Lambda]||, ||[T S Lambda] - Lambda||)`` in relative L2.

    Without ``lam_exact`` the defect is taken against the P0 density itself.
    """
    lim = one_sided_limits(surface, Lam, None, s, mat, settings)
    ps = lim.probes
    ref = (_panel_values(surface, Lam, ps) if lam_exact is None
           else np.asarray(lam_exact(ps.points)))
    jump = lim.single_minus - lim.single_plus
    scale = _l2(0.5 * (lim.single_minus + lim.single_plus), ps.weights)
    return (_l2(jump, ps.weights) / scale if scale > 0 else 0.0,
            _l2(lim.traction_minus - lim.traction_plus - ref, ps.weights)
            / max(_l2(ref, ps.weights), 1e-300))


def jump_test_double(surface: SurfaceMesh, Phi, s, mat: IsotropicExterior,
                     phi_exact=None, settings: ProbeSettings | None = None):
    """``(||[gamma D Phi] + Phi||, ||[T D Phi]||)`` in relative L2.

    The traction jump needs the Hessian of the kernel and is the slowest
    part; it is measured relative to the mean of the one-sided tractions.
    """
    settings = settings or ProbeSettings()
    lim = one_sided_limits(surface, None, Phi, s, mat, settings)
    ps = lim.probes
    ref = (_p1_values(surface, ps.panels, ps.bary, np.asarray(Phi, dtype=complex))
           if phi_exact is None else np.asarray(phi_exact(ps.points)))
    jump = lim.double_minus - lim.double_plus
    eps0 = settings.offset * surface.h
    trac = []
    for side in (-1.0, 1.0):
        vals = [traction_from_gradient(
            gradient_double(surface, Phi, ps.points + side * e * ps.normals, s, mat,
                            settings.potential), ps.normals, mat)
                for e in eps0 * np.array([1.0, 0.5, 0.25])]
        trac.append(richardson(*vals))
    tj = trac[0] - trac[1]
    scale = _l2(0.5 * (trac[0] + trac[1]), ps.weights)
    return (_l2(jump + ref, ps.weights) / max(_l2(ref, ps.weights), 1e-300),
            _l2(tj, ps.weights) / scale if scale > 0 else 0.0)


def average_identities_test(ops: BoundaryOperatorSet, Lam, Phi, mat: IsotropicExterior,
                            settings: ProbeSettings | None = None) -> dict:
    """Residuals of the tested one-sided identities on both sides.

    Keys ``adjoint_plus``/``adjoint_minus`` compare ``T^+- S Lambda`` with
    ``(-+1/2 I + K') Lambda``; ``double_plus``/``double_minus`` compare
    ``gamma^+- D Phi`` with ``(+-1/2 I + K) Phi``.  Residuals are absolute
    Euclidean norms of the tested vectors divided by the right-side norm
    (zero densities give zero).
    """
    surface = ops.surface
    Lam = np.asarray(Lam, dtype=complex)
    Phi = np.asarray(Phi, dtype=complex)
    lim = one_sided_limits(surface, Lam, Phi, ops.s, mat, settings)
    ps = lim.probes
    M01 = surface_mass01_dense(surface)
    KpL = ops.K.T @ Lam
    KP = ops.K @ Phi
    half_l = 0.5 * M01.T @ Lam
    half_p = 0.5 * M01 @ Phi

    def rel(a, b):
        nb = np.linalg.norm(b)
        return float(np.linalg.norm(a - b) / nb) if nb > 0 else float(np.linalg.norm(a))

    return {
        "adjoint_plus": rel(_p1_test(surface, ps, lim.traction_plus), -half_l + KpL),
        "adjoint_minus": rel(_p1_test(surface, ps, lim.traction_minus), half_l + KpL),
        "double_plus": rel(_p0_test(surface, ps, lim.double_plus), half_p + KP),
        "double_minus": rel(_p0_test(surface, ps, lim.double_minus), -half_p + KP),
    }


__all__ = [
    "ProbeSettings", "ProbeSet", "probe_set", "richardson", "layer_fields", "own_panel_fields",
    "OneSidedLimits",
    "one_sided_limits", "JumpResiduals", "jump_residuals", "jump_test_single",
    "jump_test_double", "average_identities_test",
]
