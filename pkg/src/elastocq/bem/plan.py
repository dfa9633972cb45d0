"""Panel-pair classification and quadrature batches for Galerkin assembly."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from ..mesh import SurfaceMesh
from ..quadrature import (COINCIDENT, EDGE, VERTEX, barycentric_in_panel, classify_pairs,
                          gauss_triangle, local_orders, singular_pair_rule)


@dataclass(frozen=True)
class QuadratureSettings:
    """Rule orders for the Galerkin double integrals.

    ``regular_order`` is the triangle-rule degree for separated pairs,
    ``near_order`` the degree for disjoint pairs closer than ``near_factor``
    panel diameters and ``singular_order`` the Gauss points per coordinate
    of the singular tensor rules.
    """

    regular_order: int = 4
    near_order: int = 8
    singular_order: int = 4
    near_factor: float = 1.0

    def to_dict(self):
        return dict(regular_order=self.regular_order, near_order=self.near_order,
                    singular_order=self.singular_order, near_factor=self.near_factor)


@dataclass
class PairBatch:
    """A set of panel pairs with their quadrature points.

    ``x``/``y`` are physical points (m, q, 3), ``w`` the weights including both
    surface Jacobians (m, q) and ``hx``/``hy`` the hat-function values in each
    panel's own vertex order (m, q, 3).
    """

    test: np.ndarray
    trial: np.ndarray
    x: np.ndarray
    y: np.ndarray
    w: np.ndarray
    hx: np.ndarray
    hy: np.ndarray


@dataclass
class PairPlan:
    """Classification of all ordered panel pairs of a closed surface."""

    surface: SurfaceMesh
    settings: QuadratureSettings = field(default_factory=QuadratureSettings)
    max_points: int = 150_000

    def __post_init__(self):
        tri = self.surface.triangles
        shared = classify_pairs(tri)
        self.shared = shared
        c = self.surface.centroids
        d = np.linalg.norm(c[:, None, :] - c[None, :, :], axis=-1)
        rad = 0.5 * self.surface.diameters
        gap = d - rad[:, None] - rad[None, :]
        diam = np.maximum(self.surface.diameters[:, None], self.surface.diameters[None, :])
        self.near = (shared == 0) & (gap < self.settings.near_factor * diam)
        self.regular = (shared == 0) & ~self.near
        self.singular = {}
        for cls, k in ((COINCIDENT, 3), (EDGE, 2), (VERTEX, 1)):
            t, u = np.nonzero(shared == k)
            px = np.empty((t.size, 3), dtype=np.int64)
            py = np.empty((t.size, 3), dtype=np.int64)
            for m, (a, b) in enumerate(zip(t, u)):
                px[m], py[m] = local_orders(tri[a], tri[b])
            self.singular[cls] = (t, u, px, py)

    @cached_property
    def _panel_geometry(self):
        v = self.surface.vertices[self.surface.triangles]
        return v, 2.0 * self.surface.areas

    def _tensor_batches(self, mask, order):
        rule = gauss_triangle(order)
        bary = rule.points
        v, jac = self._panel_geometry
        pts = np.einsum("qa,tad->tqd", bary, v)
        nq = bary.shape[0]
        t_all, u_all = np.nonzero(mask)
        if t_all.size == 0:
            return
        step = max(1, self.max_points // (nq * nq))
        for k0 in range(0, t_all.size, step):
            t = t_all[k0:k0 + step]
            u = u_all[k0:k0 + step]
            x = np.repeat(pts[t], nq, axis=1)
            y = np.tile(pts[u], (1, nq, 1))
            wq = np.outer(rule.weights, rule.weights).ravel()
            w = (jac[t] * jac[u])[:, None] * wq[None, :]
            hx = np.broadcast_to(np.repeat(bary, nq, axis=0), (t.size, nq * nq, 3))
            hy = np.broadcast_to(np.tile(bary, (nq, 1)), (t.size, nq * nq, 3))
            yield PairBatch(t, u, x, y, w, hx, hy)

    def _singular_batches(self, cls):
        t_all, u_all, px_all, py_all = self.singular[cls]
        if t_all.size == 0:
            return
        rule = singular_pair_rule(cls, self.settings.singular_order)
        nq = rule.weights.size
        v, jac = self._panel_geometry
        step = max(1, self.max_points // nq)
        lam_x = np.column_stack([1 - rule.x_uv.sum(axis=1), rule.x_uv])
        lam_y = np.column_stack([1 - rule.y_uv.sum(axis=1), rule.y_uv])
        for k0 in range(0, t_all.size, step):
            sl = slice(k0, k0 + step)
            t, u, px, py = t_all[sl], u_all[sl], px_all[sl], py_all[sl]
            m = t.size
            vx = np.take_along_axis(v[t], px[:, :, None], axis=1)
            vy = np.take_along_axis(v[u], py[:, :, None], axis=1)
            x = np.einsum("qa,mad->mqd", lam_x, vx)
            y = np.einsum("qa,mad->mqd", lam_y, vy)
            w = (jac[t] * jac[u])[:, None] * rule.weights[None, :]
            hx = np.empty((m, nq, 3))
            hy = np.empty((m, nq, 3))
            rows = np.arange(m)[:, None]
            hx[rows, :, px] = lam_x.T[None]
            hy[rows, :, py] = lam_y.T[None]
            yield PairBatch(t, u, x, y, w, hx, hy)

    def batches(self):
        """Yield batches covering every ordered panel pair exactly once."""
        yield from self._tensor_batches(self.regular, self.settings.regular_order)
        yield from self._tensor_batches(self.near, self.settings.near_order)
        for cls in (COINCIDENT, EDGE, VERTEX):
            yield from self._singular_batches(cls)

    def counts(self) -> dict:
        out = {"regular": int(self.regular.sum()), "near": int(self.near.sum())}
        for cls, (t, *_rest) in self.singular.items():
            out[cls] = int(t.size)
        return out


__all__ = ["QuadratureSettings", "PairBatch", "PairPlan", "barycentric_in_panel"]
