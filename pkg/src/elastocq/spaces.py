"""Discrete function spaces and the trace map between them.

Degrees of freedom are vector-valued and interleaved by component:
P1 volume dof ``3 * node + a``, P0 boundary dof ``3 * triangle + a`` and
P1 boundary dof ``3 * vertex + a``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .mesh import SurfaceMesh, VolumeMesh


def _vector_kron(S: sp.spmatrix) -> sp.csr_matrix:
    """Expand a scalar operator to 3 interleaved components."""
    return sp.kron(S, sp.identity(3), format="csr")


def p0p1_mass(surface: SurfaceMesh) -> sp.csr_matrix:
    """Scalar mass between P0 (rows) and P1 (columns) on the surface."""
    nt = surface.n_triangles
    rows = np.repeat(np.arange(nt), 3)
    cols = surface.triangles.ravel()
    vals = np.repeat(surface.areas / 3.0, 3)
    return sp.csr_matrix((vals, (rows, cols)), shape=(nt, surface.n_vertices))


def p1p1_mass(surface: SurfaceMesh) -> sp.csr_matrix:
    """Scalar P1 mass matrix on the surface."""
    t = surface.triangles
    local = (np.ones((3, 3)) + np.eye(3)) / 12.0
    vals = surface.areas[:, None, None] * local[None]
    rows = np.repeat(t, 3, axis=1).ravel()
    cols = np.tile(t, (1, 3)).ravel()
    n = surface.n_vertices
    return sp.csr_matrix((vals.ravel(), (rows, cols)), shape=(n, n))


def p0_mass(surface: SurfaceMesh) -> sp.csr_matrix:
    return sp.diags(surface.areas).tocsr()


@dataclass
class FunctionSpaces:
    """P1 volume, P0 boundary and P1 boundary spaces on a coupled mesh pair."""

    volume: VolumeMesh

    def __post_init__(self):
        self.surface = self.volume.surface
        self.n_volume = 3 * self.volume.n_nodes
        self.n_p0 = 3 * self.surface.n_triangles
        self.n_p1 = 3 * self.surface.n_vertices
        nodes = self.volume.node_of_vertex
        self.trace_indices = (3 * nodes[:, None] + np.arange(3)[None, :]).ravel()
        self.trace = sp.csr_matrix(
            (np.ones(self.n_p1), (np.arange(self.n_p1), self.trace_indices)),
            shape=(self.n_p1, self.n_volume))
        self.mass01 = _vector_kron(p0p1_mass(self.surface))
        self.mass11 = _vector_kron(p1p1_mass(self.surface))
        self.mass00 = _vector_kron(p0_mass(self.surface))
        # <mu, gamma^- V> for P0 mu and P1 volume V
        self.coupling = (self.mass01 @ self.trace).tocsr()

    @property
    def sizes(self) -> tuple[int, int, int]:
        return self.n_volume, self.n_p0, self.n_p1

    def restrict(self, u_volume: np.ndarray) -> np.ndarray:
        """Boundary P1 coefficients of the trace of a volume P1 field."""
        return np.asarray(u_volume)[..., self.trace_indices]

    def interpolate_volume(self, f) -> np.ndarray:
        """Nodal interpolant of a vector field ``f(points) -> (n, 3)``."""
        return np.asarray(f(self.volume.vertices)).reshape(-1)

    def interpolate_boundary(self, f) -> np.ndarray:
        return np.asarray(f(self.surface.vertices)).reshape(-1)
