"""P1 tetrahedral Galerkin blocks for the interior elastodynamic operator.

For the Laplace parameter ``s`` the interior form is

    a(U, V) = (C eps(U), eps(V)) + s^2 (rho U, V),

assembled from the stiffness and mass matrices with exact integration on
affine elements (piecewise-constant ``C`` and ``rho``).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from .materials import AnisotropicInterior, tensor_from_voigt
from .mesh import MeshValidationError, VolumeMesh
from .quadrature import gauss_tet, gauss_triangle
from .spaces import FunctionSpaces


def barycentric_gradients(volume: VolumeMesh) -> tuple[np.ndarray, np.ndarray]:
    """Gradients of the four barycentric functions per tet and the tet volumes.

    Returns ``grads`` of shape (n_tets, 4, 3) and ``vol`` of shape (n_tets,).
    """
    x = volume.vertices[volume.tets]
    J = np.stack([x[:, 1] - x[:, 0], x[:, 2] - x[:, 0], x[:, 3] - x[:, 0]], axis=2)
    det = np.linalg.det(J)
    bad = np.nonzero(det <= 1e-14 * np.abs(J).max() ** 3)[0]
    if bad.size:
        raise MeshValidationError("degenerate", int(bad[0]), "degenerate or inverted tetrahedron")
    Jinv = np.linalg.inv(J)                      # rows: gradients of lambda_1..3
    g = np.empty((x.shape[0], 4, 3))
    g[:, 1:] = Jinv
    g[:, 0] = -Jinv.sum(axis=1)
    return g, det / 6.0


def _scatter(volume: VolumeMesh, local: np.ndarray, n: int) -> sp.csr_matrix:
    """Sum element matrices ``local[e, a, i, b, j]`` into a sparse matrix."""
    dof = 3 * volume.tets[:, :, None] + np.arange(3)[None, None, :]       # (e, a, i)
    rows = np.broadcast_to(dof[:, :, :, None, None], local.shape).ravel()
    cols = np.broadcast_to(dof[:, None, None, :, :], local.shape).ravel()
    return sp.csr_matrix((local.ravel(), (rows, cols)), shape=(n, n))


@dataclass
class InteriorBlocks:
    """Stiffness, mass and coupling matrices of the interior problem.

    ``coupling`` is the P0-boundary x P1-volume matrix of ``<mu, gamma^- V>``.
    """

    stiffness: sp.csr_matrix
    mass: sp.csr_matrix
    coupling: sp.csr_matrix
    spaces: FunctionSpaces
    load: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.load is None:
            self.load = np.zeros(self.spaces.n_volume)

    def operator(self, s) -> sp.csr_matrix:
        """``K + s^2 M`` as a sparse complex matrix."""
        return (self.stiffness + complex(s) ** 2 * self.mass).tocsr()

    def energy_norm_sq(self, u: np.ndarray, s) -> float:
        """``|||u|||^2_{|s|} = (C eps(u), eps(conj u)) + |s|^2 (rho u, conj u)``."""
        u = np.asarray(u)
        a = np.real(np.vdot(u, self.stiffness @ u))
        m = np.real(np.vdot(u, self.mass @ u))
        return float(a + abs(complex(s)) ** 2 * m)


def assemble_interior(volume: VolumeMesh, mat: AnisotropicInterior,
                      spaces: FunctionSpaces | None = None) -> InteriorBlocks:
    """Assemble the P1 stiffness and mass matrices and the boundary coupling.

    Parameters
    ----------
    volume : VolumeMesh
        Validated tetrahedral mesh of the scatterer.
    mat : AnisotropicInterior
        Per-element Voigt stiffness and density.
    """
    if mat.n_elements != volume.n_tets:
        raise ValueError(f"material has {mat.n_elements} elements, mesh has {volume.n_tets}")
    spaces = spaces or FunctionSpaces(volume)
    g, vol = barycentric_gradients(volume)
    C = np.stack([tensor_from_voigt(D) for D in mat.stiffness])       # (e, 3, 3, 3, 3)
    # K[(a, n), (b, m)] = vol * C[n, j, m, l] g_a[j] g_b[l]
    Kloc = np.einsum("e,enjml,eaj,ebl->eanbm", vol, C, g, g)
    Mref = (np.ones((4, 4)) + np.eye(4)) / 20.0
    Mloc = np.einsum("e,ab,ij->eaibj", mat.rho * vol, Mref, np.eye(3))
    n = spaces.n_volume
    K = _scatter(volume, Kloc, n)
    M = _scatter(volume, Mloc, n)
    K = (0.5 * (K + K.T)).tocsr()
    return InteriorBlocks(K, M, spaces.coupling, spaces)


def assemble_load(volume: VolumeMesh, F, order: int = 2) -> np.ndarray:
    """Load vector ``(F, V)`` for a body force sampler ``F(points) -> (n, 3)``.

    ``F`` may return complex values.  Integration uses a tetrahedron rule of
    the given degree.
    """
    rule = gauss_tet(order)
    x = volume.vertices[volume.tets]                                   # (e, 4, 3)
    _, vol = barycentric_gradients(volume)
    pts = np.einsum("qa,ead->eqd", rule.points, x)
    vals = np.asarray(F(pts.reshape(-1, 3))).reshape(x.shape[0], len(rule.weights), 3)
    loc = np.einsum("e,q,qa,eqi->eai", 6.0 * vol, rule.weights, rule.points, vals)
    dof = 3 * volume.tets[:, :, None] + np.arange(3)
    out = np.zeros(3 * volume.n_nodes, dtype=loc.dtype)
    np.add.at(out, dof.ravel(), loc.ravel())
    return out


def boundary_functionals(spaces: FunctionSpaces, g_trace=None, g_traction=None,
                         order: int = 4) -> tuple[np.ndarray, np.ndarray]:
    """Right-side functionals on the boundary.

    Returns ``(<g_traction, gamma^- V>, <mu, g_trace>)``: the first against
    the P1 volume test functions (nonzero only at boundary nodes), the second
    against P0 boundary test functions.  Samplers are called as
    ``g(points, normals)`` with (n, 3) arrays (the panel normal of each
    point) and return (n, 3) values; ``None`` means zero data.
    """
    surface = spaces.surface
    rule = gauss_triangle(order)
    v = surface.vertices[surface.triangles]
    pts = np.einsum("qa,tad->tqd", rule.points, v).reshape(-1, 3)
    nrm = np.repeat(surface.normals, len(rule), axis=0)
    jac = 2.0 * surface.areas
    nq = len(rule)
    trac = np.zeros(spaces.n_volume, dtype=complex)
    trace = np.zeros(spaces.n_p0, dtype=complex)
    if g_traction is not None:
        vals = np.asarray(g_traction(pts, nrm)).reshape(-1, nq, 3)
        loc = np.einsum("t,q,qa,tqi->tai", jac, rule.weights, rule.points, vals)
        p1 = np.zeros(spaces.n_p1, dtype=complex)
        np.add.at(p1, (3 * surface.triangles[:, :, None] + np.arange(3)).ravel(), loc.ravel())
        trac = spaces.trace.T @ p1
    if g_trace is not None:
        vals = np.asarray(g_trace(pts, nrm)).reshape(-1, nq, 3)
        trace = np.einsum("t,q,tqi->ti", jac, rule.weights, vals).ravel()
    return trac, trace
