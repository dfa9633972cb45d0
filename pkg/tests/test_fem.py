"""P1 interior blocks, loads and boundary functionals.

Verified properties:
    * rigid motions lie in the kernel of the stiffness matrix, which has
      exactly six zero eigenvalues; the mass matrix is positive definite;
    * constant-strain patch energy against its closed form;
    * load vectors against per-element closed forms;
    * boundary functionals against summed tractions and a fine quadrature;
    * an anisotropic polynomial solution with symbolically derived body
      force is reproduced exactly (linear) or with decreasing error
      (quadratic).
"""

import numpy as np
import pytest
import scipy.sparse.linalg as spla
import sympy as sp

from elastocq.fem import assemble_interior, assemble_load, barycentric_gradients, boundary_functionals
from elastocq.materials import AnisotropicInterior, isotropic_voigt, tensor_from_voigt
from elastocq.mesh import ball_mesh
from elastocq.quadrature import gauss_triangle
from elastocq.spaces import FunctionSpaces

VOIGT_ANISO = np.array([
    [5.0, 1.2, 0.8, 0.1, 0.0, 0.2],
    [1.2, 4.0, 1.0, 0.0, 0.3, 0.0],
    [0.8, 1.0, 6.0, 0.2, 0.0, 0.1],
    [0.1, 0.0, 0.2, 1.5, 0.1, 0.0],
    [0.0, 0.3, 0.0, 0.1, 1.8, 0.2],
    [0.2, 0.0, 0.1, 0.0, 0.2, 1.2],
])


@pytest.fixture(scope="module")
def ball1():
    return ball_mesh(1)


@pytest.fixture(scope="module")
def aniso_blocks(ball1):
    mat = AnisotropicInterior.uniform(ball1.n_tets, VOIGT_ANISO, 1.3)
    return assemble_interior(ball1, mat), mat


def _nodal(vol, f):
    return np.asarray(f(vol.vertices)).ravel()


# ---------------------------------------------------------------------------
# stiffness and mass


def test_rigid_translation(aniso_blocks, ball1):
    blocks, _ = aniso_blocks
    v = np.tile([0.3, -1.0, 0.7], ball1.n_nodes)
    assert np.abs(blocks.stiffness @ v).max() <= 1e-12 * np.abs(blocks.stiffness).max()


def test_rigid_rotation(aniso_blocks, ball1):
    blocks, _ = aniso_blocks
    w = np.array([0.4, -0.2, 0.9])
    v = _nodal(ball1, lambda x: np.cross(w, x))
    assert np.abs(blocks.stiffness @ v).max() <= 1e-10 * np.abs(blocks.stiffness).max()


def test_kernel_is_rigid_motions():
    vol = ball_mesh(0)
    mat = AnisotropicInterior.uniform(vol.n_tets, VOIGT_ANISO, 1.0)
    b = assemble_interior(vol, mat)
    ev = np.linalg.eigvalsh(b.stiffness.toarray())
    assert np.sum(np.abs(ev) < 1e-10 * ev.max()) == 6
    assert ev.min() > -1e-10 * ev.max()
    assert np.linalg.eigvalsh(b.mass.toarray()).min() > 0


def test_constant_strain_energy(aniso_blocks, ball1):
    blocks, mat = aniso_blocks
    e = np.array([[0.3, 0.1, -0.2], [0.1, -0.4, 0.05], [-0.2, 0.05, 0.25]])
    v = _nodal(ball1, lambda x: x @ e.T)
    C = tensor_from_voigt(VOIGT_ANISO)
    exact = ball1.volume() * np.einsum("ij,ijkl,kl->", e, C, e)
    assert v @ blocks.stiffness @ v == pytest.approx(exact, rel=1e-10)


def test_mass_total(aniso_blocks, ball1):
    blocks, mat = aniso_blocks
    one = np.tile([1.0, 0.0, 0.0], ball1.n_nodes)
    assert one @ blocks.mass @ one == pytest.approx(1.3 * ball1.volume(), rel=1e-12)


def test_energy_identity(aniso_blocks, rng):
    """``Re[conj(s) a(u, conj u)] = sigma |||u|||^2`` for the assembled form."""
    blocks, _ = aniso_blocks
    s = 0.7 + 2.3j
    u = rng.standard_normal(blocks.stiffness.shape[0]) + 1j * rng.standard_normal(
        blocks.stiffness.shape[0])
    lhs = np.real(np.conj(s) * np.vdot(u, blocks.operator(s) @ u))
    assert lhs == pytest.approx(s.real * blocks.energy_norm_sq(u, s), rel=1e-12)


def test_material_size_mismatch(ball1):
    with pytest.raises(ValueError):
        assemble_interior(ball1, AnisotropicInterior.uniform(3, VOIGT_ANISO, 1.0))


# ---------------------------------------------------------------------------
# loads


def test_zero_and_constant_load(ball1):
    assert np.all(assemble_load(ball1, lambda x: np.zeros((len(x), 3))) == 0)
    F = np.array([0.5, -1.0, 2.0])
    b = assemble_load(ball1, lambda x: np.tile(F, (len(x), 1)))
    np.testing.assert_allclose(b.reshape(-1, 3).sum(axis=0), F * ball1.volume(), rtol=1e-12)


def test_linear_load_closed_form(ball1):
    A = np.array([[1.0, 0.5, -0.2], [0.0, 2.0, 0.3], [-1.0, 0.1, 0.7]])

    def F(x):
        return x @ A.T + np.array([0.1, 0.2, 0.3])

    b = assemble_load(ball1, F)
    _, vol = barycentric_gradients(ball1)
    ref = np.zeros((ball1.n_nodes, 3))
    f = F(ball1.vertices)[ball1.tets]                     # (e, 4, 3)
    # int lambda_a f = vol (f_a + sum_b f_b) / 20 for linear f
    loc = vol[:, None, None] * (f + f.sum(axis=1, keepdims=True)) / 20.0
    np.add.at(ref, ball1.tets, loc)
    np.testing.assert_allclose(b.reshape(-1, 3), ref, rtol=1e-12, atol=1e-15)


# ---------------------------------------------------------------------------
# boundary functionals


def test_boundary_functionals_zero_and_constant(ball1):
    sp_ = FunctionSpaces(ball1)
    trac, trace = boundary_functionals(sp_)
    assert np.all(trac == 0) and np.all(trace == 0)
    g = np.array([1.0, -2.0, 0.5])
    trac, trace = boundary_functionals(sp_, lambda x, n: np.tile(g, (len(x), 1)),
                                       lambda x, n: np.tile(g, (len(x), 1)))
    area = sp_.surface.areas.sum()
    np.testing.assert_allclose(trac.reshape(-1, 3).sum(axis=0).real, g * area, rtol=1e-12)
    np.testing.assert_allclose(trace.reshape(-1, 3).sum(axis=0).real, g * area, rtol=1e-12)


def test_plane_wave_functional_against_fine_rule(ball1):
    from elastocq.manufactured import BumpPulse, incident_plane_wave
    from elastocq.materials import IsotropicExterior
    mat = IsotropicExterior()
    d = np.array([0.0, 0.6, 0.8])
    wave = incident_plane_wave(d, d, mat.c_p, BumpPulse(1.0), mat, None, -1.5)
    sp_ = FunctionSpaces(ball1)
    t = 0.3
    _, trace = boundary_functionals(sp_, lambda x, n: wave.incident_trace(x, n, t), order=4)
    # fine rule: degree-8 points on each panel
    surf = sp_.surface
    r = gauss_triangle(8)
    v = surf.vertices[surf.triangles]
    pts = np.einsum("qa,tad->tqd", r.points, v).reshape(-1, 3)
    vals = wave.incident_trace(pts, None, t).reshape(surf.n_triangles, len(r), 3)
    ref = np.einsum("t,q,tqi->ti", 2 * surf.areas, r.weights, vals).ravel()
    assert np.abs(trace - ref).max() <= 1e-2 * np.abs(ref).max()
    _, fine = boundary_functionals(sp_, lambda x, n: wave.incident_trace(x, n, t), order=8)
    assert np.abs(fine - ref).max() <= 1e-8 * np.abs(ref).max()


# ---------------------------------------------------------------------------
# anisotropic polynomial solutions


def _symbolic_fields(u_expr, D, rho, s):
    """Stress, body force ``-div sigma + rho s^2 u`` and the samplers, via sympy."""
    X = sp.symbols("x0:3")
    u = sp.Matrix(u_expr(X))
    grad = u.jacobian(X)
    eps = (grad + grad.T) / 2
    C = tensor_from_voigt(D)
    sig = sp.Matrix(3, 3, lambda i, j: sum(C[i, j, k, l] * eps[k, l]
                                           for k in range(3) for l in range(3)))
    div = sp.Matrix([sum(sp.diff(sig[i, j], X[j]) for j in range(3)) for i in range(3)])
    F = -div + rho * s ** 2 * u
    fu, fs, fF = (sp.lambdify(X, e, "numpy") for e in (u, sig, F))

    def vec(f):
        def g(x):
            out = np.array(f(*x.T), dtype=complex)
            return np.stack([np.broadcast_to(c, (len(x),)) for c in out[:, 0]], axis=-1)
        return g

    def traction(x, n):
        S = np.array(fs(*x.T), dtype=complex)
        S = np.stack([[np.broadcast_to(S[i, j], (len(x),)) for j in range(3)] for i in range(3)])
        return np.einsum("ijn,nj->ni", S, n)

    return vec(fu), vec(fF), traction


def _solve_patch(vol, u_expr, s):
    mat = AnisotropicInterior.uniform(vol.n_tets, VOIGT_ANISO, 1.3)
    blocks = assemble_interior(vol, mat)
    U, F, T = _symbolic_fields(u_expr, VOIGT_ANISO, 1.3, s)
    rhs = assemble_load(vol, F, order=4) + boundary_functionals(blocks.spaces, None, T)[0]
    x = spla.spsolve(blocks.operator(s).tocsc(), rhs)
    exact = U(vol.vertices).ravel()
    return np.linalg.norm(x - exact) / np.linalg.norm(exact)


def test_linear_anisotropic_patch(ball1):
    def u(X):
        x, y, z = X
        return [0.3 * x - 0.2 * y + 0.1, 0.5 * z + 0.1 * x, -0.4 * y + 0.2 * z - 0.3]

    assert _solve_patch(ball1, u, 1.0 + 0.5j) <= 1e-10


def test_quadratic_anisotropic_convergence():
    def u(X):
        x, y, z = X
        return [x * y + 0.2 * z, y * z - 0.3 * x ** 2, x * z + 0.1]

    errs = [_solve_patch(ball_mesh(level), u, 1.0) for level in (1, 2)]
    assert errs[1] < 0.5 * errs[0]
