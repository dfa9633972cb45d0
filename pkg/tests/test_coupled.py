"""Coupled FEM-BEM systems at one frequency.

Verified properties:
    * zero data give the zero solution; solutions at conjugate frequencies
      are conjugate for real data;
    * the alternative system is the direct one with the ``Phi`` columns
      divided by ``s``, and both formulations give the same ``U^-`` and
      ``Lambda`` with ``Phi_alt = s Phi_dir``;
    * the system matrix is Lipschitz in ``s``;
    * representation formula: formulation independence, the manufactured
      field and the discrete null extension inside;
    * discrete ellipticity of the interior form and of ``B_0``.
"""

import warnings

import numpy as np
import pytest

from elastocq.coupled import (ALTERNATIVE, DIRECT, BlockSystem, InteriorProbeWarning,
                              SolverError, assemble_alternative, assemble_direct,
                              assemble_system, ellipticity_probe, exterior_field, factorize,
                              solve, winding_number)
from elastocq.harness import DEFAULT_INTERIOR, cross_formulation
from elastocq.kernels import as_frequency
from elastocq.manufactured import manufactured_laplace, point_field


@pytest.fixture(scope="module")
def man_setup(model1):
    s = 1.0 + 1.0j
    man = manufactured_laplace(s, model1.exterior, DEFAULT_INTERIOR, surface=model1.surface,
                               balance=True)
    ops = model1.operators(s)
    data = man.data(model1)
    sols = {f: solve(assemble_system(f, s, model1, data, ops)) for f in (DIRECT, ALTERNATIVE)}
    return s, man, sols


# ---------------------------------------------------------------------------
# systems


@pytest.mark.parametrize("formulation", [DIRECT, ALTERNATIVE])
def test_zero_data(model0, formulation):
    sol = solve(assemble_system(formulation, 1.5 + 0.5j, model0))
    assert np.all(sol.vector() == 0) and sol.residual <= 1e-12


def test_rescaling_law(model0):
    s = 0.8 + 1.7j
    ops = model0.operators(s)
    d = assemble_direct(s, model0, None, ops).matrix
    a = assemble_alternative(s, model0, None, ops).matrix
    _, _, ip = model0.slices()
    scaled = a.copy()
    scaled[:, ip] *= s
    assert np.abs(scaled - d).max() <= 1e-14 * np.abs(d).max()


def test_unknown_formulation(model0):
    with pytest.raises(ValueError, match="unknown formulation"):
        assemble_system("mixed", 1.0, model0)


def test_lipschitz_in_s(model0):
    s, d = 1.0 + 1.0j, 1e-4
    A = [assemble_direct(s + k * d, model0).matrix for k in (0, 1, 2)]
    d1, d2 = np.abs(A[1] - A[0]).max(), np.abs(A[2] - A[0]).max()
    assert d1 < 1e-2 and d2 == pytest.approx(2 * d1, rel=1e-2)


def test_conjugate_frequencies(model0, rng):
    b = rng.standard_normal(model0.n_dofs)
    s = 1.0 + 2.0j
    x = solve(assemble_direct(s, model0, b)).vector()
    y = solve(assemble_direct(np.conj(s), model0, b)).vector()
    assert np.abs(y - x.conj()).max() <= 1e-10 * np.abs(x).max()


def test_identity_block_system():
    n = 6
    A = np.eye(n) + 1e-3 * np.diag(np.arange(n), 1)[:n, :n]
    x = np.arange(1.0, n + 1.0)
    sysm = BlockSystem(DIRECT, A.astype(complex), A @ x + 0j, as_frequency(1.0), (3, 2, 1))
    sol = solve(sysm)
    np.testing.assert_allclose(sol.vector(), x, rtol=1e-14)
    assert sol.residual <= 1e-15


def test_singular_system_reported():
    sysm = BlockSystem(DIRECT, np.zeros((3, 3), complex), np.ones(3, complex),
                       as_frequency(2.0), (1, 1, 1))
    with pytest.raises(SolverError) as err:
        factorize(sysm)
    assert err.value.s == 2.0


def test_many_right_sides(model0, rng):
    s = 1.0 + 0.5j
    fac = factorize(assemble_direct(s, model0))
    B = rng.standard_normal((3, model0.n_dofs))
    sol = fac.solve(B)
    assert sol.U_minus.shape == (3, model0.sizes[0])
    one = fac.solve(B[1])
    np.testing.assert_allclose(sol.vector()[1], one.vector(), rtol=1e-13)


# ---------------------------------------------------------------------------
# formulations and representation


def test_cross_formulation(man_setup):
    s, _, sols = man_setup
    assert max(cross_formulation(sols, s).values()) <= 1e-10
    np.testing.assert_allclose(sols[DIRECT].trace, sols[ALTERNATIVE].trace, rtol=1e-10)


def test_representations_agree(man_setup, model1):
    _, _, sols = man_setup
    x = np.array([[0.0, 0.0, 2.0], [1.5, -1.5, 0.5]])
    a = exterior_field(sols[DIRECT], x, model1)
    b = exterior_field(sols[ALTERNATIVE], x, model1)
    assert np.abs(a - b).max() <= 1e-8 * np.abs(a).max()


def test_exterior_field_matches_point_source(man_setup, model1):
    s, man, sols = man_setup
    x = 3.0 * np.array([[0.0, 0.0, 1.0], [0.6, 0.8, 0.0], [-0.48, 0.6, -0.64]])
    got = exterior_field(sols[DIRECT], x, model1)
    exact = point_field(x, man.y0, man.q0, s, model1.exterior)
    assert np.linalg.norm(got - exact) / np.linalg.norm(exact) <= 0.05


def test_interior_probe_null_extension(man_setup, model1):
    _, _, sols = man_setup
    with pytest.warns(InteriorProbeWarning):
        inside = exterior_field(sols[DIRECT], [[0.0, 0.1, 0.2]], model1)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        outside = exterior_field(sols[DIRECT], [[0.0, 0.1, 1.6]], model1)
    assert np.linalg.norm(inside) <= 0.1 * np.linalg.norm(outside)


def test_winding_number(sphere1):
    w = winding_number(sphere1, [[0, 0, 0], [0.3, 0.2, -0.5], [0, 0, 1.5], [3, 1, 0]])
    np.testing.assert_allclose(w, [1, 1, 0, 0], atol=1e-12)


# ---------------------------------------------------------------------------
# ellipticity


@pytest.mark.parametrize("s", [1.0, 2.0 + 2.0j])
def test_ellipticity_probe(model0, s):
    pr = ellipticity_probe(s, model0, n_draws=50, seed=3)
    assert pr.fem_defect <= 1e-10
    assert pr.b0_form.min() >= -1e-8
    assert pr.weighted_defect <= 1e-10


def test_ellipticity_along_scaling(model0):
    lows = [ellipticity_probe(s, model0, n_draws=20).b0_form.min()
            for s in (0.5 + 0.5j, 1.0 + 1.0j, 2.0 + 2.0j, 4.0 + 4.0j)]
    assert all(v > 0 for v in lows)
