"""Laplace-domain Green tensor and its derivatives.

Verified properties:
    * agreement with a 60-digit oracle of the closed form;
    * symmetry, homogeneity under scaling and the static Kelvin limit;
    * the series and closed-form branches agree across their switch;
    * finite-difference consistency of the gradient and the PDE residual;
    * the traction kernel as Hooke's law applied to the gradient;
    * the compiled and numpy backends agree.
"""

import json
import time
from pathlib import Path

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from elastocq import kernels
from elastocq.kernels import (SERIES_THRESHOLD, FrequencyDomainError, SingularPointError,
                              fundamental_matrix, gradient_fundamental, kelvin_tensor,
                              traction_kernel, verify_pde_pointwise)
from elastocq.materials import IsotropicExterior, isotropic_stress

from data.generate_kernel_oracle import oracle

ORACLE = json.loads((Path(__file__).parent / "data" / "kernel_oracle.json").read_text())


def _case(c):
    mat = IsotropicExterior(c["lambda"], c["mu"], c["rho"])
    E = (np.array(c["E_re"], dtype=float) + 1j * np.array(c["E_im"], dtype=float))
    return np.array(c["x"]), np.array(c["y"]), complex(*c["s"]), mat, E


# ---------------------------------------------------------------------------
# high-precision oracle


def test_oracle_agreement():
    assert ORACLE["digits"] >= 50 and len(ORACLE["cases"]) == 50
    t0 = time.perf_counter()
    worst = 0.0
    for c in ORACLE["cases"]:
        x, y, s, mat, E = _case(c)
        got = fundamental_matrix(x, y, s, mat)
        worst = max(worst, np.abs(got - E).max() / np.abs(E).max())
    assert worst <= 1e-12
    assert time.perf_counter() - t0 < 1.0


def test_unit_case_tabulated():
    """``x - y = e_1``, unit material, ``s = 1`` against the oracle at 30 digits."""
    mp.mp.dps = 30
    E = np.array([[complex(v) for v in row] for row in oracle([1, 0, 0], 1.0, 1, 1, 1)])
    got = fundamental_matrix([1.0, 0, 0], [0.0, 0, 0], 1.0, IsotropicExterior())
    np.testing.assert_allclose(got, E, rtol=1e-13, atol=1e-16)


@pytest.mark.parametrize("factor", [0.55, 0.8, 0.99, 1.01, 1.3, 1.9])
def test_series_branch_overlap(factor):
    """Both sides of the series switch against the oracle."""
    mp.mp.dps = 30
    mat = IsotropicExterior(0.7, 1.3, 0.9)
    s = 0.6 + 0.8j
    r = factor * SERIES_THRESHOLD * mat.c_s / abs(s)
    z = r * np.array([0.48, -0.6, 0.64])
    E = np.array([[complex(v) for v in row] for row in oracle(z, s, mat.lam, mat.mu, mat.rho)])
    got = fundamental_matrix(z, np.zeros(3), s, mat)
    assert np.abs(got - E).max() / np.abs(E).max() <= 1e-12


# ---------------------------------------------------------------------------
# identities

points = st.lists(st.floats(-2, 2), min_size=3, max_size=3).map(np.array)
freqs = st.tuples(st.floats(0.1, 10), st.floats(-10, 10)).map(lambda p: complex(*p))


@given(points, points, freqs)
@settings(max_examples=100, deadline=None)
def test_symmetry(x, y, s):
    if np.linalg.norm(x - y) < 1e-3:
        return
    mat = IsotropicExterior(1.3, 0.8, 1.1)
    E = fundamental_matrix(x, y, s, mat)
    np.testing.assert_allclose(fundamental_matrix(y, x, s, mat), E.T, rtol=0, atol=1e-14 * np.abs(E).max())
    np.testing.assert_allclose(E, E.T, rtol=0, atol=1e-14 * np.abs(E).max())


@given(points, points, freqs)
@settings(max_examples=100, deadline=None)
def test_scaling(x, y, s):
    """``E(a x, a y; s) = E(x, y; a s) / a`` for ``a = 2``."""
    if np.linalg.norm(x - y) < 1e-3:
        return
    mat = IsotropicExterior(0.5, 1.2, 0.9)
    lhs = fundamental_matrix(2 * x, 2 * y, s, mat)
    rhs = fundamental_matrix(x, y, 2 * s, mat) / 2
    scale = np.abs(rhs).max()
    if scale < 1e-200:
        return
    assert np.abs(lhs - rhs).max() <= 1e-12 * scale


def test_static_limit():
    mat = IsotropicExterior(1.5, 0.7, 1.3)
    z = np.array([0.3, -0.5, 0.4])
    K = kelvin_tensor(z, mat)
    errs = [np.abs(fundamental_matrix(z, 0 * z, s, mat) - K).max() / np.abs(K).max()
            for s in (1e-1, 1e-2, 1e-3)]
    assert errs[-1] < 1e-3
    assert errs[0] > errs[1] > errs[2]


def test_domain_errors():
    mat = IsotropicExterior()
    with pytest.raises(FrequencyDomainError):
        fundamental_matrix([1, 0, 0], [0, 0, 0], 1j, mat)
    with pytest.raises(SingularPointError):
        fundamental_matrix([1, 0, 0], [1, 0, 0], 1.0, mat)


# ---------------------------------------------------------------------------
# derivatives


def test_gradient_finite_differences():
    mat = IsotropicExterior(1.2, 0.9, 1.1)
    s = 1 + 1j
    x, y = np.array([0.6, 0.0, 0.8]), np.zeros(3)
    G = gradient_fundamental(x, y, s, mat)
    h = 1e-5
    for k in range(3):
        e = np.zeros(3)
        e[k] = h
        fd = (fundamental_matrix(x + e, y, s, mat) - fundamental_matrix(x - e, y, s, mat)) / (2 * h)
        assert np.abs(G[k] - fd).max() <= 1e-6 * np.abs(G).max()


def test_gradient_antisymmetry(rng):
    mat = IsotropicExterior(1.0, 1.0, 1.0)
    for _ in range(10):
        x, y = rng.standard_normal(3), rng.standard_normal(3)
        s = complex(rng.uniform(0.1, 5), rng.uniform(-5, 5))
        Gx = gradient_fundamental(x, y, s, mat)
        # d/dy E(x, y) = d/dx E(y, x)^T
        Gy = np.swapaxes(gradient_fundamental(y, x, s, mat), 1, 2)
        np.testing.assert_allclose(Gx, -Gy, atol=1e-12 * np.abs(Gx).max())


def test_gradient_decay():
    mat = IsotropicExterior(1.0, 1.0, 1.0)
    mags = np.array([np.abs(gradient_fundamental([r, 0, 0], [0, 0, 0], 2.0, mat)).max()
                     for r in (2.0, 4.0, 8.0)])
    assert np.all(np.diff(mags) < 0)
    # bounded by the slower (pressure) exponential times a polynomial
    assert np.all(mags * np.exp(2 * np.array([2.0, 4.0, 8.0]) / mat.c_p) < 1.0)


def test_pde_residual_of_column():
    mat = IsotropicExterior(0.8, 1.1, 1.2)
    s = 1.5 + 0.5j
    y = np.zeros(3)

    def U(p):
        return np.array([fundamental_matrix(q, y, s, mat)[:, 1] for q in p])

    x = np.array([0.6, 0.0, 0.8])
    res = verify_pde_pointwise(U, x, s, mat, h=1e-3)
    assert np.linalg.norm(res) <= 1e-4 * np.linalg.norm(U(x[None])[0])


def test_pde_residual_of_constant():
    mat = IsotropicExterior(1.0, 2.0, 3.0)
    s = 0.5 + 1j
    c = np.array([1.0, -2.0, 0.5])
    res = verify_pde_pointwise(lambda p: np.tile(c, (len(p), 1)), np.zeros(3), s, mat)
    np.testing.assert_allclose(res, mat.rho * s ** 2 * c, rtol=1e-12)


def test_traction_kernel_from_gradient(rng):
    mat = IsotropicExterior(1.4, 0.6, 1.0)
    s = 2 - 1j
    x, y = rng.standard_normal(3), rng.standard_normal(3)
    n = rng.standard_normal(3)
    n /= np.linalg.norm(n)
    T = traction_kernel(x, y, s, n, mat)
    # gradient in y of column i: d_{y_k} E_ji(x, y) = -d_{x_k} E_ji
    G = -gradient_fundamental(x, y, s, mat)
    for i in range(3):
        grad = G[:, :, i]                        # grad[k, j] = d_k u_j
        e = 0.5 * (grad + grad.T)
        np.testing.assert_allclose(T[:, i], isotropic_stress(mat.lam, mat.mu, e) @ n,
                                   atol=1e-12 * np.abs(T).max())


def test_traction_kernel_axial_symmetry():
    mat = IsotropicExterior(1.0, 1.0, 1.0)
    n = np.array([0.0, 0.0, 1.0])
    T = traction_kernel(np.array([0.0, 0.0, 1.3]), np.zeros(3), 1.0, n, mat)
    ev = np.sort_complex(np.linalg.eigvals(T))
    assert min(abs(ev[0] - ev[1]), abs(ev[1] - ev[2]), abs(ev[0] - ev[2])) <= 1e-12 * abs(ev).max()


# ---------------------------------------------------------------------------
# backends


@pytest.mark.skipif(kernels.BACKEND != "compiled", reason="compiled backend not built")
@pytest.mark.parametrize("fn", ["green", "green_grad", "green_hess"])
def test_backends_agree(fn, rng):
    mat = IsotropicExterior(1.3, 0.7, 1.1)
    z = rng.standard_normal((200, 3)) * 10 ** rng.uniform(-3, 0.5, (200, 1))
    s = 0.7 + 2.1j
    a = getattr(kernels.backend_module("compiled"), fn)(z, s, mat.lam, mat.mu, mat.rho, 0)
    b = getattr(kernels.backend_module("numpy"), fn)(z, s, mat.lam, mat.mu, mat.rho, 0)
    scale = np.abs(b).reshape(len(z), -1).max(axis=1)
    assert np.max(np.abs(a - b).reshape(len(z), -1).max(axis=1) / scale) <= 1e-12
