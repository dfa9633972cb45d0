"""Manufactured solutions in the Laplace and time domains.

Verified properties:
    * point-source fields solve the Laplace-domain equation;
    * transmission data of the two-source solution hold by construction,
      zero charges give the zero problem and close sources warn;
    * pulse transforms and antiderivatives against quadrature;
    * the retarded point-source field transforms to the Laplace field;
    * plane waves: equation residual, transversality, support and
      polarization checks.
"""

import numpy as np
import pytest
from scipy.integrate import quad

from elastocq.harness import DEFAULT_EXTERIOR, DEFAULT_INTERIOR
from elastocq.kernels import verify_pde_pointwise
from elastocq.manufactured import (BumpPulse, ConditioningWarning, GaussianPulse,
                                   PolarizationError, incident_plane_wave, manufactured_laplace,
                                   point_field, signature_from_dict, stokes_displacement)
from elastocq.materials import IsotropicExterior
from elastocq.mesh import icosphere

# ---------------------------------------------------------------------------
# Laplace domain


def test_point_field_solves_equation():
    s = 1.2 + 0.7j
    y, q = np.array([0.1, 0.0, -0.2]), np.array([1.0, 0.3, -0.5])
    mat = DEFAULT_INTERIOR
    res = verify_pde_pointwise(lambda x: point_field(x, y, q, s, mat), np.array([0.5, 0.6, 0.4]),
                               s, mat)
    assert np.linalg.norm(res) <= 1e-4 * np.linalg.norm(point_field([[0.5, 0.6, 0.4]], y, q, s, mat))


def test_zero_charges():
    m = manufactured_laplace(1.0, DEFAULT_EXTERIOR, DEFAULT_INTERIOR, q0=(0, 0, 0), q1=(0, 0, 0))
    x = icosphere(1).vertices
    assert np.all(m.incident_trace(x) == 0)


def test_transmission_data_by_construction(sphere1):
    m = manufactured_laplace(1.0 + 1.0j, DEFAULT_EXTERIOR, DEFAULT_INTERIOR, surface=sphere1,
                             balance=True)
    x, n = sphere1.centroids, sphere1.normals
    r1 = m.incident_trace(x) - (m.u_minus(x) - m.u_plus(x))
    r2 = m.incident_traction(x, n) - (m.t_minus(x, n) - m.t_plus(x, n))
    assert np.abs(r1).max() <= 1e-13 and np.abs(r2).max() <= 1e-13
    # balancing equalizes the two fields on the vertices
    v = sphere1.vertices
    assert np.linalg.norm(m.u_minus(v)) == pytest.approx(np.linalg.norm(m.u_plus(v)), rel=1e-12)


def test_close_source_warns(sphere1):
    with pytest.warns(ConditioningWarning):
        manufactured_laplace(1.0, DEFAULT_EXTERIOR, DEFAULT_INTERIOR, y0=(0.0, 0.0, 0.9),
                             surface=sphere1)


def test_balance_needs_surface():
    with pytest.raises(ValueError):
        manufactured_laplace(1.0, DEFAULT_EXTERIOR, DEFAULT_INTERIOR, balance=True)


# ---------------------------------------------------------------------------
# signatures


@pytest.mark.parametrize("s", [0.5, 2.0 + 3.0j, 5.0 - 1.0j])
def test_gaussian_transform(s):
    g = GaussianPulse(1.5, 0.4, 2.0)
    re = quad(lambda t: (np.exp(-s * t) * g(t)).real, 0, 10, limit=200)[0]
    im = quad(lambda t: (np.exp(-s * t) * g(t)).imag, 0, 10, limit=200)[0]
    assert complex(g.laplace(s)) == pytest.approx(re + 1j * im, rel=1e-10, abs=1e-14)


@pytest.mark.parametrize("pulse", [GaussianPulse(1.5, 0.4), BumpPulse(1.2, 0.8, 0.3)])
def test_antiderivatives(pulse):
    t = np.linspace(0.0, 3.0, 7)
    lo = -5.0 if isinstance(pulse, GaussianPulse) else 0.0
    for tk, a1, a2 in zip(t, pulse.antiderivative(t), pulse.second_antiderivative(t)):
        assert a1 == pytest.approx(quad(pulse, lo, tk)[0], abs=1e-10)
        assert a2 == pytest.approx(quad(pulse.antiderivative, lo, tk)[0], abs=1e-9)
    h = 1e-6
    fd = (pulse(t + h) - pulse(t - h)) / (2 * h)
    np.testing.assert_allclose(pulse.derivative(t), fd, atol=1e-6)


def test_bump_support_and_peak():
    b = BumpPulse(2.0, 3.0, 1.0)
    assert b(np.array([0.5, 1.0, 3.0, 4.0])).tolist() == [0.0, 0.0, 0.0, 0.0]
    assert float(b(2.0)) == pytest.approx(3.0)


def test_signature_round_trip():
    for sig in (GaussianPulse(1.0, 0.3, 2.0), BumpPulse(0.5, 1.0, 0.2)):
        assert signature_from_dict(sig.to_dict()) == sig
    with pytest.raises(ValueError):
        signature_from_dict({"kind": "ricker"})


# ---------------------------------------------------------------------------
# time domain


def test_retarded_field_transform():
    """Laplace transform of the retarded field is ``E(x, y; s) q g_hat(s)``."""
    mat = IsotropicExterior(0.5, 1.0, 1.0)
    sig = GaussianPulse(2.0, 0.4)
    y, q = np.zeros(3), np.array([1.0, -0.5, 0.3])
    x = np.array([[0.4, 0.9, -0.3]])
    s = 1.0 + 1.5j

    def f(t, i, part):
        v = np.exp(-s * t) * stokes_displacement(x, t, y, q, sig, mat)[0, i]
        return v.real if part == 0 else v.imag

    got = np.array([quad(f, 0, 8, args=(i, 0), limit=400)[0]
                    + 1j * quad(f, 0, 8, args=(i, 1), limit=400)[0] for i in range(3)])
    ref = point_field(x, y, q, s, mat)[0] * complex(sig.laplace(s))
    np.testing.assert_allclose(got, ref, rtol=1e-7, atol=1e-12)


def test_retarded_field_is_causal():
    sig = BumpPulse(1.0)
    x = np.array([[3.0, 0.0, 0.0]])
    u = stokes_displacement(x, 3.0 / DEFAULT_EXTERIOR.c_p - 1e-3, np.zeros(3),
                            np.array([1.0, 0, 0]), sig, DEFAULT_EXTERIOR)
    assert np.all(u == 0)


# ---------------------------------------------------------------------------
# plane waves


def test_p_wave_harmonic_slice():
    mat = IsotropicExterior(1.5, 0.8, 1.2)
    d = np.array([0.0, 0.6, 0.8])
    s = 1.0 + 2.0j

    def U(x):
        return np.exp(-s * x @ d / mat.c_p)[:, None] * d[None]

    x = np.array([0.2, -0.3, 0.5])
    res = verify_pde_pointwise(U, x, s, mat, h=1e-3)
    assert np.linalg.norm(res) <= 1e-6 * np.linalg.norm(mat.rho * s ** 2 * U(x[None]))


def test_s_wave_divergence_free():
    mat = DEFAULT_EXTERIOR
    d = np.array([1.0, 0.0, 0.0])
    w = incident_plane_wave(d, [0.0, 1.0, 0.0], mat.c_s, GaussianPulse(1.0, 0.3), mat)
    x = np.array([[0.3, 0.2, -0.1]])
    div = np.trace(w.gradient(x, 1.2)[0])
    assert abs(div) <= 1e-8


def test_trace_vanishes_at_zero(sphere1):
    mat = DEFAULT_EXTERIOR
    d = np.array([0.0, 0.0, 1.0])
    w = incident_plane_wave(d, d, mat.c_p, BumpPulse(1.0), mat, sphere1, lead=0.5)
    assert np.all(w.incident_trace(sphere1.vertices, None, 0.0) == 0)
    assert np.all(w.incident_traction(sphere1.vertices, sphere1.vertices, 0.0) == 0)
    assert w.arrival_time(sphere1) == pytest.approx(0.5)


@pytest.mark.parametrize("p, speed", [([0, 0, 1], "c_s"), ([0, 1, 0], "c_p"), ([0, 1, 1], "c_p")])
def test_polarization_checked(p, speed):
    mat = DEFAULT_EXTERIOR
    with pytest.raises(PolarizationError):
        incident_plane_wave([0, 0, 1.0], np.array(p, float), getattr(mat, speed),
                            BumpPulse(1.0), mat)
