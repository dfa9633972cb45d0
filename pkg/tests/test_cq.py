"""BDF2 convolution quadrature.

Verified properties:
    * the symbol and the contour: right half-plane frequencies in
      conjugate pairs;
    * scalar transfers: ``F = 1`` is the identity, ``F = s`` is the BDF2
      difference and ``F = 1/s`` is the BDF2 integrator, second order
      accurate against exact integrals;
    * a nonrational transfer against its exact convolution;
    * error reporting, worker configuration and the Bromwich reference.
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from elastocq.cq import (WORKERS_ENV, ContourError, TimeGrid, TimeSignal, TransferError,
                         bdf2_difference, bdf2_symbol, bromwich_frequencies, bromwich_inverse,
                         cq_convolve, cq_frequencies, map_frequencies, worker_count)


def _smooth(t):
    return t ** 3 * np.exp(-2.0 * t)


def _bdf2_integrate(g, dt):
    """Zero-history solution of ``(3 y_n - 4 y_{n-1} + y_{n-2}) / (2 dt) = g_n``."""
    y = np.zeros(len(g) + 2)
    for n, gn in enumerate(g):
        y[n + 2] = (2 * dt * gn + 4 * y[n + 1] - y[n]) / 3
    return y[2:]


def _square(index, s, payload):
    return index, s * s * payload


# ---------------------------------------------------------------------------
# symbol and contour


@pytest.mark.parametrize("zeta, value", [(1.0, 0.0), (0.0, 1.5), (-1.0, 4.0)])
def test_symbol_values(zeta, value):
    assert bdf2_symbol(zeta) == pytest.approx(value)


@given(st.floats(0.0, 0.999), st.floats(0.0, 2 * np.pi))
@settings(max_examples=100, deadline=None)
def test_symbol_in_right_half_plane(r, theta):
    assert bdf2_symbol(r * np.exp(1j * theta)).real > 0


def test_frequencies_conjugate_pairs():
    grid = TimeGrid(0.05, 64)
    s = cq_frequencies(grid, full=True)
    L = grid.n_transform
    np.testing.assert_allclose(s[1:], np.conj(s[L - 1:0:-1]), rtol=1e-14)
    assert s.real.min() > 0
    np.testing.assert_allclose(cq_frequencies(grid), s[: grid.N + 1])


def test_default_radius():
    grid = TimeGrid(0.1, 32)
    assert grid.default_radius() ** (2 * grid.n_transform) == pytest.approx(1e-12)


@pytest.mark.parametrize("rho", [0.0, 1.0, 1.5])
def test_contour_radius_checked(rho):
    with pytest.raises(ContourError):
        cq_frequencies(TimeGrid(0.1, 8), rho)


@pytest.mark.parametrize("dt, N", [(0.0, 8), (-1.0, 8), (0.1, 12), (0.1, 0)])
def test_grid_checked(dt, N):
    with pytest.raises(ValueError):
        TimeGrid(dt, N)


def test_signal_length_checked():
    with pytest.raises(ValueError, match="expected 9 samples"):
        TimeSignal(np.zeros(8), TimeGrid(0.1, 8))


# ---------------------------------------------------------------------------
# scalar transfers


@pytest.fixture
def signal():
    grid = TimeGrid.from_final_time(4.0, 64)
    return TimeSignal.from_function(_smooth, grid)


def test_identity_transfer(signal):
    y = cq_convolve(lambda s, G: G, signal)
    np.testing.assert_allclose(y.samples, signal.samples, rtol=0, atol=1e-12)


def test_derivative_transfer(signal):
    y = cq_convolve(lambda s, G: s * G, signal)
    ref = bdf2_difference(signal.samples, signal.grid.dt)
    assert np.abs(y.samples - ref).max() <= 1e-10 * np.abs(ref).max()


def test_integral_transfer_matches_recursion(signal):
    """Agreement up to the contour aliasing ``rho^(2N) max|y|``."""
    grid = signal.grid
    y = cq_convolve(lambda s, G: G / s, signal)
    ref = _bdf2_integrate(signal.samples, grid.dt)
    alias = grid.default_radius() ** grid.n_transform * np.abs(ref).max()
    assert np.abs(y.samples - ref).max() <= 1.5 * alias
    # a smaller radius shrinks the aliasing at the cost of round-off
    y = cq_convolve(lambda s, G: G / s, signal, rho=1e-15 ** (1 / grid.n_transform))
    assert np.abs(y.samples - ref).max() <= 1e-10 * np.abs(ref).max()


def test_integral_transfer_second_order():
    def exact(t):
        # antiderivative of t^3 exp(-2t) vanishing at 0
        p = t ** 3 / 2 + 3 * t ** 2 / 4 + 3 * t / 4 + 3 / 8
        return 3 / 8 - np.exp(-2 * t) * p

    errs = []
    for N in (32, 64, 128):
        grid = TimeGrid.from_final_time(4.0, N)
        y = cq_convolve(lambda s, G: G / s, TimeSignal.from_function(_smooth, grid))
        errs.append(np.abs(y.samples - exact(grid.times)).max())
    rates = np.log2(np.array(errs[:-1]) / errs[1:])
    assert np.all(np.abs(rates - 2) <= 0.2)


def test_delay_transfer():
    """``exp(-s tau)`` delays a smooth signal; the error shrinks under refinement."""
    tau = 0.75
    errs = []
    for N in (128, 256, 512):
        grid = TimeGrid.from_final_time(4.0, N)
        y = cq_convolve(lambda s, G: np.exp(-s * tau) * G, TimeSignal.from_function(_smooth, grid))
        t = grid.times
        ref = np.where(t > tau, _smooth(np.maximum(t - tau, 0.0)), 0.0)
        errs.append(np.abs(y.samples - ref).max())
    assert errs[0] / errs[1] > 2.8 and errs[1] / errs[2] > 2.8


def test_vector_samples_and_full_transform(signal):
    g = TimeSignal(np.stack([signal.samples, 2 * signal.samples], axis=1), signal.grid)
    a = cq_convolve(lambda s, G: s * G, g)
    b = cq_convolve(lambda s, G: s * G, g, full=True)
    assert np.abs(b.samples.imag).max() <= 1e-12
    np.testing.assert_allclose(a.samples, b.samples.real, atol=1e-10)
    np.testing.assert_allclose(a.samples[:, 1], 2 * a.samples[:, 0], rtol=1e-12, atol=1e-14)


def test_transfer_error_carries_frequency(signal):
    def bad(s, G):
        if s.real > 10:
            raise np.linalg.LinAlgError("singular")
        return G

    with pytest.raises(TransferError) as err:
        cq_convolve(bad, signal)
    assert err.value.s.real > 10 and err.value.index > 0
    assert isinstance(err.value.__cause__, np.linalg.LinAlgError)


# ---------------------------------------------------------------------------
# workers


def test_worker_count(monkeypatch):
    monkeypatch.delenv(WORKERS_ENV, raising=False)
    assert worker_count() == 1
    monkeypatch.setenv(WORKERS_ENV, "3")
    assert worker_count() == 3
    assert worker_count(2) == 2
    monkeypatch.setenv(WORKERS_ENV, "many")
    assert worker_count() == 1


def test_parallel_map_preserves_order():
    items = [(k, complex(k, 1), np.arange(3.0)) for k in range(5)]
    serial = map_frequencies(_square, items, workers=1)
    parallel = map_frequencies(_square, items, workers=2)
    for a, b in zip(serial, parallel):
        assert a[0] == b[0] and np.array_equal(a[1], b[1])


# ---------------------------------------------------------------------------
# Bromwich reference


def test_bromwich_inverse():
    period = 40.0
    s = bromwich_frequencies(0.5, period, 400.0)
    vals = 1.0 / (s + 1.0) ** 2
    t = np.linspace(0.5, 6.0, 12)
    got = bromwich_inverse(vals, s, t, period)
    np.testing.assert_allclose(got, t * np.exp(-t), atol=2e-3)
