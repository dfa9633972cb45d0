"""Time-domain coupled solves by convolution quadrature.

Verified properties:
    * zero incident data give the zero solution;
    * the result does not depend on the worker count;
    * real data give real traces;
    * the alternative ``Phi`` is the BDF2 derivative of the direct one;
    * causality of a plane wave on the coarse ball.
"""

import numpy as np
import pytest

from elastocq.coupled import ALTERNATIVE, DIRECT
from elastocq.cq import TimeGrid, TimeSignal, TransferError, bdf2_difference
from elastocq.manufactured import BumpPulse, incident_plane_wave
from elastocq.transient import causality_defect, data_signal, solve_transient

PROBES = np.array([[0.0, 0.0, 2.0], [1.5, 0.0, 0.0]])


@pytest.fixture(scope="module")
def grid():
    return TimeGrid.from_final_time(3.0, 16)


@pytest.fixture(scope="module")
def wave(model0):
    mat = model0.exterior
    d = np.array([0.0, 0.0, 1.0])
    return incident_plane_wave(d, d, mat.c_p, BumpPulse(1.0), mat, model0.surface, lead=0.8)


@pytest.fixture(scope="module")
def data(model0, grid, wave):
    return data_signal(model0, grid, wave)


@pytest.fixture(scope="module")
def direct(model0, data):
    return solve_transient(model0, data, DIRECT, PROBES)


def test_zero_incident(model0, grid):
    sol = solve_transient(model0, data_signal(model0, grid), DIRECT, PROBES)
    for arr in (sol.U_minus, sol.Lambda, sol.Phi, sol.probes):
        assert np.abs(arr).max() <= 1e-12


def test_shapes(direct, model0, grid):
    n_u, n_l, n_p = model0.sizes
    assert direct.U_minus.shape == (grid.N + 1, n_u)
    assert direct.Lambda.shape == (grid.N + 1, n_l)
    assert direct.Phi.shape == (grid.N + 1, n_p)
    assert direct.probes.shape == (grid.N + 1, 2, 3)
    assert direct.frequencies.shape == (grid.N + 1,)
    assert direct.residuals.max() <= 1e-10
    norms = direct.boundary_norms()
    assert norms["Lambda"].shape == (grid.N + 1,)


def test_real_traces(direct):
    assert not np.iscomplexobj(direct.U_minus) or np.abs(direct.U_minus.imag).max() <= 1e-12


def test_worker_count_does_not_change_result(model0, data, direct):
    par = solve_transient(model0, data, DIRECT, PROBES, workers=2)
    assert np.array_equal(par.U_minus, direct.U_minus)
    assert np.array_equal(par.probes, direct.probes)


def test_alternative_phi_is_derivative(model0, data, direct, grid):
    alt = solve_transient(model0, data, ALTERNATIVE, PROBES)
    scale = np.abs(direct.U_minus).max()
    assert np.abs(alt.U_minus - direct.U_minus).max() <= 1e-8 * scale
    ref = bdf2_difference(direct.Phi, grid.dt)
    assert np.abs(alt.Phi - ref).max() <= 1e-6 * np.abs(ref).max()
    np.testing.assert_allclose(alt.trace, direct.trace, atol=1e-8 * np.abs(direct.trace).max())


def test_causality_coarse(direct, wave, model0, grid):
    cutoff = wave.arrival_time(model0.surface) - 2 * grid.dt
    defects = causality_defect(direct, cutoff)
    assert max(defects.values()) <= 1e-6
    assert set(defects) == {"U_minus", "Lambda", "Phi", "probes"}


def test_stacked_right_sides(model0, data):
    stacked = TimeSignal(np.stack([data.samples, -2.0 * data.samples], axis=1), data.grid)
    sol = solve_transient(model0, stacked, DIRECT)
    np.testing.assert_allclose(sol.U_minus[:, 1], -2.0 * sol.U_minus[:, 0],
                               atol=1e-12 * np.abs(sol.U_minus).max())


def test_complex_data_rejected(model0, grid):
    data = TimeSignal(np.zeros((grid.N + 1, model0.n_dofs), complex), grid)
    with pytest.raises(ValueError, match="real"):
        solve_transient(model0, data)


def test_unknown_formulation(model0, data):
    with pytest.raises(ValueError):
        solve_transient(model0, data, "mixed")


def test_failing_frequency_reported(model0, data, monkeypatch):
    import elastocq.transient as tr

    def broken(*args, **kwargs):
        raise np.linalg.LinAlgError("singular")

    monkeypatch.setattr(tr, "factorize", broken)
    with pytest.raises(TransferError) as err:
        solve_transient(model0, data)
    assert err.value.index == 0
