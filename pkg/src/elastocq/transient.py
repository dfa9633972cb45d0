"""Time-domain scattering by convolution quadrature over the coupled solver.

The causal data ``(F, T^+ u^inc, gamma^+ u^inc)`` are sampled on the time
grid and projected onto the discrete spaces.  The scaled DFT turns them into
one right side per CQ frequency; each frequency is factored once, solved for
all right sides and the probes of ``u^+`` are evaluated through the
representation formula before the inverse transform.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field

import numpy as np

from .coupled import (CoupledModel, assemble_system, exterior_field, factorize,
                      _check_formulation)
from .cq import (TimeGrid, TimeSignal, TransferError, _forward, _inverse, cq_frequencies,
                 map_frequencies)
from .fem import assemble_load, boundary_functionals

log = logging.getLogger(__name__)


def data_signal(model: CoupledModel, grid: TimeGrid, source=None, body_force=None) -> TimeSignal:
    """Sample and project causal data onto the system right side.

    ``source`` provides ``incident_trace(x, n, t)`` and
    ``incident_traction(x, n, t)``; ``body_force(x, t)`` returns (n, 3)
    values in the scatterer.  Missing entries mean zero data.
    """
    rows = np.zeros((grid.N + 1, model.n_dofs))
    for k, t in enumerate(grid.times):
        vol = np.zeros(model.sizes[0])
        trace = None
        if source is not None:
            trac, trace = boundary_functionals(
                model.spaces,
                lambda x, n, t=t: source.incident_trace(x, n, t),
                lambda x, n, t=t: source.incident_traction(x, n, t))
            vol = vol + trac.real
            trace = trace.real
        if body_force is not None:
            vol = vol + np.real(assemble_load(model.volume, lambda x, t=t: body_force(x, t)))
        rows[k] = model.rhs(volume=vol, trace=trace).real
    return TimeSignal(rows, grid)


@dataclass
class TransientSolution:
    """Time traces of the unknowns and of ``u^+`` at probes.

    Arrays carry time as the first axis and, for stacked data, the right
    side index as the second.  ``Phi`` follows the formulation's scaling
    (``d/dt gamma^+ u^+`` for the alternative form); ``trace`` is always
    ``gamma^+ u^+``.
    """

    grid: TimeGrid
    formulation: str
    U_minus: np.ndarray
    Lambda: np.ndarray
    Phi: np.ndarray
    trace: np.ndarray
    probes: np.ndarray
    probe_points: np.ndarray
    frequencies: np.ndarray
    residuals: np.ndarray
    conditions: np.ndarray
    timings: dict = field(default_factory=dict)
    frequency_vectors: np.ndarray | None = None

    @property
    def times(self) -> np.ndarray:
        return self.grid.times

    def boundary_norms(self) -> dict:
        """Euclidean norms of the coefficient traces per step."""
        ax = tuple(range(1, self.U_minus.ndim))
        return {"U_minus": np.linalg.norm(self.U_minus, axis=ax[-1:]),
                "Lambda": np.linalg.norm(self.Lambda, axis=ax[-1:]),
                "Phi": np.linalg.norm(self.Phi, axis=ax[-1:])}


def _frequency_task(index, s, payload):
    model, formulation, G, probes = payload
    try:
        system = assemble_system(formulation, s, model, None)
        fac = factorize(system)
        sol = fac.solve(G)
        pv = exterior_field(sol, probes, model, warn=False) if len(probes) else None
        trace = sol.trace
    except Exception as exc:  # noqa: BLE001 - re-raised with the frequency attached
        raise TransferError(s, index, exc) from exc
    return sol.vector(), trace, pv, sol.residual, fac.condition


def solve_transient(model: CoupledModel, data: TimeSignal, formulation: str = "direct",
                    probes=None, rho: float | None = None,
                    workers: int | None = None,
                    keep_frequency: bool = False) -> TransientSolution:
    """CQ solve of the coupled problem for sampled data.

    Parameters
    ----------
    model : CoupledModel
        Meshes, materials and quadrature.
    data : TimeSignal
        Right sides of shape (N + 1, n_dofs) or (N + 1, k, n_dofs), real.
    formulation : {"direct", "alternative"}
    probes : array (m, 3), optional
        Exterior points where ``u^+`` is traced.
    rho : float, optional
        Contour radius; defaults to ``1e-12 ** (1 / (4 N))``.
    workers : int, optional
        Process count for the frequency loop (``$ELASTOCQ_WORKERS`` if unset).
    keep_frequency : bool
        Keep the per-frequency solution vectors in ``frequency_vectors``.
    """
    _check_formulation(formulation)
    grid = data.grid
    rho = grid.default_radius() if rho is None else rho
    probes = np.zeros((0, 3)) if probes is None else np.atleast_2d(np.asarray(probes, float))
    if np.iscomplexobj(data.samples):
        raise ValueError("transient data must be real")
    s = cq_frequencies(grid, rho)
    t0 = time.perf_counter()
    G = _forward(data.samples, grid, rho, full=False)
    items = [(l, sl, (model, formulation, G[l], probes)) for l, sl in enumerate(s)]
    results = map_frequencies(_frequency_task, items, workers)
    t1 = time.perf_counter()
    Xf = np.stack([r[0] for r in results])
    X = _inverse(Xf, grid, rho, False)
    trace = _inverse(np.stack([r[1] for r in results]), grid, rho, False)
    if len(probes):
        P = _inverse(np.stack([r[2] for r in results]), grid, rho, False)
    else:
        P = np.zeros((grid.N + 1,) + X.shape[1:-1] + (0, 3))
    iu, il, ip = model.slices()
    log.info("transient %s: %d frequencies in %.1f s", formulation, len(s), t1 - t0)
    return TransientSolution(grid, formulation, X[..., iu], X[..., il], X[..., ip], trace, P,
                             probes, s, np.array([r[3] for r in results]),
                             np.array([r[4] for r in results]),
                             {"frequency_loop": t1 - t0, "total": time.perf_counter() - t0},
                             Xf if keep_frequency else None)


def causality_defect(sol: TransientSolution, cutoff: float) -> dict:
    """Largest relative size of each trace at times before ``cutoff``.

    Each trace is measured by its Euclidean norm per step and divided by its
    peak over the whole window.
    """
    early = sol.times < cutoff
    out = {}
    for name, arr in (("U_minus", sol.U_minus), ("Lambda", sol.Lambda), ("Phi", sol.Phi),
                      ("probes", sol.probes.reshape(sol.probes.shape[0], -1))):
        n = np.linalg.norm(arr.reshape(arr.shape[0], -1), axis=1)
        peak = n.max()
        out[name] = float(n[early].max() / peak) if early.any() and peak > 0 else 0.0
    return out


__all__ = ["data_signal", "TransientSolution", "solve_transient", "causality_defect"]
