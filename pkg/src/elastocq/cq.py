"""Multistep convolution quadrature with the BDF2 symbol.

A causal convolution ``y = F(d/dt) g`` is discretized by the weights of
``F(gamma(zeta) / dt)``.  All steps are computed at once: samples are scaled
by ``rho^n``, transformed with a length ``2N`` DFT, multiplied by ``F`` at
``s_l = gamma(rho exp(-2 pi i l / 2N)) / dt`` and transformed back.  For
real data only ``l = 0..N`` are evaluated; the rest follow by conjugation.
"""

from __future__ import annotations

import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

log = logging.getLogger(__name__)

DEFAULT_EPS = 1e-12
WORKERS_ENV = "ELASTOCQ_WORKERS"


class ContourError(ValueError):
    """A CQ frequency left the right half-plane."""


class TransferError(RuntimeError):
    """A per-frequency evaluation failed; carries the offending frequency."""

    def __init__(self, s: complex, index: int, cause: Exception):
        self.s = complex(s)
        self.index = int(index)
        super().__init__(f"transfer failed at s_{index} = {self.s:.6g}: {cause}")


def bdf2_symbol(zeta):
    """``gamma(zeta) = (1 - zeta) + (1 - zeta)^2 / 2``."""
    z = np.asarray(zeta, dtype=complex)
    return (1.0 - z) + 0.5 * (1.0 - z) ** 2


@dataclass(frozen=True)
class TimeGrid:
    """Uniform grid ``t_n = n dt``, ``n = 0..N``, with ``N`` a power of two."""

    dt: float
    N: int

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be positive")
        if self.N < 1 or self.N & (self.N - 1):
            raise ValueError(f"N must be a power of two, got {self.N}")

    @classmethod
    def from_final_time(cls, T: float, N: int) -> "TimeGrid":
        return cls(T / N, N)

    @property
    def T(self) -> float:
        return self.dt * self.N

    @property
    def times(self) -> np.ndarray:
        return self.dt * np.arange(self.N + 1)

    @property
    def n_transform(self) -> int:
        return 2 * self.N

    def default_radius(self, eps: float = DEFAULT_EPS) -> float:
        return eps ** (1.0 / (2 * self.n_transform))

    def to_dict(self):
        return {"dt": self.dt, "N": self.N}


@dataclass
class TimeSignal:
    """Samples ``(N + 1, ...)`` on a time grid; row ``n`` is the value at ``t_n``."""

    samples: np.ndarray
    grid: TimeGrid
    causal: bool = True

    def __post_init__(self):
        self.samples = np.asarray(self.samples)
        if self.samples.shape[0] != self.grid.N + 1:
            raise ValueError(f"expected {self.grid.N + 1} samples, got {self.samples.shape[0]}")

    @classmethod
    def from_function(cls, f, grid: TimeGrid) -> "TimeSignal":
        return cls(np.stack([np.asarray(f(t)) for t in grid.times]), grid)

    @property
    def times(self) -> np.ndarray:
        return self.grid.times


def cq_frequencies(grid: TimeGrid, rho: float | None = None, full: bool = False) -> np.ndarray:
    """CQ Laplace parameters ``s_l``, ``l = 0..N`` (or ``0..2N-1`` with ``full``).

    Raises :class:`ContourError` if any has nonpositive real part.
    """
    rho = grid.default_radius() if rho is None else float(rho)
    if not 0.0 < rho < 1.0:
        raise ContourError(f"contour radius must lie in (0, 1), got {rho}")
    L = grid.n_transform
    count = L if full else grid.N + 1
    l = np.arange(count)
    s = bdf2_symbol(rho * np.exp(-2j * np.pi * l / L)) / grid.dt
    bad = np.nonzero(s.real <= 0)[0]
    if bad.size:
        raise ContourError(f"Re s_{bad[0]} = {s[bad[0]].real:.3e} <= 0; "
                           "increase N or shrink the contour radius")
    return s


def worker_count(workers: int | None = None) -> int:
    """Explicit value, else ``$ELASTOCQ_WORKERS``, else 1."""
    if workers is not None:
        return max(1, int(workers))
    env = os.environ.get(WORKERS_ENV)
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            log.warning("ignoring non-integer %s=%r", WORKERS_ENV, env)
    return 1


def map_frequencies(fn: Callable, items, workers: int | None = None) -> list:
    """Evaluate ``fn(index, s, payload)`` over ``items`` in order, optionally in processes."""
    items = list(items)
    n = worker_count(workers)
    if n == 1 or len(items) <= 1:
        return [fn(*it) for it in items]
    with ProcessPoolExecutor(max_workers=n) as pool:
        futs = [pool.submit(fn, *it) for it in items]
        return [f.result() for f in futs]


def _forward(samples: np.ndarray, grid: TimeGrid, rho: float, full: bool):
    L = grid.n_transform
    scale = rho ** np.arange(grid.N + 1)
    x = samples * scale.reshape((-1,) + (1,) * (samples.ndim - 1))
    if full or np.iscomplexobj(samples):
        return np.fft.fft(x, n=L, axis=0)
    return np.fft.rfft(x, n=L, axis=0)


def _inverse(Y: np.ndarray, grid: TimeGrid, rho: float, full: bool):
    L = grid.n_transform
    scale = rho ** (-np.arange(grid.N + 1))
    if full:
        y = np.fft.ifft(Y, n=L, axis=0)[: grid.N + 1]
    else:
        y = np.fft.irfft(Y, n=L, axis=0)[: grid.N + 1]
    return y * scale.reshape((-1,) + (1,) * (y.ndim - 1))


def cq_convolve(transfer: Callable, g: TimeSignal, rho: float | None = None,
                full: bool = False, workers: int | None = None) -> TimeSignal:
    """Apply the CQ discretization of ``transfer(s, G) -> F(s) G`` to ``g``.

    ``transfer`` receives a Laplace parameter and the transformed sample
    array for that frequency and returns the transformed output.  With
    ``full=True`` all ``2N`` frequencies are evaluated and the output keeps
    its imaginary part (useful to check conjugation symmetry); otherwise the
    data must be real and only ``N + 1`` frequencies are evaluated.
    """
    grid = g.grid
    rho = grid.default_radius() if rho is None else rho
    full = full or np.iscomplexobj(g.samples)
    s = cq_frequencies(grid, rho, full=full)
    G = _forward(g.samples, grid, rho, full)
    Y = []
    for l, sl in enumerate(s):
        try:
            Y.append(np.asarray(transfer(sl, G[l]), dtype=complex))
        except Exception as exc:  # noqa: BLE001 - re-raised with the frequency attached
            raise TransferError(sl, l, exc) from exc
    y = _inverse(np.stack(Y), grid, rho, full)
    return TimeSignal(y, grid, g.causal)


def bdf2_difference(g: np.ndarray, dt: float) -> np.ndarray:
    """``(3 g_n - 4 g_{n-1} + g_{n-2}) / (2 dt)`` with zero history."""
    g = np.asarray(g)
    pad = np.concatenate([np.zeros((2,) + g.shape[1:], dtype=g.dtype), g])
    return (3 * pad[2:] - 4 * pad[1:-1] + pad[:-2]) / (2 * dt)


def bromwich_frequencies(sigma: float, period: float, omega_max: float) -> np.ndarray:
    """Nodes ``sigma + i k 2 pi / period``, ``k = 0..K``, up to ``omega_max``."""
    dw = 2.0 * np.pi / period
    k = np.arange(int(np.ceil(omega_max / dw)) + 1)
    return sigma + 1j * dw * k


def bromwich_inverse(values: np.ndarray, s: np.ndarray, times, period: float) -> np.ndarray:
    """Real inverse Laplace transform by the trapezoidal rule on ``Re s = sigma``.

    ``values[k]`` is the transform at ``s[k]`` from :func:`bromwich_frequencies`.
    The result at ``t`` is aliased by ``exp(-sigma period) y(t + period)``, so
    ``period`` should exceed the time window by the decay length of ``y``.
    """
    values = np.asarray(values)
    sigma = s[0].real
    dw = 2.0 * np.pi / period
    wts = np.full(s.size, dw / np.pi)
    wts[0] *= 0.5
    times = np.asarray(times, dtype=float)
    phase = np.exp(1j * np.outer(times, s.imag))                  # (nt, K)
    out = np.tensordot(phase * wts[None, :], values, axes=(1, 0))
    return np.exp(sigma * times).reshape((-1,) + (1,) * (values.ndim - 1)) * out.real


__all__ = [
    "DEFAULT_EPS", "WORKERS_ENV", "ContourError", "TransferError", "bdf2_symbol", "TimeGrid",
    "TimeSignal", "cq_frequencies", "worker_count", "map_frequencies", "cq_convolve",
    "bdf2_difference", "bromwich_frequencies", "bromwich_inverse",
]
