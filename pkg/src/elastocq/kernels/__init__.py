"""Laplace-domain Green tensor of isotropic elastodynamics.

The tensor is normalized as

    E(x, y; s) = G_s(r) I / mu + grad grad^T (G_p(r) - G_s(r)) / (rho s^2),
    G_c(r) = exp(-s r / c) / (4 pi r),

which tends to the Kelvin tensor as ``s -> 0`` and reproduces the unit jump
of the traction of the single-layer potential.

Batch evaluation is delegated to a compiled backend when it is importable
and to an equivalent numpy backend otherwise.  Setting the environment
variable ``ELASTOCQ_PURE_PYTHON=1`` forces the numpy backend.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from ..materials import IsotropicExterior
from . import _numpy_backend
from ._profiles import FULL, SERIES_THRESHOLD, SHEAR_FREE, STATIC_SUBTRACTED

try:
    if os.environ.get("ELASTOCQ_PURE_PYTHON", "") not in ("", "0"):
        raise ImportError("pure python backend requested")
    from . import _cykernels as _compiled
except ImportError:
    _compiled = None

__all__ = [
    "ComplexFrequency", "FrequencyDomainError", "SingularPointError", "BACKEND",
    "FULL", "STATIC_SUBTRACTED", "SHEAR_FREE", "SERIES_THRESHOLD",
    "as_frequency", "fundamental_matrix", "gradient_fundamental", "traction_kernel",
    "verify_pde_pointwise", "green", "green_grad", "green_hess", "double_traction",
    "shear_free_parts", "pair_blocks", "traction_x", "traction_y", "backend_module", "kelvin_tensor",
]


class FrequencyDomainError(ValueError):
    """Raised for frequencies outside the right half plane."""


class SingularPointError(ValueError):
    """Raised when the kernel is evaluated at coincident points."""


@dataclass(frozen=True)
class ComplexFrequency:
    """Laplace parameter ``s`` with ``Re s > 0``."""

    s: complex

    def __post_init__(self):
        object.__setattr__(self, "s", complex(self.s))
        if not self.s.real > 0:
            raise FrequencyDomainError(f"Re s must be positive, got s={self.s}")

    @property
    def sigma(self) -> float:
        return self.s.real

    @property
    def sigma_lower(self) -> float:
        return min(1.0, self.s.real)


def as_frequency(s) -> ComplexFrequency:
    return s if isinstance(s, ComplexFrequency) else ComplexFrequency(s)


BACKEND = "compiled" if _compiled is not None else "numpy"


def backend_module(name: str | None = None):
    """Return the backend module by name (``"compiled"`` or ``"numpy"``)."""
    name = name or BACKEND
    if name == "compiled":
        if _compiled is None:
            raise ImportError("compiled kernel backend is not available")
        return _compiled
    if name == "numpy":
        return _numpy_backend
    raise ValueError(f"unknown backend {name!r}")


_impl = backend_module()


def _prep(z):
    z = np.ascontiguousarray(np.asarray(z, dtype=float).reshape(-1, 3))
    return z


def green(z, s, mat: IsotropicExterior, mode: int = FULL) -> np.ndarray:
    """Batch Green tensor at difference vectors ``z = x - y``, shape (n, 3, 3)."""
    return _impl.green(_prep(z), complex(s), mat.lam, mat.mu, mat.rho, mode)


def green_grad(z, s, mat: IsotropicExterior, mode: int = FULL) -> np.ndarray:
    """Batch gradient ``g[n, k, i, j] = d E_ij / d x_k``."""
    return _impl.green_grad(_prep(z), complex(s), mat.lam, mat.mu, mat.rho, mode)


def green_hess(z, s, mat: IsotropicExterior, mode: int = FULL) -> np.ndarray:
    """Batch Hessian ``h[n, c, k, i, j] = d_c d_k E_ij`` in ``x``."""
    return _impl.green_hess(_prep(z), complex(s), mat.lam, mat.mu, mat.rho, mode)


def double_traction(z, nx, ny, s, mat: IsotropicExterior, mode: int = FULL) -> np.ndarray:
    """Traction in ``x`` of the traction in ``y`` of E, shape (n, 3, 3)."""
    nx = np.ascontiguousarray(np.broadcast_to(nx, np.shape(z)), dtype=float).reshape(-1, 3)
    ny = np.ascontiguousarray(np.broadcast_to(ny, np.shape(z)), dtype=float).reshape(-1, 3)
    return _impl.double_traction(_prep(z), nx, ny, complex(s), mat.lam, mat.mu, mat.rho, mode)


def pair_blocks(batch, nx, ny, gy, s, mat: IsotropicExterior, which: str = "VKW"):
    """Local Galerkin blocks for a batch of panel pairs (see the backends)."""
    c = np.ascontiguousarray
    return _impl.pair_blocks(c(batch.x), c(batch.y), c(batch.w), c(batch.hx, dtype=float),
                             c(batch.hy, dtype=float), c(nx), c(ny), c(gy), complex(s),
                             mat.lam, mat.mu, mat.rho, "V" in which, "K" in which, "W" in which)


def shear_free_parts(z, s, mat: IsotropicExterior):
    return _impl.shear_free_parts(_prep(z), complex(s), mat.lam, mat.mu, mat.rho)


traction_y = _numpy_backend.traction_y
traction_x = _numpy_backend.traction_x


def _check_pair(x, y, s):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    freq = as_frequency(s)
    z = x - y
    if np.any(np.linalg.norm(z.reshape(-1, 3), axis=1) == 0.0):
        raise SingularPointError("kernel evaluated at x == y")
    return z, freq.s


def fundamental_matrix(x, y, s, mat: IsotropicExterior) -> np.ndarray:
    """Green tensor ``E(x, y; s)``; a 3x3 complex matrix (stacked for batches)."""
    z, s = _check_pair(x, y, s)
    out = green(z, s, mat)
    return out.reshape(np.shape(z)[:-1] + (3, 3))


def gradient_fundamental(x, y, s, mat: IsotropicExterior) -> np.ndarray:
    """``G[k, i, j] = d E_ij(x, y; s) / d x_k``."""
    z, s = _check_pair(x, y, s)
    return green_grad(z, s, mat).reshape(np.shape(z)[:-1] + (3, 3, 3))


def traction_kernel(x, y, s, normal_y, mat: IsotropicExterior) -> np.ndarray:
    """Traction at ``y`` of the columns of ``E(x, y; s)``.

    Column ``i`` of the result is the traction, for the normal ``normal_y``,
    of the displacement field ``y -> E(x, y; s) e_i``.  The double-layer
    potential is ``D Phi(x) = int T(x, y)^T Phi(y) dy``.
    """
    z, s = _check_pair(x, y, s)
    g = green_grad(z, s, mat)
    n = np.broadcast_to(np.asarray(normal_y, dtype=float), np.shape(z)).reshape(-1, 3)
    return traction_y(g, n, mat.lam, mat.mu).reshape(np.shape(z)[:-1] + (3, 3))


def kelvin_tensor(z, mat: IsotropicExterior) -> np.ndarray:
    """Elastostatic Kelvin tensor from its textbook closed form."""
    z = np.asarray(z, dtype=float)
    r = np.linalg.norm(z, axis=-1)[..., None, None]
    lam, mu = mat.lam, mat.mu
    zz = z[..., :, None] * z[..., None, :] / r ** 2
    return ((lam + 3 * mu) * np.eye(3) + (lam + mu) * zz) / (8 * np.pi * mu * (lam + 2 * mu) * r)


def verify_pde_pointwise(U, x, s, mat: IsotropicExterior, h: float = 1e-3) -> np.ndarray:
    """Residual ``-Delta* U + rho s^2 U`` at ``x`` by central differences.

    ``U`` maps an (n, 3) array of points to an (n, 3) array of vectors.
    """
    s = as_frequency(s).s
    x = np.asarray(x, dtype=float)
    e = np.eye(3) * h
    pts = [x]
    for i in range(3):
        pts += [x + e[i], x - e[i]]
    for i in range(3):
        for j in range(i + 1, 3):
            pts += [x + e[i] + e[j], x + e[i] - e[j], x - e[i] + e[j], x - e[i] - e[j]]
    vals = np.asarray(U(np.array(pts)), dtype=complex).reshape(len(pts), 3)
    u0 = vals[0]
    H = np.zeros((3, 3, 3), dtype=complex)  # H[a, i, j] = d_i d_j U_a
    for i in range(3):
        H[:, i, i] = (vals[1 + 2 * i] - 2 * u0 + vals[2 + 2 * i]) / h ** 2
    k = 7
    for i in range(3):
        for j in range(i + 1, 3):
            pp, pm, mp, mm = vals[k:k + 4]
            H[:, i, j] = H[:, j, i] = (pp - pm - mp + mm) / (4 * h ** 2)
            k += 4
    lap = np.einsum("aii->a", H)
    grad_div = np.einsum("iia->a", H)
    navier = mat.mu * lap + (mat.lam + mat.mu) * grad_div
    return -navier + mat.rho * s ** 2 * u0
