"""Per-frequency FEM-BEM coupled systems in the direct and alternative forms.

Unknowns are ordered ``(U^-, Lambda, Phi)``: P1 volume displacement, P0
boundary traction and P1 boundary displacement.  Test rows are ``V``
(volume), ``mu`` (P0) and ``eta`` (P1).  The direct system is

    a_s(U, V) - <Lambda, gamma^- V>                = (F, V) + <T^+ U^inc, gamma^- V>
    <mu, gamma^- U> + <mu, V Lambda> - <mu, (1/2 + K) Phi> = <mu, gamma^+ U^inc>
    <(1/2 + K') Lambda, eta> + <W Phi, eta>        = 0

and the alternative system divides the two ``Phi`` columns by ``s``.  Its
solution satisfies ``Phi_alt = s * Phi_dir`` with identical ``U^-`` and
``Lambda``.  The exterior field is ``D Phi - S Lambda`` (direct) or
``s^-1 D Phi - S Lambda`` (alternative).
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .bem import (BoundaryOperatorSet, PotentialQuadrature, QuadratureSettings,
                  assemble_operators, potential_double, potential_single)
from .fem import InteriorBlocks, assemble_interior
from .kernels import ComplexFrequency, as_frequency
from .materials import AnisotropicInterior, IsotropicExterior
from .mesh import SurfaceMesh, VolumeMesh
from .spaces import FunctionSpaces

log = logging.getLogger(__name__)

DIRECT = "direct"
ALTERNATIVE = "alternative"
FORMULATIONS = (DIRECT, ALTERNATIVE)


class SolverError(RuntimeError):
    """Factorization failure at one frequency."""

    def __init__(self, s: complex, condition: float, message: str):
        self.s = complex(s)
        self.condition = float(condition)
        super().__init__(f"{message} at s={self.s:.6g} (condition estimate {self.condition:.3e})")


class InteriorProbeWarning(UserWarning):
    """Exterior field requested at a point inside the scatterer."""


def _check_formulation(name: str) -> str:
    if name not in FORMULATIONS:
        raise ValueError(f"unknown formulation {name!r}; expected one of {FORMULATIONS}")
    return name


@dataclass
class CoupledModel:
    """Meshes, materials and s-independent blocks of the coupled problem.

    Parameters
    ----------
    volume : VolumeMesh
        Tetrahedral mesh of the scatterer; its boundary is the coupling surface.
    interior : AnisotropicInterior
        Per-element interior material.
    exterior : IsotropicExterior
        Exterior material.
    quad, potential_quad : optional
        Galerkin and potential quadrature settings.
    """

    volume: VolumeMesh
    interior: AnisotropicInterior
    exterior: IsotropicExterior
    quad: QuadratureSettings = field(default_factory=QuadratureSettings)
    potential_quad: PotentialQuadrature = field(default_factory=PotentialQuadrature)

    def __post_init__(self):
        self.spaces = FunctionSpaces(self.volume)
        self.blocks: InteriorBlocks = assemble_interior(self.volume, self.interior, self.spaces)
        self._half = (0.5 * self.spaces.mass01).toarray()
        self._coupling = self.blocks.coupling.toarray()

    @property
    def surface(self) -> SurfaceMesh:
        return self.spaces.surface

    @property
    def sizes(self) -> tuple[int, int, int]:
        return self.spaces.sizes

    @property
    def n_dofs(self) -> int:
        return sum(self.sizes)

    def slices(self) -> tuple[slice, slice, slice]:
        nv, n0, n1 = self.sizes
        return slice(0, nv), slice(nv, nv + n0), slice(nv + n0, nv + n0 + n1)

    def operators(self, s) -> BoundaryOperatorSet:
        return assemble_operators(self.surface, s, self.exterior, self.quad)

    def rhs(self, volume=None, trace=None) -> np.ndarray:
        """Stack right-side functionals into one system vector.

        ``volume`` holds ``(F, V) + <T^+ U^inc, gamma^- V>`` and ``trace``
        holds ``<mu, gamma^+ U^inc>``.  Extra leading axes are kept.
        """
        nv, n0, n1 = self.sizes
        lead = ()
        for v in (volume, trace):
            if v is not None:
                lead = np.shape(v)[:-1]
        b = np.zeros(lead + (self.n_dofs,), dtype=complex)
        iu, il, _ = self.slices()
        if volume is not None:
            b[..., iu] = volume
        if trace is not None:
            b[..., il] = trace
        return b


@dataclass
class BlockSystem:
    """Dense complex block system at one frequency."""

    formulation: str
    matrix: np.ndarray
    rhs: np.ndarray
    frequency: ComplexFrequency
    sizes: tuple[int, int, int]

    @property
    def s(self) -> complex:
        return self.frequency.s

    def slices(self) -> tuple[slice, slice, slice]:
        nv, n0, n1 = self.sizes
        return slice(0, nv), slice(nv, nv + n0), slice(nv + n0, nv + n0 + n1)


def _assemble(formulation, s, model: CoupledModel, data, ops):
    freq = as_frequency(s)
    s = freq.s
    ops = ops if ops is not None else model.operators(s)
    if ops.frequency.s != s:
        raise ValueError(f"operators assembled at s={ops.s}, requested s={s}")
    iu, il, ip = model.slices()
    n = model.n_dofs
    scale = 1.0 if formulation == DIRECT else 1.0 / s
    C = model._coupling
    A = np.zeros((n, n), dtype=complex)
    A[iu, iu] = model.blocks.operator(s).toarray()
    A[iu, il] = -C.T
    A[il, iu] = C
    A[il, il] = ops.V
    A[il, ip] = -(model._half + ops.K) * scale
    A[ip, il] = model._half.T + ops.K.T
    A[ip, ip] = ops.W * scale
    b = np.zeros(n, dtype=complex) if data is None else np.asarray(data, dtype=complex)
    if b.shape[-1] != n:
        raise ValueError(f"right side has {b.shape[-1]} entries, system has {n}")
    return BlockSystem(formulation, A, b, freq, model.sizes)


def assemble_direct(s, model: CoupledModel, data=None,
                    ops: BoundaryOperatorSet | None = None) -> BlockSystem:
    """Block system of the direct formulation (``Phi = gamma^+ U^+``)."""
    return _assemble(DIRECT, s, model, data, ops)


def assemble_alternative(s, model: CoupledModel, data=None,
                         ops: BoundaryOperatorSet | None = None) -> BlockSystem:
    """Block system of the alternative formulation (``Phi = s gamma^+ U^+``)."""
    return _assemble(ALTERNATIVE, s, model, data, ops)


def assemble_system(formulation: str, s, model: CoupledModel, data=None, ops=None) -> BlockSystem:
    return _assemble(_check_formulation(formulation), s, model, data, ops)


@dataclass
class LaplaceSolution:
    """Solution triplet at one frequency.

    ``U_minus``, ``Lambda`` and ``Phi`` may carry a leading right-side axis.
    """

    U_minus: np.ndarray
    Lambda: np.ndarray
    Phi: np.ndarray
    formulation: str
    frequency: ComplexFrequency
    residual: float
    condition: float = float("nan")

    @property
    def s(self) -> complex:
        return self.frequency.s

    @property
    def trace(self) -> np.ndarray:
        """``gamma^+ U^+`` recovered from ``Phi`` for either formulation."""
        return self.Phi if self.formulation == DIRECT else self.Phi / self.s

    def vector(self) -> np.ndarray:
        return np.concatenate([self.U_minus, self.Lambda, self.Phi], axis=-1)


@dataclass
class FactoredSystem:
    """LU factors of one block system, reusable for many right sides."""

    system: BlockSystem
    lu: np.ndarray
    piv: np.ndarray
    condition: float

    def solve(self, rhs=None) -> LaplaceSolution:
        sysm = self.system
        b = sysm.rhs if rhs is None else np.asarray(rhs, dtype=complex)
        B = np.atleast_2d(b)
        X = sla.lu_solve((self.lu, self.piv), B.T, check_finite=False).T
        R = X @ sysm.matrix.T - B
        bn = np.linalg.norm(B, axis=1)
        rn = np.linalg.norm(R, axis=1)
        xn = np.linalg.norm(X, axis=1)
        rel = np.where(bn > 0, rn / np.where(bn > 0, bn, 1.0), rn)
        if np.any(~np.isfinite(X)):
            raise SolverError(sysm.s, self.condition, "non-finite solution")
        residual = float(rel.max()) if rel.size else 0.0
        log.debug("s=%s residual=%.2e max|x|=%.2e", sysm.s, residual, xn.max(initial=0.0))
        if b.ndim == 1:
            X = X[0]
        iu, il, ip = sysm.slices()
        return LaplaceSolution(X[..., iu], X[..., il], X[..., ip], sysm.formulation,
                               sysm.frequency, residual, self.condition)


def factorize(system: BlockSystem) -> FactoredSystem:
    """Dense LU factorization with a 1-norm condition estimate."""
    A = system.matrix
    if not np.all(np.isfinite(A)):
        raise SolverError(system.s, float("inf"), "non-finite system matrix")
    anorm = np.abs(A).sum(axis=0).max()
    with warnings.catch_warnings():
        warnings.simplefilter("error", sla.LinAlgWarning)
        try:
            lu, piv = sla.lu_factor(A, check_finite=False)
        except (sla.LinAlgWarning, np.linalg.LinAlgError, ValueError) as exc:
            raise SolverError(system.s, float("inf"), f"factorization failed ({exc})") from exc
    rcond, info = sla.lapack.zgecon(lu, anorm, norm="1")
    cond = float(1.0 / rcond) if rcond > 0 else float("inf")
    if not np.isfinite(cond) or info != 0:
        raise SolverError(system.s, cond, "singular system")
    return FactoredSystem(system, lu, piv, cond)


def solve(system: BlockSystem) -> LaplaceSolution:
    """Factor and solve a block system; the residual is recorded on the result."""
    return factorize(system).solve()


def winding_number(surface: SurfaceMesh, x) -> np.ndarray:
    """Generalized winding number of ``surface`` about points ``x`` (1 inside, 0 outside)."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    v = surface.vertices[surface.triangles]
    a = v[None, :, 0] - x[:, None]
    b = v[None, :, 1] - x[:, None]
    c = v[None, :, 2] - x[:, None]
    la, lb, lc = (np.linalg.norm(q, axis=-1) for q in (a, b, c))
    num = np.einsum("ntd,ntd->nt", a, np.cross(b, c))
    den = (la * lb * lc + np.einsum("ntd,ntd->nt", a, b) * lc
           + np.einsum("ntd,ntd->nt", b, c) * la + np.einsum("ntd,ntd->nt", c, a) * lb)
    return (2.0 * np.arctan2(num, den)).sum(axis=1) / (4.0 * np.pi)


def exterior_field(sol: LaplaceSolution, x, model: CoupledModel, warn: bool = True) -> np.ndarray:
    """Evaluate the representation of ``U^+`` at points ``x`` (n, 3).

    Points inside the scatterer return the discrete null extension (small but
    nonzero) and raise an :class:`InteriorProbeWarning`.
    """
    x = np.atleast_2d(np.asarray(x, dtype=float))
    if warn and np.any(winding_number(model.surface, x) > 0.5):
        warnings.warn("probe inside the scatterer; the representation gives the null "
                      "interior extension", InteriorProbeWarning, stacklevel=2)
    surf, mat, pq = model.surface, model.exterior, model.potential_quad
    scale = 1.0 if sol.formulation == DIRECT else 1.0 / sol.s
    Lam = np.atleast_2d(sol.Lambda)
    Phi = np.atleast_2d(sol.Phi)
    out = np.stack([scale * potential_double(surf, P, x, sol.s, mat, pq, warn=warn)
                    - potential_single(surf, L, x, sol.s, mat, pq, warn=warn)
                    for L, P in zip(Lam, Phi)])
    return out[0] if np.ndim(sol.Lambda) == 1 else out


def b0_matrix(ops: BoundaryOperatorSet) -> np.ndarray:
    """Matrix of ``B_0(s) = [[s V, -K], [K', s^-1 W]]`` on (P0, P1) coefficients."""
    s = ops.s
    return np.block([[s * ops.V, -ops.K], [ops.K.T, ops.W / s]])


@dataclass
class EllipticityProbe:
    """Both sides of the discrete ellipticity relations over random draws.

    ``fem_form`` is ``Re[conj(s) a_s(u, conj u)]`` and ``fem_energy`` is
    ``sigma |||u|||^2_{|s|}``; the two agree to rounding.  ``b0_form`` is
    ``Re <B_0 (Lambda, Phi), conj>``, ``weighted_form`` the real part of the
    ``diag(conj s, s, 1)``-weighted alternative system and ``weighted_split``
    its prediction ``fem_energy + b0_form``.  ``boundary_norm_sq`` holds the
    Euclidean norms of the boundary draws.
    """

    s: complex
    fem_form: np.ndarray
    fem_energy: np.ndarray
    b0_form: np.ndarray
    boundary_norm_sq: np.ndarray
    weighted_form: np.ndarray
    weighted_split: np.ndarray
    b0_min_eigenvalue: float

    @property
    def fem_defect(self) -> float:
        return float(np.max(np.abs(self.fem_form - self.fem_energy) / np.abs(self.fem_energy)))

    @property
    def weighted_defect(self) -> float:
        scale = np.maximum(np.abs(self.weighted_form), 1e-300)
        return float(np.max(np.abs(self.weighted_form - self.weighted_split) / scale))


def ellipticity_probe(s, model: CoupledModel, ops: BoundaryOperatorSet | None = None,
                      n_draws: int = 100, seed: int = 0) -> EllipticityProbe:
    """Evaluate the interior energy identity and the ``B_0`` positivity on random draws.

    Draws are complex Gaussian vectors normalized to unit Euclidean norm.
    """
    freq = as_frequency(s)
    s = freq.s
    ops = ops if ops is not None else model.operators(s)
    rng = np.random.default_rng(seed)
    nv, n0, n1 = model.sizes
    n = nv + n0 + n1

    def draw(m):
        z = rng.standard_normal((n_draws, m)) + 1j * rng.standard_normal((n_draws, m))
        return z / np.linalg.norm(z, axis=1, keepdims=True)

    U = draw(nv)
    LP = draw(n0 + n1)
    A = model.blocks.operator(s)
    fem_form = np.real(np.conj(s) * np.einsum("ki,ki->k", np.conj(U), (A @ U.T).T))
    fem_energy = freq.sigma * np.array([model.blocks.energy_norm_sq(u, s) for u in U])
    B0 = b0_matrix(ops)
    b0_form = np.real(np.einsum("ki,ki->k", np.conj(LP), LP @ B0.T))
    herm = 0.5 * (B0 + B0.conj().T)
    b0_min = float(np.linalg.eigvalsh(herm).min())
    X = np.concatenate([U, LP], axis=1)
    sysm = assemble_alternative(s, model, None, ops)
    iu, il, ip = sysm.slices()
    AX = X @ sysm.matrix.T
    AX[:, iu] *= np.conj(s)
    AX[:, il] *= s
    weighted = np.real(np.einsum("ki,ki->k", np.conj(X), AX))
    return EllipticityProbe(s, fem_form, fem_energy, b0_form,
                            np.ones(n_draws), weighted, fem_energy + b0_form, b0_min)


__all__ = [
    "DIRECT", "ALTERNATIVE", "FORMULATIONS", "SolverError", "InteriorProbeWarning",
    "CoupledModel", "BlockSystem", "LaplaceSolution", "FactoredSystem", "EllipticityProbe",
    "assemble_direct", "assemble_alternative", "assemble_system", "factorize", "solve",
    "exterior_field", "winding_number", "b0_matrix", "ellipticity_probe",
]
