"""Material laws: isotropic exterior and piecewise-constant anisotropic interior."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# Voigt index pairs in the order 11, 22, 33, 23, 13, 12
VOIGT_PAIRS = ((0, 0), (1, 1), (2, 2), (1, 2), (0, 2), (0, 1))
_MANDEL = np.array([1.0, 1.0, 1.0, np.sqrt(2.0), np.sqrt(2.0), np.sqrt(2.0)])


class InvalidMaterialError(ValueError):
    """Raised when material constants violate the model assumptions."""


@dataclass(frozen=True)
class IsotropicExterior:
    """Homogeneous isotropic material filling the unbounded exterior.

    Parameters
    ----------
    lam : float
        First Lamé parameter.
    mu : float
        Shear modulus, must be positive.
    rho : float
        Density, must be positive.
    """

    lam: float = 1.0
    mu: float = 1.0
    rho: float = 1.0

    def __post_init__(self):
        if not (self.mu > 0):
            raise InvalidMaterialError(f"shear modulus must be positive, got mu={self.mu}")
        if not (self.rho > 0):
            raise InvalidMaterialError(f"density must be positive, got rho={self.rho}")
        if not (2.0 * self.mu + 3.0 * self.lam > 0):
            raise InvalidMaterialError(
                f"bulk modulus must be positive, got {(2 * self.mu + 3 * self.lam) / 3}"
            )

    @property
    def c_s(self) -> float:
        return float(np.sqrt(self.mu / self.rho))

    @property
    def c_p(self) -> float:
        return float(np.sqrt((2.0 * self.mu + self.lam) / self.rho))

    @property
    def bulk(self) -> float:
        return (2.0 * self.mu + 3.0 * self.lam) / 3.0

    def stiffness_voigt(self) -> np.ndarray:
        return isotropic_voigt(self.lam, self.mu)

    def to_dict(self) -> dict:
        return {"lambda": self.lam, "mu": self.mu, "rho": self.rho}


def wave_speeds(mat: IsotropicExterior) -> tuple[float, float]:
    """Shear and pressure wave speeds ``(c_s, c_p)``."""
    if not (mat.mu > 0 and mat.rho > 0):
        raise InvalidMaterialError("mu and rho must be positive")
    return mat.c_s, mat.c_p


def bulk_modulus(mat: IsotropicExterior) -> float:
    k = (2.0 * mat.mu + 3.0 * mat.lam) / 3.0
    if k <= 0:
        raise InvalidMaterialError(f"nonpositive bulk modulus {k}")
    return k


def isotropic_voigt(lam: float, mu: float) -> np.ndarray:
    """6x6 Voigt stiffness of an isotropic material."""
    D = np.zeros((6, 6))
    D[:3, :3] = lam
    D[np.arange(3), np.arange(3)] = lam + 2.0 * mu
    D[np.arange(3, 6), np.arange(3, 6)] = mu
    return D


def voigt_from_tensor(C: np.ndarray) -> np.ndarray:
    """Collapse a fourth-order tensor ``C[..., i, j, k, l]`` to Voigt form."""
    C = np.asarray(C)
    D = np.empty(C.shape[:-4] + (6, 6), dtype=C.dtype)
    for I, (i, j) in enumerate(VOIGT_PAIRS):
        for J, (k, l) in enumerate(VOIGT_PAIRS):
            D[..., I, J] = C[..., i, j, k, l]
    return D


def tensor_from_voigt(D: np.ndarray) -> np.ndarray:
    """Expand a Voigt matrix to the fourth-order tensor with minor symmetries."""
    D = np.asarray(D)
    C = np.empty(D.shape[:-2] + (3, 3, 3, 3), dtype=D.dtype)
    for I, (i, j) in enumerate(VOIGT_PAIRS):
        for J, (k, l) in enumerate(VOIGT_PAIRS):
            v = D[..., I, J]
            for a, b in {(i, j), (j, i)}:
                for c, d in {(k, l), (l, k)}:
                    C[..., a, b, c, d] = v
    return C


def coercivity_constant(D: np.ndarray) -> float:
    """Largest c0 with ``e : C e >= c0 e : e`` for all symmetric ``e``.

    The Voigt matrix is rescaled to Mandel form so that the Euclidean norm of
    the strain vector equals the Frobenius norm of the strain tensor.
    """
    Dm = _MANDEL[:, None] * np.asarray(D) * _MANDEL[None, :]
    return float(np.linalg.eigvalsh(0.5 * (Dm + Dm.T))[0])


def apply_hooke(C: np.ndarray, e: np.ndarray) -> np.ndarray:
    """Stress ``C e`` for a fourth-order tensor ``C`` and strain(s) ``e``."""
    return np.einsum("ijkl,...kl->...ij", C, e)


def isotropic_stress(lam: float, mu: float, e: np.ndarray) -> np.ndarray:
    """Closed-form isotropic Hooke law ``lam tr(e) I + 2 mu e``."""
    e = np.asarray(e)
    tr = np.trace(e, axis1=-2, axis2=-1)
    return lam * tr[..., None, None] * np.eye(3) + 2.0 * mu * e


@dataclass
class AnisotropicInterior:
    """Piecewise-constant stiffness and density on the interior tetrahedra.

    Parameters
    ----------
    stiffness : ndarray, shape (n_tets, 6, 6)
        Voigt stiffness per element (engineering shear strains).
    rho : ndarray, shape (n_tets,)
        Density per element.
    """

    stiffness: np.ndarray
    rho: np.ndarray
    c0: float = field(init=False)

    def __post_init__(self):
        self.stiffness = np.asarray(self.stiffness, dtype=float)
        self.rho = np.asarray(self.rho, dtype=float)
        if self.stiffness.ndim != 3 or self.stiffness.shape[1:] != (6, 6):
            raise InvalidMaterialError("stiffness must have shape (n_tets, 6, 6)")
        if self.rho.shape != (self.stiffness.shape[0],):
            raise InvalidMaterialError("rho must have one entry per element")
        asym = np.abs(self.stiffness - np.swapaxes(self.stiffness, 1, 2)).max()
        if asym > 1e-12 * max(1.0, np.abs(self.stiffness).max()):
            raise InvalidMaterialError(f"stiffness lacks major symmetry (defect {asym:.3e})")
        if np.any(self.rho <= 0) or not np.all(np.isfinite(self.rho)):
            raise InvalidMaterialError("density must be positive and finite")
        c0 = min(coercivity_constant(D) for D in self.stiffness)
        if c0 <= 0:
            raise InvalidMaterialError(f"stiffness is not coercive (c0={c0:.3e})")
        self.c0 = c0

    @property
    def n_elements(self) -> int:
        return self.stiffness.shape[0]

    @classmethod
    def isotropic(cls, n_tets: int, lam: float, mu: float, rho: float) -> "AnisotropicInterior":
        D = np.broadcast_to(isotropic_voigt(lam, mu), (n_tets, 6, 6)).copy()
        return cls(D, np.full(n_tets, float(rho)))

    @classmethod
    def uniform(cls, n_tets: int, D: np.ndarray, rho: float) -> "AnisotropicInterior":
        D = np.broadcast_to(np.asarray(D, dtype=float), (n_tets, 6, 6)).copy()
        return cls(D, np.full(n_tets, float(rho)))
