"""Exact fields for verification: point sources, pulses and plane waves.

Laplace domain: columns of the Green tensor solve the homogeneous Navier
equation away from their pole, so ``U^+ = E_+(., y0; s) q0`` with ``y0``
inside and ``U^- = E_-(., y1; s) q1`` with ``y1`` outside give an exact
transmission problem once the interface data are defined as the mismatch of
their traces and tractions.

Time domain: the retarded field of a point force ``q g(t)`` is the classical
closed form

    u(x, t) = A(r, t) (gamma . q) gamma + B(r, t) q,   gamma = (x - y) / r,

    4 pi rho A = 3 I / r^3 + g(t - r/c_p) / (c_p^2 r) - g(t - r/c_s) / (c_s^2 r)
    4 pi rho B = -I / r^3 + g(t - r/c_s) / (c_s^2 r)
    I(r, t)    = int_{r/c_p}^{r/c_s} tau g(t - tau) dtau,

whose Laplace transform is ``E(x, y; s) q g^(s)``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.special import erf, wofz

from . import kernels
from .fem import boundary_functionals
from .kernels import as_frequency
from .materials import IsotropicExterior, isotropic_stress
from .mesh import SurfaceMesh
from .quadrature import gauss_triangle


class ConditioningWarning(UserWarning):
    """Manufactured sources placed close to the interface."""


# ---------------------------------------------------------------------------
# signatures


@dataclass(frozen=True)
class GaussianPulse:
    """``g(t) = a exp(-((t - t0) / w)^2)``; causal to ``exp(-(t0/w)^2)``.

    Antiderivatives are taken from ``-inf`` and the Laplace transform is the
    exact one-sided integral over ``t > 0``.
    """

    t0: float = 2.0
    width: float = 0.4
    amplitude: float = 1.0

    def __call__(self, t):
        u = (np.asarray(t, dtype=float) - self.t0) / self.width
        return self.amplitude * np.exp(-u * u)

    def derivative(self, t):
        u = (np.asarray(t, dtype=float) - self.t0) / self.width
        return -2.0 * u / self.width * self.amplitude * np.exp(-u * u)

    def antiderivative(self, t):
        u = (np.asarray(t, dtype=float) - self.t0) / self.width
        return self.amplitude * 0.5 * math.sqrt(math.pi) * self.width * (1.0 + erf(u))

    def second_antiderivative(self, t):
        t = np.asarray(t, dtype=float)
        u = (t - self.t0) / self.width
        w = self.width
        return self.amplitude * 0.5 * math.sqrt(math.pi) * w * (
            (t - self.t0) * (1.0 + erf(u)) + w / math.sqrt(math.pi) * np.exp(-u * u))

    def laplace(self, s):
        """``int_0^inf exp(-s t) g(t) dt`` via the Faddeeva function."""
        s = np.asarray(s, dtype=complex)
        w, t0 = self.width, self.t0
        z = s * w / 2.0 - t0 / w
        return self.amplitude * 0.5 * math.sqrt(math.pi) * w * math.exp(-(t0 / w) ** 2) * wofz(1j * z)

    @property
    def support_start(self) -> float:
        return 0.0

    def to_dict(self):
        return {"kind": "gaussian", "t0": self.t0, "width": self.width, "amplitude": self.amplitude}


@dataclass(frozen=True)
class BumpPulse:
    """Compactly supported ``g(t) = a 256 x^4 (1 - x)^4``, ``x = (t - t0) / d`` on [0, 1].

    Three times continuously differentiable, zero for ``t <= t0``; peak ``a``
    at ``t0 + d / 2``.
    """

    duration: float = 1.0
    amplitude: float = 1.0
    t0: float = 0.0

    @property
    def _poly(self):
        P = np.polynomial.Polynomial
        x = P([0.0, 1.0])
        return 256.0 * self.amplitude * x ** 4 * (1 - x) ** 4

    def _eval(self, poly, t, power):
        t = np.asarray(t, dtype=float)
        x = (t - self.t0) / self.duration
        xc = np.clip(x, 0.0, 1.0)
        val = poly(xc) * self.duration ** power
        if power > 0:
            # extend antiderivatives beyond the support by their Taylor continuation
            d0 = poly(1.0) * self.duration ** power
            if power == 2:
                d1 = poly.deriv()(1.0) * self.duration ** (power - 1)
                val = np.where(x > 1.0, d0 + d1 * (x - 1.0) * self.duration, val)
            else:
                val = np.where(x > 1.0, d0, val)
        return np.where(x <= 0.0, 0.0, val)

    def __call__(self, t):
        return self._eval(self._poly, t, 0)

    def derivative(self, t):
        return self._eval(self._poly.deriv(), t, -1)

    def antiderivative(self, t):
        return self._eval(self._poly.integ(), t, 1)

    def second_antiderivative(self, t):
        return self._eval(self._poly.integ(2), t, 2)

    @property
    def support_start(self) -> float:
        return self.t0

    def to_dict(self):
        return {"kind": "bump", "duration": self.duration, "amplitude": self.amplitude,
                "t0": self.t0}


def signature_from_dict(d: dict):
    d = dict(d)
    kind = d.pop("kind")
    if kind == "gaussian":
        return GaussianPulse(**d)
    if kind == "bump":
        return BumpPulse(**d)
    raise ValueError(f"unknown signature kind {kind!r}")


# ---------------------------------------------------------------------------
# Laplace-domain point sources


def point_field(x, y, q, s, mat: IsotropicExterior) -> np.ndarray:
    """``E(x, y; s) q`` at points ``x`` (n, 3)."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    E = kernels.green(x - np.asarray(y, dtype=float), s, mat)
    return E @ np.asarray(q, dtype=complex)


def point_gradient(x, y, q, s, mat: IsotropicExterior) -> np.ndarray:
    """``G[n, k, i] = d_k (E(x, y; s) q)_i``."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    g = kernels.green_grad(x - np.asarray(y, dtype=float), s, mat)
    return g @ np.asarray(q, dtype=complex)


def point_traction(x, normals, y, q, s, mat: IsotropicExterior) -> np.ndarray:
    """Traction of ``E(., y; s) q`` for the given normals."""
    from .bem import traction_from_gradient
    return traction_from_gradient(point_gradient(x, y, q, s, mat), normals, mat)


def _distance_to_surface(surface: SurfaceMesh, y) -> float:
    """Distance from ``y`` to the surface (exact point-triangle distance)."""
    y = np.asarray(y, dtype=float)
    v = surface.vertices[surface.triangles]
    best = np.inf
    for a, b, c in v:
        best = min(best, _point_triangle_distance(y, a, b, c))
    return float(best)


def _point_triangle_distance(p, a, b, c):
    ab, ac, ap = b - a, c - a, p - a
    d1, d2 = ab @ ap, ac @ ap
    if d1 <= 0 and d2 <= 0:
        return np.linalg.norm(ap)
    bp = p - b
    d3, d4 = ab @ bp, ac @ bp
    if d3 >= 0 and d4 <= d3:
        return np.linalg.norm(bp)
    vc = d1 * d4 - d3 * d2
    if vc <= 0 and d1 >= 0 and d3 <= 0:
        return np.linalg.norm(p - (a + d1 / (d1 - d3) * ab))
    cp = p - c
    d5, d6 = ab @ cp, ac @ cp
    if d6 >= 0 and d5 <= d6:
        return np.linalg.norm(cp)
    vb = d5 * d2 - d1 * d6
    if vb <= 0 and d2 >= 0 and d6 <= 0:
        return np.linalg.norm(p - (a + d2 / (d2 - d6) * ac))
    va = d3 * d6 - d5 * d4
    if va <= 0 and (d4 - d3) >= 0 and (d5 - d6) >= 0:
        w = (d4 - d3) / ((d4 - d3) + (d5 - d6))
        return np.linalg.norm(p - (b + w * (c - b)))
    denom = 1.0 / (va + vb + vc)
    return np.linalg.norm(p - (a + ab * vb * denom + ac * vc * denom))


@dataclass
class ManufacturedLaplace:
    """Exact transmission problem at one frequency built from two point sources.

    ``U^+ = E_+(., y0; s) q0`` (pole inside), ``U^- = E_-(., y1; s) q1``
    (pole outside).  Interface data: ``gamma^+ U^inc = gamma^- U^- - gamma^+ U^+``
    and ``T^+ U^inc = T^- U^- - T^+ U^+``.
    """

    s: complex
    y0: np.ndarray
    q0: np.ndarray
    y1: np.ndarray
    q1: np.ndarray
    exterior: IsotropicExterior
    interior: IsotropicExterior

    def u_plus(self, x):
        return point_field(x, self.y0, self.q0, self.s, self.exterior)

    def u_minus(self, x):
        return point_field(x, self.y1, self.q1, self.s, self.interior)

    def t_plus(self, x, n):
        return point_traction(x, n, self.y0, self.q0, self.s, self.exterior)

    def t_minus(self, x, n):
        return point_traction(x, n, self.y1, self.q1, self.s, self.interior)

    def incident_trace(self, x, n=None):
        return self.u_minus(x) - self.u_plus(x)

    def incident_traction(self, x, n):
        return self.t_minus(x, n) - self.t_plus(x, n)

    def data(self, model) -> np.ndarray:
        """System right side ``((T^+ U^inc, gamma^- V), <mu, gamma^+ U^inc>, 0)``."""
        trac, trace = boundary_functionals(model.spaces, self.incident_trace,
                                           self.incident_traction)
        return model.rhs(volume=trac, trace=trace)

    def errors(self, sol, model, order: int = 4) -> dict:
        """Relative L2 errors on the interface and the nodal volume error.

        Keys: ``trace_minus`` (gamma^- U^-), ``Lambda`` (T^+ U^+), ``Phi``
        (gamma^+ U^+, after undoing the formulation scaling) and ``volume``.
        """
        spaces = model.spaces
        surf = spaces.surface
        rule = gauss_triangle(order)
        v = surf.vertices[surf.triangles]
        pts = np.einsum("qa,tad->tqd", rule.points, v).reshape(-1, 3)
        nrm = np.repeat(surf.normals, len(rule), axis=0)
        w = (2.0 * surf.areas[:, None] * rule.weights[None, :]).ravel()

        def p1_at_points(c):
            C = np.asarray(c).reshape(-1, 3)[surf.triangles]          # (t, a, d)
            return np.einsum("qa,tad->tqd", rule.points, C).reshape(-1, 3)

        def rel(num, ref):
            a = np.sqrt(np.sum(w[:, None] * np.abs(num - ref) ** 2))
            b = np.sqrt(np.sum(w[:, None] * np.abs(ref) ** 2))
            return float(a / b) if b > 0 else float(a)

        out = {}
        out["trace_minus"] = rel(p1_at_points(spaces.restrict(sol.U_minus)), self.u_minus(pts))
        lam = np.repeat(np.asarray(sol.Lambda).reshape(-1, 3), len(rule), axis=0)
        out["Lambda"] = rel(lam, self.t_plus(pts, nrm))
        out["Phi"] = rel(p1_at_points(sol.trace), self.u_plus(pts))
        exact = self.u_minus(model.volume.vertices).ravel()
        den = np.linalg.norm(exact)
        out["volume"] = float(np.linalg.norm(sol.U_minus - exact) / den) if den > 0 else float(
            np.linalg.norm(sol.U_minus))
        return out


_OUTER_DIR = np.array([1.0, 0.5, -0.45]) / np.linalg.norm([1.0, 0.5, -0.45])


def manufactured_laplace(s, exterior: IsotropicExterior, interior: IsotropicExterior,
                         y0=(0.1, -0.15, 0.2), q0=(1.0, 0.5, -0.25),
                         y1=tuple(2.5 * _OUTER_DIR), q1=(-0.3, 1.0, 0.6),
                         surface: SurfaceMesh | None = None,
                         balance: bool = False) -> ManufacturedLaplace:
    """Two-source exact solution of the Laplace-domain transmission problem.

    When ``surface`` is given, sources closer than 0.2 scatterer diameters to
    it raise a :class:`ConditioningWarning`, and ``balance=True`` rescales
    ``q1`` so that both fields have the same Euclidean norm over the surface
    vertices.
    """
    s = as_frequency(s).s
    y0, y1 = (np.asarray(y, dtype=float) for y in (y0, y1))
    q0, q1 = (np.asarray(q, dtype=complex) for q in (q0, q1))
    if surface is not None:
        vv = surface.vertices
        diam = float(np.max(np.linalg.norm(vv[:, None] - vv[None], axis=-1)))
        for y, q in ((y0, q0), (y1, q1)):
            if np.any(q != 0) and _distance_to_surface(surface, y) < 0.2 * diam:
                warnings.warn(f"source {y} is within 0.2 diameters of the interface",
                              ConditioningWarning, stacklevel=2)
        if balance and np.any(q1 != 0):
            up = np.linalg.norm(point_field(vv, y0, q0, s, exterior))
            um = np.linalg.norm(point_field(vv, y1, q1, s, interior))
            q1 = q1 * (up / um)
    elif balance:
        raise ValueError("balance=True needs the surface")
    return ManufacturedLaplace(s, y0, q0, y1, q1, exterior, interior)


# ---------------------------------------------------------------------------
# time domain


def _moment(sig, t, a, b):
    """``int_a^b tau g(t - tau) dtau`` from the antiderivatives of ``g``."""
    G1, G2 = sig.antiderivative, sig.second_antiderivative
    return a * G1(t - a) - b * G1(t - b) + G2(t - a) - G2(t - b)


def stokes_profiles(r, t, sig, mat: IsotropicExterior):
    """Radial profiles ``A, B`` and their ``r``-derivatives of the retarded point-force field."""
    cp, cs, rho = mat.c_p, mat.c_s, mat.rho
    a, b = r / cp, r / cs
    I = _moment(sig, t, a, b)
    Ir = r * (sig(t - b) / cs ** 2 - sig(t - a) / cp ** 2)
    gp, gs = sig(t - a), sig(t - b)
    dgp, dgs = sig.derivative(t - a), sig.derivative(t - b)
    Fp = gp / (cp ** 2 * r)
    Fs = gs / (cs ** 2 * r)
    dFp = -dgp / (cp ** 3 * r) - gp / (cp ** 2 * r ** 2)
    dFs = -dgs / (cs ** 3 * r) - gs / (cs ** 2 * r ** 2)
    k = 1.0 / (4.0 * np.pi * rho)
    A = k * (3.0 * I / r ** 3 + Fp - Fs)
    B = k * (-I / r ** 3 + Fs)
    dA = k * (-9.0 * I / r ** 4 + 3.0 * Ir / r ** 3 + dFp - dFs)
    dB = k * (3.0 * I / r ** 4 - Ir / r ** 3 + dFs)
    return A, B, dA, dB


def stokes_displacement(x, t, y, q, sig, mat: IsotropicExterior) -> np.ndarray:
    """Retarded displacement of the point force ``q sig(t)`` at ``y``; shape (n, 3)."""
    z = np.atleast_2d(np.asarray(x, dtype=float)) - np.asarray(y, dtype=float)
    r = np.linalg.norm(z, axis=1)
    gam = z / r[:, None]
    q = np.asarray(q, dtype=float)
    A, B, _, _ = stokes_profiles(r, t, sig, mat)
    return (A * (gam @ q))[:, None] * gam + B[:, None] * q[None, :]


def stokes_gradient(x, t, y, q, sig, mat: IsotropicExterior) -> np.ndarray:
    """``G[n, k, i] = d_k u_i`` of the retarded point-force field."""
    z = np.atleast_2d(np.asarray(x, dtype=float)) - np.asarray(y, dtype=float)
    r = np.linalg.norm(z, axis=1)
    g = z / r[:, None]
    q = np.asarray(q, dtype=float)
    A, B, dA, dB = stokes_profiles(r, t, sig, mat)
    gq = g @ q
    eye = np.eye(3)[None]
    G = (dA * gq)[:, None, None] * g[:, :, None] * g[:, None, :]
    G += (A * gq / r)[:, None, None] * (eye - g[:, :, None] * g[:, None, :])
    G += (A / r)[:, None, None] * (q[None, :, None] - g[:, :, None] * gq[:, None, None]) * g[:, None, :]
    G += dB[:, None, None] * g[:, :, None] * q[None, None, :]
    return G


def stokes_traction(x, normals, t, y, q, sig, mat: IsotropicExterior) -> np.ndarray:
    from .bem import traction_from_gradient
    return traction_from_gradient(stokes_gradient(x, t, y, q, sig, mat), normals, mat)


@dataclass
class TransientPointSource:
    """Manufactured transient: exterior field of a point force inside the scatterer.

    ``u^+`` is the retarded field of ``q sig(t)`` at ``y`` and ``u^- = 0``, so
    the incident data are ``gamma^+ u^inc = -gamma^+ u^+`` and
    ``T^+ u^inc = -T^+ u^+``.
    """

    y: np.ndarray
    q: np.ndarray
    signature: GaussianPulse
    exterior: IsotropicExterior

    def displacement(self, x, t):
        return stokes_displacement(x, t, self.y, self.q, self.signature, self.exterior)

    def incident_trace(self, x, n, t):
        return -self.displacement(x, t)

    def incident_traction(self, x, n, t):
        return -stokes_traction(x, n, t, self.y, self.q, self.signature, self.exterior)

    def laplace_problem(self, s, interior: IsotropicExterior) -> ManufacturedLaplace:
        """Laplace-domain image with the signature transform folded into ``q``."""
        gh = complex(self.signature.laplace(s))
        return ManufacturedLaplace(complex(s), np.asarray(self.y, float),
                                   np.asarray(self.q, complex) * gh, np.array([3.0, 3.0, 3.0]),
                                   np.zeros(3, complex), self.exterior, interior)


# ---------------------------------------------------------------------------
# plane waves


class PolarizationError(ValueError):
    """Plane-wave polarization inconsistent with the requested speed."""


@dataclass
class IncidentPlaneWave:
    """``u^inc(x, t) = p g(t - x.d / c - t0)``.

    A P-wave has ``p`` parallel to ``d`` and ``c = c_p``; an S-wave has ``p``
    orthogonal to ``d`` and ``c = c_s``.
    """

    direction: np.ndarray
    polarization: np.ndarray
    speed: float
    signature: object
    mat: IsotropicExterior
    t0: float = 0.0

    def __post_init__(self):
        d = np.asarray(self.direction, dtype=float)
        p = np.asarray(self.polarization, dtype=float)
        if not np.isclose(np.linalg.norm(d), 1.0, atol=1e-12):
            raise ValueError("direction must be a unit vector")
        self.direction, self.polarization = d, p
        pn = np.linalg.norm(p)
        if pn == 0:
            return
        cos = abs(p @ d) / pn
        if np.isclose(cos, 1.0, atol=1e-10):
            if not np.isclose(self.speed, self.mat.c_p, rtol=1e-12):
                raise PolarizationError("longitudinal polarization requires the pressure speed")
        elif np.isclose(cos, 0.0, atol=1e-10):
            if not np.isclose(self.speed, self.mat.c_s, rtol=1e-12):
                raise PolarizationError("transverse polarization requires the shear speed")
        else:
            raise PolarizationError("polarization must be parallel or orthogonal to the direction")

    def phase(self, x, t):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        return t - x @ self.direction / self.speed - self.t0

    def displacement(self, x, t):
        return self.signature(self.phase(x, t))[:, None] * self.polarization[None, :]

    def gradient(self, x, t):
        """``G[n, k, i] = d_k u_i``."""
        dg = self.signature.derivative(self.phase(x, t))
        return -(dg / self.speed)[:, None, None] * np.einsum("k,i->ki", self.direction,
                                                             self.polarization)[None]

    def traction(self, x, normals, t):
        G = self.gradient(x, t)
        e = 0.5 * (G + np.swapaxes(G, 1, 2))
        sig = isotropic_stress(self.mat.lam, self.mat.mu, e)
        return np.einsum("nij,nj->ni", sig, np.broadcast_to(normals, (G.shape[0], 3)))

    def incident_trace(self, x, n, t):
        return self.displacement(x, t)

    def incident_traction(self, x, n, t):
        return self.traction(x, n, t)

    def arrival_time(self, surface: SurfaceMesh) -> float:
        """First time the support of the signature touches the surface."""
        first = float(np.min(surface.vertices @ self.direction))
        return self.signature.support_start + self.t0 + first / self.speed


def incident_plane_wave(direction, polarization, speed, signature, mat: IsotropicExterior,
                        surface: SurfaceMesh | None = None, lead: float = 0.0) -> IncidentPlaneWave:
    """Plane wave whose support reaches ``surface`` at time ``lead`` (>= 0).

    Without a surface the delay ``t0`` is ``lead``.
    """
    wave = IncidentPlaneWave(np.asarray(direction, float), np.asarray(polarization, float),
                             float(speed), signature, mat, 0.0)
    if surface is not None:
        wave.t0 = lead - wave.arrival_time(surface)
    else:
        wave.t0 = lead
    return wave


__all__ = [
    "ConditioningWarning", "GaussianPulse", "BumpPulse", "signature_from_dict", "point_field",
    "point_gradient", "point_traction", "ManufacturedLaplace", "manufactured_laplace",
    "stokes_profiles", "stokes_displacement", "stokes_gradient", "stokes_traction",
    "TransientPointSource", "PolarizationError", "IncidentPlaneWave", "incident_plane_wave",
]
