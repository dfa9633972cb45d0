"""Verification campaigns for the operators, the coupled solver and the time stepping.

Each suite returns a :class:`VerificationReport` whose checks carry the
measured values, the tolerance and, for refinement studies, observed rates.
Suites are registered in :data:`SUITES` under the names used by the command
line (``verify <suite>``).
"""

from __future__ import annotations

import json
import logging
import time
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from .bem import assemble_operators
from .bem.jumps import ProbeSettings, jump_residuals
from .bem.potentials import PotentialQuadrature
from .coupled import (ALTERNATIVE, DIRECT, FORMULATIONS, CoupledModel, assemble_system,
                      ellipticity_probe, exterior_field, factorize, solve)
from .cq import (TimeGrid, TimeSignal, bdf2_difference, bromwich_frequencies, bromwich_inverse,
                 cq_convolve)
from .fem import assemble_load, boundary_functionals
from .manufactured import (BumpPulse, GaussianPulse, TransientPointSource, incident_plane_wave,
                           manufactured_laplace)
from .materials import AnisotropicInterior, IsotropicExterior
from .mesh import ball_mesh, icosphere
from .quadrature import gauss_triangle
from .transient import causality_defect, data_signal, solve_transient

log = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# reports


@dataclass
class Check:
    """One verified property: measured value(s) against a tolerance."""

    name: str
    passed: bool
    measured: object
    tolerance: object = None
    rates: object = None
    details: dict = field(default_factory=dict)

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}: {_fmt(self.measured)}" + (
            f" (tolerance {_fmt(self.tolerance)})" if self.tolerance is not None else "") + (
            f" rates {_fmt(self.rates)}" if self.rates is not None else "")


def _fmt(v):
    if isinstance(v, dict):
        return "{" + ", ".join(f"{k}: {_fmt(x)}" for k, x in v.items()) + "}"
    if isinstance(v, (list, tuple)):
        return "[" + ", ".join(_fmt(x) for x in v) + "]"
    if isinstance(v, float):
        return f"{v:.3e}"
    return str(v)


def _plain(v):
    """JSON-compatible copy of nested numpy values."""
    if isinstance(v, dict):
        return {str(k): _plain(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_plain(x) for x in v]
    if isinstance(v, np.ndarray):
        return _plain(v.tolist())
    if isinstance(v, (np.bool_, bool)):
        return bool(v)
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (complex, np.complexfloating)):
        return {"re": float(v.real), "im": float(v.imag)}
    if isinstance(v, (np.floating, float)):
        return float(v)
    return v


@dataclass
class VerificationReport:
    """Outcome of one suite; the JSON form and :meth:`summary` list the same checks."""

    suite: str
    anchor: str
    checks: list = field(default_factory=list)
    timings: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def add(self, check: Check) -> Check:
        self.checks.append(check)
        log.info(check.line())
        return check

    def to_dict(self) -> dict:
        return _plain({"suite": self.suite, "anchor": self.anchor, "passed": self.passed,
                       "checks": [asdict(c) for c in self.checks], "timings": self.timings})

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def summary(self) -> str:
        head = f"{self.suite} [{self.anchor}]: {'PASS' if self.passed else 'FAIL'}"
        return "\n".join([head] + ["  " + c.line() for c in self.checks])


def observed_rates(h, err) -> list:
    """``log(e_k / e_{k+1}) / log(h_k / h_{k+1})`` for consecutive levels."""
    h, err = np.asarray(h, float), np.asarray(err, float)
    return [float(np.log(err[k] / err[k + 1]) / np.log(h[k] / h[k + 1]))
            for k in range(len(h) - 1)]


def fitted_exponent(x, y) -> float:
    """Least-squares slope of ``log y`` against ``log x``."""
    return float(np.polyfit(np.log(np.asarray(x, float)), np.log(np.asarray(y, float)), 1)[0])


# ---------------------------------------------------------------------------
# shared setups

DEFAULT_EXTERIOR = IsotropicExterior(1.0, 1.0, 1.0)
DEFAULT_INTERIOR = IsotropicExterior(2.0, 1.5, 1.2)


def ball_model(level: int = 1, exterior: IsotropicExterior = DEFAULT_EXTERIOR,
               interior: IsotropicExterior = DEFAULT_INTERIOR, n_shells: int | None = None,
               **kwargs) -> CoupledModel:
    """Coupled model of the unit ball with isotropic interior material."""
    vol = ball_mesh(level, n_shells=n_shells)
    mat = AnisotropicInterior.isotropic(vol.n_tets, interior.lam, interior.mu, interior.rho)
    return CoupledModel(vol, mat, exterior, **kwargs)


def smooth_traction(x):
    """Smooth vector field used as a traction density."""
    x = np.atleast_2d(x)
    return np.stack([1.0 + 0.5 * x[:, 0] * x[:, 1], x[:, 2] - 0.3, 0.5 - x[:, 0] ** 2], axis=-1)


def smooth_displacement(x):
    """Quadratic harmonic polynomials (degree-2 spherical harmonics on the sphere)."""
    x = np.atleast_2d(x)
    return np.stack([x[:, 0] * x[:, 1], x[:, 1] * x[:, 2] + 0.3, x[:, 0] ** 2 - x[:, 2] ** 2],
                    axis=-1)


def p0_projection(surface, f, order: int = 6) -> np.ndarray:
    """Panel means of ``f`` (the L2 projection onto P0), flattened."""
    rule = gauss_triangle(order)
    v = surface.vertices[surface.triangles]
    pts = np.einsum("qa,tad->tqd", rule.points, v).reshape(-1, 3)
    vals = np.asarray(f(pts)).reshape(surface.n_triangles, len(rule), 3)
    return (np.einsum("q,tqd->td", rule.weights, vals) / rule.weights.sum()).ravel()


# ---------------------------------------------------------------------------
# jump relations

# offsets of 1e-3 h keep the probes well inside the expansion radius set by
# the distance of the base points to the panel edges
JUMP_PROBES = ProbeSettings(offset=1e-3, rule_order=2, potential=PotentialQuadrature())


def jump_study(levels=(1, 2), s=1.0, mat: IsotropicExterior = DEFAULT_EXTERIOR,
               settings: ProbeSettings = JUMP_PROBES) -> list:
    """Jump and one-sided residuals of projected smooth densities per icosphere level."""
    out = []
    for level in levels:
        surface = icosphere(level)
        ops = assemble_operators(surface, s, mat)
        Lam = p0_projection(surface, smooth_traction)
        Phi = np.asarray(smooth_displacement(surface.vertices)).ravel()
        out.append(jump_residuals(ops, Lam, Phi, smooth_traction, smooth_displacement, mat,
                                  settings))
    return out


def verify_jump_relations(levels=(1, 2), s=1.0, continuity_tol: float = 1e-6,
                          min_rate: float = 1.0,
                          settings: ProbeSettings = JUMP_PROBES) -> VerificationReport:
    """Refinement study of the jump relations and the one-sided trace identities."""
    rep = VerificationReport("jump-relations", "jump relations and one-sided traces of the "
                             "single- and double-layer potentials")
    t0 = time.perf_counter()
    res = jump_study(levels, s, settings=settings)
    rep.timings["total"] = time.perf_counter() - t0
    h = [r.h for r in res]
    for name in res[0].convergent:
        err = [r.convergent[name] for r in res]
        rates = observed_rates(h, err)
        ok = all(e1 < e0 for e0, e1 in zip(err, err[1:])) and min(rates) >= min_rate
        rep.add(Check(name, ok, err, {"min_rate": min_rate}, rates, {"h": h}))
    cont = res[-1].single_trace_jump
    rep.add(Check("single_trace_continuity", cont <= continuity_tol, cont, continuity_tol,
                  details={"per_level": [r.single_trace_jump for r in res]}))
    return rep


# ---------------------------------------------------------------------------
# ellipticity


def verify_ellipticity(level: int = 1, frequencies=(1.0, 2.0 + 2.0j), n_draws: int = 100,
                       identity_tol: float = 1e-10, positivity_tol: float = 1e-8,
                       seed: int = 0, model: CoupledModel | None = None) -> VerificationReport:
    """Interior energy identity and positivity of the boundary operator ``B_0``."""
    rep = VerificationReport("ellipticity", "strong ellipticity of the interior form and of "
                             "the boundary operator B_0")
    model = model or ball_model(level)
    t0 = time.perf_counter()
    for s in frequencies:
        pr = ellipticity_probe(s, model, n_draws=n_draws, seed=seed)
        tag = f"s={complex(s):g}"
        rep.add(Check(f"interior_energy_identity[{tag}]", pr.fem_defect <= identity_tol,
                      pr.fem_defect, identity_tol))
        low = float(pr.b0_form.min())
        rep.add(Check(f"b0_positivity[{tag}]", low >= -positivity_tol, low, -positivity_tol,
                      details={"min_hermitian_eigenvalue": pr.b0_min_eigenvalue}))
        rep.add(Check(f"weighted_split[{tag}]", pr.weighted_defect <= identity_tol,
                      pr.weighted_defect, identity_tol))
    rep.timings["total"] = time.perf_counter() - t0
    return rep


# ---------------------------------------------------------------------------
# manufactured transmission problem


def _rel(x, y) -> float:
    return float(np.linalg.norm(x - y) / np.linalg.norm(y))


def cross_formulation(sols: dict, s) -> dict:
    """Defects of ``U^-`` and ``Lambda`` equality and of ``Phi_alt = s Phi_dir``."""
    d, a = sols[DIRECT], sols[ALTERNATIVE]
    return {"U_minus": _rel(a.U_minus, d.U_minus), "Lambda": _rel(a.Lambda, d.Lambda),
            "Phi_scaling": _rel(a.Phi, s * d.Phi)}


def manufactured_study(levels=(1, 2), s=1.0, formulations=FORMULATIONS, models=None,
                       cross_frequencies=(1.0 + 2.0j,)) -> dict:
    """Errors of both formulations against the two-source exact solution.

    Returns ``{"levels": [...], "h": [...], formulation: [errors per level],
    "cross": [identity defects per level]}``.  The cross-formulation defects
    are taken at ``s`` and at ``cross_frequencies``; at real ``s = 1`` the two
    systems coincide, so a complex frequency is needed for a real test.
    """
    out = {"levels": list(levels), "h": [], "cross": []}
    for f in formulations:
        out[f] = []
    for k, level in enumerate(levels):
        model = models[k] if models else ball_model(level)
        cross = {}
        for j, sk in enumerate((s,) + tuple(cross_frequencies)):
            man = manufactured_laplace(sk, model.exterior, DEFAULT_INTERIOR,
                                       surface=model.surface, balance=True)
            ops = model.operators(sk)
            data = man.data(model)
            sols = {f: solve(assemble_system(f, sk, model, data, ops)) for f in formulations}
            if j == 0:
                for f in formulations:
                    out[f].append(man.errors(sols[f], model))
            if DIRECT in sols and ALTERNATIVE in sols:
                for name, v in cross_formulation(sols, sk).items():
                    cross[name] = max(cross.get(name, 0.0), v)
        out["h"].append(model.surface.h)
        if cross:
            out["cross"].append(cross)
    return out


def verify_manufactured(levels=(1, 2), s=1.0, tol: float = 0.05,
                        cross_tol: float = 1e-10,
                        cross_frequencies=(1.0 + 2.0j,)) -> VerificationReport:
    """Manufactured transmission solve with both formulations."""
    rep = VerificationReport("manufactured", "Laplace-domain transmission problem with exact "
                             "point-source fields")
    t0 = time.perf_counter()
    st = manufactured_study(levels, s, cross_frequencies=cross_frequencies)
    rep.timings["total"] = time.perf_counter() - t0
    for f in FORMULATIONS:
        err = [e["trace_minus"] for e in st[f]]
        ok = err[0] <= tol and all(b < a for a, b in zip(err, err[1:]))
        rep.add(Check(f"{f}_trace_error", ok, err, tol, observed_rates(st["h"], err),
                      {"all_errors": st[f]}))
    worst = {k: max(c[k] for c in st["cross"]) for k in st["cross"][0]}
    rep.add(Check("cross_formulation", max(worst.values()) <= cross_tol, worst, cross_tol,
                  details={"frequencies": [s, *cross_frequencies]}))
    return rep


# ---------------------------------------------------------------------------
# convolution quadrature


def scalar_transfer_checks(T: float = 2.0, N: int = 64) -> dict:
    """Defects of the CQ discretization of ``F = 1``, ``F = s`` and ``F = 1/s``.

    ``F = 1`` and ``F = s`` are compared with the identity and the BDF2
    difference quotient on a smooth causal signal; ``F = 1/s`` is applied to
    ``t^2`` at ``N`` and ``2 N`` steps and the observed order against
    ``t^3 / 3`` is returned.
    """
    grid = TimeGrid.from_final_time(T, N)
    g = TimeSignal(np.sin(grid.times) ** 2 * np.exp(-grid.times), grid)
    ident = cq_convolve(lambda s, G: G, g).samples
    deriv = cq_convolve(lambda s, G: s * G, g).samples
    ref = bdf2_difference(g.samples, grid.dt)
    errs = []
    for n in (N, 2 * N):
        gr = TimeGrid.from_final_time(T, n)
        y = cq_convolve(lambda s, G: G / s, TimeSignal(gr.times ** 2, gr)).samples
        errs.append(np.abs(y - gr.times ** 3 / 3).max())
    return {"identity": float(np.abs(ident - g.samples).max() / np.abs(g.samples).max()),
            "derivative": float(np.abs(deriv - ref).max() / np.abs(ref).max()),
            "integral_order": float(np.log2(errs[0] / errs[1]))}


TRANSIENT_SOURCE = dict(y=(0.1, -0.15, 0.2), q=(1.0, 0.5, -0.25), t0=2.8, width=0.7)
TRANSIENT_PROBES = np.array([[0.0, 0.0, 1.6], [1.2, -1.0, 0.4]])


def transient_point_source(mat: IsotropicExterior = DEFAULT_EXTERIOR) -> TransientPointSource:
    cfg = TRANSIENT_SOURCE
    return TransientPointSource(np.array(cfg["y"]), np.array(cfg["q"]),
                                GaussianPulse(cfg["t0"], cfg["width"]), mat)


def semidiscrete_reference(model: CoupledModel, source: TransientPointSource, probes, times,
                           sigma: float = 2.0, period: float = 8.0, formulation: str = DIRECT):
    """Probe traces of the space-discrete solution by Bromwich inversion.

    The Laplace-domain problem is solved along ``Re s = sigma`` up to the
    frequency where the pulse transform drops below about ``1e-13``, then
    inverted with the trapezoidal rule.  This isolates the time error of CQ
    from the spatial error.
    """
    w = source.signature.width
    nodes = bromwich_frequencies(sigma, period, 2.0 * np.sqrt(30.0) / w)
    vals = []
    for s in nodes:
        man = source.laplace_problem(s, DEFAULT_INTERIOR)
        sol = solve(assemble_system(formulation, s, model, man.data(model)))
        vals.append(exterior_field(sol, probes, model, warn=False))
    return bromwich_inverse(np.array(vals), nodes, times, period)


def transient_order_study(level: int = 1, T: float = 4.0, steps=(32, 64, 128),
                          formulation: str = DIRECT, model: CoupledModel | None = None,
                          workers: int | None = None) -> dict:
    """Probe errors of the CQ solution under step halving.

    Errors are maximal probe deviations from the semi-discrete reference
    relative to its peak; the deviation from the exact retarded field is
    reported alongside.
    """
    model = model or ball_model(level)
    src = transient_point_source(model.exterior)
    finest = TimeGrid.from_final_time(T, max(steps))
    t0 = time.perf_counter()
    ref_fine = semidiscrete_reference(model, src, TRANSIENT_PROBES, finest.times,
                                      formulation=formulation)
    out = {"steps": list(steps), "error": [], "exact_error": [], "reference_vs_exact": None,
           "timings": {"reference": time.perf_counter() - t0}}
    exact_fine = np.stack([src.displacement(TRANSIENT_PROBES, t) for t in finest.times])
    out["reference_vs_exact"] = float(np.abs(ref_fine - exact_fine).max()
                                      / np.abs(exact_fine).max())
    for N in steps:
        grid = TimeGrid.from_final_time(T, N)
        stride = max(steps) // N
        ref = ref_fine[::stride]
        exact = exact_fine[::stride]
        t1 = time.perf_counter()
        sol = solve_transient(model, data_signal(model, grid, src), formulation,
                              TRANSIENT_PROBES, workers=workers)
        out["timings"][f"N={N}"] = time.perf_counter() - t1
        out["error"].append(float(np.abs(sol.probes - ref).max() / np.abs(ref).max()))
        out["exact_error"].append(float(np.abs(sol.probes - exact).max() / np.abs(exact).max()))
    out["rates"] = [float(np.log2(a / b)) for a, b in zip(out["error"], out["error"][1:])]
    return out


def causality_run(level: int = 1, N: int = 64, T: float = 4.0, lead: float = 1.0,
                  duration: float = 1.0, formulation: str = DIRECT,
                  model: CoupledModel | None = None, workers: int | None = None) -> dict:
    """Plane P-wave with a compactly supported pulse hitting the ball at ``t = lead``.

    Returns the relative size of every trace before ``lead - 2 dt``.
    """
    model = model or ball_model(level)
    mat = model.exterior
    d = np.array([0.0, 0.0, 1.0])
    wave = incident_plane_wave(d, d, mat.c_p, BumpPulse(duration), mat, model.surface, lead)
    grid = TimeGrid.from_final_time(T, N)
    sol = solve_transient(model, data_signal(model, grid, wave), formulation,
                          TRANSIENT_PROBES, workers=workers)
    cutoff = wave.arrival_time(model.surface) - 2 * grid.dt
    return {"cutoff": cutoff, "dt": grid.dt, "defects": causality_defect(sol, cutoff)}


def verify_cq(level: int = 1, steps=(32, 64, 128), order: float = 2.0, order_tol: float = 0.3,
              causality_tol: float = 1e-6, workers: int | None = None) -> VerificationReport:
    """Scalar transfer tests, the transient order study and the causality run."""
    rep = VerificationReport("cq", "BDF2 convolution quadrature of the coupled transfer "
                             "operator and causality of the scheme")
    t0 = time.perf_counter()
    sc = scalar_transfer_checks()
    rep.add(Check("transfer_identity", sc["identity"] <= 1e-12, sc["identity"], 1e-12))
    rep.add(Check("transfer_derivative", sc["derivative"] <= 1e-10, sc["derivative"], 1e-10))
    rep.add(Check("transfer_integral_order", abs(sc["integral_order"] - order) <= order_tol,
                  sc["integral_order"], {"order": order, "band": order_tol}))
    model = ball_model(level)
    st = transient_order_study(level, steps=steps, model=model, workers=workers)
    ok = all(abs(r - order) <= order_tol for r in st["rates"])
    rep.add(Check("transient_probe_order", ok, st["error"], {"order": order, "band": order_tol},
                  st["rates"], {"exact_error": st["exact_error"],
                                "reference_vs_exact": st["reference_vs_exact"]}))
    cz = causality_run(level, model=model, workers=workers)
    worst = max(cz["defects"].values())
    rep.add(Check("causality", worst <= causality_tol, cz["defects"], causality_tol,
                  details={"cutoff": cz["cutoff"], "dt": cz["dt"]}))
    rep.timings["total"] = time.perf_counter() - t0
    return rep


# ---------------------------------------------------------------------------
# stability scan


def scan_data(model: CoupledModel) -> np.ndarray:
    """Fixed, frequency-independent right side used by the stability scan.

    A constant body force, a smooth trace datum and a smooth traction datum.
    """
    load = np.real(assemble_load(model.volume, lambda x: np.tile([0.2, -0.1, 0.3],
                                                                 (len(x), 1))))
    trac, trace = boundary_functionals(
        model.spaces, lambda x, n: np.stack([np.sin(x[:, 1]), 0.5 * np.cos(x[:, 2]),
                                             x[:, 0] * x[:, 2]], axis=-1),
        lambda x, n: n * (1.0 + 0.3 * x[:, :1]))
    return model.rhs(volume=load + trac, trace=trace)


@dataclass
class StabilityScan:
    """Solution norms along ``s = sigma0 + i tau`` and their fitted growth exponents.

    ``volume`` is the interior energy norm ``|||U^-|||_{|s|}``; ``triplet``
    adds the boundary unknowns measured in the norms induced by ``V(1)`` and
    ``W(1) + M`` (discrete stand-ins for the trace-space norms), with ``Phi``
    as the formulation defines it.
    """

    formulation: str
    frequencies: np.ndarray
    volume: np.ndarray
    triplet: np.ndarray
    data_norm: float
    conditions: np.ndarray

    @property
    def volume_exponent(self) -> float:
        return fitted_exponent(np.abs(self.frequencies), self.volume / self.data_norm)

    @property
    def triplet_exponent(self) -> float:
        return fitted_exponent(np.abs(self.frequencies), self.triplet / self.data_norm)

    def to_dict(self) -> dict:
        return _plain({"formulation": self.formulation, "frequencies": self.frequencies,
                       "volume": self.volume, "triplet": self.triplet,
                       "data_norm": self.data_norm, "conditions": self.conditions,
                       "volume_exponent": self.volume_exponent,
                       "triplet_exponent": self.triplet_exponent})


def stability_scan(formulations=FORMULATIONS, sigma0: float = 1.0,
                   taus=(1, 2, 4, 8, 16, 32, 64), model: CoupledModel | None = None,
                   data: np.ndarray | None = None) -> dict:
    """Solve with fixed data along ``s = sigma0 + i tau`` and fit growth exponents.

    Returns ``{formulation: StabilityScan}``.  Boundary operators are
    assembled once per frequency and shared by the formulations.
    """
    model = model or ball_model(1)
    data = scan_data(model) if data is None else data
    iu, il, ip = model.slices()
    ref = model.operators(1.0)
    nl = ref.V.real
    nphi = ref.W.real + model.spaces.mass11.toarray()

    def qnorm(A, x):
        return float(np.sqrt(abs(np.real(np.vdot(x, A @ x)))))

    data_norm = float(np.linalg.norm(data))
    freqs = sigma0 + 1j * np.asarray(taus, float)
    acc = {f: {"volume": [], "triplet": [], "cond": []} for f in formulations}
    for s in freqs:
        ops = model.operators(s)
        for f in formulations:
            fac = factorize(assemble_system(f, s, model, data, ops))
            sol = fac.solve()
            vol_sq = model.blocks.energy_norm_sq(sol.U_minus, s)
            trip = np.sqrt(vol_sq + qnorm(nl, sol.Lambda) ** 2 + qnorm(nphi, sol.Phi) ** 2)
            acc[f]["volume"].append(np.sqrt(vol_sq))
            acc[f]["triplet"].append(trip)
            acc[f]["cond"].append(fac.condition)
            log.info("scan %s s=%s cond=%.2e", f, s, fac.condition)
    return {f: StabilityScan(f, freqs, np.array(a["volume"]), np.array(a["triplet"]),
                             data_norm, np.array(a["cond"])) for f, a in acc.items()}


STABILITY_BOUNDS = {DIRECT: {"volume": 2.0, "triplet": 2.5},
                    ALTERNATIVE: {"volume": 4.0, "triplet": 3.0}}


def verify_stability(level: int = 1, sigma0: float = 1.0, taus=(1, 2, 4, 8, 16, 32, 64),
                     slack: float = 0.2, model: CoupledModel | None = None) -> VerificationReport:
    """Growth exponents of the solution norms against the stability bounds."""
    rep = VerificationReport("stability", "frequency-explicit stability bounds of both "
                             "formulations and their comparison")
    t0 = time.perf_counter()
    scans = stability_scan(FORMULATIONS, sigma0, taus, model or ball_model(level))
    rep.timings["total"] = time.perf_counter() - t0
    for f, sc in scans.items():
        for kind in ("volume", "triplet"):
            p = sc.volume_exponent if kind == "volume" else sc.triplet_exponent
            bound = STABILITY_BOUNDS[f][kind]
            rep.add(Check(f"{f}_{kind}_exponent", p <= bound + slack, p, bound + slack,
                          details={"norms": getattr(sc, kind), "conditions": sc.conditions}))
    pd, pa = scans[DIRECT].volume_exponent, scans[ALTERNATIVE].volume_exponent
    rep.add(Check("volume_exponent_ordering", pd <= pa + 1e-9, {"direct": pd, "alternative": pa},
                  "direct <= alternative"))
    return rep


SUITES: dict[str, Callable[..., VerificationReport]] = {
    "jump-relations": verify_jump_relations,
    "ellipticity": verify_ellipticity,
    "manufactured": verify_manufactured,
    "cq": verify_cq,
    "stability": verify_stability,
}


def verify(suite: str, **options) -> VerificationReport:
    """Run a registered suite by name."""
    try:
        fn = SUITES[suite]
    except KeyError:
        raise ValueError(f"unknown suite {suite!r}; choose from {sorted(SUITES)}") from None
    return fn(**options)


__all__ = [
    "Check", "VerificationReport", "observed_rates", "fitted_exponent", "ball_model",
    "smooth_traction", "smooth_displacement", "p0_projection", "JUMP_PROBES", "jump_study",
    "verify_jump_relations", "verify_ellipticity", "cross_formulation", "manufactured_study", "verify_manufactured",
    "scalar_transfer_checks", "transient_point_source", "semidiscrete_reference",
    "transient_order_study", "causality_run", "verify_cq", "scan_data", "StabilityScan",
    "stability_scan", "STABILITY_BOUNDS", "verify_stability", "SUITES", "verify",
]
