"""Configured transient runs: validation, model construction and artifacts.

A run reads a JSON configuration (schema in ``schema/config.schema.json``),
builds the meshes and materials, solves the time-domain problem with one or
both formulations and writes:

* ``probes_<formulation>.csv``: ``u^+`` at the probes per time step;
* ``norms_<formulation>.csv``: Euclidean norms of the coefficient traces;
* ``surface_<formulation>.vtk``/``volume_<formulation>.vtk``: the boundary
  trace and the interior displacement at the selected steps;
* ``solution_<formulation>.json``/``.bin``: per-frequency coefficients;
* ``summary.json``: configuration, checks and timings.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from . import io
from .coupled import ALTERNATIVE, DIRECT, FORMULATIONS, CoupledModel, winding_number
from .cq import DEFAULT_EPS, TimeGrid
from .manufactured import (TransientPointSource, incident_plane_wave, signature_from_dict)
from .materials import AnisotropicInterior, IsotropicExterior, isotropic_voigt
from .mesh import ball_mesh, load_surface_mesh, load_volume_mesh
from .transient import TransientSolution, data_signal, solve_transient

log = logging.getLogger(__name__)


class ConfigError(ValueError):
    """Configuration rejected; ``path`` locates the offending entry."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


def config_schema() -> dict:
    return json.loads(resources.files("elastocq").joinpath("schema/config.schema.json")
                      .read_text())


def _where(err) -> str:
    return "$" + "".join(f"[{p}]" if isinstance(p, int) else f".{p}" for p in err.absolute_path)


def validate_config(raw: dict, base: Path | None = None) -> None:
    """Schema check plus the semantic checks the schema cannot express."""
    validator = jsonschema.Draft202012Validator(config_schema())
    errors = sorted(validator.iter_errors(raw), key=lambda e: list(e.absolute_path))
    if errors:
        raise ConfigError(_where(errors[0]), errors[0].message)
    base = base or Path.cwd()
    for key in ("volume_mesh", "surface_mesh"):
        if key in raw["geometry"] and not (base / raw["geometry"][key]).exists():
            raise ConfigError(f"$.geometry.{key}", f"file {raw['geometry'][key]!r} not found")
    N = raw["time"]["N"]
    if N & (N - 1):
        raise ConfigError("$.time.N", f"must be a power of two, got {N}")


@dataclass
class RunConfig:
    """Validated run configuration; see the JSON schema for field meanings."""

    geometry: dict
    materials: dict
    incident: dict
    time: dict
    output: str
    probes: list = field(default_factory=list)
    formulation: str = DIRECT
    snapshots: list | None = None
    workers: int | None = None
    base: Path = field(default_factory=Path.cwd)

    @classmethod
    def from_dict(cls, raw: dict, base: Path | None = None) -> "RunConfig":
        validate_config(raw, base)
        return cls(base=Path(base or Path.cwd()), **raw)

    @classmethod
    def load(cls, path) -> "RunConfig":
        path = Path(path)
        try:
            raw = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError("$", f"invalid JSON: {exc}") from exc
        return cls.from_dict(raw, path.parent)

    def to_dict(self) -> dict:
        d = {k: getattr(self, k) for k in ("geometry", "materials", "incident", "time", "output",
                                           "probes", "formulation")}
        if self.snapshots is not None:
            d["snapshots"] = self.snapshots
        return d

    @property
    def formulations(self) -> tuple:
        return FORMULATIONS if self.formulation == "both" else (self.formulation,)

    @property
    def grid(self) -> TimeGrid:
        return TimeGrid.from_final_time(self.time["T"], self.time["N"])


def build_model(cfg: RunConfig) -> CoupledModel:
    g = cfg.geometry
    if "level" in g:
        vol = ball_mesh(g["level"], g.get("radius", 1.0), g.get("shells"))
    else:
        surf = load_surface_mesh(cfg.base / g["surface_mesh"]) if "surface_mesh" in g else None
        vol = load_volume_mesh(cfg.base / g["volume_mesh"], surf)
    ext = IsotropicExterior(**cfg.materials["exterior"])
    inner = cfg.materials["interior"]
    if "voigt" in inner:
        mat = AnisotropicInterior.uniform(vol.n_tets, np.array(inner["voigt"]), inner["rho"])
    else:
        mat = AnisotropicInterior.uniform(vol.n_tets, isotropic_voigt(inner["lam"], inner["mu"]),
                                          inner["rho"])
    return CoupledModel(vol, mat, ext)


def build_incident(cfg: RunConfig, model: CoupledModel):
    inc = cfg.incident
    sig = signature_from_dict(inc["signature"])
    mat = model.exterior
    if inc["kind"] == "point":
        y = np.array(inc.get("source", [0.0, 0.0, 0.0]), float)
        if winding_number(model.surface, y[None])[0] < 0.5:
            raise ConfigError("$.incident.source", "point source must lie inside the scatterer")
        return TransientPointSource(y, np.array(inc.get("moment", [1.0, 0.0, 0.0]), float),
                                    sig, mat)
    d = np.array(inc.get("direction", [0.0, 0.0, 1.0]), float)
    d = d / np.linalg.norm(d)
    wave = inc.get("wave", "P")
    if "polarization" in inc:
        p = np.array(inc["polarization"], float)
    elif wave == "P":
        p = d
    else:
        p = np.cross(d, [1.0, 0.0, 0.0] if abs(d[0]) < 0.9 else [0.0, 1.0, 0.0])
        p /= np.linalg.norm(p)
    speed = mat.c_p if wave == "P" else mat.c_s
    return incident_plane_wave(d, p, speed, sig, mat, model.surface, inc.get("lead", 0.5))


def check_probes(model: CoupledModel, probes) -> np.ndarray:
    probes = np.zeros((0, 3)) if len(probes) == 0 else np.asarray(probes, float)
    if len(probes):
        inside = winding_number(model.surface, probes) > 0.5
        if inside.any():
            k = int(np.nonzero(inside)[0][0])
            raise ConfigError(f"$.probes[{k}]", "probe must lie strictly outside the scatterer")
    return probes


@dataclass
class RunResult:
    """Solutions per formulation and the pass/fail checks of the run."""

    solutions: dict
    checks: dict
    output: Path

    @property
    def passed(self) -> bool:
        return all(c["passed"] for c in self.checks.values())


def cross_formulation_defect(direct: TransientSolution, alternative: TransientSolution,
                             sizes) -> dict:
    """Per-frequency defects of ``U^-``, ``Lambda`` and ``Phi_alt = s Phi_dir``."""
    nv, n0, n1 = sizes
    a, d = alternative.frequency_vectors, direct.frequency_vectors
    s = direct.frequencies[:, None]

    def rel(x, y):
        den = np.linalg.norm(y, axis=-1)
        num = np.linalg.norm(x - y, axis=-1)
        return float(np.max(np.where(den > 0, num / np.maximum(den, 1e-300), num)))

    return {"U_minus": rel(a[:, :nv], d[:, :nv]),
            "Lambda": rel(a[:, nv:nv + n0], d[:, nv:nv + n0]),
            "Phi_scaling": rel(a[:, nv + n0:], s * d[:, nv + n0:])}


def _write_outputs(out: Path, name: str, sol: TransientSolution, model: CoupledModel,
                   snapshots) -> None:
    io.write_time_series(out / f"probes_{name}.csv", sol.times, io.probe_columns(sol.probes))
    io.write_time_series(out / f"norms_{name}.csv", sol.times, sol.boundary_norms())
    steps = [sol.grid.N] if snapshots is None else [k for k in snapshots if k <= sol.grid.N]
    surf = model.surface
    io.write_vtk(out / f"surface_{name}.vtk", surf.vertices, surf.triangles,
                 {f"trace_{k}": sol.trace[k].reshape(-1, 3) for k in steps},
                 title=f"boundary trace, {name}")
    vol = model.volume
    io.write_vtk(out / f"volume_{name}.vtk", vol.vertices, vol.tets,
                 {f"U_{k}": sol.U_minus[k].reshape(-1, 3) for k in steps},
                 title=f"interior displacement, {name}")
    io.dump_solutions(out / f"solution_{name}",
                      dict(zip(sol.frequencies, sol.frequency_vectors)), model.sizes,
                      surf.content_hash(), {"formulation": name, "grid": sol.grid.to_dict()})


def run(cfg: RunConfig, residual_tol: float = 1e-8, cross_tol: float = 1e-10) -> RunResult:
    """Solve the configured problem and write all artifacts to ``cfg.output``."""
    out = cfg.base / cfg.output if not Path(cfg.output).is_absolute() else Path(cfg.output)
    out.mkdir(parents=True, exist_ok=True)
    model = build_model(cfg)
    probes = check_probes(model, cfg.probes)
    source = build_incident(cfg, model)
    grid = cfg.grid
    rho = grid.default_radius(cfg.time.get("eps", DEFAULT_EPS))
    data = data_signal(model, grid, source)
    sols, checks = {}, {}
    for f in cfg.formulations:
        sol = solve_transient(model, data, f, probes, rho=rho, workers=cfg.workers,
                              keep_frequency=True)
        sols[f] = sol
        worst = float(np.max(sol.residuals))
        checks[f"{f}_residual"] = {"passed": worst <= residual_tol, "measured": worst,
                                   "tolerance": residual_tol}
        finite = bool(np.all(np.isfinite(sol.probes)) and np.all(np.isfinite(sol.U_minus)))
        checks[f"{f}_finite"] = {"passed": finite, "measured": finite}
        _write_outputs(out, f, sol, model, cfg.snapshots)
    if len(sols) == 2:
        cross = cross_formulation_defect(sols[DIRECT], sols[ALTERNATIVE], model.sizes)
        checks["cross_formulation"] = {"passed": max(cross.values()) <= cross_tol,
                                       "measured": cross, "tolerance": cross_tol}
    summary = {
        "config": cfg.to_dict(),
        "mesh": {"nodes": model.volume.n_nodes, "tets": model.volume.n_tets,
                 "triangles": model.surface.n_triangles, "hash": model.surface.content_hash()},
        "grid": grid.to_dict(), "contour_radius": rho,
        "checks": checks,
        "conditions": {f: [float(c) for c in s.conditions] for f, s in sols.items()},
        "passed": all(c["passed"] for c in checks.values()),
    }
    io.write_json(out / "summary.json", summary)
    return RunResult(sols, checks, out)


__all__ = ["ConfigError", "config_schema", "validate_config", "RunConfig", "build_model",
           "build_incident", "check_probes", "RunResult", "cross_formulation_defect", "run"]
