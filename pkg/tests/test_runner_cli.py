"""Configured runs and the command-line interface."""

import copy
import json

import numpy as np
import pytest

from elastocq import io
from elastocq.cli import build_parser, main
from elastocq.runner import (ConfigError, RunConfig, build_incident, build_model, config_schema,
                             run)

BASE = {
    "geometry": {"level": 0},
    "materials": {"exterior": {"lam": 1.0, "mu": 1.0, "rho": 1.0},
                  "interior": {"lam": 2.0, "mu": 1.5, "rho": 2.0}},
    "incident": {"kind": "plane", "wave": "P", "direction": [0, 0, 1], "lead": 0.5,
                 "signature": {"kind": "bump", "duration": 1.0}},
    "time": {"T": 2.0, "N": 8},
    "probes": [[0, 0, 2.0]],
    "output": "out",
}


def _config(tmp_path, **changes):
    raw = copy.deepcopy(BASE)
    raw.update(changes)
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(raw))
    return path


# ---------------------------------------------------------------------------
# configuration


def test_schema_is_valid_json_schema():
    import jsonschema

    jsonschema.Draft202012Validator.check_schema(config_schema())


@pytest.mark.parametrize("mutate, where", [
    (lambda r: r["materials"]["exterior"].update(mu=-1.0), "$.materials.exterior.mu"),
    (lambda r: r["time"].update(N=12), "$.time.N"),
    (lambda r: r["probes"].append([1.0, 2.0]), "$.probes[1]"),
    (lambda r: r.update(extra=1), "$"),
    (lambda r: r["geometry"].update(volume_mesh="missing.vol"), "$.geometry"),
    (lambda r: r["incident"]["signature"].update(kind="ricker"), "$.incident.signature.kind"),
])
def test_config_errors_locate_the_entry(tmp_path, mutate, where):
    raw = copy.deepcopy(BASE)
    mutate(raw)
    with pytest.raises(ConfigError) as err:
        RunConfig.from_dict(raw, tmp_path)
    assert err.value.path == where


def test_missing_mesh_file(tmp_path):
    raw = copy.deepcopy(BASE)
    raw["geometry"] = {"volume_mesh": "ball.vol"}
    with pytest.raises(ConfigError, match="not found"):
        RunConfig.from_dict(raw, tmp_path)


def test_invalid_json(tmp_path):
    (tmp_path / "bad.json").write_text("{")
    with pytest.raises(ConfigError, match="invalid JSON"):
        RunConfig.load(tmp_path / "bad.json")


def test_probe_inside_rejected(tmp_path):
    cfg = RunConfig.load(_config(tmp_path, probes=[[0, 0, 3.0], [0.1, 0, 0]]))
    with pytest.raises(ConfigError) as err:
        run(cfg)
    assert err.value.path == "$.probes[1]"


def test_point_source_outside_rejected(tmp_path):
    inc = {"kind": "point", "source": [0, 0, 2.0], "signature": {"kind": "bump"}}
    cfg = RunConfig.load(_config(tmp_path, incident=inc))
    with pytest.raises(ConfigError, match="inside"):
        build_incident(cfg, build_model(cfg))


def test_s_wave_polarization_is_transverse(tmp_path):
    inc = dict(BASE["incident"], wave="S", direction=[1.0, 1.0, 0.0])
    cfg = RunConfig.load(_config(tmp_path, incident=inc))
    wave = build_incident(cfg, build_model(cfg))
    assert abs(np.dot(wave.direction, wave.polarization)) <= 1e-14


def test_anisotropic_interior(tmp_path):
    C = (np.eye(6) * 3.0).tolist()
    mats = dict(BASE["materials"], interior={"voigt": C, "rho": 1.0})
    model = build_model(RunConfig.load(_config(tmp_path, materials=mats)))
    assert np.allclose(model.interior.stiffness[0], C)


# ---------------------------------------------------------------------------
# runs


def test_zero_amplitude_run(tmp_path):
    inc = dict(BASE["incident"], signature={"kind": "bump", "duration": 1.0, "amplitude": 0.0})
    res = run(RunConfig.load(_config(tmp_path, incident=inc)))
    assert res.passed
    _, cols = io.read_time_series(res.output / "probes_direct.csv")
    assert all(np.all(c == 0) for c in cols.values())


def test_both_formulations_and_reruns(tmp_path):
    path = _config(tmp_path, formulation="both", snapshots=[4, 8])
    res = run(RunConfig.load(path))
    assert res.passed and res.checks["cross_formulation"]["passed"]
    out = res.output
    names = ["probes_direct.csv", "probes_alternative.csv", "norms_direct.csv",
             "surface_direct.vtk", "volume_alternative.vtk", "solution_direct.bin",
             "solution_direct.json", "summary.json"]
    first = {n: (out / n).read_bytes() for n in names}
    summary = json.loads(first["summary.json"])
    assert summary["passed"] and summary["mesh"]["triangles"] == 20
    assert "U_8" in first["volume_alternative.vtk"].decode()
    sols, header = io.load_solutions(out / "solution_direct")
    assert len(sols) == 9 and header["formulation"] == "direct"
    run(RunConfig.load(path))
    for n, data in first.items():
        if n != "summary.json":
            assert (out / n).read_bytes() == data, n


# ---------------------------------------------------------------------------
# command line


def test_parser_subcommands():
    p = build_parser()
    assert p.parse_args(["verify", "cq"]).suite == "cq"
    a = p.parse_args(["assemble-dump", "--s", "1,2", "--out", "x"])
    assert a.s == 1 + 2j and a.which == ["V", "K", "W"]
    with pytest.raises(SystemExit):
        p.parse_args(["assemble-dump", "--s", "1,2,3", "--out", "x"])


def test_cli_run(tmp_path, capsys):
    code = main(["run", str(_config(tmp_path)), "--formulation", "alternative"])
    assert code == 0
    text = capsys.readouterr().out
    assert "PASS alternative_residual" in text
    assert (tmp_path / "out" / "probes_alternative.csv").exists()


def test_cli_config_error_exit_code(tmp_path, capsys):
    code = main(["run", str(_config(tmp_path, time={"T": 1.0, "N": 3}))])
    assert code == 2
    assert "$.time.N" in capsys.readouterr().err


def test_cli_assemble_dump(tmp_path, sphere0, unit_material):
    from elastocq.bem import assemble_operators

    stem = tmp_path / "ops"
    assert main(["assemble-dump", "--level", "0", "--s", "1.5,0.5", "--which", "V", "direct",
                 "--out", str(stem)]) == 0
    V, header = io.load_matrix(tmp_path / "ops_V")
    ref = assemble_operators(sphere0, 1.5 + 0.5j, unit_material).V
    assert np.array_equal(V, ref)
    assert header["mesh_hash"] == sphere0.content_hash() and header["s"] == [1.5, 0.5]
    A, _ = io.load_matrix(tmp_path / "ops_direct")
    assert A.shape[0] == A.shape[1]


def test_cli_surface_dump(tmp_path, sphere0):
    from elastocq.mesh import save_surface_mesh

    save_surface_mesh(sphere0, tmp_path / "s.off")
    assert main(["assemble-dump", "--surface", str(tmp_path / "s.off"), "--s", "1",
                 "--which", "K", "--out", str(tmp_path / "k")]) == 0
    assert main(["assemble-dump", "--surface", str(tmp_path / "s.off"), "--s", "1",
                 "--which", "direct", "--out", str(tmp_path / "k")]) == 2


def test_cli_verify_writes_report(tmp_path, capsys):
    code = main(["verify", "ellipticity", "--level", "0", "--out", str(tmp_path)])
    report = json.loads((tmp_path / "ellipticity.json").read_text())
    assert code == (0 if report["passed"] else 1)
    assert report["passed"]
    assert "PASS" in capsys.readouterr().out


def test_cli_scan_stability(tmp_path, capsys):
    code = main(["scan-stability", "--level", "0", "--taus", "1,4,16", "--out", str(tmp_path)])
    assert code == 0
    t, cols = io.read_time_series(tmp_path / "stability_direct.csv")
    assert np.array_equal(t, [1.0, 4.0, 16.0]) and set(cols) == {"volume", "triplet", "condition"}
