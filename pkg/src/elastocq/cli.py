"""Command-line entry point.

Subcommands::

    elastocq run CONFIG.json
    elastocq verify SUITE [--out DIR] [--level N]
    elastocq scan-stability [--level N] [--sigma0 S] [--taus 1,2,4] [--out DIR]
    elastocq assemble-dump [--level N | --surface FILE.off] --s RE[,IM] --out STEM

The worker count for the frequency loop comes from ``$ELASTOCQ_WORKERS``
(or the ``workers`` entry of a run configuration).  The exit code is 0 iff
all checks of the command pass; configuration errors exit with code 2.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import io
from .bem import assemble_operators
from .coupled import FORMULATIONS, assemble_system
from .harness import SUITES, ball_model, stability_scan, STABILITY_BOUNDS, verify
from .materials import IsotropicExterior
from .mesh import icosphere, load_surface_mesh
from .runner import ConfigError, RunConfig, run

log = logging.getLogger("elastocq")


def _complex(text: str) -> complex:
    parts = [float(p) for p in text.split(",")]
    if len(parts) not in (1, 2):
        raise argparse.ArgumentTypeError(f"expected RE or RE,IM, got {text!r}")
    return complex(parts[0], parts[1] if len(parts) == 2 else 0.0)


def _floats(text: str) -> list:
    return [float(p) for p in text.split(",") if p]


def _ints(text: str) -> list:
    return [int(p) for p in text.split(",") if p]


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="elastocq", description=__doc__.split("\n")[0])
    p.add_argument("-v", "--verbose", action="count", default=0)
    sub = p.add_subparsers(dest="command", required=True)

    r = sub.add_parser("run", help="transient scattering run from a JSON configuration")
    r.add_argument("config", type=Path)
    r.add_argument("--formulation", choices=FORMULATIONS + ("both",),
                   help="override the configured formulation")

    v = sub.add_parser("verify", help="run a verification suite")
    v.add_argument("suite", choices=sorted(SUITES))
    v.add_argument("--out", type=Path, help="directory for the JSON report")
    v.add_argument("--levels", type=_ints, help="mesh levels for refinement studies")
    v.add_argument("--level", type=int, help="mesh level for single-level suites")

    sc = sub.add_parser("scan-stability", help="growth exponents along s = sigma0 + i tau")
    sc.add_argument("--level", type=int, default=1)
    sc.add_argument("--sigma0", type=float, default=1.0)
    sc.add_argument("--taus", type=_floats, default=[1, 2, 4, 8, 16, 32, 64])
    sc.add_argument("--slack", type=float, default=0.2)
    sc.add_argument("--out", type=Path)

    d = sub.add_parser("assemble-dump", help="dump Galerkin or system matrices")
    g = d.add_mutually_exclusive_group()
    g.add_argument("--level", type=int, default=1)
    g.add_argument("--surface", type=Path, help="OFF surface mesh")
    d.add_argument("--s", type=_complex, required=True, help="Laplace parameter RE[,IM]")
    d.add_argument("--which", choices=("V", "K", "W", "direct", "alternative"), nargs="+",
                   default=["V", "K", "W"])
    d.add_argument("--lam", type=float, default=1.0)
    d.add_argument("--mu", type=float, default=1.0)
    d.add_argument("--rho", type=float, default=1.0)
    d.add_argument("--out", type=Path, required=True, help="output stem")
    return p


def cmd_run(args) -> int:
    cfg = RunConfig.load(args.config)
    if args.formulation:
        cfg.formulation = args.formulation
    res = run(cfg)
    for name, c in res.checks.items():
        print(f"{'PASS' if c['passed'] else 'FAIL'} {name}: {c['measured']}")
    print(f"artifacts in {res.output}")
    return 0 if res.passed else 1


def cmd_verify(args) -> int:
    opts = {}
    if args.levels:
        opts["levels"] = tuple(args.levels)
    if args.level is not None:
        opts["level"] = args.level
    rep = verify(args.suite, **opts)
    print(rep.summary())
    if args.out:
        args.out.mkdir(parents=True, exist_ok=True)
        io.write_json(args.out / f"{args.suite}.json", rep.to_dict())
    return 0 if rep.passed else 1


def cmd_scan(args) -> int:
    scans = stability_scan(FORMULATIONS, args.sigma0, args.taus, ball_model(args.level))
    ok = True
    for f, sc in scans.items():
        for kind, p in (("volume", sc.volume_exponent), ("triplet", sc.triplet_exponent)):
            bound = STABILITY_BOUNDS[f][kind] + args.slack
            good = p <= bound
            ok &= good
            print(f"{'PASS' if good else 'FAIL'} {f} {kind} exponent {p:.3f} (bound {bound:.2f})")
    order = scans["direct"].volume_exponent <= scans["alternative"].volume_exponent + 1e-9
    ok &= order
    print(f"{'PASS' if order else 'FAIL'} direct volume exponent <= alternative")
    if args.out:
        args.out.mkdir(parents=True, exist_ok=True)
        io.write_json(args.out / "stability.json", {f: sc.to_dict() for f, sc in scans.items()})
        for f, sc in scans.items():
            tau = sc.frequencies.imag
            io.write_time_series(args.out / f"stability_{f}.csv", tau,
                                 {"volume": sc.volume, "triplet": sc.triplet,
                                  "condition": sc.conditions})
    return 0 if ok else 1


def cmd_dump(args) -> int:
    mat = IsotropicExterior(args.lam, args.mu, args.rho)
    s = args.s
    if any(w in ("direct", "alternative") for w in args.which):
        if args.surface:
            raise ConfigError("--surface", "system dumps need the built-in ball (--level)")
        model = ball_model(args.level, exterior=mat)
        surface, ops = model.surface, model.operators(s)
    else:
        surface = load_surface_mesh(args.surface) if args.surface else icosphere(args.level)
        ops = assemble_operators(surface, s, mat)
        model = None
    h = surface.content_hash()
    for w in args.which:
        if w in ("V", "K", "W"):
            A = getattr(ops, w)
        else:
            A = assemble_system(w, s, model, None, ops).matrix
        head, _ = io.dump_matrix(f"{args.out}_{w}", A, s, h, {"operator": w})
        print(f"wrote {head}")
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    handlers = {"run": cmd_run, "verify": cmd_verify, "scan-stability": cmd_scan,
                "assemble-dump": cmd_dump}
    try:
        return handlers[args.command](args)
    except ConfigError as exc:
        print(f"configuration error at {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
