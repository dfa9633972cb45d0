"""Compiled against numpy kernel backends.

Times batch evaluations of the Green tensor, its gradient and the double
traction kernel, then a full Galerkin assembly with each backend, and checks
that both backends agree.  Usage::

    python3 benchmarks/bench_kernels.py [--n 200000] [--level 1] [--repeat 3]
"""

from __future__ import annotations

import argparse
import timeit

import numpy as np

from elastocq import kernels
from elastocq.bem import assemble_operators
from elastocq.materials import IsotropicExterior
from elastocq.mesh import icosphere


def _batch(n, seed=0):
    rng = np.random.default_rng(seed)
    z = rng.standard_normal((n, 3))
    nx = rng.standard_normal((n, 3))
    ny = rng.standard_normal((n, 3))
    nx /= np.linalg.norm(nx, axis=1)[:, None]
    ny /= np.linalg.norm(ny, axis=1)[:, None]
    return np.ascontiguousarray(z), np.ascontiguousarray(nx), np.ascontiguousarray(ny)


def _time(fn, repeat):
    return min(timeit.repeat(fn, number=1, repeat=repeat))


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    p.add_argument("--n", type=int, default=200_000, help="points per batch")
    p.add_argument("--level", type=int, default=1, help="icosphere level for the assembly")
    p.add_argument("--repeat", type=int, default=3)
    args = p.parse_args(argv)

    try:
        kernels.backend_module("compiled")
    except ImportError:
        print("compiled backend not built; nothing to compare")
        return 1
    mat = IsotropicExterior(1.0, 1.0, 1.0)
    s = 1.0 + 2.0j
    z, nx, ny = _batch(args.n)
    cases = {
        "green": lambda m: m.green(z, s, mat.lam, mat.mu, mat.rho),
        "green_grad": lambda m: m.green_grad(z, s, mat.lam, mat.mu, mat.rho),
        "double_traction": lambda m: m.double_traction(z, nx, ny, s, mat.lam, mat.mu, mat.rho),
    }
    print(f"{'kernel':<18}{'numpy [s]':>12}{'compiled [s]':>14}{'speedup':>10}{'max rel diff':>14}")
    for name, fn in cases.items():
        out, times = {}, {}
        for b in ("numpy", "compiled"):
            mod = kernels.backend_module(b)
            out[b] = fn(mod)
            times[b] = _time(lambda: fn(mod), args.repeat)
        diff = np.abs(out["numpy"] - out["compiled"]).max() / np.abs(out["numpy"]).max()
        print(f"{name:<18}{times['numpy']:>12.4f}{times['compiled']:>14.4f}"
              f"{times['numpy'] / times['compiled']:>10.1f}{diff:>14.2e}")

    surf = icosphere(args.level)
    saved = kernels._impl
    ops, times = {}, {}
    try:
        for b in ("numpy", "compiled"):
            kernels._impl = kernels.backend_module(b)
            ops[b] = assemble_operators(surf, s, mat)
            times[b] = _time(lambda: assemble_operators(surf, s, mat), 1)
    finally:
        kernels._impl = saved
    diff = max(np.abs(getattr(ops["numpy"], w) - getattr(ops["compiled"], w)).max()
               / np.abs(getattr(ops["numpy"], w)).max() for w in "VKW")
    name = f"assembly L{args.level}"
    print(f"{name:<18}{times['numpy']:>12.4f}{times['compiled']:>14.4f}"
          f"{times['numpy'] / times['compiled']:>10.1f}{diff:>14.2e}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
