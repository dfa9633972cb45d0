"""Regenerate ``kernel_oracle.json``: Green tensors at 60-digit precision.

The oracle evaluates ``G_s I / mu + grad grad^T chi / (rho s^2)`` with
``chi = (exp(-s r / c_p) - exp(-s r / c_s)) / (4 pi r)`` and takes the
Cartesian second derivatives with ``mpmath.diff``, so it shares no radial
calculus with the package.
"""

import json
from pathlib import Path

import mpmath as mp
import numpy as np

mp.mp.dps = 60


def oracle(z, s, lam, mu, rho):
    lam, mu, rho = mp.mpf(lam), mp.mpf(mu), mp.mpf(rho)
    s = mp.mpc(s)
    c_s = mp.sqrt(mu / rho)
    c_p = mp.sqrt((lam + 2 * mu) / rho)

    def chi(a, b, c):
        r = mp.sqrt(a * a + b * b + c * c)
        return (mp.exp(-s * r / c_p) - mp.exp(-s * r / c_s)) / (4 * mp.pi * r)

    z = [mp.mpf(v) for v in z]
    r = mp.sqrt(sum(v * v for v in z))
    gs = mp.exp(-s * r / c_s) / (4 * mp.pi * r)
    out = [[None] * 3 for _ in range(3)]
    for i in range(3):
        for j in range(i, 3):
            order = [0, 0, 0]
            order[i] += 1
            order[j] += 1
            d2 = mp.diff(chi, z, tuple(order))
            val = d2 / (rho * s * s) + (gs / mu if i == j else 0)
            out[i][j] = out[j][i] = val
    return out


def main():
    rng = np.random.default_rng(20240611)
    cases = []
    for k in range(50):
        lam = float(rng.uniform(-0.5, 3.0))
        mu = float(rng.uniform(0.3, 2.0))
        rho = float(rng.uniform(0.5, 2.0))
        # radii spanning the series branch, the overlap window and the far range
        r = float(10 ** rng.uniform(-3, 1))
        d = rng.normal(size=3)
        z = r * d / np.linalg.norm(d)
        s = complex(rng.uniform(0.1, 10.0), rng.uniform(-10.0, 10.0))
        if k < 10:
            s = complex(rng.uniform(0.1, 2.0), rng.uniform(-1.0, 1.0))
            z = z / r * float(10 ** rng.uniform(-3, -1))
        x = rng.normal(size=3)
        y = x - z
        E = oracle(x - y, s, lam, mu, rho)
        cases.append({
            "x": x.tolist(), "y": y.tolist(), "s": [s.real, s.imag],
            "lambda": lam, "mu": mu, "rho": rho,
            "E_re": [[mp.nstr(E[i][j].real, 30) for j in range(3)] for i in range(3)],
            "E_im": [[mp.nstr(E[i][j].imag, 30) for j in range(3)] for i in range(3)],
        })
    path = Path(__file__).with_name("kernel_oracle.json")
    path.write_text(json.dumps({"digits": 60, "cases": cases}, indent=1))


if __name__ == "__main__":
    main()
