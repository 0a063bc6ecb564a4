#!/usr/bin/env python3
"""Generate reference fixtures for the oscphase benchmark problems.

Each fixture stores the reference solution of one built-in problem, sampled
at the same 10,000 equispaced interior points the benchmark harness uses:

    h = (b - a) / (n + 1),  t_i = a + i * h,  i = 1..n

computed in IEEE double precision so the grids match bit for bit.  Reference
values are computed with mpmath in arbitrary precision and rounded once to
binary64 on output.

  airy problem   y(t) = -t + Ai(lambda^(2/3) t) on (-10, 0), closed form.
  ivp2 problem   y'' + (lambda^2/(0.01+t^2)) y = lambda^2 (1+t) cos(13 t^2),
                 y(0) = y'(0) = 1, integrated with mpmath.odefun.

Usage: python3 tools/gen_fixtures.py [outdir]   (default crates/oscphase-cli/fixtures)
"""

import json
import os
import sys
import time

import mpmath as mp

N_SAMPLES = 10000

AIRY_LAMBDAS = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 100, 1000, 10000, 1000000]
IVP2_LAMBDAS = [100]


def sample_grid(a, b, n=N_SAMPLES):
    # Must match the Rust-side grid exactly: plain binary64 arithmetic.
    h = (b - a) / (n + 1)
    return [a + i * h for i in range(1, n + 1)]


def airy_fixture(lam):
    mp.mp.dps = 30
    a, b = -10.0, 0.0
    grid = sample_grid(a, b)
    scale = mp.mpf(lam) ** (mp.mpf(2) / 3)
    ys = [float(-mp.mpf(t) + mp.airyai(scale * mp.mpf(t))) for t in grid]
    return {
        "problem": "airy",
        "lambda": float(lam),
        "interval": [a, b],
        "n": N_SAMPLES,
        "t_first": grid[0],
        "t_last": grid[-1],
        "y": ys,
    }


def ivp2_fixture(lam):
    mp.mp.dps = 25
    a, b = 0.0, 1.0
    grid = sample_grid(a, b)
    lam_mp = mp.mpf(lam)

    def rhs(t, y):
        q = lam_mp ** 2 / (mp.mpf("0.01") + t * t)
        f = lam_mp ** 2 * (1 + t) * mp.cos(13 * t * t)
        return [y[1], f - q * y[0]]

    yfun = mp.odefun(rhs, 0, [mp.mpf(1), mp.mpf(1)], tol=mp.mpf(10) ** -18)
    ys = [float(yfun(mp.mpf(t))[0]) for t in grid]
    return {
        "problem": "ivp2",
        "lambda": float(lam),
        "interval": [a, b],
        "n": N_SAMPLES,
        "t_first": grid[0],
        "t_last": grid[-1],
        "y": ys,
    }


def write_fixture(outdir, data):
    name = "{}_{}.json".format(data["problem"], int(data["lambda"]))
    path = os.path.join(outdir, name)
    with open(path, "w") as fh:
        json.dump(data, fh)
    print("wrote", path)


def main():
    outdir = sys.argv[1] if len(sys.argv) > 1 else "crates/oscphase-cli/fixtures"
    os.makedirs(outdir, exist_ok=True)
    for lam in AIRY_LAMBDAS:
        t0 = time.time()
        write_fixture(outdir, airy_fixture(lam))
        print("  airy lambda={} took {:.1f}s".format(lam, time.time() - t0))
    for lam in IVP2_LAMBDAS:
        t0 = time.time()
        write_fixture(outdir, ivp2_fixture(lam))
        print("  ivp2 lambda={} took {:.1f}s".format(lam, time.time() - t0))


if __name__ == "__main__":
    main()
