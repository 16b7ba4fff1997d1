"""Trajectories of the autonomous (Y, Z, W) system as plot-ready CSV.

Writes the radial trajectory (from an actual solution) and a fan of flow
lines started on the faces of the invariant box, all tagged by a curve id.

    python scripts/phase_portrait.py --N 3 --p 0.5 --s 1 --out portrait.csv
"""

import argparse
import csv
import sys

import numpy as np

from radialblowup.dynsys import DynParams, box_bounds, flow, omega_limit, to_dynamical
from radialblowup.model import InitialData, ProblemSpec
from radialblowup.radial_ode import SolverConfig, integrate_radial


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--N", type=int, default=3)
    ap.add_argument("--a", type=float, default=0.0)
    ap.add_argument("--b", type=float, default=0.0)
    ap.add_argument("--p", type=float, default=0.5)
    ap.add_argument("--s", type=float, default=1.0)
    ap.add_argument("--lines", type=int, default=12)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out")
    args = ap.parse_args()
    q = DynParams(args.N, args.a, args.b, args.p, args.s)
    spec = ProblemSpec(N=q.N, a=q.a, b=q.b, p=q.p, s=q.s)
    lo, hi = box_bounds(q)
    rng = np.random.default_rng(args.seed)

    curves = []
    sol = integrate_radial(spec, InitialData(), SolverConfig(r_max=1e5, r_start=1e-10))
    curves.append(("radial", to_dynamical(sol)))
    for i in range(args.lines):
        x0 = lo + rng.uniform(0, 1, 3) * (hi - lo)
        x0[i % 3] = (lo if i % 2 else hi)[i % 3]  # start on a face
        curves.append((f"flow{i}", flow(q, np.maximum(x0, 1e-6), (0.0, 40.0))))

    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    w = csv.writer(fh)
    w.writerow(["curve", "t", "Y", "Z", "W"])
    for name, tr in curves:
        for row in zip(tr.t, tr.Y, tr.Z, tr.W):
            w.writerow([name, *(repr(float(x)) for x in row)])
    if args.out:
        fh.close()
        print(f"{len(curves)} curves; radial omega-limit: {omega_limit(curves[0][1], q)}")


if __name__ == "__main__":
    main()
