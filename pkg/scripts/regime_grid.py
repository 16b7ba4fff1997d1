"""Ball regimes on a (p, s) grid: closed form, numeric KO verdicts and shooting.

    python scripts/regime_grid.py --out regimes.csv
"""

import argparse
import csv
import sys

import numpy as np

from radialblowup.criteria import classify_ball, regime_from_inequalities
from radialblowup.model import Ball, InitialData, ProblemSpec
from radialblowup.radial_ode import SolverConfig, integrate_radial


def row(p: float, s: float, r_max: float) -> dict:
    ball = ProblemSpec(p=p, s=s, domain=Ball(1.0))
    sol = integrate_radial(ProblemSpec(p=p, s=s), InitialData(), SolverConfig(r_max=r_max))
    b = sol.blowup
    return {
        "p": p, "s": s,
        "closed_form": regime_from_inequalities(p, s),
        "numeric": classify_ball(ball, method="numeric").tag,
        "R_est": b.R_est if b else "",
        "u_blows": b.u_blows if b else "",
        "v_rate": b.v_rate if b else "",
        "du_rate": b.du_rate if b else "",
        "r_end": float(sol.r[-1]),
    }


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--p", type=int, default=12, help="grid points in p on [0.25, 4]")
    ap.add_argument("--s", type=int, default=15, help="grid points in s on [1, 8]")
    ap.add_argument("--rmax", type=float, default=1e3)
    ap.add_argument("--out")
    args = ap.parse_args()
    rows = [row(float(p), float(s), args.rmax)
            for p in np.geomspace(0.25, 4.0, args.p) for s in np.linspace(1.0, 8.0, args.s)]
    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    w = csv.DictWriter(fh, fieldnames=list(rows[0]))
    w.writeheader()
    w.writerows(rows)
    if args.out:
        fh.close()
        bad = sum(r["numeric"] not in ("Inconclusive", r["closed_form"]) for r in rows)
        print(f"{len(rows)} cells, {bad} numeric disagreements")


if __name__ == "__main__":
    main()
