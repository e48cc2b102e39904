"""Zeros of F_n for the two-corner map, with predicted interior accumulation data.

Writes <out>/zeros.csv (n,re,im) and <out>/prediction.json. The corner angle is
given as a rational multiple of pi ("3/4pi") or in radians.
"""

from __future__ import annotations

import argparse
import json
import os
import warnings

from faberlab.cli import _accumulation_report, parse_degrees
from faberlab.conformal import parse_angle, two_corner_map
from faberlab.zeros import faber_zeros, interior_zeros


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--theta1", default="3/4pi")
    ap.add_argument("--n", default="20..90,200..203")
    ap.add_argument("--out", default="out/two_corner")
    args = ap.parse_args()
    degrees = parse_degrees(args.n)
    bundle = two_corner_map(parse_angle(args.theta1), K=max(256, max(degrees) + 1))
    os.makedirs(args.out, exist_ok=True)
    rows = ["n,re,im"]
    for n in degrees:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RuntimeWarning)
            nu = faber_zeros(bundle, n)
        rows.extend(f"{n},{z.real!r},{z.imag!r}" for z in map(complex, nu.points))
        inner = interior_zeros(nu, bundle)
        print(f"n={n:4d} converged={nu.converged} interior zeros: "
              + ", ".join(f"{z.real:+.5f}{z.imag:+.5f}i" for z in map(complex, inner)))
    with open(os.path.join(args.out, "zeros.csv"), "w") as fh:
        fh.write("\n".join(rows) + "\n")
    report = _accumulation_report(bundle)
    with open(os.path.join(args.out, "prediction.json"), "w") as fh:
        json.dump(report, fh, indent=1, sort_keys=True)
    print("prediction:", json.dumps(report))


if __name__ == "__main__":
    main()
