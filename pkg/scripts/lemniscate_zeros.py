"""Zeros of F_n for the lemniscate |z^s - 1| = 1 and their position relative to it."""

from __future__ import annotations

import argparse
import os

import numpy as np

from faberlab.conformal import lemniscate_map
from faberlab.zeros import faber_zeros


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--s", type=int, default=3)
    ap.add_argument("--n", type=int, default=100)
    ap.add_argument("--out", default="out/lemniscate")
    args = ap.parse_args()
    bundle = lemniscate_map(args.s)
    nu = faber_zeros(bundle, args.n)
    z = nu.points
    level = np.abs(z ** args.s - 1)
    m, l = divmod(args.n, args.s)
    print(f"s={args.s} n={args.n} converged={nu.converged}")
    print(f"max |z^s - 1| = {level.max():.3e}")
    print(f"zeros at the origin: {int(np.sum(np.abs(z) < 1e-8))} (closed form predicts {l})")
    os.makedirs(args.out, exist_ok=True)
    path = os.path.join(args.out, f"zeros_s{args.s}_n{args.n}.csv")
    with open(path, "w") as fh:
        fh.write("re,im,level\n")
        fh.writelines(f"{p.real!r},{p.imag!r},{float(v)!r}\n" for p, v in zip(map(complex, z), level))
    print("wrote", path)


if __name__ == "__main__":
    main()
