"""m * r_m for the normalized lemniscate subsequences against both candidate brackets."""

from __future__ import annotations

import argparse

from faberlab.asymptotics import lemniscate_subsequence_model, subsequence_rate


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--s", type=int, default=3)
    ap.add_argument("--l", type=int, default=1)
    ap.add_argument("--z", type=complex, default=0.5)
    ap.add_argument("--m", default="25,50,100,200,400")
    args = ap.parse_args()
    ms = [int(x) for x in args.m.split(",")]
    derived = lemniscate_subsequence_model(args.s, args.l, 1, args.z).bracket
    printed = lemniscate_subsequence_model(args.s, args.l, 1, args.z, as_printed=True).bracket
    print(f"bracket (derived)      = {derived:.6f}")
    print(f"bracket (alternative)  = {printed:.6f}")
    print(f"{'m':>6} {'m r_m derived':>28} {'m r_m alternative':>28}")
    for m in ms:
        a = subsequence_rate(args.s, args.l, m, args.z)
        b = subsequence_rate(args.s, args.l, m, args.z, as_printed=True)
        print(f"{m:6d} {a:28.6f} {b:28.6f}")


if __name__ == "__main__":
    main()
