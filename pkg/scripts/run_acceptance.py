"""Run every acceptance check and write a JSON report."""

from __future__ import annotations

import argparse
import json

from faberlab.checks import run_all


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="acceptance.json")
    args = ap.parse_args()
    results = run_all(seed=args.seed)
    for r in results:
        print(r.line())
    with open(args.out, "w") as fh:
        json.dump([r.to_json() for r in results], fh, indent=1, sort_keys=True)
    print(f"{sum(r.passed for r in results)}/{len(results)} passed; report in {args.out}")


if __name__ == "__main__":
    main()
