#!/usr/bin/env python3
"""Census of floor-error profiles for a growth function across window sizes.

Samples centres across a decade range, classifies every profile into the
small-N / sparse / structured trichotomy, counts distinct profiles per
window and fits log(count) against H^eta.
"""

import argparse
import json
import pathlib

from bracketlab import hardy, taylor_error


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--f", default="t^(3/2)")
    ap.add_argument("--k", type=int, default=2)
    ap.add_argument("--ell", type=int, default=4)
    ap.add_argument("--windows", default="16,32,64,128")
    ap.add_argument("--nmin", type=int, default=100_000)
    ap.add_argument("--count", type=int, default=2_000)
    ap.add_argument("--eta", type=float, default=0.5)
    ap.add_argument("--out", default="reports/trichotomy_census.jsonl")
    args = ap.parse_args()
    f = hardy.parse_hardy(args.f)
    windows = [int(w) for w in args.windows.split(",")]
    census = taylor_error.count_profiles(
        f, args.k, args.ell, windows, (args.nmin, args.nmin + args.count - 1),
        eta=args.eta)
    path = pathlib.Path(args.out)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        fh.write(json.dumps({"record": "config", **vars(args)}, sort_keys=True) + "\n")
        for rec in taylor_error.census_records(census):
            fh.write(json.dumps(rec, sort_keys=True) + "\n")
    for w in windows:
        hc = census.per_window[w]
        print(f"H={w}: distinct={hc.distinct_count} tally={hc.tally}")
    if census.fit:
        print(f"log(count) vs H^eta slope: {census.fit[0]:.4f}")


if __name__ == "__main__":
    main()
