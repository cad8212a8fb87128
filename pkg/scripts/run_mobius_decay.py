#!/usr/bin/env python3
"""Mobius correlation decay for two-floor words along growth functions.

Builds the sieve once, generates each configured word, and reports the
checkpoint averages with the fitted decay slope of log|avg| vs log N.
"""

import argparse
import json
import pathlib
from fractions import Fraction

import numpy as np

from bracketlab import exactreal, mobius


def sturmian_values(alpha, indices: np.ndarray) -> np.ndarray:
    up = exactreal.floor_affine_array(alpha, 0, indices + 1)
    lo = exactreal.floor_affine_array(alpha, 0, indices)
    return (up - lo).astype(np.int64)


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sieve", type=int, default=2**23)
    ap.add_argument("--jmin", type=int, default=14)
    ap.add_argument("--jmax", type=int, default=23)
    ap.add_argument("--out", default="reports/mobius_decay.jsonl")
    args = ap.parse_args()
    table = mobius.mobius_sieve(args.sieve)
    checkpoints = [2**j for j in range(args.jmin, args.jmax + 1)
                   if 2**j <= args.sieve]
    n = np.arange(1, checkpoints[-1] + 1, dtype=np.int64)
    alpha = exactreal.sqrt(2) - 1
    cases = {
        "sturmian along n": sturmian_values(alpha, n),
        "sturmian along n^(3/2)": sturmian_values(
            alpha, exactreal.floor_power_array(n, Fraction(3, 2))),
    }
    path = pathlib.Path(args.out)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        fh.write(json.dumps({"record": "config", **vars(args)}, sort_keys=True) + "\n")
        for name, values in cases.items():
            rep = mobius.correlation(values, checkpoints, table,
                                     word_origin={"word": name})
            slope = mobius.decay_slope(rep.checkpoints)
            fh.write(json.dumps({
                "record": "decay",
                "word": name,
                "slope": slope,
                "checkpoints": [[N, float(avg)] for N, _, avg in rep.checkpoints],
            }, sort_keys=True) + "\n")
            print(f"{name}: slope {slope:+.3f}")


if __name__ == "__main__":
    main()
