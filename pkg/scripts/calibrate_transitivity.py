"""Oracle sweep that pins the transitivity-probe thresholds.

Runs the joint least-squares probe on the truncated I + B (positive case) and
on seeded unitary diagonals (negative control) with u, v supported on the
leading d//3 coordinates, then prints the extreme min-scores. The pinned
constants in opdyn.dynamics must sit strictly between them.

    python scripts/calibrate_transitivity.py --seeds 50 --d 12 --N 60
"""

import argparse

import numpy as np

from opdyn import dynamics as dy
from opdyn import opmodel as om


def unitary_diagonal(rng, d):
    return np.diag(np.exp(2j * np.pi * rng.random(d)))


def sweep(d, N, seeds, first_seed=0):
    T = om.materialize(om.Identity() + om.BackwardShift(1.0), d)
    pos, neg = [], []
    for seed in range(first_seed, first_seed + seeds):
        rng = np.random.default_rng(seed)
        u, v = dy.window_unit_vector(rng, d), dy.window_unit_vector(rng, d)
        pos.append(dy.transitivity_probe(T, u, v, N).details["min_score"])
        U = unitary_diagonal(rng, d)
        neg.append(dy.transitivity_probe(U, u, v, N).details["min_score"])
    return np.array(pos), np.array(neg)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--d", type=int, default=12)
    ap.add_argument("--N", type=int, default=60)
    ap.add_argument("--seeds", type=int, default=50)
    ap.add_argument("--first-seed", type=int, default=0)
    args = ap.parse_args()
    pos, neg = sweep(args.d, args.N, args.seeds, args.first_seed)
    print(f"I+B      min-score: max {pos.max():.4f}  median {np.median(pos):.4f}")
    print(f"unitary  min-score: min {neg.min():.4f}  median {np.median(neg):.4f}")
    print(f"pinned   positive threshold {dy.TRANSITIVITY_POSITIVE_THRESHOLD}, "
          f"negative floor {dy.TRANSITIVITY_NEGATIVE_FLOOR}")
    ok = pos.max() < dy.TRANSITIVITY_POSITIVE_THRESHOLD < dy.TRANSITIVITY_NEGATIVE_FLOOR < neg.min()
    print("separated" if ok else "NOT separated")


if __name__ == "__main__":
    main()
