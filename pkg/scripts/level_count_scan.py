"""Random scan of predicted vs numerically found bound-level counts.

Prints every mismatch and whether the near-threshold margin rule flags it.

    python scripts/level_count_scan.py --samples 500 --seed 0
"""
import argparse

from spinshape.checks import check_level_count


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--samples", type=int, default=500)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--half-width", type=float, default=30.0)
    ap.add_argument("--points", type=int, default=1500)
    args = ap.parse_args()

    r = check_level_count(args.samples, args.seed, args.half_width, args.points)
    print(r.line())
    print("gamma,beta,predicted,found,near_threshold")
    for gamma, beta, predicted, found, near in r.details["mismatches"]:
        print(f"{gamma:.6f},{beta:.6f},{predicted},{found:g},{near}")


if __name__ == "__main__":
    main()
