"""Filter ablation on synthetic two-object scenes with distractor fingertip peaks.

Prints the sim success rate of the top decoded grasp under each combination of
orientation matching and center matching.
"""

import argparse
from dataclasses import replace

from ddgrasp.synth import DistractorParams, run_ablation


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    ap.add_argument("--scenes", type=int, default=200, help="number of scenes (seeds 0..scenes)")
    ap.add_argument("--start", type=int, default=0, help="first seed")
    ap.add_argument("--distractors", type=int, default=10, help="distractor fingertip peaks per scene")
    args = ap.parse_args()
    params = replace(DistractorParams(), n_distractors=args.distractors)
    rates = run_ablation(range(args.start, args.start + args.scenes), params)
    for name, rate in rates.items():
        print(f"{name:12s} {rate:.3f}")


if __name__ == "__main__":
    main()
