"""Oracle roundtrip sweep: recovery and sim success as the jaw size and top-k vary."""

import argparse
from dataclasses import replace

from ddgrasp.pipeline import RoundtripConfig, roundtrip


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.ArgumentDefaultsHelpFormatter)
    ap.add_argument("--scenes", type=int, default=200)
    ap.add_argument("--plate-h", type=float, nargs="+", default=[5.0, 10.0, 20.0])
    ap.add_argument("--num-gt", type=int, nargs="+", default=[1, 3])
    args = ap.parse_args()
    base = RoundtripConfig()
    print("plate_h num_gt recovery rect_match sim_success")
    for h in args.plate_h:
        for k in args.num_gt:
            rep = roundtrip(range(args.scenes), replace(base, plate_h=h, num_gt=k))
            print(f"{h:7g} {k:6d} {rep.recovery_rate:8.3f} {rep.rect_match_rate:10.3f} {rep.sim_success_rate:11.3f}")


if __name__ == "__main__":
    main()
