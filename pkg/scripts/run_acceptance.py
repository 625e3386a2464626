"""Run the in-process acceptance criteria and print one line per criterion.

    python3 scripts/run_acceptance.py --seed 7 [--only 1,4,9]
"""
import argparse
import sys

from popa.acceptance import CRITERIA, run_criterion


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--only", default="", help="comma-separated criterion numbers")
    args = ap.parse_args()
    wanted = {int(s) for s in args.only.split(",") if s}
    ok = True
    for c in CRITERIA:
        if wanted and c.number not in wanted:
            continue
        rep, elapsed = run_criterion(c, args.seed)
        ok &= rep.passed
        print(f"{c.number:2d} {'PASS' if rep.passed else 'FAIL'} {elapsed:7.2f} s  {c.title}")
        for f in rep.failures:
            print(f"     - {f}")
    sys.exit(0 if ok else 1)


if __name__ == "__main__":
    main()
