#!/usr/bin/env python3
"""Run every bundled demo and summarize pass/fail.

Usage: python scripts/run_demos.py [--fast]
"""

import argparse
import sys

from skewlab.cli import _DEMOS, main as cli_main


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--fast", action="store_true", help="smaller sample sizes")
    args = ap.parse_args()

    failures = []
    for name in sorted(_DEMOS):
        print(f"=== {name} ===")
        argv = ["demo", name] + (["--fast"] if args.fast else [])
        rc = cli_main(argv)
        if rc != 0:
            failures.append(name)
        print()
    if failures:
        print(f"FAILED demos: {failures}")
        return 1
    print("all demos passed")
    return 0


if __name__ == "__main__":
    sys.exit(main())
