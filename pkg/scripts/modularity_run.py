"""Run every numeric and symbolic check at the standard levels and print one line per check.

Usage: python scripts/modularity_run.py [--json] [--order N] [--digits D]
"""
import argparse
import sys

from pfcoset import modcheck as mc
from pfcoset.level import Level

LEVELS = [(3, 2), (4, 3), (2, 3)]
TOLS = {"t_phase": 1e-30}


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--json", action="store_true", help="emit JSON lines")
    ap.add_argument("--order", type=int, default=60)
    ap.add_argument("--digits", type=int, default=80)
    args = ap.parse_args()
    ok = True
    for u, v in LEVELS:
        for kind in mc.KINDS:
            order = args.order if kind in mc.NUMERIC else min(args.order, 40)
            rep = mc.verify(kind, Level(u, v), order=order, digits=args.digits, tol=TOLS.get(kind, 1e-20))
            ok &= rep.passed
            print(rep.to_json() if args.json else rep.summary(), flush=True)
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
