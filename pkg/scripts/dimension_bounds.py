"""Size of the weight-one spanning set and the resulting representation-dimension bound per level."""
import argparse

from pfcoset import extension as ex
from pfcoset import modcheck as mc
from pfcoset.level import valid_levels


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-sum", type=int, default=20, help="list levels with u + v <= this")
    args = ap.parse_args()
    print(f"{'u':>3} {'v':>3} {'k':>7} {'|B_k|':>6} {'closed':>7} {'standard':>9} {'total':>6}")
    for lv in valid_levels(args.max_sum):
        std, b, total = mc.rep_dimension_report(lv)
        print(f"{lv.u:>3} {lv.v:>3} {str(lv.k):>7} {b:>6} {str(ex.dim_bound(lv)):>7} {std:>9} {total:>6}")


if __name__ == "__main__":
    main()
