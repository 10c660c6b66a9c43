"""Ground-state conformal weights of the extended modules at k = -2/3, grouped by simple-current orbit.

Prints each irreducible extended module with its own weight and the minimum over its orbit,
followed by the orbit representatives.
"""
from pfcoset import extension as ex
from pfcoset.level import Level


def main():
    lv = Level(4, 3)
    currents = ex.simple_currents(lv)
    print(f"{lv}: simple currents {', '.join(map(str, currents))}")
    seen = set()
    reps = []
    for lab in ex.enumerate_modules(lv):
        orbit = set()
        for j in currents:
            orbit |= set(ex.gr_fuse_ext(lv, j, lab))
        key = frozenset(orbit)
        h, hmin = ex.conformal_weight(lv, lab), ex.sector_weight(lv, lab)
        print(f"{str(lab):22s} h = {str(h):8s} orbit min = {hmin}")
        if key not in seen:
            seen.add(key)
            reps.append((lab, hmin, len(orbit)))
    print(f"\n{len(reps)} orbits")
    for lab, hmin, size in reps:
        print(f"  {str(lab):22s} size {size}  h = {hmin}")


if __name__ == "__main__":
    main()
