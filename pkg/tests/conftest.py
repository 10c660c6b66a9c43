from fractions import Fraction

import pytest
from hypothesis import settings

from pfcoset.level import Level

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

# k = -1/2, -2/3, -4/3, -1/3, -5/4
FIVE_LEVELS = [(3, 2), (4, 3), (2, 3), (5, 3), (3, 4)]
MODULAR_LEVELS = [(3, 2), (4, 3), (2, 3)]


@pytest.fixture
def lv():
    return lambda u, v: Level(u, v)


def F(x):
    return Fraction(x)


def coset_label(level, rng_or_draw, span=3, denoms=(1, 2, 3, 4, 6)):
    """Random canonical irreducible coset label; accepts a ``random.Random`` or a hypothesis ``draw``."""
    from pfcoset import coset as cs

    pick = _picker(rng_or_draw)
    fams = cs.enumerate_families(level)
    fam = fams[pick(0, len(fams) - 1)]
    if fam.kind in ("C", "D"):
        mu = fam.base + 2 * pick(-span, span)
        lab = cs.C(mu, fam.r) if fam.kind == "C" else cs.D(mu, fam.r, fam.s)
        return cs.canonical(level, lab)
    while True:
        d = denoms[pick(0, len(denoms) - 1)]
        mu = Fraction(pick(-2 * span * d, 2 * span * d), d)
        if not cs.is_atypical_weight(level, mu, fam.r, fam.s):
            return cs.canonical(level, cs.E(mu, fam.r, fam.s))


def ext_label(level, rng_or_draw):
    from pfcoset import extension as ex

    pick = _picker(rng_or_draw)
    mods = ex.enumerate_modules(level)
    return mods[pick(0, len(mods) - 1)]


def _picker(src):
    import random

    from hypothesis import strategies as st

    if isinstance(src, random.Random):
        return src.randint
    return lambda a, b: src(st.integers(a, b))


ACCEPTANCE_LINES: dict = {}


def record_criterion(number: int, passed: bool, detail: str):
    ACCEPTANCE_LINES[number] = f"{'PASS' if passed else 'FAIL'} criterion {number}: {detail}"


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[n])
