"""Parafermion coset modules: labels, conformal weights, characters, fusion.

Labels follow the grammar ``C[mu;r]``, ``D[mu;r,s]``, ``E[mu;r,s]``,
``Estd+[mu;r,s]`` and ``Estd-[mu;r,s]``.  The weight ``mu`` is an exact
rational and is *not* reduced modulo anything at this level.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from . import minmod
from .fusion import FusionElement, UnnormalizedLabel, bilinear
from .level import Level
from .qseries import QSeries, SeriesCache, eta_inverse, to_fraction

KINDS = ("C", "D", "E", "E+", "E-")


class RangeError(ValueError):
    pass


class ParityMismatch(ValueError):
    pass


class TypicalOnAtypicalWeight(ValueError):
    pass


class TruncationBelowGroundState(ValueError):
    pass


@dataclass(frozen=True)
class CosetLabel:
    kind: str
    mu: Fraction
    r: int
    s: int = 0

    def __str__(self):
        name = {"E+": "Estd+", "E-": "Estd-"}.get(self.kind, self.kind)
        if self.kind == "C":
            return f"C[{self.mu};{self.r}]"
        return f"{name}[{self.mu};{self.r},{self.s}]"

    @property
    def is_irreducible(self) -> bool:
        return self.kind in ("C", "D", "E")


def C(mu, r) -> CosetLabel:
    return CosetLabel("C", to_fraction(mu), r)


def D(mu, r, s) -> CosetLabel:
    return CosetLabel("D", to_fraction(mu), r, s)


def E(mu, r, s) -> CosetLabel:
    return CosetLabel("E", to_fraction(mu), r, s)


def Estd(sign: str, mu, r, s) -> CosetLabel:
    return CosetLabel("E" + sign, to_fraction(mu), r, s)


_LABEL_RE = re.compile(
    r"^\s*(?P<kind>C|D|E|Estd\+|Estd-)\[\s*(?P<mu>[-+]?\d+(?:/\d+)?)\s*;\s*(?P<r>\d+)\s*(?:,\s*(?P<s>\d+)\s*)?\]\s*$"
)


def parse_label(text: str) -> CosetLabel:
    m = _LABEL_RE.match(text)
    if not m:
        raise ValueError(f"cannot parse coset label {text!r}")
    kind = {"Estd+": "E+", "Estd-": "E-"}.get(m["kind"], m["kind"])
    mu = Fraction(m["mu"])
    r = int(m["r"])
    if kind == "C":
        if m["s"] is not None:
            raise ValueError(f"C labels take one integer, got {text!r}")
        return CosetLabel(kind, mu, r)
    if m["s"] is None:
        raise ValueError(f"{m['kind']} labels need r and s, got {text!r}")
    return CosetLabel(kind, mu, r, int(m["s"]))


def congruent_mod(a: Fraction, b: Fraction, modulus) -> bool:
    return ((a - b) / modulus).denominator == 1


def is_atypical_weight(level: Level, mu: Fraction, r: int, s: int) -> bool:
    u, v = level.u, level.v
    return congruent_mod(mu, level.lam(r, s), 2) or congruent_mod(mu, level.lam(u - r, v - s), 2)


def canonical(level: Level, label: CosetLabel) -> CosetLabel:
    """Apply range and parity checks plus the label identifications."""
    u, v, k = level.u, level.v, level.k
    kind, mu, r, s = label.kind, to_fraction(label.mu), label.r, label.s
    if kind not in KINDS:
        raise ValueError(f"unknown kind {kind!r}")
    if not 1 <= r <= u - 1:
        raise RangeError(f"r={r} outside 1..{u - 1}")
    if kind == "C":
        if not congruent_mod(mu, r - 1, 2):
            raise ParityMismatch(f"C[{mu};{r}] needs mu = r-1 mod 2")
        return CosetLabel("C", mu, r)
    if not 1 <= s <= v - 1:
        raise RangeError(f"s={s} outside 1..{v - 1}")
    if kind == "D":
        if not congruent_mod(mu, level.lam(r, s), 2):
            raise ParityMismatch(f"D[{mu};{r},{s}] needs mu = lambda_(r,s) mod 2")
        if s == v - 1:
            return CosetLabel("C", mu - k, u - r)
        return CosetLabel("D", mu, r, s)
    if kind == "E":
        if is_atypical_weight(level, mu, r, s):
            raise TypicalOnAtypicalWeight(f"E[{mu};{r},{s}] sits on an atypical weight")
        lab = minmod.kac_canonical(u, v, r, s)
        return CosetLabel("E", mu, lab.r, lab.s)
    base = level.lam(r, s) if kind == "E+" else level.lam(u - r, v - s)
    if not congruent_mod(mu, base, 2):
        raise ParityMismatch(f"{label} has the wrong weight class")
    return CosetLabel(kind, mu, r, s)


def is_canonical(level: Level, label: CosetLabel) -> bool:
    try:
        return canonical(level, label) == label
    except ValueError:
        return False


# -- conformal weights ---------------------------------------------------


def conformal_weight(level: Level, label: CosetLabel) -> Fraction:
    label = canonical(level, label)
    k = level.k
    mu, r, s = label.mu, label.r, label.s
    heis = mu * mu / (4 * k)
    if label.kind in ("E", "E+", "E-"):
        return level.delta(r, s) - heis
    if label.kind == "C":
        lam0 = level.lam(r, 0)
        extra = (abs(mu) - lam0) / 2 if abs(mu) >= lam0 else 0
        return level.delta(r, 0) - heis + extra
    lam = level.lam(r, s)
    extra = (mu - lam) / 2 if mu >= lam else 0
    return level.delta(r, s) - heis + extra


def ground_exponent(level: Level, label: CosetLabel) -> Fraction:
    """Leading exponent ``Delta - c~/24`` of the character."""
    return conformal_weight(level, label) - level.c_coset / 24


# -- characters -----------------------------------------------------------


def vir_over_eta(level: Level, r: int, s: int, order) -> QSeries:
    """``chi_{r,s} / eta`` truncated at ``order``."""
    return _VIR_OVER_ETA((level, r, s), order)


def _vir_over_eta(key, order):
    level, r, s = key
    u, v = level.u, level.v
    chi_val = minmod.h(u, v, r, s) - minmod.central_charge(u, v) / 24
    chi = minmod.min_char(u, v, r, s, order + Fraction(1, 24))
    return (chi * eta_inverse(order - chi_val)).truncate(order)


_VIR_OVER_ETA = SeriesCache(_vir_over_eta)


def vir_over_eta_valuation(level: Level, r: int, s: int) -> Fraction:
    u, v = level.u, level.v
    return minmod.h(u, v, r, s) - minmod.central_charge(u, v) / 24 - Fraction(1, 24)


def heis_exponent(level: Level, x: Fraction) -> Fraction:
    """``-x^2 / 4k``, nonnegative for negative k."""
    return -x * x / (4 * level.k)


def _times(level: Level, r: int, s: int, lattice: dict, order: Fraction) -> QSeries:
    pref = vir_over_eta(level, r, s, order)
    sub = order - vir_over_eta_valuation(level, r, s)
    return (pref * QSeries(lattice, sub)).truncate(order)


def _add_term(acc: dict, e: Fraction, c, bound: Fraction):
    if e <= bound:
        acc[e] = acc.get(e, 0) + c


def c_lattice_sum(level: Level, mu: Fraction, s: int, bound: Fraction, sign: int = 1) -> dict:
    """``sum_{m>=0} q^{-(mu - sk + 2wm)^2/4k} - q^{-(mu + sk + 2w(m+1))^2/4k}``.

    With ``sign=-1`` the step ``2w`` is replaced by ``-2w`` and the roles of
    ``+sk``/``-sk`` are exchanged (the conjugated resolution).
    """
    k, w = level.k, level.w
    acc: dict = {}
    m = 0
    while True:
        if sign > 0:
            a = mu - s * k + 2 * w * m
            b = mu + s * k + 2 * w * (m + 1)
            done = a > 0 and b > 0
        else:
            a = mu + s * k - 2 * w * m
            b = mu - s * k - 2 * w * (m + 1)
            done = a < 0 and b < 0
        ea, eb = heis_exponent(level, a), heis_exponent(level, b)
        if done and ea > bound and eb > bound:
            break
        _add_term(acc, ea, 1, bound)
        _add_term(acc, eb, -1, bound)
        m += 1
    return acc


def _check_order(level, label, order):
    if order < ground_exponent(level, label):
        raise TruncationBelowGroundState(
            f"order {order} lies below the ground state exponent of {label}"
        )


@lru_cache(maxsize=None)
def _character(level: Level, label: CosetLabel, order: Fraction, route: str) -> QSeries:
    u, v, k = level.u, level.v, level.k
    mu, r, s = label.mu, label.r, label.s
    if label.kind in ("E", "E+", "E-"):
        return _times(level, r, s, {heis_exponent(level, mu): 1}, order)
    if label.kind == "C":
        total = QSeries.zero(order)
        sign = 1 if route == "primary" else -1
        for s1 in range(1, v):
            sub = order - vir_over_eta_valuation(level, r, s1)
            lat = c_lattice_sum(level, mu, s1, sub, sign)
            total = total + _times(level, r, s1, lat, order).scale((-1) ** (s1 - 1))
        return total
    # D with s <= v-2
    total = QSeries.zero(order)
    for s1 in range(s + 1, v):
        term = _times(level, r, s1, {heis_exponent(level, mu - (s1 - s) * k): 1}, order)
        total = total + term.scale((-1) ** (s1 - s - 1))
    tail = _character(level, CosetLabel("C", mu - (v - s) * k, u - r), order, route)
    return total + tail.scale((-1) ** (v - 1 - s))


def character(level: Level, label: CosetLabel, order, route: str = "primary") -> QSeries:
    """Exact coset character truncated at ``order``.

    ``route="crosscheck"`` evaluates C-type pieces with the conjugated
    resolution instead; both routes must agree.
    """
    if route not in ("primary", "crosscheck"):
        raise ValueError(f"unknown route {route!r}")
    label = canonical(level, label)
    order = to_fraction(order)
    _check_order(level, label, order)
    return _character(level, label, order, route)


# -- Grothendieck classes and fusion --------------------------------------


def composition_factors(level: Level, label: CosetLabel) -> FusionElement:
    """Class of a module in terms of irreducible C, D (s<=v-2) and typical E."""
    label = canonical(level, label)
    u, v, k = level.u, level.v, level.k
    mu, r, s = label.mu, label.r, label.s
    if label.is_irreducible:
        return FusionElement.of(label)
    if label.kind == "E+":
        head = canonical(level, D(mu, r, s))
        sub = canonical(level, C(mu + k, r)) if s == 1 else canonical(level, D(mu + k, r, s - 1))
    else:
        head = canonical(level, D(mu, u - r, v - s))
        sub = (
            canonical(level, C(mu + k, u - r))
            if s == v - 1
            else canonical(level, D(mu + k, u - r, v - 1 - s))
        )
    out = FusionElement.of(head) + FusionElement.of(sub)
    out.notes.add("standard module resolved into composition factors")
    return out


def standard_class(level: Level, mu: Fraction, r: int, s: int) -> FusionElement:
    """Class of the standard module of weight ``mu`` attached to ``(r,s)``."""
    u, v = level.u, level.v
    if not is_atypical_weight(level, mu, r, s):
        return FusionElement.of(canonical(level, E(mu, r, s)))
    if congruent_mod(mu, level.lam(r, s), 2):
        return composition_factors(level, Estd("+", mu, r, s))
    return composition_factors(level, Estd("+", mu, u - r, v - s))


def _vir_fus(level: Level, a, b):
    """Kac-table fusion; empty when a label leaves the table (s = 0 or v)."""
    u, v = level.u, level.v
    for r, s in (a, b):
        if not (1 <= r <= u - 1 and 1 <= s <= v - 1):
            return {}
    return minmod.fusion_coeffs(u, v, a, b)


def fuse_with_C(level: Level, c: CosetLabel, x: CosetLabel) -> FusionElement:
    """Genuine fusion of ``C[mu;r]`` with an irreducible label."""
    c = canonical(level, c)
    x = canonical(level, x)
    if c.kind != "C":
        raise UnnormalizedLabel(f"{c} is not of C type")
    if not x.is_irreducible:
        raise UnnormalizedLabel(f"fusion with {x} is only known in the Grothendieck ring")
    out = FusionElement()
    for r2 in minmod.su2_fusion_range(level.u, c.r, x.r):
        if x.kind == "C":
            out.add(canonical(level, C(c.mu + x.mu, r2)))
        elif x.kind == "D":
            out.add(canonical(level, D(c.mu + x.mu, r2, x.s)))
        else:
            out.add(canonical(level, E(c.mu + x.mu, r2, x.s)))
    return out


def _gr_irreducible(level: Level, a: CosetLabel, b: CosetLabel) -> FusionElement:
    u, v, k = level.u, level.v, level.k
    if a.kind == "C":
        return fuse_with_C(level, a, b)
    if b.kind == "C":
        return fuse_with_C(level, b, a)
    if a.kind == "D" and b.kind == "E":
        a, b = b, a
    out = FusionElement()
    m = a.mu + b.mu
    (r, s), (r1, s1) = (a.r, a.s), (b.r, b.s)

    def typ(coeffs, weight):
        for lab, n in coeffs.items():
            out_add(standard_class(level, weight, lab.r, lab.s), n)

    def out_add(elem, n):
        nonlocal out
        out = out + elem.scaled(n)

    if a.kind == "E" and b.kind == "E":
        main = _vir_fus(level, (r, s), (r1, s1))
        typ(main, m - k)
        typ(main, m + k)
        typ(_vir_fus(level, (r, s), (r1, s1 - 1)), m)
        typ(_vir_fus(level, (r, s), (r1, s1 + 1)), m)
        return out
    if a.kind == "E" and b.kind == "D":
        typ(_vir_fus(level, (r, s), (r1, s1 + 1)), m)
        typ(_vir_fus(level, (r, s), (r1, s1)), m - k)
        return out
    # D x D
    if s + s1 < v:
        typ(_vir_fus(level, (r, s), (r1, s1)), m - k)
        for r2 in minmod.su2_fusion_range(u, r, r1):
            out.add(canonical(level, D(m, r2, s + s1)))
    else:
        typ(_vir_fus(level, (r, s + 1), (r1, s1 + 1)), m - k)
        for r2 in minmod.su2_fusion_range(u, r, r1):
            out.add(canonical(level, D(m - k, u - r2, s + s1 - v + 1)))
    return out


def gr_fuse(level: Level, a, b) -> FusionElement:
    """Grothendieck fusion product of two labels or ring elements."""
    x = a if isinstance(a, FusionElement) else composition_factors(level, a)
    y = b if isinstance(b, FusionElement) else composition_factors(level, b)
    return bilinear(lambda p, q: _gr_irreducible(level, p, q), x, y)


# -- families -------------------------------------------------------------


@dataclass(frozen=True)
class Family:
    kind: str
    r: int
    s: int
    base: Fraction | None  # mu ranges over base + 2Z (None for typicals)
    excluded: tuple = ()  # typicals: mu avoids these classes mod 2

    def describe(self) -> str:
        if self.kind == "C":
            return f"C[mu;{self.r}], mu in {self.base} + 2Z"
        if self.kind == "D":
            return f"D[mu;{self.r},{self.s}], mu in {self.base} + 2Z"
        ex = ", ".join(str(x) for x in self.excluded)
        return f"E[mu;{self.r},{self.s}], mu not in {{{ex}}} + 2Z"


def _mod2(x: Fraction) -> Fraction:
    return x - 2 * math.floor(x / 2)


def enumerate_families(level: Level) -> list[Family]:
    """Families of inequivalent irreducible coset modules.

    Typical representatives use the canonical Kac label, except at
    ``k = -(n-1)/n`` where the classic choice (smaller ``r`` for even ``n``,
    smaller ``s`` for odd ``n``) is used.
    """
    u, v = level.u, level.v
    fams = [Family("C", r, 0, _mod2(Fraction(r - 1))) for r in range(1, u)]
    fams += [Family("D", r, s, _mod2(level.lam(r, s))) for r in range(1, u) for s in range(1, v - 1)]
    if u == v + 1:
        n = v
        if n % 2 == 0:
            pairs = [(r, s) for r in range(1, n // 2 + 1) for s in range(1, n)]
        else:
            pairs = [(r, s) for r in range(1, n + 1) for s in range(1, (n - 1) // 2 + 1)]
    else:
        pairs = [(lab.r, lab.s) for lab in minmod.kac_table(u, v)]
    for r, s in pairs:
        ex = tuple(sorted({_mod2(level.lam(r, s)), _mod2(level.lam(u - r, v - s))}))
        fams.append(Family("E", r, s, None, ex))
    return fams


def family_of(level: Level, label: CosetLabel) -> Family:
    """Family containing an irreducible canonical label."""
    label = canonical(level, label)
    u, v = level.u, level.v
    for fam in enumerate_families(level):
        if fam.kind != label.kind:
            continue
        if fam.kind in ("C", "D"):
            if (fam.r, fam.s) == (label.r, label.s) and congruent_mod(label.mu, fam.base, 2):
                return fam
        elif minmod.kac_canonical(u, v, fam.r, fam.s) == minmod.kac_canonical(u, v, label.r, label.s):
            return fam
    raise ValueError(f"no family for {label}")
