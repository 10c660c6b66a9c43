"""Weight-graded sl(2) characters at negative admissible level.

Affine labels carry a spectral-flow exponent ``flow`` and use the grammar
``sf^l(L[r])``, ``sf^l(D+[r,s])``, ``sf^l(D-[r,s])``, ``sf^l(E[lam;r,s])``,
``sf^l(Estd+[r,s])`` and ``sf^l(Estd-[r,s])``; the ``sf^l(...)`` wrapper may
be omitted when ``l = 0``.

Characters are only ever computed on an explicit finite window of weights.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction

from . import coset as cs
from . import minmod
from .fusion import FusionElement, UnnormalizedLabel, bilinear
from .level import Level
from .qseries import QSeries, SeriesCache, eta_inverse, to_fraction

KINDS = ("L", "D+", "D-", "E", "E+", "E-")


class WeightNotInSupport(ValueError):
    pass


def weights(level: Level, r: int, s: int) -> tuple[Fraction, Fraction]:
    """``(lambda_{r,s}, Delta_{r,s})``."""
    if not (1 <= r <= level.u - 1 and 0 <= s <= level.v - 1):
        raise cs.RangeError(f"(r,s)=({r},{s}) out of range")
    return level.lam(r, s), level.delta(r, s)


def mod2(x: Fraction) -> Fraction:
    return x - 2 * math.floor(x / 2)


@dataclass(frozen=True)
class AffineLabel:
    kind: str
    r: int
    s: int = 0
    lam: Fraction | None = None
    flow: int = 0

    def __str__(self):
        body = {
            "L": f"L[{self.r}]",
            "D+": f"D+[{self.r},{self.s}]",
            "D-": f"D-[{self.r},{self.s}]",
            "E": f"E[{self.lam};{self.r},{self.s}]",
            "E+": f"Estd+[{self.r},{self.s}]",
            "E-": f"Estd-[{self.r},{self.s}]",
        }[self.kind]
        return body if self.flow == 0 else f"sf^{self.flow}({body})"

    def flowed(self, n: int) -> "AffineLabel":
        return AffineLabel(self.kind, self.r, self.s, self.lam, self.flow + n)

    @property
    def is_irreducible(self) -> bool:
        return self.kind in ("L", "D+", "D-", "E")


def L(r, flow=0):
    return AffineLabel("L", r, 0, None, flow)


def Dplus(r, s, flow=0):
    return AffineLabel("D+", r, s, None, flow)


def Dminus(r, s, flow=0):
    return AffineLabel("D-", r, s, None, flow)


def Etyp(lam, r, s, flow=0):
    return AffineLabel("E", r, s, to_fraction(lam), flow)


def Estd(sign, r, s, flow=0):
    return AffineLabel("E" + sign, r, s, None, flow)


_BODY_RE = re.compile(
    r"^(?P<kind>L|D\+|D-|E|Estd\+|Estd-)\[\s*(?:(?P<lam>[-+]?\d+(?:/\d+)?)\s*;\s*)?(?P<r>\d+)\s*(?:,\s*(?P<s>\d+)\s*)?\]$"
)
_SF_RE = re.compile(r"^sf\^(?P<l>[-+]?\d+)\((?P<body>.*)\)$")


def parse_label(text: str) -> AffineLabel:
    text = text.strip().replace(" ", "")
    flow = 0
    m = _SF_RE.match(text)
    if m:
        flow, text = int(m["l"]), m["body"]
    b = _BODY_RE.match(text)
    if not b:
        raise ValueError(f"cannot parse affine label {text!r}")
    kind = {"Estd+": "E+", "Estd-": "E-"}.get(b["kind"], b["kind"])
    r = int(b["r"])
    s = None if b["s"] is None else int(b["s"])
    lam = None if b["lam"] is None else Fraction(b["lam"])
    if (kind == "E") != (lam is not None):
        raise ValueError(f"only E labels carry a weight: {text!r}")
    if (kind == "L") != (s is None):
        raise ValueError(f"wrong number of indices in {text!r}")
    return AffineLabel(kind, r, s or 0, lam, flow)


def _check_ranges(level: Level, label: AffineLabel):
    if label.kind not in KINDS:
        raise ValueError(f"unknown kind {label.kind!r}")
    if not 1 <= label.r <= level.u - 1:
        raise cs.RangeError(f"r={label.r} outside 1..{level.u - 1}")
    if label.kind != "L" and not 1 <= label.s <= level.v - 1:
        raise cs.RangeError(f"s={label.s} outside 1..{level.v - 1}")


def weight_class(level: Level, label: AffineLabel) -> Fraction:
    """Representative in [0,2) of the unflowed weights of ``label``."""
    _check_ranges(level, label)
    u, v, r, s = level.u, level.v, label.r, label.s
    base = {
        "L": lambda: Fraction(r - 1),
        "D+": lambda: level.lam(r, s),
        "D-": lambda: -level.lam(r, s),
        "E": lambda: label.lam,
        "E+": lambda: level.lam(r, s),
        "E-": lambda: level.lam(u - r, v - s),
    }[label.kind]()
    return mod2(base)


def canonical(level: Level, label: AffineLabel) -> AffineLabel:
    """Apply the spectral-flow identifications and the Kac symmetry.

    ``D-`` labels are rewritten through ``sf^-1(D+[r,s]) = D-[u-r,v-1-s]`` and
    ``sf^-1(L[r]) = D-[u-r,v-1]``; ``D+[r,v-1]`` becomes ``sf(L[u-r])``.
    """
    _check_ranges(level, label)
    u, v, r, s, n = level.u, level.v, label.r, label.s, label.flow
    if label.kind == "L":
        return label
    if label.kind == "D-":
        if s == v - 1:
            return L(u - r, n - 1)
        return canonical(level, Dplus(u - r, v - 1 - s, n - 1))
    if label.kind == "D+":
        if s == v - 1:
            return L(u - r, n + 1)
        return label
    if label.kind == "E":
        lam = mod2(to_fraction(label.lam))
        if cs.is_atypical_weight(level, lam, r, s):
            raise cs.TypicalOnAtypicalWeight(f"{label} sits on an atypical weight")
        lab = minmod.kac_canonical(u, v, r, s)
        return Etyp(lam, lab.r, lab.s, n)
    return label


# -- weighted characters ----------------------------------------------------


@dataclass
class WeightedCharacter:
    """Components ``weight -> QSeries`` on a finite window.

    Weights outside the window are unknown, not zero.
    """

    level: Level
    components: dict = field(default_factory=dict)
    flow: int = 0

    @property
    def window(self) -> list[Fraction]:
        return sorted(self.components)

    def __getitem__(self, weight) -> QSeries:
        return self.components[to_fraction(weight)]

    def agrees_with(self, other: "WeightedCharacter", order=None) -> bool:
        return self.first_difference(other, order) is None

    def first_difference(self, other: "WeightedCharacter", order=None):
        """First ``(weight, exponent)`` on the shared window where the two differ."""
        for mu in sorted(set(self.components) & set(other.components)):
            e = self.components[mu].first_difference(other.components[mu], order)
            if e is not None:
                return mu, e
        return None

    def __add__(self, other):
        comps = dict(self.components)
        for mu, x in other.components.items():
            comps[mu] = comps[mu] + x if mu in comps else x
        return WeightedCharacter(self.level, comps, self.flow)

    def scale(self, c) -> "WeightedCharacter":
        return WeightedCharacter(self.level, {mu: x.scale(c) for mu, x in self.components.items()}, self.flow)


def _in_class(level: Level, label: AffineLabel, nu: Fraction) -> bool:
    return cs.congruent_mod(nu - label.flow * level.k, weight_class(level, label), 2)


def support_window(level: Level, label: AffineLabel, center, size: int) -> list[Fraction]:
    """``size`` consecutive weights of the support, starting near ``center``."""
    base = weight_class(level, label) + label.flow * level.k
    start = base + 2 * math.floor((to_fraction(center) - base) / 2)
    return [start + 2 * i for i in range(size)]


def vir_over_eta2(level: Level, r: int, s: int, order) -> QSeries:
    """``chi_{r,s} / eta^2``."""
    return _VIR_OVER_ETA2((level, r, s), order)


def _vir_over_eta2(key, order):
    level, r, s = key
    val = cs.vir_over_eta_valuation(level, r, s)
    a = cs.vir_over_eta(level, r, s, order + Fraction(1, 24))
    return (a * eta_inverse(order - val)).truncate(order)


_VIR_OVER_ETA2 = SeriesCache(_vir_over_eta2)


def _std_component(level: Level, r: int, s: int, flow: int, mu: Fraction, order: Fraction) -> QSeries:
    """``q^{flow^2 k/4 + flow mu/2} chi_{r,s}/eta^2``: weight ``mu + flow k`` of a standard."""
    e = level.k * flow * flow / 4 + flow * mu / 2
    return vir_over_eta2(level, r, s, order - e).shift(e)


def _std_valuation(level: Level, r: int, s: int, flow: int, mu: Fraction) -> Fraction:
    return level.k * flow * flow / 4 + flow * mu / 2 + cs.vir_over_eta_valuation(level, r, s) - Fraction(1, 24)


def std_weighted_char(level: Level, label: AffineLabel, window, order) -> WeightedCharacter:
    """Character of a typical or atypical standard module on ``window``."""
    if label.kind not in ("E", "E+", "E-"):
        raise UnnormalizedLabel(f"{label} is not a standard module")
    order = to_fraction(order)
    u, v = level.u, level.v
    r, s = label.r, label.s
    if label.kind == "E-":
        r, s = u - r, v - s
    comps = {}
    for nu in map(to_fraction, window):
        if not _in_class(level, label, nu):
            raise WeightNotInSupport(f"weight {nu} is not in the support of {label}")
        mu = nu - label.flow * level.k
        comps[nu] = _std_component(level, r, s, label.flow, mu, order)
    return WeightedCharacter(level, comps, label.flow)


def fock_prefactor(level: Level, nu: Fraction, order: Fraction) -> QSeries:
    """``q^{nu^2/4k} / eta``."""
    e = nu * nu / (4 * level.k)
    return eta_inverse(order - e).shift(e)


def coset_component(level: Level, label: AffineLabel, nu: Fraction) -> cs.CosetLabel:
    """Coset module paired with the Fock space of weight ``nu`` (not for ``D-``)."""
    mu = nu - label.flow * level.k
    r, s = label.r, label.s
    make = {
        "L": lambda: cs.C(mu, r),
        "D+": lambda: cs.D(mu, r, s),
        "E": lambda: cs.E(mu, r, s),
        "E+": lambda: cs.Estd("+", mu, r, s),
        "E-": lambda: cs.Estd("-", mu, r, s),
    }
    if label.kind not in make:
        raise UnnormalizedLabel(f"{label} has no direct coset decomposition; canonicalize it first")
    return cs.canonical(level, make[label.kind]())


def lifts(level: Level, nu, coset_label: cs.CosetLabel) -> bool:
    """Whether ``F_nu (x) X`` lifts to an sl(2) module: ``nu - mu`` in ``kZ``."""
    return ((to_fraction(nu) - coset_label.mu) / level.k).denominator == 1


def decompose(level: Level, label: AffineLabel, window) -> list[tuple[Fraction, cs.CosetLabel]]:
    """Pairs ``(fock weight, coset label)`` of ``label`` inside ``window``."""
    if label.kind == "D-":
        label = canonical(level, label)
    out = []
    for nu in map(to_fraction, window):
        if _in_class(level, label, nu):
            out.append((nu, coset_component(level, label, nu)))
    return out


def _component_via_coset(level, label, nu, order):
    pref = fock_prefactor(level, nu, order)
    lab = coset_component(level, label, nu)
    sub = order - pref.valuation()
    if sub < cs.ground_exponent(level, lab):
        return QSeries.zero(order)
    return (pref * cs.character(level, lab, sub)).truncate(order)


def _resolution_component(level: Level, label: AffineLabel, nu: Fraction, order: Fraction) -> QSeries:
    """One weight of an atypical irreducible via flowed atypical standards."""
    u, v, k = level.u, level.v, level.k
    flow, r = label.flow, label.r
    total = QSeries.zero(order)

    def term(rr, ss, n):
        mu = nu - n * k
        if not cs.congruent_mod(mu, level.lam(rr, ss), 2):
            return None
        if _std_valuation(level, rr, ss, n, mu) > order:
            return QSeries.zero(order)
        return _std_component(level, rr, ss, n, mu, order)

    if label.kind == "D+":
        s = label.s
        for s1 in range(s + 1, v):
            x = term(r, s1, s1 - s + flow)
            if x is not None:
                total = total + x.scale((-1) ** (s1 - s - 1))
        tail = _resolution_component(level, L(u - r, v - s + flow), nu, order)
        return total + tail.scale((-1) ** (v - 1 - s))

    # L: the flows grow linearly in m and the valuations quadratically
    m = 0
    while True:
        alive = False
        for s1 in range(1, v):
            for rr, ss, n, sign in (
                (r, s1, 2 * m * v + s1 + flow, 1),
                (u - r, v - s1, 2 * (m + 1) * v - s1 + flow, -1),
            ):
                mu = nu - n * k
                if n * (-k) <= abs(nu) + 1 or _std_valuation(level, rr, ss, n, mu) <= order:
                    alive = True
                x = term(rr, ss, n)
                if x is not None:
                    total = total + x.scale(sign * (-1) ** (s1 - 1))
        if not alive:
            break
        m += 1
    return total


def irr_weighted_char(level: Level, label: AffineLabel, window, order, route: str = "decomposition") -> WeightedCharacter:
    """Character of an atypical irreducible (``L``, ``D+`` or ``D-``) on ``window``.

    ``route="decomposition"`` pairs Fock characters with coset characters;
    ``route="resolution"`` sums flowed atypical standards instead.
    """
    if label.kind not in ("L", "D+", "D-"):
        raise UnnormalizedLabel(f"{label} is not an atypical irreducible")
    if route not in ("decomposition", "resolution"):
        raise ValueError(f"unknown route {route!r}")
    _check_ranges(level, label)
    order = to_fraction(order)
    window = [to_fraction(x) for x in window]
    if label.kind == "D-":
        # sf^l(D-) is the conjugate of sf^-l(D+)
        plus = Dplus(label.r, label.s, -label.flow)
        return conjugate(irr_weighted_char(level, plus, [-x for x in window], order, route))
    comps = {}
    for nu in window:
        if not _in_class(level, label, nu):
            raise WeightNotInSupport(f"weight {nu} is not in the support of {label}")
        if route == "decomposition":
            comps[nu] = _component_via_coset(level, label, nu, order)
        else:
            comps[nu] = _resolution_component(level, label, nu, order)
    return WeightedCharacter(level, comps, label.flow)


def weighted_char(level: Level, label: AffineLabel, window, order) -> WeightedCharacter:
    if label.kind in ("E", "E+", "E-"):
        return std_weighted_char(level, label, window, order)
    return irr_weighted_char(level, label, window, order)


def spectral_flow(chi: WeightedCharacter, n: int) -> WeightedCharacter:
    """Twist by ``sigma^n``: weight ``mu`` moves to ``mu + n k`` times ``q^{n^2 k/4 + n mu/2}``."""
    k = chi.level.k
    comps = {}
    for mu, x in chi.components.items():
        comps[mu + n * k] = x.shift(n * n * k / 4 + n * mu / 2)
    return WeightedCharacter(chi.level, comps, chi.flow + n)


def conjugate(chi: WeightedCharacter) -> WeightedCharacter:
    return WeightedCharacter(chi.level, {-mu: x for mu, x in chi.components.items()}, -chi.flow)


# -- Grothendieck fusion ------------------------------------------------------


def composition_factors(level: Level, label: AffineLabel) -> FusionElement:
    label = canonical(level, label)
    if label.is_irreducible:
        return FusionElement.of(label)
    u, v, r, s, n = level.u, level.v, label.r, label.s, label.flow
    if label.kind == "E+":
        parts = [Dplus(r, s, n), Dminus(u - r, v - s, n)]
    else:
        parts = [Dminus(r, s, n), Dplus(u - r, v - s, n)]
    out = FusionElement()
    for p in parts:
        out.add(canonical(level, p))
    out.notes.add("standard module resolved into composition factors")
    return out


def standard_class(level: Level, lam: Fraction, r: int, s: int, flow: int) -> FusionElement:
    """Class of the standard ``sf^flow`` module of weight class ``lam``."""
    u, v = level.u, level.v
    lam = mod2(lam)
    if not cs.is_atypical_weight(level, lam, r, s):
        return FusionElement.of(canonical(level, Etyp(lam, r, s, flow)))
    if cs.congruent_mod(lam, level.lam(r, s), 2):
        return composition_factors(level, Estd("+", r, s, flow))
    return composition_factors(level, Estd("+", u - r, v - s, flow))


def _lam(level: Level, label: AffineLabel) -> Fraction:
    if label.kind == "L":
        return Fraction(label.r - 1)
    if label.kind == "D+":
        return level.lam(label.r, label.s)
    return label.lam


def _fuse_with_L(level: Level, a: AffineLabel, b: AffineLabel) -> FusionElement:
    out = FusionElement()
    n = a.flow + b.flow
    for r2 in minmod.su2_fusion_range(level.u, a.r, b.r):
        if b.kind == "L":
            out.add(L(r2, n))
        elif b.kind == "D+":
            out.add(canonical(level, Dplus(r2, b.s, n)))
        else:
            out.add(canonical(level, Etyp(a.r - 1 + b.lam, r2, b.s, n)))
    return out


def _gr_irreducible(level: Level, a: AffineLabel, b: AffineLabel) -> FusionElement:
    u, v, k = level.u, level.v, level.k
    if a.kind == "L":
        return _fuse_with_L(level, a, b)
    if b.kind == "L":
        return _fuse_with_L(level, b, a)
    if a.kind == "D+" and b.kind == "E":
        a, b = b, a
    n = a.flow + b.flow
    lam = _lam(level, a) + _lam(level, b)
    (r, s), (r1, s1) = (a.r, a.s), (b.r, b.s)
    out = FusionElement()

    def typ(coeffs, weight, flow):
        nonlocal out
        for lab, c in coeffs.items():
            out = out + standard_class(level, weight, lab.r, lab.s, flow).scaled(c)

    vf = lambda x, y: cs._vir_fus(level, x, y)
    if a.kind == "E" and b.kind == "E":
        main = vf((r, s), (r1, s1))
        typ(main, lam - k, n + 1)
        typ(main, lam + k, n - 1)
        typ(vf((r, s), (r1, s1 - 1)), lam, n)
        typ(vf((r, s), (r1, s1 + 1)), lam, n)
        return out
    if a.kind == "E" and b.kind == "D+":
        typ(vf((r, s), (r1, s1 + 1)), lam, n)
        typ(vf((r, s), (r1, s1)), lam - k, n + 1)
        return out
    if s + s1 < v:
        typ(vf((r, s), (r1, s1)), lam - k, n + 1)
        for r2 in minmod.su2_fusion_range(u, r, r1):
            out.add(canonical(level, Dplus(r2, s + s1, n)))
    else:
        typ(vf((r, s + 1), (r1, s1 + 1)), lam - k, n + 1)
        for r2 in minmod.su2_fusion_range(u, r, r1):
            out.add(canonical(level, Dplus(u - r2, s + s1 - v + 1, n + 1)))
    return out


def gr_fuse_affine(level: Level, a, b) -> FusionElement:
    """Grothendieck fusion; products with ``sf^l(L[r])`` are genuine fusion rules."""
    x = a if isinstance(a, FusionElement) else composition_factors(level, a)
    y = b if isinstance(b, FusionElement) else composition_factors(level, b)
    return bilinear(lambda p, q: _gr_irreducible(level, p, q), x, y)
