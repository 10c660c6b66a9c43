"""Extended parafermion coset ``B_k``: theta functions, characters, S/T data.

``B_k`` is the simple current extension of the coset by ``C[mu;1]`` with
``mu`` in ``L = 2wZ``.  Its modules are labelled like coset modules with
``mu`` reduced modulo ``L``; the grammar is ``B.C[mu;r]``, ``B.D[mu;r,s]``,
``B.E[mu;r,s]``, ``B.Estd+[mu;r,s]`` and ``B.Estd-[mu;r,s]``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath

from . import coset as cs
from . import minmod
from .fusion import FusionElement
from .level import Level
from .qseries import QSeries, to_fraction


class NotLiftable(ValueError):
    pass


# -- lattice theta functions --------------------------------------------------


def _heis(level: Level, x: Fraction) -> Fraction:
    return -x * x / (4 * level.k)


def _lattice_range(level: Level, x: Fraction, bound: Fraction) -> range:
    """All ``l`` with ``-(x - 2wl)^2/4k <= bound``."""
    w = level.w
    if bound < 0:
        return range(0)
    # (x - 2wl)^2 <= -4k bound = R^2
    r2 = -4 * level.k * bound
    rad = math.isqrt(math.floor(r2)) + 1
    lo = math.floor((x - rad) / (2 * w)) - 1
    hi = math.ceil((x + rad) / (2 * w)) + 1
    return range(lo, hi + 1)


@lru_cache(maxsize=None)
def _theta(level: Level, mu: Fraction, order: Fraction) -> QSeries:
    terms: dict = {}
    for l in _lattice_range(level, mu, order):
        e = _heis(level, mu - 2 * level.w * l)
        if e <= order:
            terms[e] = terms.get(e, 0) + 1
    return QSeries(terms, order)


@lru_cache(maxsize=None)
def _dtheta(level: Level, mu: Fraction, order: Fraction) -> QSeries:
    w = level.w
    terms: dict = {}
    for l in _lattice_range(level, mu, order):
        e = _heis(level, mu - 2 * w * l)
        if e <= order:
            terms[e] = terms.get(e, 0) + Fraction(l) - mu / (2 * w)
    return QSeries(terms, order)


def theta(level: Level, mu, order, deriv: bool = False) -> QSeries:
    """``theta_{mu+L}(q)`` at ``z = 1``, or its derivative ``-(z d/dz)/2w`` theta."""
    mu, order = to_fraction(mu), to_fraction(order)
    return (_dtheta if deriv else _theta)(level, mu, order)


def theta_identity_sum(level: Level, mu, order) -> QSeries:
    """One-sided form ``sum_{l>=0} q^{-(mu-2wl)^2/4k} + q^{-(mu+2w(l+1))^2/4k}``."""
    mu, order = to_fraction(mu), to_fraction(order)
    w = level.w
    terms: dict = {}
    l = 0
    while True:
        a, b = mu - 2 * w * l, mu + 2 * w * (l + 1)
        ea, eb = _heis(level, a), _heis(level, b)
        if a < 0 and b > 0 and ea > order and eb > order:
            break
        for e in (ea, eb):
            if e <= order:
                terms[e] = terms.get(e, 0) + 1
        l += 1
    return QSeries(terms, order)


def A_series(level: Level, lam, order, route: str = "closed") -> QSeries:
    """``A_lambda`` as ``2 dtheta + (1 + lambda/w) theta`` or by resummation."""
    lam, order = to_fraction(lam), to_fraction(order)
    if route == "closed":
        return theta(level, lam, order, True).scale(2) + theta(level, lam, order).scale(1 + lam / level.w)
    if route != "resummation":
        raise ValueError(f"unknown route {route!r}")
    plus = _A_plus(level, lam, order)
    return plus + plus + _A_minus_correction(level, lam, order)


def _A_plus(level: Level, lam: Fraction, order: Fraction) -> QSeries:
    """Brute-force double sum over ``l, m >= 0``."""
    w = level.w
    terms: dict = {}
    n = 0
    while True:
        a, b = lam - 2 * w * n, lam + 2 * w * (n + 1)
        ea, eb = _heis(level, a), _heis(level, b)
        if a < 0 and ea > order and eb > order:
            break
        # n + 1 pairs (l, m) with l + m = n
        if ea <= order:
            terms[ea] = terms.get(ea, 0) + n + 1
        if eb <= order:
            terms[eb] = terms.get(eb, 0) - n - 1
        n += 1
    return QSeries(terms, order)


def _A_minus_correction(level: Level, lam: Fraction, order: Fraction) -> QSeries:
    """``A^- - A^+``: inner finite sums over ``n = -2l-1..-1`` taken term by term."""
    w = level.w
    terms: dict = {}
    l = 0
    quiet = 0
    while quiet < 2:
        block: dict = {}
        for n in range(-2 * l - 1, 0):
            for x, sign in ((lam - 2 * w * (l + n), 1), (lam + 2 * w * (l + n + 1), -1)):
                e = _heis(level, x)
                if e <= order:
                    block[e] = block.get(e, 0) + sign
        block = {e: c for e, c in block.items() if c}
        for e, c in block.items():
            terms[e] = terms.get(e, 0) + c
        # the block's outermost terms grow with l; stop once two blocks vanish
        edge = min(_heis(level, lam + 2 * w * (l + 1)), _heis(level, lam - 2 * w * l))
        quiet = quiet + 1 if (not block and edge > order) else 0
        l += 1
    return QSeries(terms, order)


# -- labels -------------------------------------------------------------------


@dataclass(frozen=True)
class ExtLabel:
    kind: str
    mu: Fraction
    r: int
    s: int = 0

    def __str__(self):
        return "B." + str(self.coset())

    def coset(self) -> cs.CosetLabel:
        return cs.CosetLabel(self.kind, self.mu, self.r, self.s)


def parse_label(text: str) -> ExtLabel:
    text = text.strip()
    if not text.startswith("B."):
        raise ValueError(f"extended labels start with 'B.': {text!r}")
    c = cs.parse_label(text[2:])
    return ExtLabel(c.kind, c.mu, c.r, c.s)


def reduce_mod_L(level: Level, mu: Fraction) -> Fraction:
    m = 2 * level.w
    return mu - m * math.floor(mu / m)


def in_dual_lattice(level: Level, mu: Fraction) -> bool:
    return (to_fraction(mu) * level.v).denominator == 1


def lifts(level: Level, label: cs.CosetLabel) -> bool:
    """Whether the coset module induces to a ``B_k`` module."""
    label = cs.canonical(level, label)
    if label.kind == "E":
        return in_dual_lattice(level, label.mu)
    return True


def canonical(level: Level, label) -> ExtLabel:
    if isinstance(label, ExtLabel):
        label = label.coset()
    c = cs.canonical(level, label)
    if not lifts(level, c):
        raise NotLiftable(f"{c} does not lift: mu is not in (1/v)Z")
    c = cs.canonical(level, cs.CosetLabel(c.kind, reduce_mod_L(level, c.mu), c.r, c.s))
    return ExtLabel(c.kind, reduce_mod_L(level, c.mu), c.r, c.s)


def from_coset(level: Level, label: cs.CosetLabel) -> ExtLabel:
    return canonical(level, label)


def enumerate_modules(level: Level) -> list[ExtLabel]:
    """All inequivalent irreducible ``B_k`` modules, C then D then typical."""
    u, v, w = level.u, level.v, level.w
    out = []
    for r in range(1, u):
        out += [ExtLabel("C", Fraction(m), r) for m in range(2 * w) if (m - r + 1) % 2 == 0]
    for r in range(1, u):
        for s in range(1, v - 1):
            base = cs._mod2(level.lam(r, s))
            out += [ExtLabel("D", base + 2 * j, r, s) for j in range(w)]
    for lab in minmod.kac_table(u, v):
        for n in range(2 * w * v):
            mu = Fraction(n, v)
            if not cs.is_atypical_weight(level, mu, lab.r, lab.s):
                out.append(ExtLabel("E", mu, lab.r, lab.s))
    return out


def counts(level: Level) -> tuple[int, int, int]:
    mods = enumerate_modules(level)
    return tuple(sum(1 for m in mods if m.kind == k) for k in ("C", "D", "E"))


# -- conformal weights -----------------------------------------------------------


def _constituent(level: Level, label: ExtLabel, lam: Fraction) -> cs.CosetLabel:
    return cs.canonical(level, cs.CosetLabel(label.kind, lam, label.r, label.s))


def _coset_reps(level: Level, label: ExtLabel, order: Fraction) -> list[cs.CosetLabel]:
    """Coset constituents in ``label.mu + L`` whose ground exponent is at most ``order``.

    Ground exponents increase with ``|lambda|``, so the scan stops at the
    first shell lying entirely above ``order``.
    """
    w = level.w
    found = []
    for l in range(0, 10**6):
        shell = [_constituent(level, label, lam) for lam in (label.mu + 2 * w * l, label.mu - 2 * w * (l + 1))]
        inside = [c for c in shell if cs.ground_exponent(level, c) <= order]
        found += inside
        if not inside and l > 0:
            return found
    raise RuntimeError("lattice scan did not terminate")


def conformal_weight(level: Level, label) -> Fraction:
    """Minimal conformal weight over the constituents ``mu + L``."""
    label = canonical(level, label)
    w = level.w
    lams = [label.mu + 2 * w * l for l in range(-2, 3)]
    return min(cs.conformal_weight(level, _constituent(level, label, lam)) for lam in lams)


def simple_currents(level: Level) -> list[ExtLabel]:
    """``B.C[mu;1]`` (mu in 2Z) and ``B.C[mu;u-1]`` (mu = u-2 mod 2), modulo ``L``."""
    u, w = level.u, level.w
    out = [ExtLabel("C", Fraction(m), 1) for m in range(0, 2 * w, 2)]
    out += [ExtLabel("C", Fraction(m), u - 1) for m in range(2 * w) if (m - u) % 2 == 0]
    return out


def sector_weight(level: Level, label) -> Fraction:
    """Minimal conformal weight over the simple-current orbit of ``label``."""
    label = canonical(level, label)
    orbit = set()
    for j in simple_currents(level):
        orbit |= set(gr_fuse_ext(level, j, label))
    return min(conformal_weight(level, x) for x in orbit)


# -- characters -------------------------------------------------------------------


def _vir_times(level: Level, r: int, s: int, series_fn, order: Fraction) -> QSeries:
    val = cs.vir_over_eta_valuation(level, r, s)
    return (cs.vir_over_eta(level, r, s, order) * series_fn(order - val)).truncate(order)


def std_char(level: Level, mu, r: int, s: int, order) -> QSeries:
    """``(chi_{r,s}/eta) theta_{mu+L}``."""
    mu, order = to_fraction(mu), to_fraction(order)
    return _vir_times(level, r, s, lambda n: theta(level, mu, n), order)


def gamma(level: Level, mu, r: int, order) -> QSeries:
    """Weight-one part ``Gamma_{mu;r}`` of the ``C`` type character."""
    mu, order = to_fraction(mu), to_fraction(order)
    if not cs.congruent_mod(mu, r - 1, 2):
        raise cs.ParityMismatch(f"Gamma needs mu = r-1 mod 2, got ({mu};{r})")
    k = level.k
    total = QSeries.zero(order)
    for s in range(1, level.v):
        def part(n, s=s):
            return theta(level, mu + s * k, n, True) - theta(level, mu - s * k, n, True)
        total = total + _vir_times(level, r, s, part, order).scale((-1) ** (s - 1))
    return total


@dataclass
class Decomposition:
    """``ch = sum gamma[(mu, r)] Gamma_{mu;r} + sum std[(mu, r, s)] std_char``.

    Gamma indices are reduced to the spanning set and standard weights to
    ``ell/v`` with ``0 <= ell <= p``.
    """

    gamma: dict
    std: dict

    def assemble(self, level: Level, order) -> QSeries:
        order = to_fraction(order)
        total = QSeries.zero(order)
        for (mu, r), c in self.gamma.items():
            total = total + gamma(level, mu, r, order).scale(c)
        for (mu, r, s), c in self.std.items():
            total = total + std_char(level, mu, r, s, order).scale(c)
        return total


def reduce_gamma_index(level: Level, mu, r: int) -> tuple[int, Fraction, int]:
    """``(sign, mu', r')`` with ``Gamma_{mu;r} = sign * Gamma_{mu';r'}`` and ``(mu';r')`` in ``B_k``."""
    u, v, w = level.u, level.v, level.w
    mu = reduce_mod_L(level, to_fraction(mu))
    if mu > w:
        mu = 2 * w - mu
    sign = 1
    flip = (-1) ** (v - 1)
    if 2 * r > u or (2 * r == u and 2 * mu > w):
        mu, r, sign = w - mu, u - r, flip
    return sign, mu, r


def reduce_std_index(level: Level, mu, r: int, s: int) -> tuple[Fraction, int, int]:
    """Standard character index with ``mu = ell/v``, ``0 <= ell <= p`` and canonical Kac label."""
    w = level.w
    mu = reduce_mod_L(level, to_fraction(mu))
    if mu > w:
        mu = 2 * w - mu
    lab = minmod.kac_canonical(level.u, level.v, r, s)
    return mu, lab.r, lab.s


def decompose_character(level: Level, label) -> Decomposition:
    """Split an irreducible character into its Gamma and standard parts."""
    label = canonical(level, label)
    k, v, w = level.k, level.v, level.w
    gam: dict = {}
    std: dict = {}

    def add(d, key, c):
        d[key] = d.get(key, 0) + c
        if d[key] == 0:
            del d[key]

    def add_std(mu, r, s, c):
        add(std, reduce_std_index(level, mu, r, s), c)

    def add_C(mu, r, c):
        sign, m2, r2 = reduce_gamma_index(level, mu, r)
        add(gam, (m2, r2), sign * c)
        for s in range(1, v):
            add_std(mu + s * k, r, s, c * (-1) ** (s - 1) * (mu - (v - s) * k) / (2 * w))
            add_std(mu - s * k, r, s, -c * (-1) ** (s - 1) * (mu + (v - s) * k) / (2 * w))

    mu, r, s = label.mu, label.r, label.s
    if label.kind == "C":
        add_C(mu, r, 1)
    elif label.kind == "D":
        for s1 in range(s + 1, v):
            add_std(mu - (s1 - s) * k, r, s1, (-1) ** (s1 - s - 1))
        add_C(mu - (v - s) * k, level.u - r, (-1) ** (v - 1 - s))
    elif label.kind in ("E", "E+"):
        add_std(mu, r, s, 1)
    else:
        add_std(mu, level.u - r, v - s, 1)
    return Decomposition(gam, std)


def _theta_route(level: Level, label: ExtLabel, order: Fraction) -> QSeries:
    k, v, w = level.k, level.v, level.w
    mu, r, s = label.mu, label.r, label.s
    if label.kind == "C":
        total = QSeries.zero(order)
        for s1 in range(1, v):
            def part(n, s1=s1):
                return (
                    theta(level, mu + s1 * k, n, True)
                    - theta(level, mu - s1 * k, n, True)
                    + theta(level, mu + s1 * k, n).scale((mu - (v - s1) * k) / (2 * w))
                    - theta(level, mu - s1 * k, n).scale((mu + (v - s1) * k) / (2 * w))
                )
            total = total + _vir_times(level, r, s1, part, order).scale((-1) ** (s1 - 1))
        return total
    if label.kind == "D":
        total = QSeries.zero(order)
        for s1 in range(s + 1, v):
            total = total + std_char(level, mu - (s1 - s) * k, r, s1, order).scale((-1) ** (s1 - s - 1))
        tail = canonical(level, cs.C(mu - (v - s) * k, level.u - r))
        return total + _theta_route(level, tail, order).scale((-1) ** (v - 1 - s))
    if label.kind == "E-":
        return std_char(level, mu, level.u - r, level.v - s, order)
    return std_char(level, mu, r, s, order)


def _coset_sum_route(level: Level, label: ExtLabel, order: Fraction) -> QSeries:
    total = QSeries.zero(order)
    for c in _coset_reps(level, label, order):
        total = total + cs.character(level, c, order)
    return total


def character(level: Level, label, order, route: str = "theta") -> QSeries:
    """Character of a ``B_k`` module via theta functions or by summing coset characters."""
    label = canonical(level, label)
    order = to_fraction(order)
    if route == "theta":
        return _theta_route(level, label, order)
    if route == "coset-sum":
        return _coset_sum_route(level, label, order)
    raise ValueError(f"unknown route {route!r}")


# -- the spanning set B_k ------------------------------------------------------------


def basis_Bk(level: Level) -> list[tuple[int, int]]:
    """Pairs ``(mu, r)`` indexing the spanning set of weight-one parts."""
    u, w = level.u, level.w
    out = []
    for r in range(1, (u - 1) // 2 + 1):
        out += [(m, r) for m in range(w + 1) if (m - r + 1) % 2 == 0]
    if u % 2 == 0:
        r = u // 2
        out += [(m, r) for m in range(w // 2 + 1) if (m - r + 1) % 2 == 0]
    return out


def dim_bound(level: Level) -> Fraction:
    """Closed-form cardinality of ``B_k``."""
    u, v, w = level.u, level.v, level.w
    if u % 2:
        return Fraction((u - 1) * (w + 1), 4)
    return Fraction(u * w, 4) - Fraction(v - 1 - u, 2)


# -- S and T data -------------------------------------------------------------------


def s_typ(level: Level, m: int, l: int):
    p = level.p
    c = mpmath.cos(mpmath.pi * l * m / p)
    if l % p == 0:
        return mpmath.sqrt(mpmath.mpf(1) / (2 * p)) * c
    return mpmath.sqrt(mpmath.mpf(2) / p) * c


def s_theta(level: Level, m: int, l: int):
    p = level.p
    return mpmath.sqrt(mpmath.mpf(2) / p) * mpmath.sin(mpmath.pi * l * m / p)


def s_gamma(level: Level, a: tuple, b: tuple):
    """S-matrix entry from ``Gamma_a`` to ``Gamma_b`` on ``B_k``.

    Obtained by folding the full sum over ``mu' in [0, 2w)`` onto ``B_k`` with
    :func:`reduce_gamma_index`, so identifications among the ``r' = u/2``
    entries are accounted for.
    """
    (mu, r), (mu2, r2) = a, b
    u, w = level.u, level.w
    k = mpmath.mpf(level.k.numerator) / level.k.denominator
    t = mpmath.mpf(level.u) / level.v
    weight = mpmath.mpf(1) / 2 if 2 * r2 == u else mpmath.mpf(1)
    acc = mpmath.mpf(0)
    for m in range(2 * w):
        if (m - r2 + 1) % 2:
            continue
        sign, m_red, r_red = reduce_gamma_index(level, m, r2)
        if (m_red, r_red) == (mu2, r2):
            acc += sign * mpmath.cos(mpmath.pi * mu * m / k)
    amp = 2 * weight / mpmath.sqrt(u * w)
    return amp * mpmath.sin(mpmath.pi * r * r2 / t) * acc


def smatrix(level: Level, kind: str, digits: int = 50):
    """``(row labels, matrix)`` for ``kind`` in typ, theta, vir, gamma."""
    with mpmath.workdps(digits):
        if kind == "typ":
            idx = list(range(level.p + 1))
            f = lambda a, b: s_typ(level, a, b)
        elif kind == "theta":
            idx = list(range(1, level.p))
            f = lambda a, b: s_theta(level, a, b)
        elif kind == "vir":
            labels, m = minmod.s_matrix(level.u, level.v, digits)
            return [(x.r, x.s) for x in labels], m
        elif kind == "gamma":
            idx = basis_Bk(level)
            f = lambda a, b: s_gamma(level, a, b)
        else:
            raise ValueError(f"unknown S-matrix kind {kind!r}")
        m = mpmath.matrix(len(idx), len(idx))
        for i, a in enumerate(idx):
            for j, b in enumerate(idx):
                m[i, j] = f(a, b)
        return idx, m


def gamma_exponent_class(level: Level, mu, r: int) -> Fraction:
    """``Delta_C(mu;r) - c~/24`` modulo 1, the T-eigenvalue exponent of ``Gamma_{mu;r}``."""
    c = cs.canonical(level, cs.C(mu, r))
    e = cs.conformal_weight(level, c) - level.c_coset / 24
    return e - math.floor(e)


def std_exponent_class(level: Level, mu, r: int, s: int) -> Fraction:
    """Common exponent of ``std_char`` modulo 1 (requires ``mu`` in ``(1/v)Z``)."""
    mu = to_fraction(mu)
    if not in_dual_lattice(level, mu):
        raise NotLiftable(f"mu={mu} is not in (1/v)Z")
    e = level.delta(r, s) - mu * mu / (4 * level.k) - level.c_coset / 24
    return e - math.floor(e)


def t_phase(level: Level, index, digits: int = 50):
    """``exp(2 pi i (Delta - c~/24))`` for a Gamma index ``(mu, r)`` or a standard ``(mu, r, s)``."""
    e = gamma_exponent_class(level, *index) if len(index) == 2 else std_exponent_class(level, *index)
    with mpmath.workdps(digits):
        return mpmath.exp(2j * mpmath.pi * mpmath.mpf(e.numerator) / e.denominator)


# -- fusion ----------------------------------------------------------------------------


def _reduce_element(level: Level, elem: FusionElement) -> FusionElement:
    out = FusionElement(notes=elem.notes)
    for lab, n in elem.items():
        if not lifts(level, lab):
            raise AssertionError(f"fusion produced the non-liftable {lab}")
        out.add(canonical(level, lab), n)
    return out


def gr_fuse_ext(level: Level, a, b) -> FusionElement:
    """Coset Grothendieck fusion of representatives, reduced modulo ``L``."""
    def lift(x):
        if not isinstance(x, FusionElement):
            return cs.composition_factors(level, canonical(level, x).coset())
        out = FusionElement(notes=x.notes)
        for lab, n in x.items():
            out = out + cs.composition_factors(level, canonical(level, lab).coset()).scaled(n)
        return out

    return _reduce_element(level, cs.gr_fuse(level, lift(a), lift(b)))
