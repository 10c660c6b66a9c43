"""Virasoro minimal model M(u, v): Kac table, characters, fusion, S-matrix."""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

import mpmath

from .qseries import QSeries, SeriesCache, eta_inverse


class OutOfKacTable(ValueError):
    pass


@dataclass(frozen=True, order=True)
class KacLabel:
    r: int
    s: int

    def __str__(self):
        return f"({self.r},{self.s})"


def _check_uv(u, v):
    if u < 2 or v < 2 or math.gcd(u, v) != 1:
        raise ValueError(f"minimal model needs coprime u, v >= 2, got ({u}, {v})")


def _check(u, v, r, s):
    if not (1 <= r <= u - 1 and 1 <= s <= v - 1):
        raise OutOfKacTable(f"({r},{s}) is outside the Kac table of M({u},{v})")


def kac_canonical(u: int, v: int, r: int, s: int) -> KacLabel:
    """Representative of ``(r,s) ~ (u-r, v-s)`` with ``v r - u s > 0``."""
    _check(u, v, r, s)
    if v * r - u * s > 0:
        return KacLabel(r, s)
    return KacLabel(u - r, v - s)


def kac_table(u: int, v: int) -> list[KacLabel]:
    _check_uv(u, v)
    return sorted({kac_canonical(u, v, r, s) for r in range(1, u) for s in range(1, v)})


def h(u: int, v: int, r: int, s: int) -> Fraction:
    _check(u, v, r, s)
    return Fraction((v * r - u * s) ** 2 - (v - u) ** 2, 4 * u * v)


def central_charge(u: int, v: int) -> Fraction:
    return 1 - Fraction(6 * (v - u) ** 2, u * v)


def _bilateral(u: int, v: int, r: int, s: int, order: Fraction) -> QSeries:
    uv4 = 4 * u * v
    terms: dict[Fraction, int] = {}
    for shift, sign in ((v * r - u * s, 1), (v * r + u * s, -1)):
        # (2uv n + shift)^2 <= 4uv * order
        bound = math.isqrt(max(0, math.floor(order * uv4))) + 1
        nmin = -(bound + abs(shift)) // (2 * u * v) - 1
        nmax = (bound + abs(shift)) // (2 * u * v) + 1
        for n in range(nmin, nmax + 1):
            e = Fraction((2 * u * v * n + shift) ** 2, uv4)
            if e <= order:
                terms[e] = terms.get(e, 0) + sign
    return QSeries(terms, order)


def _min_char(key, order):
    u, v, r, s = key
    return (_bilateral(u, v, r, s, order + Fraction(1, 24)) * eta_inverse(order)).truncate(order)


_MIN_CHAR = SeriesCache(_min_char)


def min_char(u: int, v: int, r: int, s: int, order) -> QSeries:
    """Irreducible character of (r,s), including the ``q^{-c/24}`` factor."""
    lab = kac_canonical(u, v, r, s)
    return _MIN_CHAR((u, v, lab.r, lab.s), order)


def su2_fusion_range(n: int, a: int, b: int) -> range:
    """Truncated Clebsch-Gordan range for labels 1..n-1."""
    return range(abs(a - b) + 1, min(a + b - 1, 2 * n - 1 - a - b) + 1, 2)


def fusion_coeffs(u: int, v: int, a, b) -> Counter:
    """Fusion multiplicities ``(r,s) x (r',s')`` keyed by canonical Kac labels."""
    (r1, s1), (r2, s2) = tuple(a), tuple(b)
    _check(u, v, r1, s1)
    _check(u, v, r2, s2)
    out: Counter = Counter()
    for r3 in su2_fusion_range(u, r1, r2):
        for s3 in su2_fusion_range(v, s1, s2):
            out[kac_canonical(u, v, r3, s3)] += 1
    return out


def fusion_coeff(u: int, v: int, a, b, c) -> int:
    """Single coefficient; zero when any label falls outside the table."""
    for r, s in (tuple(a), tuple(b), tuple(c)):
        if not (1 <= r <= u - 1 and 1 <= s <= v - 1):
            return 0
    return fusion_coeffs(u, v, a, b)[kac_canonical(u, v, *tuple(c))]


def s_vir(u: int, v: int, a, b, digits: int = 50):
    (r1, s1), (r2, s2) = tuple(a), tuple(b)
    _check(u, v, r1, s1)
    _check(u, v, r2, s2)
    with mpmath.workdps(digits):
        sign = -1 if (r1 * s2 + r2 * s1) % 2 else 1
        val = (
            -2
            * mpmath.sqrt(mpmath.mpf(2) / (u * v))
            * sign
            * mpmath.sin(v * mpmath.pi * r1 * r2 / u)
            * mpmath.sin(u * mpmath.pi * s1 * s2 / v)
        )
        return +val


def s_matrix(u: int, v: int, digits: int = 50):
    labels = kac_table(u, v)
    with mpmath.workdps(digits):
        m = mpmath.matrix(len(labels), len(labels))
        for i, a in enumerate(labels):
            for j, b in enumerate(labels):
                m[i, j] = s_vir(u, v, (a.r, a.s), (b.r, b.s), digits)
    return labels, m


def verlinde(u: int, v: int, a, b, digits: int = 50) -> dict:
    """Verlinde numbers ``sum_m S_am S_bm S_cm / S_1m`` for every canonical c."""
    labels, S = s_matrix(u, v, digits)
    idx = {lab: i for i, lab in enumerate(labels)}
    ia = idx[kac_canonical(u, v, *tuple(a))]
    ib = idx[kac_canonical(u, v, *tuple(b))]
    i1 = idx[kac_canonical(u, v, 1, 1)]
    out = {}
    with mpmath.workdps(digits):
        for c, ic in idx.items():
            out[c] = mpmath.fsum(S[ia, m] * S[ib, m] * S[ic, m] / S[i1, m] for m in range(len(labels)))
    return out


def kac_table_json(u: int, v: int, digits: int = 30) -> dict:
    labels, S = s_matrix(u, v, digits)
    with mpmath.workdps(digits):
        return {
            "u": u,
            "v": v,
            "c": str(central_charge(u, v)),
            "labels": [[lab.r, lab.s] for lab in labels],
            "h": [str(h(u, v, lab.r, lab.s)) for lab in labels],
            "S": [[mpmath.nstr(S[i, j], digits) for j in range(len(labels))] for i in range(len(labels))],
        }
