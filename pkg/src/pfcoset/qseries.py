"""Exact generalized q-series with rational exponents.

A :class:`QSeries` is a finite sum ``sum_e c_e q^e`` with exact rational
exponents ``e`` and coefficients ``c_e``, together with a truncation order:
every term with exponent ``<= order`` is known exactly, everything above it
has been dropped.  ``order=None`` marks an exact (finite) series.

Exponents are stored sparsely; the lattice view required for serialization
(``offset + n/denom``) is derived on demand.
"""
from __future__ import annotations

import json
import math
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping

import mpmath

__all__ = [
    "QSeries",
    "NonconvergentEvaluation",
    "eta",
    "eta_inverse",
    "to_fraction",
    "SeriesCache",
]


class NonconvergentEvaluation(ValueError):
    """Raised when a series is evaluated at a point with Im(tau) <= 0."""


def to_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise TypeError("floating point values are not accepted in exact series")
    return Fraction(x)


def _min_order(*orders):
    finite = [o for o in orders if o is not None]
    return min(finite) if finite else None


class QSeries:
    """Truncated q-series with rational exponents and exact coefficients."""

    __slots__ = ("_terms", "_order")

    def __init__(self, terms: Mapping | Iterable = (), order=None):
        order = None if order is None else to_fraction(order)
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[Fraction, Fraction] = {}
        for e, c in items:
            e = to_fraction(e)
            if order is not None and e > order:
                continue
            c = to_fraction(c)
            if c:
                acc[e] = acc.get(e, 0) + c
        self._terms = {e: c for e, c in sorted(acc.items()) if c}
        self._order = order

    # -- construction -------------------------------------------------
    @classmethod
    def monomial(cls, exponent, coeff=1, order=None) -> "QSeries":
        return cls({to_fraction(exponent): coeff}, order)

    @classmethod
    def one(cls, order=None) -> "QSeries":
        return cls.monomial(0, 1, order)

    @classmethod
    def zero(cls, order=None) -> "QSeries":
        return cls({}, order)

    # -- views ----------------------------------------------------------
    @property
    def order(self):
        return self._order

    @property
    def terms(self) -> dict[Fraction, Fraction]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def exponents(self) -> list[Fraction]:
        return list(self._terms)

    def __getitem__(self, exponent) -> Fraction:
        return self._terms.get(to_fraction(exponent), Fraction(0))

    def __len__(self):
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def valuation(self):
        """Smallest stored exponent (None for the zero series)."""
        return next(iter(self._terms), None)

    @property
    def offset(self) -> Fraction:
        v = self.valuation()
        return Fraction(0) if v is None else v

    @property
    def denom(self) -> int:
        off = self.offset
        d = 1
        for e in self._terms:
            d = math.lcm(d, (e - off).denominator)
        return d

    @property
    def coeffs(self) -> list[Fraction]:
        """Dense coefficient list on the lattice ``offset + n/denom``."""
        off, d = self.offset, self.denom
        if not self._terms:
            return []
        top = int((next(reversed(self._terms)) - off) * d)
        out = [Fraction(0)] * (top + 1)
        for e, c in self._terms.items():
            out[int((e - off) * d)] = c
        return out

    # -- comparison -----------------------------------------------------
    def __eq__(self, other):
        if not isinstance(other, QSeries):
            return NotImplemented
        return self._terms == other._terms and self._order == other._order

    def __hash__(self):
        return hash((tuple(self._terms.items()), self._order))

    def agrees_with(self, other: "QSeries", order=None) -> bool:
        """True when both series coincide up to ``order`` (default: common order)."""
        return self.first_difference(other, order) is None

    def first_difference(self, other: "QSeries", order=None):
        """Smallest exponent at which the series differ, up to the common order."""
        bound = _min_order(self._order, other._order, None if order is None else to_fraction(order))
        keys = sorted(set(self._terms) | set(other._terms))
        for e in keys:
            if bound is not None and e > bound:
                break
            if self[e] != other[e]:
                return e
        return None

    # -- arithmetic -----------------------------------------------------
    def truncate(self, order) -> "QSeries":
        order = to_fraction(order)
        if self._order is not None and order > self._order:
            order = self._order
        return QSeries(self._terms, order)

    def __neg__(self):
        return QSeries({e: -c for e, c in self._terms.items()}, self._order)

    def __add__(self, other):
        if not isinstance(other, QSeries):
            if other == 0:
                return self
            return NotImplemented
        order = _min_order(self._order, other._order)
        acc = dict(self._terms)
        for e, c in other._terms.items():
            acc[e] = acc.get(e, 0) + c
        return QSeries(acc, order)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "QSeries":
        c = to_fraction(c)
        return QSeries({e: c * x for e, x in self._terms.items()}, self._order)

    def shift(self, exponent) -> "QSeries":
        """Multiply by ``q**exponent``."""
        e0 = to_fraction(exponent)
        order = None if self._order is None else self._order + e0
        return QSeries({e + e0: c for e, c in self._terms.items()}, order)

    def _product_order(self, other):
        # the unknown tail of one factor enters the product from
        # (its order + valuation of the other factor) upward; a zero
        # factor known up to N has effective valuation N
        va = self.valuation() if self._terms else self._order
        vb = other.valuation() if other._terms else other._order
        cands = []
        if self._order is not None and vb is not None:
            cands.append(self._order + vb)
        if other._order is not None and va is not None:
            cands.append(other._order + va)
        return min(cands) if cands else None

    def __mul__(self, other):
        if not isinstance(other, QSeries):
            try:
                return self.scale(other)
            except TypeError:
                return NotImplemented
        order = self._product_order(other)
        acc: dict[Fraction, Fraction] = {}
        b_items = list(other._terms.items())
        for ea, ca in self._terms.items():
            if order is not None and b_items and ea + b_items[0][0] > order:
                break
            for eb, cb in b_items:
                e = ea + eb
                if order is not None and e > order:
                    break
                acc[e] = acc.get(e, 0) + ca * cb
        return QSeries(acc, order)

    def __rmul__(self, other):
        return self.scale(other)

    def inverse(self) -> "QSeries":
        """Multiplicative inverse of a series with finite order."""
        if not self._terms:
            raise ZeroDivisionError("zero series has no inverse")
        v = self.valuation()
        lead = self._terms[v]
        if self._order is None and len(self._terms) == 1:
            return QSeries({-v: 1 / lead})
        if self._order is None:
            raise ValueError("inverse of a non-monomial exact series needs a truncation order")
        d = self.denom
        rel = self._order - v
        nmax = math.floor(rel * d)
        a = [Fraction(0)] * (nmax + 1)
        for e, c in self._terms.items():
            n = (e - v) * d
            if n <= nmax:
                a[int(n)] = c / lead
        b = [Fraction(0)] * (nmax + 1)
        b[0] = Fraction(1)
        nz = [i for i in range(1, nmax + 1) if a[i]]
        for n in range(1, nmax + 1):
            s = Fraction(0)
            for i in nz:
                if i > n:
                    break
                s += a[i] * b[n - i]
            b[n] = -s
        terms = {-v + Fraction(n, d): b[n] / lead for n in range(nmax + 1)}
        return QSeries(terms, -v + rel)

    # -- numerics ---------------------------------------------------------
    def eval(self, tau, digits: int = 30):
        """Evaluate at ``q = exp(2 pi i tau)``.

        Returns ``(value, tail_bound)`` as mpmath numbers computed with
        ``digits`` decimal digits of working precision.  The tail bound is a
        heuristic estimate of the dropped terms, zero for exact series.
        """
        with mpmath.workdps(max(int(digits), 15)):
            tau = mpmath.mpc(tau)
            if tau.imag <= 0:
                raise NonconvergentEvaluation(f"Im(tau) must be positive, got {tau}")
            two_pi_i_tau = 2j * mpmath.pi * tau
            total = mpmath.mpc(0)
            for e, c in self._terms.items():
                total += mpmath.mpf(c.numerator) / c.denominator * mpmath.exp(
                    two_pi_i_tau * (mpmath.mpf(e.numerator) / e.denominator)
                )
            if self._order is None:
                tail = mpmath.mpf(0)
            else:
                aq = mpmath.exp(-2 * mpmath.pi * tau.imag)
                cmax = max((abs(c) for c in self._terms.values()), default=Fraction(1))
                cmax = mpmath.mpf(cmax.numerator) / cmax.denominator
                step = aq ** (mpmath.mpf(1) / self.denom)
                o = self._order
                tail = aq ** (mpmath.mpf(o.numerator) / o.denominator) / (1 - step) * max(cmax, 1)
            return +total, +tail

    # -- serialization ------------------------------------------------------
    def to_json_obj(self) -> dict:
        off, d = self.offset, self.denom
        return {
            "offset": str(off),
            "denom": d,
            "order": None if self._order is None else str(self._order),
            "terms": [[str(int((e - off) * d)), str(c)] for e, c in self._terms.items()],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj())

    @classmethod
    def from_json_obj(cls, obj: dict) -> "QSeries":
        off = Fraction(obj["offset"])
        d = int(obj["denom"])
        order = None if obj.get("order") is None else Fraction(obj["order"])
        return cls({off + Fraction(int(n), d): Fraction(c) for n, c in obj["terms"]}, order)

    @classmethod
    def from_json(cls, text: str) -> "QSeries":
        return cls.from_json_obj(json.loads(text))

    # -- display ------------------------------------------------------------
    def __repr__(self):
        if not self._terms:
            body = "0"
        else:
            parts = []
            for e, c in self._terms.items():
                parts.append(f"{c}*q^({e})" if e else f"{c}")
            body = " + ".join(parts)
        tail = "" if self._order is None else f" + O(q^({self._order}+))"
        return f"QSeries({body}{tail})"


class SeriesCache:
    """Keeps the deepest expansion computed per key and truncates on demand.

    ``compute(key, order)`` must return the series truncated at ``order``.
    Orders are rounded up to integers before computing.
    """

    def __init__(self, compute):
        self._compute = compute
        self._store: dict = {}

    def __call__(self, key, order) -> QSeries:
        order = to_fraction(order)
        have = self._store.get(key)
        if have is None or have.order < order:
            have = self._compute(key, Fraction(math.ceil(order)))
            self._store[key] = have
        return have.truncate(order)

    def clear(self):
        self._store.clear()


def _pentagonal_terms(order: Fraction):
    """Yield (exponent, sign) of prod(1-q^n) with exponent <= order."""
    yield 0, 1
    j = 1
    while True:
        sign = -1 if j % 2 else 1
        e1 = j * (3 * j - 1) // 2
        e2 = j * (3 * j + 1) // 2
        if e1 > order:
            break
        yield e1, sign
        if e2 <= order:
            yield e2, sign
        j += 1


@lru_cache(maxsize=None)
def eta(order) -> QSeries:
    """Dedekind eta ``q^(1/24) prod_{n>=1} (1 - q^n)`` truncated at ``order``."""
    order = to_fraction(order)
    if order < Fraction(1, 24):
        raise ValueError("eta needs order >= 1/24")
    base = order - Fraction(1, 24)
    return QSeries({Fraction(1, 24) + e: s for e, s in _pentagonal_terms(base)}, order)


def _eta_inverse(_, order):
    # 1/eta to order N needs eta to order N + 1/12
    return eta(order + Fraction(1, 12)).inverse().truncate(order)


_ETA_INVERSE = SeriesCache(_eta_inverse)


def eta_inverse(order) -> QSeries:
    """``1/eta`` truncated at ``order`` (exponents start at -1/24)."""
    return _ETA_INVERSE(None, order)
