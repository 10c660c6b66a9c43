"""Admissible level data ``k = -2 + u/v`` restricted to negative levels."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction


class InvalidLevel(ValueError):
    pass


@dataclass(frozen=True)
class Level:
    """Admissibility datum (u, v) with gcd(u, v) = 1, v >= 2 and u < 2v."""

    u: int
    v: int

    def __post_init__(self):
        u, v = self.u, self.v
        if u < 2 or v < 2:
            raise InvalidLevel(f"need u >= 2 and v >= 2, got (u, v) = ({u}, {v})")
        if math.gcd(u, v) != 1:
            raise InvalidLevel(f"u and v must be coprime, got ({u}, {v})")
        if u >= 2 * v:
            raise InvalidLevel(f"only negative levels (u < 2v) are supported, got ({u}, {v})")

    @property
    def t(self) -> Fraction:
        return Fraction(self.u, self.v)

    @property
    def k(self) -> Fraction:
        return self.t - 2

    @property
    def w(self) -> int:
        return 2 * self.v - self.u

    @property
    def p(self) -> int:
        return self.v * self.w

    @property
    def c(self) -> Fraction:
        """Central charge of the affine vertex algebra."""
        return 3 - 6 / self.t

    @property
    def c_coset(self) -> Fraction:
        """Central charge of the parafermion coset."""
        return 2 - 6 / self.t

    @property
    def c_vir(self) -> Fraction:
        return 1 - Fraction(6 * (self.v - self.u) ** 2, self.u * self.v)

    @classmethod
    def from_k(cls, k) -> "Level":
        t = Fraction(k) + 2
        return cls(t.numerator, t.denominator)

    def lam(self, r: int, s: int) -> Fraction:
        """sl(2) weight ``r - 1 - t s``."""
        return r - 1 - self.t * s

    def delta(self, r: int, s: int) -> Fraction:
        """Ground-state conformal weight ``((vr - us)^2 - v^2) / 4uv``."""
        u, v = self.u, self.v
        return Fraction((v * r - u * s) ** 2 - v * v, 4 * u * v)

    def info(self) -> dict:
        return {
            "u": self.u,
            "v": self.v,
            "k": self.k,
            "t": self.t,
            "w": self.w,
            "p": self.p,
            "c": self.c,
            "c_coset": self.c_coset,
            "c_vir": self.c_vir,
        }

    def __str__(self):
        return f"k={self.k} (u={self.u}, v={self.v})"


def valid_levels(max_sum: int):
    """All supported (u, v) with u + v <= max_sum."""
    out = []
    for v in range(2, max_sum):
        for u in range(2, min(2 * v, max_sum - v + 1)):
            if math.gcd(u, v) == 1:
                out.append(Level(u, v))
    return out
