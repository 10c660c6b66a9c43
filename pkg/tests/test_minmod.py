from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, strategies as st

from pfcoset import minmod
from pfcoset.level import InvalidLevel, Level, valid_levels
from pfcoset.qseries import QSeries

F = Fraction


def fermion_product(order):
    """prod_{n>=1} (1 + q^{n-1/2}) as {exponent: coeff}, by direct multiplication."""
    terms = {F(0): 1}
    n = 1
    while n - F(1, 2) <= order:
        e = n - F(1, 2)
        new = dict(terms)
        for x, c in terms.items():
            if x + e <= order:
                new[x + e] = new.get(x + e, 0) + c
        terms = new
        n += 1
    return terms


def boson_product(order):
    """prod_{n>=1} (1 + q^n)."""
    terms = {0: 1}
    for n in range(1, order + 1):
        new = dict(terms)
        for x, c in terms.items():
            if x + n <= order:
                new[x + n] = new.get(x + n, 0) + c
        terms = new
    return terms


class TestLevel:
    @pytest.mark.parametrize("u,v", [(4, 4), (1, 2), (5, 2), (6, 3)])
    def test_invalid(self, u, v):
        with pytest.raises(InvalidLevel):
            Level(u, v)

    def test_weights(self):
        lv = Level(3, 2)
        assert lv.lam(1, 1) == F(-3, 2)
        assert lv.delta(1, 1) == F(-1, 8)
        lv = Level(4, 3)
        t = lv.t
        assert lv.delta(2, 0) == ((2 - t * 0) ** 2 - 1) / (4 * t) == F(9, 16)

    def test_data_k_minus_two_thirds(self):
        lv = Level(4, 3)
        assert (lv.k, lv.t, lv.w, lv.p, lv.c_coset) == (F(-2, 3), F(4, 3), 2, 6, F(-5, 2))
        assert Level.from_k(F(-2, 3)) == lv

    @given(st.sampled_from(valid_levels(14)), st.data())
    def test_kac_symmetry(self, lv, data):
        r = data.draw(st.integers(1, lv.u - 1))
        s = data.draw(st.integers(0, lv.v))
        assert lv.lam(lv.u - r, lv.v - s) == -lv.lam(r, s) - 2
        assert lv.delta(lv.u - r, lv.v - s) == lv.delta(r, s)


class TestKac:
    def test_identifications(self):
        assert minmod.kac_canonical(4, 3, 3, 2) == minmod.kac_canonical(4, 3, 1, 1)
        assert minmod.kac_canonical(3, 2, 2, 1) == minmod.kac_canonical(3, 2, 1, 1)
        assert len(minmod.kac_table(4, 3)) == 3

    @given(st.sampled_from(valid_levels(14)), st.data())
    def test_canonical_idempotent(self, lv, data):
        r = data.draw(st.integers(1, lv.u - 1))
        s = data.draw(st.integers(1, lv.v - 1))
        c = minmod.kac_canonical(lv.u, lv.v, r, s)
        assert minmod.kac_canonical(lv.u, lv.v, c.r, c.s) == c
        assert minmod.h(lv.u, lv.v, r, s) == minmod.h(lv.u, lv.v, lv.u - r, lv.v - s)

    def test_out_of_table(self):
        with pytest.raises(minmod.OutOfKacTable):
            minmod.h(4, 3, 4, 1)

    def test_ising_weights(self):
        assert minmod.h(4, 3, 1, 2) == F(1, 2)
        assert minmod.h(4, 3, 2, 2) == F(1, 16)
        assert minmod.central_charge(4, 3) == F(1, 2)


class TestCharacters:
    def test_ising_against_free_fermion(self):
        order = 12
        ferm = fermion_product(order)
        shift = -F(1, 48)
        vac = QSeries({e + shift: c for e, c in ferm.items() if e.denominator == 1}, order + shift)
        eps = QSeries({e + F(1, 2) - F(1, 2) + shift: c for e, c in ferm.items() if e.denominator == 2}, order + shift)
        sig = QSeries({n + F(1, 16) + shift: c for n, c in boson_product(order).items()}, order + shift)
        N = order - F(1, 48)
        assert minmod.min_char(4, 3, 1, 1, N) == vac.truncate(N)
        assert minmod.min_char(4, 3, 1, 2, N) == eps.truncate(N)
        assert minmod.min_char(4, 3, 2, 2, N) == sig.truncate(N)

    def test_ising_vacuum_leading_terms(self):
        ch = minmod.min_char(4, 3, 1, 1, 5)
        assert ch.shift(F(1, 48)).truncate(4) == QSeries({0: 1, 2: 1, 3: 1, 4: 2}, 4)

    @pytest.mark.parametrize("u,v", [(4, 3), (5, 3), (5, 2), (7, 4)])
    def test_kac_symmetric_and_integral(self, u, v):
        for r in range(1, u):
            for s in range(1, v):
                a = minmod.min_char(u, v, r, s, 10)
                assert a == minmod.min_char(u, v, u - r, v - s, 10)
                assert all(c.denominator == 1 and c > 0 for _, c in a.items())


class TestFusionAndS:
    def test_examples(self):
        fc = lambda a, b: dict(minmod.fusion_coeffs(4, 3, a, b))
        K = lambda r, s: minmod.kac_canonical(4, 3, r, s)
        assert fc((3, 1), (3, 1)) == {K(1, 1): 1}
        assert fc((2, 1), (2, 1)) == {K(1, 1): 1, K(3, 1): 1}
        for lab in minmod.kac_table(4, 3):
            assert fc((1, 1), (lab.r, lab.s)) == {lab: 1}

    def test_s_matrix(self):
        labels, S = minmod.s_matrix(4, 3, 40)
        i = labels.index(minmod.kac_canonical(4, 3, 1, 1))
        assert abs(S[i, i] - mpmath.mpf(1) / 2) < 1e-35
        for u, v in [(4, 3), (5, 2), (5, 3), (7, 4)]:
            labels, S = minmod.s_matrix(u, v, 40)
            n = len(labels)
            with mpmath.workdps(40):
                assert mpmath.mnorm(S - S.T, 1) < 1e-35
                assert mpmath.mnorm(S * S - mpmath.eye(n), 1) < 1e-30

    @pytest.mark.parametrize("u,v", [(4, 3), (5, 2), (5, 3), (7, 3)])
    def test_verlinde(self, u, v):
        table = minmod.kac_table(u, v)
        for a in table:
            for b in table:
                comb = minmod.fusion_coeffs(u, v, (a.r, a.s), (b.r, b.s))
                ver = minmod.verlinde(u, v, (a.r, a.s), (b.r, b.s), 30)
                for c, x in ver.items():
                    assert abs(x - comb.get(c, 0)) < 1e-9
