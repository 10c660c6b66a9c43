import math
from fractions import Fraction
from itertools import product

import mpmath
import pytest
from hypothesis import given, strategies as st

from conftest import FIVE_LEVELS, MODULAR_LEVELS, ext_label
from pfcoset import coset as cs
from pfcoset import extension as ex
from pfcoset import minmod
from pfcoset.level import Level, valid_levels
from pfcoset.qseries import QSeries

F = Fraction
K12, K23, K43 = Level(3, 2), Level(4, 3), Level(2, 3)


def heis(level, x):
    return -x * x / (4 * level.k)


def double_sum_A(level, lam, order):
    """A_lambda from its defining double sum, with the inner m-sum done first.

    For fixed l the inner sum is sum_{n>=l} q^{a(n)} - sum_{n<=-l-1} q^{a(n)},
    where a(n) is the exponent of lam - 2wn; both one-sided sums are finite below ``order``.
    """
    w = level.w
    a = lambda n: heis(level, lam - 2 * w * n)
    reach = int(math.isqrt(int(4 * abs(level.k) * order) + 1) // (2 * w)) + int(abs(lam)) + 3
    terms = {}
    for l in range(-reach - 2, reach + 3):
        for n in range(l, l + 2 * reach + 6):
            if a(n) <= order:
                terms[a(n)] = terms.get(a(n), 0) + 1
        for n in range(-l - 1, -l - 2 * reach - 7, -1):
            if a(n) <= order:
                terms[a(n)] = terms.get(a(n), 0) - 1
    return QSeries(terms, order)


def lattice_theta(level, mu, order, deriv=False):
    w = level.w
    terms = {}
    for n in range(-60, 61):
        x = mu - 2 * w * n
        e = heis(level, x)
        if e <= order:
            c = -x / (2 * w) if deriv else 1
            terms[e] = terms.get(e, 0) + c
    return QSeries(terms, order)


class TestTheta:
    def test_zero_class(self):
        for lv in (K12, K23, K43):
            p = lv.p
            assert ex.theta(lv, 0, 9 * p) == QSeries({0: 1, p: 2, 4 * p: 2, 9 * p: 2}, 9 * p)

    @pytest.mark.parametrize("u,v", FIVE_LEVELS)
    def test_against_lattice_sum(self, u, v):
        lv = Level(u, v)
        for n in range(0, 2 * lv.p):
            mu = F(n, v)
            assert ex.theta(lv, mu, 20) == lattice_theta(lv, mu, 20)
            assert ex.theta(lv, mu, 20, deriv=True) == lattice_theta(lv, mu, 20, deriv=True)
            assert ex.theta_identity_sum(lv, mu, 20) == ex.theta(lv, mu, 20)
            assert ex.theta(lv, -mu, 20, deriv=True) == -ex.theta(lv, mu, 20, deriv=True)
        assert ex.theta(lv, 0, 20, deriv=True).is_zero()


class TestLemma:
    @pytest.mark.parametrize("u,v", FIVE_LEVELS)
    def test_closed_form_matches_definition(self, u, v):
        lv = Level(u, v)
        N = 25
        for n in range(-2 * lv.p, 2 * lv.p + 1, max(1, lv.p // 3)):
            lam = F(n, v)
            closed = ex.A_series(lv, lam, N)
            assert closed == double_sum_A(lv, lam, N), lam
            assert closed == ex.A_series(lv, lam, N, route="resummation")

    def test_A_zero_is_theta(self):
        assert ex.A_series(K23, 0, 30) == ex.theta(K23, 0, 30)


class TestStandardAndGamma:
    def test_std_char_k_minus_half(self):
        s = ex.std_char(K12, 0, 1, 1, 8)
        assert s.valuation() == F(-1, 8) + F(1, 12)
        expected = (cs.vir_over_eta(K12, 1, 1, 9) * ex.theta(K12, 0, 9)).truncate(8)
        assert s == expected

    @pytest.mark.parametrize("u,v", MODULAR_LEVELS)
    def test_std_char_is_sum_of_coset_characters(self, u, v):
        lv = Level(u, v)
        N = 6
        for lab in minmod.kac_table(u, v):
            for n in range(2 * lv.p):
                mu = F(n, v)
                if cs.is_atypical_weight(lv, mu, lab.r, lab.s):
                    continue
                total = QSeries.zero(N)
                for j in range(-6, 7):
                    c = cs.E(mu + 2 * lv.w * j, lab.r, lab.s)
                    if cs.ground_exponent(lv, c) <= N:
                        total = total + cs.character(lv, c, N)
                assert ex.std_char(lv, mu, lab.r, lab.s, N) == total
                assert ex.std_char(lv, mu + 2 * lv.w, lab.r, lab.s, N) == total

    def test_gamma_k_minus_half(self):
        g = ex.gamma(K12, 0, 1, 10)
        expected = (cs.vir_over_eta(K12, 1, 1, 11) * ex.theta(K12, F(1, 2), 11, True)).truncate(10).scale(-2)
        assert g == expected

    @pytest.mark.parametrize("u,v", FIVE_LEVELS)
    def test_gamma_redundancies(self, u, v):
        lv = Level(u, v)
        w, N = lv.w, 12
        for r in range(1, u):
            for m in range(0, 2 * w):
                if (m - r + 1) % 2:
                    continue
                g = ex.gamma(lv, m, r, N)
                assert g == ex.gamma(lv, m + 2 * w, r, N) == ex.gamma(lv, -m, r, N)
                assert g == ex.gamma(lv, w + m, u - r, N).scale((-1) ** (v - 1))
                sign, m2, r2 = ex.reduce_gamma_index(lv, m, r)
                assert (m2, r2) in ex.basis_Bk(lv)
                assert g == ex.gamma(lv, m2, r2, N).scale(sign)


class TestModules:
    def test_lifting(self):
        assert ex.lifts(K23, cs.E(F(1, 3), 1, 1))
        assert not ex.lifts(K23, cs.E(F(1, 4), 1, 1))
        assert all(ex.lifts(K23, cs.C(m, 1)) for m in range(-6, 7, 2))
        with pytest.raises(ex.NotLiftable):
            ex.canonical(K23, cs.E(F(1, 4), 1, 1))

    def test_counts(self):
        assert ex.counts(K23) == (6, 6, 24)
        assert ex.counts(K12) == (2, 0, 2)
        weights = {ex.conformal_weight(K12, m) for m in ex.enumerate_modules(K12)}
        assert weights == {0, 1, F(-1, 8), F(3, 8)}

    def test_enumeration_is_canonical_and_distinct(self):
        for lv in (K12, K23, K43, Level(5, 3)):
            mods = ex.enumerate_modules(lv)
            assert len(set(mods)) == len(mods)
            assert all(ex.canonical(lv, m) == m for m in mods)

    def test_table_k_minus_two_thirds(self):
        labels = [("C", 0, 1, 0), ("C", 1, 2, 0), ("D", F(2, 3), 1, 1), ("D", F(5, 3), 2, 1),
                  ("E", 0, 1, 1), ("E", F(1, 3), 1, 1), ("E", 1, 1, 1), ("E", F(5, 3), 1, 1),
                  ("E", 0, 2, 1), ("E", F(2, 3), 2, 1), ("E", 1, 2, 1), ("E", F(4, 3), 2, 1)]
        table = [0, F(15, 16), F(1, 2), F(-1, 16), F(-1, 6), F(-1, 8), F(5, 24), F(-1, 8),
                 F(-5, 48), F(1, 16), F(13, 48), F(1, 16)]
        got = [ex.sector_weight(K23, ex.ExtLabel(k, F(m), r, s)) for k, m, r, s in labels]
        assert got == table

    def test_vacuum_is_sum_over_lattice(self):
        N = 10
        total = QSeries.zero(N)
        for j in range(-4, 5):
            c = cs.C(2 * K12.w * j, 1)
            if cs.ground_exponent(K12, c) <= N:
                total = total + cs.character(K12, c, N)
        assert ex.character(K12, ex.ExtLabel("C", F(0), 1), N) == total

    @pytest.mark.parametrize("u,v", [(3, 2), (4, 3)])
    def test_character_routes_and_decomposition(self, u, v):
        lv = Level(u, v)
        N = 10
        for lab in ex.enumerate_modules(lv):
            a = ex.character(lv, lab, N)
            assert a == ex.character(lv, lab, N, route="coset-sum")
            if lab.kind != "E":
                assert ex.decompose_character(lv, lab).assemble(lv, N) == a
        # D with s = v - 1 is the C module of the same character
        d = ex.ExtLabel("D", lv.lam(1, v - 1) + 2, 1, v - 1)
        assert ex.character(lv, d, N) == ex.character(lv, cs.C(d.mu - lv.k, u - 1), N)


class TestBasisAndModularData:
    def test_examples(self):
        assert ex.basis_Bk(K12) == [(0, 1)]
        assert ex.basis_Bk(K23) == [(0, 1), (2, 1), (1, 2)]
        assert ex.basis_Bk(K43) == [(0, 1), (2, 1)]

    @pytest.mark.parametrize("lv", valid_levels(30), ids=str)
    def test_closed_form(self, lv):
        assert len(ex.basis_Bk(lv)) == ex.dim_bound(lv)

    def test_s_matrices(self):
        with mpmath.workdps(40):
            idx, S = ex.smatrix(K23, "typ", 40)
            assert abs(S[0, 0] - mpmath.sqrt(mpmath.mpf(1) / 12)) < 1e-35
            for m in (0, K23.p):
                assert all(abs(ex.s_theta(K23, m, l)) < 1e-35 for l in range(K23.p + 1))
            idx, S = ex.smatrix(K12, "gamma", 40)
            assert abs(S[0, 0] - 1) < 1e-35
            for lv in (K23, K43, Level(5, 3), Level(3, 4), Level(6, 5)):
                idx, S = ex.smatrix(lv, "gamma", 40)
                n = len(idx)
                # S^2 acts as an involution on the weight-one sector
                assert mpmath.mnorm(S * S - mpmath.eye(n), 1) < 1e-30

    def test_t_phase(self):
        with mpmath.workdps(30):
            assert abs(ex.t_phase(K12, (0, 1), 30) - mpmath.exp(1j * mpmath.pi / 6)) < 1e-25
        for lv in (K12, K23, K43):
            for lab in minmod.kac_table(lv.u, lv.v):
                for n in range(2 * lv.p):
                    mu = F(n, lv.v)
                    cls = ex.std_exponent_class(lv, mu, lab.r, lab.s)
                    assert cls == ex.std_exponent_class(lv, mu + 2 * lv.w, lab.r, lab.s)
                    s = ex.std_char(lv, mu, lab.r, lab.s, 5)
                    assert all((e - cls).denominator == 1 for e in s.exponents())
            for m, r in ex.basis_Bk(lv):
                cls = ex.gamma_exponent_class(lv, m, r)
                assert all((e - cls).denominator == 1 for e in ex.gamma(lv, m, r, 8).exponents())


class TestFusion:
    def test_simple_currents_form_klein_group(self):
        cur = [ex.ExtLabel("C", F(m), r) for m, r in ((0, 1), (0, 3), (2, 1), (2, 3))]
        assert sorted(ex.simple_currents(K23), key=str) == sorted(cur, key=str)
        unit = ex.ExtLabel("C", F(0), 1)
        for a, b in product(cur, repeat=2):
            res = ex.gr_fuse_ext(K23, a, b)
            assert len(res) == 1 and list(res.values()) == [1]
            (c,) = res
            assert c in cur
            if a == b:
                assert c == unit

    @given(st.data())
    def test_unit_and_commutativity(self, data):
        lv = data.draw(st.sampled_from([Level(*x) for x in MODULAR_LEVELS]))
        a, b = ext_label(lv, data.draw), ext_label(lv, data.draw)
        unit = ex.ExtLabel("C", F(0), 1)
        assert ex.gr_fuse_ext(lv, unit, a) == ex.gr_fuse_ext(lv, a, unit)
        assert ex.gr_fuse_ext(lv, a, b) == ex.gr_fuse_ext(lv, b, a)

    @given(st.data())
    def test_weight_shifts(self, data):
        lv = data.draw(st.sampled_from([Level(*x) for x in MODULAR_LEVELS]))
        a, b = ext_label(lv, data.draw), ext_label(lv, data.draw)
        coset = cs.gr_fuse(lv, a.coset(), b.coset())
        reduced = {}
        for lab, n in coset.items():
            d = lab.mu - a.mu - b.mu
            assert any(cs.congruent_mod(d - j * lv.k, 0, 2) for j in range(-2, 3)), (a, b, lab)
            key = ex.canonical(lv, lab)
            reduced[key] = reduced.get(key, 0) + n
        assert ex.gr_fuse_ext(lv, a, b) == {x: n for x, n in reduced.items() if n}
