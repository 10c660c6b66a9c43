import random
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from conftest import FIVE_LEVELS, MODULAR_LEVELS, coset_label
from pfcoset import coset as cs
from pfcoset.level import Level, valid_levels
from pfcoset.qseries import QSeries, eta_inverse

F = Fraction
K23 = Level(4, 3)
K12 = Level(3, 2)


def beta_gamma_components(order):
    """Charge components of prod_n 1/((1 - z q^{n-1/2})(1 - z^-1 q^{n-1/2})): {charge: {exponent: coeff}}."""
    terms = {(0, F(0)): 1}
    n = 1
    while n - F(1, 2) <= order:
        e = n - F(1, 2)
        for z in (1, -1):
            new = dict(terms)
            for (ch, x), c in terms.items():
                m = 1
                while x + m * e <= order:
                    key = (ch + z * m, x + m * e)
                    new[key] = new.get(key, 0) + c
                    m += 1
            terms = new
        n += 1
    out = {}
    for (ch, x), c in terms.items():
        out.setdefault(ch, {})[x] = c
    return out


def ch(lv, lab, order):
    """Character truncated at ``order``, or zero when ``order`` lies below the ground state."""
    lab = cs.canonical(lv, lab)
    if order < cs.ground_exponent(lv, lab):
        return QSeries.zero(order)
    return cs.character(lv, lab, order)


class TestLabels:
    @given(st.data())
    def test_parse_round_trip(self, data):
        lv = data.draw(st.sampled_from([Level(*x) for x in FIVE_LEVELS]))
        lab = coset_label(lv, data.draw)
        assert cs.parse_label(str(lab)) == lab
        assert cs.is_canonical(lv, lab)

    @pytest.mark.parametrize("text", ["C[0;1,1]", "D[1;2]", "X[0;1]", "C[a;1]"])
    def test_bad_grammar(self, text):
        with pytest.raises(ValueError):
            cs.parse_label(text)

    def test_canonical_rules(self):
        assert cs.canonical(K23, cs.D(F(4, 3), 1, 2)) == cs.C(2, 3)
        assert cs.canonical(K23, cs.E(F(1, 3), 1, 1)) == cs.E(F(1, 3), 3, 2)
        assert cs.canonical(K23, cs.C(0, 1)) == cs.C(0, 1)

    def test_errors(self):
        with pytest.raises(cs.ParityMismatch):
            cs.canonical(K23, cs.C(F(1, 3), 1))
        with pytest.raises(cs.RangeError):
            cs.canonical(K23, cs.C(0, 4))
        with pytest.raises(cs.TypicalOnAtypicalWeight):
            cs.canonical(K23, cs.E(F(2, 3), 1, 1))

    def test_family_parity_consistency(self):
        rng = random.Random(7)
        for _ in range(10_000):
            lv = Level(*FIVE_LEVELS[rng.randrange(5)])
            lab = coset_label(lv, rng)
            fam = cs.family_of(lv, lab)
            assert fam.kind == lab.kind
            if fam.kind != "E":
                assert cs.congruent_mod(lab.mu, fam.base, 2)

    def test_family_counts(self):
        kinds = lambda lv: [f.kind for f in cs.enumerate_families(lv)]
        assert kinds(K12) == ["C", "C", "E"]
        assert kinds(K23).count("C") == 3 and kinds(K23).count("D") == 3 and kinds(K23).count("E") == 3


class TestConformalWeights:
    @pytest.mark.parametrize("lv", valid_levels(20), ids=str)
    def test_simple_current(self, lv):
        for mu in (2, -2):
            assert cs.conformal_weight(lv, cs.C(mu, 1)) == 1 + F(lv.v, lv.w)

    def test_examples(self):
        assert cs.conformal_weight(K23, cs.E(0, 1, 1)) == F(-1, 6)
        assert cs.conformal_weight(Level(2, 3), cs.C(4, 1)) == 5
        # Below the extremal weight the D formula carries no linear term
        assert cs.conformal_weight(K23, cs.D(F(-4, 3), 1, 1)) == F(1, 2)
        assert cs.conformal_weight(K23, cs.D(F(2, 3), 1, 1)) == 1

    @given(st.data())
    def test_leading_exponent(self, data):
        lv = data.draw(st.sampled_from([Level(*x) for x in FIVE_LEVELS]))
        lab = coset_label(lv, data.draw, span=2)
        g = cs.ground_exponent(lv, lab)
        ch = cs.character(lv, lab, g + 2)
        assert ch.valuation() == g
        assert ch[g] > 0


class TestCharacters:
    def test_beta_gamma_oracle(self):
        order = 10
        comps = beta_gamma_components(order)
        k = K12.k
        for mu in range(-3, 4):
            lab = cs.C(mu, 1 if mu % 2 == 0 else 2)
            ours = cs.character(K12, lab, order)
            # ch C / eta times the Fock factor is the charge-mu component
            lhs = (ours * eta_inverse(order + 1)).shift(F(mu * mu) / (4 * k))
            rhs = QSeries({e + F(1, 24): c for e, c in comps[mu].items()}, order)
            n = min(lhs.order, rhs.order)
            assert lhs.truncate(n) == rhs.truncate(n), mu

    def test_vacuum_plus_current_k_minus_two_thirds(self):
        N = 5 + F(5, 48)
        total = cs.character(K23, cs.C(0, 1), N) + cs.character(K23, cs.C(0, 3), N)
        coeffs = [1, 0, 0, 1, 1, 2, 2, 3, 4, 5, 6]
        expected = QSeries({F(5, 48) + F(i, 2): c for i, c in enumerate(coeffs)}, N)
        assert total == expected

    @pytest.mark.parametrize("u,v", FIVE_LEVELS)
    def test_reflection_and_routes(self, u, v):
        lv = Level(u, v)
        for r in range(1, u):
            for mu in range(-4, 5):
                if (mu - r + 1) % 2:
                    continue
                n = cs.ground_exponent(lv, cs.C(mu, r)) + 6
                a = cs.character(lv, cs.C(mu, r), n)
                assert a == cs.character(lv, cs.C(-mu, r), n)
                assert a == cs.character(lv, cs.C(mu, r), n, route="crosscheck")

    @pytest.mark.parametrize("u,v", FIVE_LEVELS)
    def test_standard_additivity(self, u, v):
        lv = Level(u, v)
        k = lv.k
        for r in range(1, u):
            for s in range(1, v):
                lam = lv.lam(r, s)
                for mu in (lam, lam + 2, lam - 2):
                    plus = cs.Estd("+", mu, r, s)
                    n = cs.ground_exponent(lv, plus) + 6
                    quo = cs.C(mu + k, r) if s == 1 else cs.D(mu + k, r, s - 1)
                    assert ch(lv, plus, n) == ch(lv, cs.D(mu, r, s), n) + ch(lv, quo, n)

    def test_truncation_below_ground(self):
        with pytest.raises(cs.TruncationBelowGroundState):
            cs.character(K23, cs.C(4, 1), 0)


class TestFusion:
    def test_k_minus_two_thirds_current(self):
        G = cs.C(0, 3)
        assert cs.gr_fuse(K23, G, G) == {cs.C(0, 1): 1}
        for mu in range(-4, 5):
            for r in range(1, 4):
                if (mu - r + 1) % 2 == 0:
                    assert cs.fuse_with_C(K23, G, cs.C(mu, r)) == {cs.C(mu, 4 - r): 1}

    @given(st.data())
    def test_unit_and_commutativity(self, data):
        lv = data.draw(st.sampled_from([Level(*x) for x in MODULAR_LEVELS]))
        a = coset_label(lv, data.draw)
        b = coset_label(lv, data.draw)
        assert cs.gr_fuse(lv, cs.C(0, 1), a) == cs.composition_factors(lv, a)
        assert cs.gr_fuse(lv, a, b) == cs.gr_fuse(lv, b, a)

    @given(st.data())
    def test_c_fusion_agrees_with_grothendieck(self, data):
        lv = data.draw(st.sampled_from([Level(*x) for x in MODULAR_LEVELS]))
        r = data.draw(st.integers(1, lv.u - 1))
        mu = r - 1 + 2 * data.draw(st.integers(-2, 2))
        x = coset_label(lv, data.draw)
        assert cs.fuse_with_C(lv, cs.C(mu, r), x) == cs.gr_fuse(lv, cs.C(mu, r), x)

    def test_standard_composition(self):
        assert cs.composition_factors(K23, cs.Estd("+", F(2, 3), 1, 1)) == {cs.C(0, 1): 1, cs.D(F(2, 3), 1, 1): 1}
        assert cs.standard_class(K23, F(1, 3), 1, 1) == {cs.E(F(1, 3), 3, 2): 1}
