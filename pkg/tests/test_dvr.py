import math
import random

import pytest

from cartier.dvr import Frac, RamifiedRing, make_ring, ram_constants
from cartier.errors import NotEisenstein, NotPrime, NotUnit, PrecisionExhausted

INF = math.inf


@pytest.fixture
def z2():
    # e = 1, pi = -2
    return make_ring(2, [2, 1], default_precision=16)


@pytest.fixture
def r32():
    # pi^2 = 3
    return make_ring(3, [-3, 0, 1], default_precision=16)


class TestRingConstruction:
    def test_unramified_degree_one(self):
        ring = make_ring(2, [2, 1])
        assert ring.e == 1

    def test_standard_quadratic(self):
        ring = make_ring(3, [-3, 0, 1])
        assert ring.e == 2

    def test_valuation_pattern_checked_by_hand(self):
        # x^2 - 2x - 2: coefficients (-2, -2, 1); v_2(-2) = 1 for both
        ring = make_ring(2, [-2, -2, 1])
        assert ring.e == 2

    def test_rejects_non_eisenstein(self):
        with pytest.raises(NotEisenstein):
            make_ring(2, [-2, -1, 1])  # middle coefficient is a unit
        with pytest.raises(NotEisenstein):
            make_ring(2, [4, 0, 1])  # constant term valuation 2
        with pytest.raises(NotEisenstein):
            make_ring(2, [2, 0, 3])  # not monic

    def test_rejects_composite(self):
        with pytest.raises(NotPrime):
            make_ring(6, [6, 1])


class TestElementArithmetic:
    def test_pi_squared_is_three(self, r32):
        pi = r32.pi()
        assert (pi * pi).eq_at(r32.from_int(3))

    def test_ring_identity(self, r32):
        pi = r32.pi()
        one = r32.one()
        lhs = (one + pi) * (one - pi)
        rhs = one - pi * pi
        assert lhs.eq_at(rhs)

    def test_invert_extended_euclid_oracle(self):
        ring = make_ring(2, [2, 1], default_precision=4)
        x = ring.from_int(3, precision=4)
        inv = x.invert()
        # ground truth: 3^{-1} mod 2^4 = 11 by extended Euclid
        assert inv.eq_at(ring.from_int(11), 4)
        # sanity: digits are base-(-2) since pi = -2 here
        assert x.eq_at(ring.from_int(1) - ring.pi(), 4)

    def test_invert_geometric_series(self, z2):
        # (1+p)^{-1} = sum (-p)^k
        x = z2.from_int(1 + 2, precision=12)
        acc = z2.zero(12)
        for k in range(14):
            acc = acc + z2.from_int((-2) ** k, precision=12)
        assert x.invert().eq_at(acc, 12)

    def test_invert_non_unit(self, r32):
        with pytest.raises(NotUnit):
            r32.pi().invert()

    def test_invert_no_digits(self, r32):
        with pytest.raises(PrecisionExhausted):
            r32.zero(0).invert()

    def test_negation_roundtrip(self, r32):
        x = r32.from_int(7)
        assert (x + (-x)).is_zero()


class TestValuation:
    def test_basic_values(self, r32):
        assert r32.pi().valuation() == 1
        assert r32.from_int(3).valuation() == r32.e
        assert r32.zero().valuation() == INF

    def test_precision_limited_flag(self, r32):
        v, limited = r32.zero(5).valuation_report()
        assert v == INF and limited
        v, limited = r32.pi().valuation_report()
        assert v == 1 and not limited

    def test_multiplicativity_random(self, r32, z2):
        rng = random.Random(7)
        for ring in (r32, z2):
            for _ in range(60):
                a = ring.random_element(rng, min_val=rng.randrange(3))
                b = ring.random_element(rng, min_val=rng.randrange(3))
                if a.is_zero() or b.is_zero():
                    continue
                assert (a * b).valuation() == a.valuation() + b.valuation()

    def test_ultrametric_random(self, r32):
        rng = random.Random(11)
        for _ in range(60):
            a = r32.random_element(rng, min_val=rng.randrange(4))
            b = r32.random_element(rng, min_val=rng.randrange(4))
            s = a + b
            va, vb = a._capped_val(), b._capped_val()
            if s.is_zero():
                continue
            assert s.valuation() >= min(va, vb)
            if va != vb:
                assert s.valuation() == min(va, vb)

    def test_frobenius_compatibility(self, r32, z2):
        rng = random.Random(13)
        for ring in (r32, z2):
            for _ in range(40):
                a = ring.random_element(rng)
                assert (a ** ring.p).residue() == (a.residue() ** ring.p) % ring.p
                assert (a ** ring.p).residue() == a.residue()


class TestPrecisionTracking:
    def test_add_takes_min(self, r32):
        a = r32.from_int(1, precision=10)
        b = r32.from_int(1, precision=6)
        assert (a + b).precision == 6

    def test_mul_valuation_shift(self, r32):
        a = r32.pi().truncate(8)  # pi known mod pi^8
        b = r32.pi().truncate(8)
        assert (a * b).precision == 9  # min(8+1, 8+1)

    def test_divide_pi(self, r32):
        x = r32.from_int(3)
        y = x.divide_pi(2)  # 3 / pi^2 = 1
        assert y.eq_at(r32.one(), 5)

    def test_div_p_exact(self, r32):
        x = r32.from_int(6)
        assert x.div_p_exact(1).eq_at(r32.from_int(2))


class TestFrac:
    def test_normalization_strips_p(self, r32):
        f = Frac(r32.from_int(9), 1)
        assert f.p_exp == 0
        assert f.num.eq_at(r32.from_int(3))

    def test_non_integral_detected(self, r32):
        f = Frac(r32.one(), 1)
        status, _ = f.integrality()
        assert status == "fail"

    def test_integral_after_cancellation(self, r32):
        f = Frac(r32.from_int(3), 1) * Frac(r32.from_int(3), 1)
        status, _ = f.integrality()
        assert status == "pass" and f.p_exp == 0

    def test_invert_roundtrip(self, r32):
        rng = random.Random(5)
        for _ in range(25):
            num = r32.random_element(rng, min_val=rng.randrange(3))
            if num.is_zero():
                continue
            f = Frac(num, rng.randrange(2))
            prod = f * f.invert()
            assert (prod - Frac.one(r32)).is_zero()

    def test_valuation_negative(self, r32):
        f = Frac(r32.one(), 1)
        assert f.valuation() == -2

    def test_zero_at_precision_undetermined(self, r32):
        f = Frac(r32.zero(3), 2)  # O(pi^3) / p^2: margin 3 - 4 < 1
        status, _ = f.integrality()
        assert status == "undetermined"

    def test_zero_at_precision_with_margin_passes(self, r32):
        f = Frac(r32.zero(10), 2)
        status, margin = f.integrality()
        assert status == "pass" and margin == 6


class TestRamConstants:
    def test_paper_small_case(self):
        c = ram_constants(5, 3, 3)
        assert (c.s, c.t, c.l_prime, c.l) == (0, 1, 1, 1)

    def test_derived_p2(self):
        c = ram_constants(2, 1, 1)
        assert (c.s, c.t, c.l_prime, c.l) == (1, 1, 2, 3)

    def test_derived_p3_boundary(self):
        # p*e/(p-1) = 9 is an exact power of 3; floor log must be exact
        c = ram_constants(3, 6, 2)
        assert (c.s, c.t, c.l_prime, c.l) == (2, 2, 3, 5)

    def test_monotone_in_e(self):
        for p in (2, 3, 5):
            last = -1
            for e in range(1, 51):
                s = ram_constants(p, e, 1).s
                assert s >= last
                last = s

    def test_l_decomposition_scan(self):
        count = 0
        for p in (2, 3, 5, 7):
            for e in range(1, 11):
                for e0 in range(1, 6):
                    c = ram_constants(p, e, e0)
                    assert c.l == c.l_prime + c.s
                    count += 1
        assert count == 200

    def test_rejects_bad_input(self):
        with pytest.raises(NotPrime):
            ram_constants(4, 1, 1)
        with pytest.raises(ValueError):
            ram_constants(2, 0, 1)
