import random

import pytest

from cartier.cring import CartierElement as C
from cartier.dvr import Frac, make_ring
from cartier.errors import InsufficientDeltaPrecision
from cartier.series import DeltaVector
from cartier.witt import witt_add_poly


@pytest.fixture
def z2():
    return make_ring(2, [2, 1], default_precision=14)


@pytest.fixture
def r32():
    return make_ring(3, [-3, 0, 1], default_precision=14)


def rand_vector(ring, rng, m=1, cap=4):
    rows = []
    for _ in range(m):
        rows.append([Frac(ring.random_element(rng, precision=10),
                          rng.randrange(2)) for _ in range(cap)])
    return DeltaVector(ring, rows)


class TestAction:
    def test_v_shifts(self, z2):
        f = DeltaVector(z2, [[5, 7]])
        out = C.v_gen(z2).act(f)
        assert out.coeffs[0][0].is_zero()
        assert out.coeffs[0][1] == Frac.from_int(z2, 5)
        assert out.coeffs[0][2] == Frac.from_int(z2, 7)

    def test_f_scales_and_drops(self, r32):
        f = DeltaVector(r32, [[2, 5, 7]])
        out = C.f_gen(r32).act(f)
        assert out.coeffs[0][0] == Frac.from_int(r32, 15)
        assert out.coeffs[0][1] == Frac.from_int(r32, 21)
        assert out.delta_cap == 2

    def test_bracket_frobenius(self, z2):
        a = z2.from_int(3)
        f = DeltaVector(z2, [[1, 1]])
        out = C.bracket(a).act(f)
        assert out.coeffs[0][0] == Frac.from_int(z2, 3)
        assert out.coeffs[0][1] == Frac.from_int(z2, 9)

    def test_insufficient_levels(self, z2):
        f = DeltaVector(z2, [[1]])
        c = C.monomial(z2, 0, 2, z2.one())
        with pytest.raises(InsufficientDeltaPrecision):
            c.act(f)


class TestNormalForm:
    def test_bracket_past_v(self, z2):
        a = z2.from_int(3)
        lhs = C.bracket(a) * C.v_gen(z2)
        rhs = C.monomial(z2, 1, 0, a ** 2)
        assert lhs == rhs

    def test_f_past_bracket(self, z2):
        a = z2.from_int(3)
        lhs = C.f_gen(z2) * C.bracket(a)
        rhs = C.monomial(z2, 0, 1, a ** 2)
        assert lhs == rhs

    def test_fv_is_scalar_p(self, z2, r32):
        for ring in (z2, r32):
            lhs = C.f_gen(ring) * C.v_gen(ring)
            assert lhs.eq_terms(C.scalar_int(ring, ring.p))

    def test_vf_does_not_collapse(self, z2):
        lhs = C.v_gen(z2) * C.f_gen(z2)
        assert set(lhs.terms) == {(1, 1)}

    def test_bracket_multiplicative(self, r32):
        rng = random.Random(2)
        for _ in range(20):
            a = r32.random_element(rng, precision=10)
            b = r32.random_element(rng, precision=10)
            assert (C.bracket(a) * C.bracket(b)).eq_terms(C.bracket(a * b))

    def test_sum_relation_structure(self, r32):
        rng = random.Random(4)
        for _ in range(10):
            a = r32.random_element(rng, precision=10)
            b = r32.random_element(rng, precision=10)
            s = C.bracket(a) + C.bracket(b)
            assert s.terms.get((0, 0), r32.zero()).eq_at(a + b)
            for n in (1, 2):
                expected = witt_add_poly(3, n).eval(a, b)
                got = s.terms.get((n, n), r32.zero())
                assert got.eq_at(expected, min(got.precision,
                                               expected.precision))

    def test_negation_cancels(self, r32):
        rng = random.Random(6)
        for _ in range(10):
            x = C(r32, {(0, 0): r32.random_element(rng, precision=10),
                        (1, 0): r32.random_element(rng, precision=10),
                        (0, 1): r32.random_element(rng, precision=10)})
            z = x + (-x)
            assert not z.terms

    def test_associativity_of_product(self, z2):
        rng = random.Random(8)
        for _ in range(6):
            def rand_elt():
                return C(z2, {(rng.randrange(2), rng.randrange(2)):
                              z2.random_element(rng, precision=10)})
            x, y, z = rand_elt(), rand_elt(), rand_elt()
            assert ((x * y) * z).eq_terms(x * (y * z))


class TestActionIsRingAction:
    def test_additive(self, r32):
        rng = random.Random(10)
        for _ in range(10):
            x = C(r32, {(0, 0): r32.random_element(rng, precision=10)})
            y = C(r32, {(1, 1): r32.random_element(rng, precision=10)})
            f = rand_vector(r32, rng)
            lhs = (x + y).act(f)
            rhs = x.act(f) + y.act(f)
            assert lhs == rhs

    def test_multiplicative(self, z2, r32):
        rng = random.Random(12)
        for ring in (z2, r32):
            for _ in range(12):
                x = C(ring, {(rng.randrange(2), rng.randrange(2)):
                             ring.random_element(rng, precision=10)})
                y = C(ring, {(rng.randrange(2), rng.randrange(2)):
                             ring.random_element(rng, precision=10)})
                f = rand_vector(ring, rng, cap=5)
                assert (x * y).act(f) == x.act(y.act(f))

    def test_fv_acts_as_p(self, z2, r32):
        rng = random.Random(14)
        for ring in (z2, r32):
            for _ in range(8):
                f = rand_vector(ring, rng)
                lhs = C.f_gen(ring).act(C.v_gen(ring).act(f))
                assert lhs == f.scale(ring.p)

    def test_scalar_int_acts_as_scaling(self, z2, r32):
        for ring in (z2, r32):
            rng = random.Random(16)
            for n in (2, 3, -1, 5):
                f = rand_vector(ring, rng)
                lhs = C.scalar_int(ring, n).act(f)
                assert lhs == f.scale(n)
