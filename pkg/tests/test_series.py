import random

import pytest

from cartier.dvr import Frac, make_ring
from cartier.errors import (ArityMismatch, NonzeroConstantTerm, RingMismatch,
                            SingularLinearPart)
from cartier.series import (DeltaVector, MultiSeries, SeriesTuple, compose,
                            delta_to_curve, reversion)


@pytest.fixture
def z2():
    return make_ring(2, [2, 1], default_precision=16)


@pytest.fixture
def r32():
    return make_ring(3, [-3, 0, 1], default_precision=16)


def uni(ring, cap, coeffs):
    """Univariate series from a {degree: int} mapping."""
    return MultiSeries(ring, 1, cap, {(d,): c for d, c in coeffs.items()})


class TestMul:
    def test_difference_of_squares(self, z2):
        a = uni(z2, 8, {0: 1, 1: 1})
        b = uni(z2, 8, {0: 1, 1: -1})
        assert a * b == uni(z2, 8, {0: 1, 2: -1})

    def test_truncation_contract(self, z2):
        x = MultiSeries.variable(z2, 1, 2, 0)
        assert (x * x).terms == {}

    def test_binomial_square(self, z2):
        s = MultiSeries(z2, 2, 8, {(1, 0): 1, (0, 1): 1})
        sq = s * s
        assert sq == MultiSeries(z2, 2, 8, {(2, 0): 1, (1, 1): 2, (0, 2): 1})

    def test_ring_mismatch(self, z2, r32):
        with pytest.raises(RingMismatch):
            MultiSeries.variable(z2, 1, 4, 0) * MultiSeries.variable(r32, 1, 4, 0)

    def test_commutative_associative_random(self, r32):
        rng = random.Random(3)
        for _ in range(10):
            def rand_series():
                return MultiSeries(r32, 2, 6, {
                    (rng.randrange(3), rng.randrange(3)): rng.randrange(-4, 5)
                    for _ in range(4)})
            a, b, c = rand_series(), rand_series(), rand_series()
            assert a * b == b * a
            assert (a * b) * c == a * (b * c)


class TestCompose:
    def test_identity_left(self, z2):
        ident = SeriesTuple.identity(z2, 2, 6)
        g = SeriesTuple([MultiSeries(z2, 2, 6, {(1, 0): 2, (1, 1): 3}),
                         MultiSeries(z2, 2, 6, {(0, 1): 1, (2, 0): -1})])
        assert compose(ident, g) == g

    def test_single_var_expansion(self, z2):
        f = SeriesTuple([uni(z2, 6, {1: 1, 2: 1})])  # x + x^2
        g = SeriesTuple([uni(z2, 6, {1: 2})])  # 2x
        assert compose(f, g) == SeriesTuple([uni(z2, 6, {1: 2, 2: 4})])

    def test_one_component_two_vars(self, z2):
        f = SeriesTuple([uni(z2, 6, {1: 1})])
        g = SeriesTuple([MultiSeries(z2, 2, 6, {(1, 0): 1, (0, 1): 1})])
        assert compose(f, g) == g

    def test_arity_mismatch(self, z2):
        f = SeriesTuple.identity(z2, 2, 6)
        g = SeriesTuple([uni(z2, 6, {1: 1})])
        with pytest.raises(ArityMismatch):
            compose(f, g)

    def test_nonzero_constant_rejected(self, z2):
        f = SeriesTuple([uni(z2, 6, {1: 1})])
        g = SeriesTuple([uni(z2, 6, {0: 1, 1: 1})])
        with pytest.raises(NonzeroConstantTerm):
            compose(f, g)


class TestReversion:
    def test_identity(self, z2):
        f = SeriesTuple.identity(z2, 1, 6)
        assert reversion(f) == f

    def test_catalan_signs(self, z2):
        f = SeriesTuple([uni(z2, 5, {1: 1, 2: 1})])
        g = reversion(f)
        assert g == SeriesTuple([uni(z2, 5, {1: 1, 2: -1, 3: 2, 4: -5})])

    def test_singular_linear_part(self, z2):
        f = SeriesTuple([uni(z2, 5, {2: 1})])
        with pytest.raises(SingularLinearPart):
            reversion(f)

    @pytest.mark.parametrize("m,cap", [(1, 8), (2, 5)])
    def test_roundtrip_random(self, r32, m, cap):
        rng = random.Random(17 + m)
        for _ in range(6):
            comps = []
            for i in range(m):
                terms = {}
                for _ in range(4):
                    exps = tuple(rng.randrange(3) for _ in range(m))
                    if 2 <= sum(exps) < cap:
                        terms[exps] = rng.randrange(-3, 4)
                lin = [0] * m
                lin[i] = 1
                terms[tuple(lin)] = 1  # unit linear part
                comps.append(MultiSeries(r32, m, cap, terms))
            f = SeriesTuple(comps)
            g = reversion(f)
            ident = SeriesTuple.identity(r32, m, cap)
            assert compose(f, g) == ident
            assert compose(g, f) == ident


class TestDeltaVectors:
    def test_constant_one_gives_tautological_curve(self, z2):
        h = DeltaVector(z2, [[1]])
        assert delta_to_curve(h) == SeriesTuple([uni(z2, 2, {1: 1})])

    def test_delta_gives_x_to_p(self, z2):
        h = DeltaVector(z2, [[0, 1]])
        curve = delta_to_curve(h)
        assert curve == SeriesTuple([uni(z2, 4, {2: 1})])

    def test_one_plus_delta_p3(self, r32):
        h = DeltaVector(r32, [[1, 1]])
        assert delta_to_curve(h) == SeriesTuple([uni(r32, 9, {1: 1, 3: 1})])

    def test_additive(self, r32):
        rng = random.Random(23)
        for _ in range(10):
            h1 = DeltaVector(r32, [[rng.randrange(-5, 6) for _ in range(3)]])
            h2 = DeltaVector(r32, [[rng.randrange(-5, 6) for _ in range(3)]])
            lhs = delta_to_curve(h1 + h2)
            rhs_a = delta_to_curve(h1)
            rhs_b = delta_to_curve(h2)
            assert lhs == SeriesTuple([a + b for a, b in
                                       zip(rhs_a.components, rhs_b.components)])

    def test_f_op_scales_by_p(self, r32):
        h = DeltaVector(r32, [[5, 7, 11]])
        out = h.f_op()
        assert out.coeffs[0][0] == Frac.from_int(r32, 21)
        assert out.coeffs[0][1] == Frac.from_int(r32, 33)
        assert out.delta_cap == 2

    def test_shift_then_f_is_p(self, r32):
        h = DeltaVector(r32, [[2, 3, 4]])
        assert h.shift().f_op() == h.scale(3)

    def test_bracket_frobenius_powers(self, r32):
        pi = r32.pi()
        h = DeltaVector(r32, [[1, 1]])
        out = h.bracket(pi)
        assert out.coeffs[0][0] == Frac(pi)
        assert out.coeffs[0][1] == Frac(pi ** 3)
