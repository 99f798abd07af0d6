"""Base-ring arithmetic: cyclotomic elements, Fermat quotients, residues."""

import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from arithchern.errors import (
    DenominatorNotAllowed,
    InadmissiblePrime,
    NonUnit,
    PrecisionMismatch,
)
from arithchern.ringcore import (
    CycloRing,
    CycloScalar,
    PadicScalar,
    cyclotomic_poly,
    frobenius_scalar,
    is_prime,
    legendre,
    p_derivation_scalar,
    padic_arith,
    rational_reconstruct,
)

Q_RING = CycloRing(2, 1)
GAUSS = CycloRing(2, 4)  # Z[1/2, i]
RING_612 = CycloRing(6, 12)  # Z[1/6, zeta_12]


def rat(ring, v):
    return ring.from_rational(Fraction(v))


class TestCyclotomicPoly:
    def test_small_values(self):
        assert cyclotomic_poly(1) == [-1, 1]
        assert cyclotomic_poly(2) == [1, 1]
        assert cyclotomic_poly(4) == [1, 0, 1]
        assert cyclotomic_poly(12) == [1, 0, -1, 0, 1]

    def test_degree_is_totient(self):
        for N in range(1, 30):
            from arithchern.ringcore import euler_phi

            assert len(cyclotomic_poly(N)) - 1 == euler_phi(N)


class TestCycloScalar:
    def test_zeta4_squares_to_minus_one(self):
        i = GAUSS.zeta()
        assert i * i == rat(GAUSS, -1)

    def test_denominator_restriction(self):
        with pytest.raises(DenominatorNotAllowed):
            CycloScalar(Q_RING, [Fraction(1, 3)])
        # powers of 2 are fine for N0 = 2
        CycloScalar(Q_RING, [Fraction(3, 8)])
        # N0 = 6 allows 2s and 3s
        CycloScalar(RING_612, [Fraction(5, 12), 0, 0, 0])

    def test_zeta12_order(self):
        z = RING_612.zeta()
        assert z**12 == RING_612.one()
        assert z**6 == rat(RING_612, -1)


class TestFrobenius:
    def test_fixes_rationals(self):
        a = rat(Q_RING, Fraction(7, 2))
        assert frobenius_scalar(a, 5) == a

    def test_zeta4_cubed(self):
        i = GAUSS.zeta()
        assert frobenius_scalar(i, 3) == -i

    def test_additivity(self):
        a = GAUSS.one() + GAUSS.zeta()
        assert frobenius_scalar(a, 3) == GAUSS.one() - GAUSS.zeta()

    def test_inadmissible_prime(self):
        with pytest.raises(InadmissiblePrime):
            frobenius_scalar(GAUSS.one(), 2)
        with pytest.raises(InadmissiblePrime):
            frobenius_scalar(RING_612.one(), 3)  # 3 | N0*N


class TestPDerivation:
    def test_integer_fermat_quotient(self):
        assert p_derivation_scalar(rat(Q_RING, 2), 3) == rat(Q_RING, -2)

    def test_one_maps_to_zero(self):
        for p in (3, 5, 7):
            assert p_derivation_scalar(Q_RING.one(), p).is_zero()

    def test_gaussian_example(self):
        a = GAUSS.one() + GAUSS.zeta()
        assert p_derivation_scalar(a, 3) == GAUSS.one() - GAUSS.zeta()


# randomized law checks in Z[1/6, zeta_12]

def cyclo_612():
    coeff = st.fractions(
        min_value=-10, max_value=10,
        max_denominator=12,
    ).filter(lambda f: all(q in (1, 2, 3) for q in _prime_factors(f.denominator)))
    return st.lists(coeff, min_size=4, max_size=4).map(lambda c: CycloScalar(RING_612, c))


def _prime_factors(n):
    out, d = set(), 2
    while d * d <= n:
        while n % d == 0:
            out.add(d)
            n //= d
        d += 1
    if n > 1:
        out.add(n)
    return out


@settings(max_examples=60, deadline=None)
@given(cyclo_612(), cyclo_612(), st.sampled_from([5, 7]))
def test_frobenius_is_ring_hom(a, b, p):
    assert frobenius_scalar(a + b, p) == frobenius_scalar(a, p) + frobenius_scalar(b, p)
    assert frobenius_scalar(a * b, p) == frobenius_scalar(a, p) * frobenius_scalar(b, p)


@settings(max_examples=40, deadline=None)
@given(cyclo_612(), cyclo_612(), st.sampled_from([5, 7]))
def test_p_derivation_product_law(a, b, p):
    da, db = p_derivation_scalar(a, p), p_derivation_scalar(b, p)
    lhs = p_derivation_scalar(a * b, p)
    assert lhs == a**p * db + b**p * da + p * da * db


@settings(max_examples=40, deadline=None)
@given(cyclo_612(), cyclo_612(), st.sampled_from([5, 7]))
def test_p_derivation_sum_law(a, b, p):
    da, db = p_derivation_scalar(a, p), p_derivation_scalar(b, p)
    lhs = p_derivation_scalar(a + b, p)
    correction = RING_612.zero()
    for i in range(1, p):
        correction = correction + (a**i * b ** (p - i)) * Fraction(math.comb(p, i), p)
    assert lhs == da + db - correction


@settings(max_examples=30, deadline=None)
@given(cyclo_612())
def test_frobenius_commute(a):
    assert frobenius_scalar(frobenius_scalar(a, 5), 7) == frobenius_scalar(
        frobenius_scalar(a, 7), 5
    )


class TestLegendre:
    @pytest.mark.parametrize("q,p,expected", [(1, 5, 1), (2, 7, 1), (2, 3, -1), (3, 3, 0)])
    def test_values(self, q, p, expected):
        assert legendre(q, p) == expected

    def test_rejects_two(self):
        with pytest.raises(InadmissiblePrime):
            legendre(3, 2)


class TestPadicScalar:
    def test_inverse_example(self):
        assert PadicScalar(3, 3, 2).inv().residue == 14

    def test_add_neg_cancels(self):
        x = PadicScalar(5, 4, 123)
        assert padic_arith(x, padic_arith(x, None, "neg"), "add").residue == 0

    def test_mul_identity(self):
        x = PadicScalar(5, 4, 123)
        assert padic_arith(PadicScalar(5, 4, 1), x, "mul") == x

    def test_precision_mismatch(self):
        with pytest.raises(PrecisionMismatch):
            PadicScalar(3, 3, 1) + PadicScalar(3, 4, 1)
        with pytest.raises(PrecisionMismatch):
            PadicScalar(3, 3, 1) * PadicScalar(5, 3, 1)

    def test_non_unit(self):
        with pytest.raises(NonUnit):
            PadicScalar(3, 3, 6).inv()

    def test_valuation(self):
        assert PadicScalar(3, 5, 18).valuation() == 2
        assert PadicScalar(3, 5, 0).valuation() == 5


class TestRationalReconstruct:
    def test_half_example(self):
        assert rational_reconstruct(122, 3, 5) == Fraction(1, 2)

    def test_small_integer(self):
        assert rational_reconstruct(7, 5, 6) == 7

    def test_round_trip_range(self):
        p, K = 7, 8
        pK = p**K
        for u in range(-50, 51):
            for v in range(1, 51):
                if math.gcd(abs(u), v) != 1 or v % p == 0:
                    continue
                residue = u * pow(v, -1, pK) % pK
                assert rational_reconstruct(residue, p, K) == Fraction(u, v)

    def test_unreconstructible_returns_none(self):
        # no u/v with |u|, v <= 3 satisfies u = 7v mod 25
        assert rational_reconstruct(7, 5, 2) is None


def test_is_prime():
    assert [n for n in range(2, 40) if is_prime(n)] == [
        2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37,
    ]
    assert not is_prime(1) and not is_prime(561) and is_prime(2**31 - 1)
