"""Exact-kernel tests: cyclotomic arithmetic, Laurent polynomials, symbolic
determinants, minors, and the rank engines."""

import math
from fractions import Fraction

import numpy as np
import pytest

from flatlab.exact import (
    BudgetExceeded,
    CapExceeded,
    CycloCoeff,
    DimensionMismatch,
    LaurentPoly,
    MonomialMatrix,
    NonFiniteEntry,
    NotSquare,
    cyclotomic_polynomial,
    euler_phi,
    exact_rank,
    exact_rank_monomial,
    laurent_det,
    laurent_minors,
    numeric_rank,
)

ONE = CycloCoeff.one()
MINUS = CycloCoeff.rational(-1)


def circle3_matrix() -> MonomialMatrix:
    entries = {
        (0, 0): LaurentPoly.monomial(1, (0,), MINUS),
        (0, 1): LaurentPoly.monomial(1, (0,), ONE),
        (1, 0): LaurentPoly.monomial(1, (0,), MINUS),
        (1, 2): LaurentPoly.monomial(1, (1,), ONE),
        (2, 1): LaurentPoly.monomial(1, (0,), MINUS),
        (2, 2): LaurentPoly.monomial(1, (0,), ONE),
    }
    return MonomialMatrix.make(3, 3, 1, entries)


class TestCyclotomic:
    def test_phi_values(self):
        assert [euler_phi(n) for n in (1, 2, 3, 4, 6, 12)] == [1, 1, 2, 2, 2, 4]

    def test_polynomials(self):
        assert cyclotomic_polynomial(1) == (-1, 1)
        assert cyclotomic_polynomial(4) == (1, 0, 1)
        assert cyclotomic_polynomial(6) == (1, -1, 1)

    @pytest.mark.parametrize("n", [2, 3, 4, 6])
    def test_root_of_unity_identities(self, n):
        z = CycloCoeff.root_of_unity(n, 1)
        power = CycloCoeff.one(n)
        total = CycloCoeff.zero(n)
        for k in range(n):
            total = total + power
            power = power * z
        assert power == CycloCoeff.one(n)    # zeta^n = 1
        assert total.is_zero()               # sum of all n-th roots

    def test_inverse_and_division(self):
        x = CycloCoeff.root_of_unity(12, 5) + CycloCoeff.rational(3, 12)
        assert (x * x.inverse()) == CycloCoeff.one(12)
        assert (x / x) == CycloCoeff.one(12)
        with pytest.raises(ZeroDivisionError):
            CycloCoeff.zero(4).inverse()

    def test_complex_embedding(self):
        assert abs(complex(CycloCoeff.root_of_unity(4, 1)) - 1j) < 1e-14
        z6 = complex(CycloCoeff.root_of_unity(6, 1))
        assert abs(z6 - np.exp(2j * np.pi / 6)) < 1e-14

    def test_lift(self):
        z3 = CycloCoeff.root_of_unity(3, 1)
        assert z3.lift(6) == CycloCoeff.root_of_unity(6, 2)

    def test_json_roundtrip(self):
        x = CycloCoeff.root_of_unity(6, 1) + CycloCoeff.rational(Fraction(2, 7), 6)
        assert CycloCoeff.from_json(x.to_json()) == x


class TestLaurentPoly:
    def test_eval_examples(self):
        p = LaurentPoly.make(1, {(1,): ONE, (0,): MINUS})
        assert p.eval([1]) == 0
        assert p.eval([2]) == 1
        q = LaurentPoly.make(2, {(1, -1): ONE})
        assert abs(q.eval([6, 2]) - 3) < 1e-14

    def test_eval_dimension_mismatch(self):
        p = LaurentPoly.make(2, {(1, 0): ONE})
        with pytest.raises(DimensionMismatch):
            p.eval([2.0])

    def test_arithmetic_cancellation(self):
        p = LaurentPoly.make(1, {(1,): ONE})
        assert (p - p).is_zero()
        prod = p * LaurentPoly.make(1, {(-1,): ONE})
        assert prod.terms == (((0,), ONE),)

    def test_normalization(self):
        # gcd monomial stripped, leading coefficient set to one
        p = LaurentPoly.make(1, {(3,): CycloCoeff.rational(2), (1,): CycloCoeff.rational(-2)})
        n = p.normalized()
        assert n.terms == (((0,), MINUS), ((2,), ONE))

    def test_normalization_idempotent(self):
        p = LaurentPoly.make(2, {(2, -1): CycloCoeff.rational(5),
                                 (0, 0): CycloCoeff.rational(-5)})
        once = p.normalized()
        assert once.normalized().sort_key() == once.sort_key()

    def test_exact_eval_matches_numeric(self):
        p = LaurentPoly.make(2, {(2, -1): CycloCoeff.rational(Fraction(3, 2)),
                                 (0, 1): CycloCoeff.root_of_unity(4, 1)})
        g = [CycloCoeff.rational(Fraction(1, 2)), CycloCoeff.rational(3)]
        exact = complex(p.eval_exact(g))
        numeric = p.eval([0.5, 3.0])
        assert abs(exact - numeric) < 1e-12

    def test_json_roundtrip(self):
        p = LaurentPoly.make(2, {(1, -2): CycloCoeff.root_of_unity(6, 1)})
        q = LaurentPoly.from_json(p.to_json(), 2)
        assert q.sort_key() == p.sort_key()


class TestDeterminant:
    def test_circle3_symbolic(self):
        det = laurent_det(circle3_matrix())
        expected = LaurentPoly.make(1, {(1,): ONE, (0,): MINUS})
        assert det.normalized().sort_key() == expected.normalized().sort_key()

    def test_identity(self):
        entries = {(i, i): LaurentPoly.monomial(1, (0,), ONE) for i in range(4)}
        det = laurent_det(MonomialMatrix.make(4, 4, 1, entries))
        assert det.terms == (((0,), ONE),)

    def test_zero_row(self):
        entries = {(0, 0): LaurentPoly.monomial(1, (1,), ONE)}
        det = laurent_det(MonomialMatrix.make(2, 2, 1, entries))
        assert det.is_zero()

    def test_not_square(self):
        with pytest.raises(NotSquare):
            laurent_det(MonomialMatrix.make(2, 3, 1, {}))

    def test_interpolation_path_matches_cofactor(self):
        m = circle3_matrix()
        via_interp = laurent_det(m, cap=1)
        via_cofactor = laurent_det(m)
        assert via_interp.sort_key() == via_cofactor.sort_key()

    def test_cap_without_interpolation(self):
        with pytest.raises(CapExceeded):
            laurent_det(circle3_matrix(), cap=1, interpolate=False)

    def test_interpolation_two_variables(self):
        entries = {
            (0, 0): LaurentPoly.monomial(2, (1, 0), ONE),
            (0, 1): LaurentPoly.monomial(2, (0, 0), ONE),
            (1, 0): LaurentPoly.monomial(2, (0, -1), MINUS),
            (1, 1): LaurentPoly.monomial(2, (0, 1), ONE),
        }
        m = MonomialMatrix.make(2, 2, 2, entries)
        det = laurent_det(m, cap=1)
        expected = laurent_det(m, cap=4)
        assert det.sort_key() == expected.sort_key()

    def test_det_eval_agrees_numeric(self):
        rng = np.random.default_rng(5)
        m = circle3_matrix()
        det = laurent_det(m)
        for _ in range(50):
            g = rng.uniform(0.5, 2.0) * np.exp(1j * rng.uniform(0, 2 * np.pi))
            numeric = np.linalg.det(m.evaluate([g]))
            assert abs(det.eval([g]) - numeric) <= 1e-8 * max(1.0, abs(numeric))


class TestMinors:
    def test_circle3_full_minor(self):
        mins = laurent_minors(circle3_matrix(), 3, budget=10)
        expected = LaurentPoly.make(1, {(1,): ONE, (0,): MINUS}).normalized()
        assert len(mins) == 1 and mins[0].sort_key() == expected.sort_key()

    def test_monomials_normalize_to_one(self):
        mins = laurent_minors(circle3_matrix(), 1, budget=100)
        assert len(mins) == 1 and str(mins[0]) == "1"

    def test_diagonal_two_by_two(self):
        entries = {(0, 0): LaurentPoly.monomial(1, (1,), ONE),
                   (1, 1): LaurentPoly.monomial(1, (1,), ONE)}
        mins = laurent_minors(MonomialMatrix.make(2, 2, 1, entries), 2, budget=10)
        assert len(mins) == 1 and str(mins[0]) == "1"

    def test_budget(self):
        with pytest.raises(BudgetExceeded) as err:
            laurent_minors(circle3_matrix(), 2, budget=2)
        assert err.value.required == 9


class TestRanks:
    def test_numeric_rank_examples(self):
        m = circle3_matrix()
        assert numeric_rank(m.evaluate([2.0])) == 3
        assert numeric_rank(m.evaluate([1.0])) == 2
        assert numeric_rank(np.zeros((3, 3))) == 0
        assert numeric_rank(np.zeros((0, 3))) == 0

    def test_non_finite(self):
        bad = np.array([[np.nan, 0], [0, 1]], dtype=complex)
        with pytest.raises(NonFiniteEntry):
            numeric_rank(bad)

    def test_exact_rank_rational(self):
        m = circle3_matrix()
        assert exact_rank_monomial(m, [CycloCoeff.rational(2)]) == 3
        assert exact_rank_monomial(m, [ONE]) == 2

    def test_exact_rank_cyclotomic(self):
        m = circle3_matrix()
        z6 = CycloCoeff.root_of_unity(6, 1)
        assert exact_rank_monomial(m, [z6]) == 3
        assert exact_rank(m.evaluate_exact([z6])) == 3

    def test_exact_matches_numeric_on_random_rationals(self):
        rng = np.random.default_rng(11)
        m = circle3_matrix()
        pool = [Fraction(a, b) for a in (-3, -2, -1, 1, 2, 3) for b in (1, 2, 3)]
        for _ in range(20):
            g = pool[rng.integers(len(pool))]
            got = exact_rank_monomial(m, [CycloCoeff.rational(g)])
            want = numeric_rank(m.evaluate([complex(g)]))
            assert got == want
