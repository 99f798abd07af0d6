"""Rational reconstruction of lifts and globality certification."""

import json
import random
from fractions import Fraction

import pytest

from arithchern.chern import FormSpec, LiftParams, solve_frobenius_lift
from arithchern.errors import NotGlobalAlongIdentity
from arithchern.globalize import (
    GlobalLift,
    certify_global,
    coeff_str,
    global_lift_to_dict,
    global_lift_to_json,
    reconstruct_global_lift,
    solve_and_globalize,
)
from arithchern.tseries import EXACT, MatrixSeries, PadicRing, Series, SeriesContext


@pytest.fixture(scope="module")
def sp2_lift():
    result = solve_frobenius_lift(FormSpec.split_sp(2), LiftParams(p=3, K=16, D=4))
    return reconstruct_global_lift(result)


class TestReconstruction:
    def test_rank1_unit_is_plain_power(self):
        result = solve_frobenius_lift(FormSpec.rank1(1), LiftParams(p=5, K=16, D=5))
        lift = reconstruct_global_lift(result)
        ctx = SeriesContext(1, 5)
        expected = MatrixSeries.one_plus_T(ctx, EXACT).entrywise_pow(5)
        assert lift.Lambda_exact == expected
        assert lift.certificate.passed()

    def test_rank1_q2_not_global(self):
        result = solve_frobenius_lift(FormSpec.rank1(2), LiftParams(p=3, K=16, D=4))
        with pytest.raises(NotGlobalAlongIdentity):
            reconstruct_global_lift(result)

    def test_sp2_exact_and_p_integral(self, sp2_lift):
        assert sp2_lift.certificate.passed()
        for row in sp2_lift.Lambda_exact.rows:
            for series in row:
                for c in series.terms.values():
                    den = c.denominator if isinstance(c, Fraction) else 1
                    assert den % 3 != 0  # p-integrality

    def test_stability_under_K_escalation(self, sp2_lift):
        bigger = solve_frobenius_lift(FormSpec.split_sp(2), LiftParams(p=3, K=24, D=4))
        lift24 = reconstruct_global_lift(bigger)
        assert lift24.Lambda_exact == sp2_lift.Lambda_exact

    def test_reduction_matches_solver(self, sp2_lift):
        solver = sp2_lift.solver_result
        for i in range(2):
            for j in range(2):
                assert (
                    sp2_lift.Lambda_exact.rows[i][j].to_padic(3, 16)
                    == solver.Lambda.rows[i][j]
                )


class TestCertificate:
    def test_recertify_passes(self, sp2_lift):
        assert certify_global(sp2_lift).passed()

    def test_single_coefficient_mutation_detected(self, sp2_lift):
        ctx = sp2_lift.Lambda_exact.ctx
        mutated_rows = [[s for s in row] for row in sp2_lift.Lambda_exact.rows]
        tweak = Series.variable(ctx, EXACT, 0, 0)
        mutated_rows[0][1] = mutated_rows[0][1] + tweak
        mutated = MatrixSeries(ctx, EXACT, mutated_rows)
        bad = GlobalLift(
            Lambda_exact=mutated, p=3, form=sp2_lift.form, D=4,
            certificate=sp2_lift.certificate, solver_result=sp2_lift.solver_result,
        )
        assert not certify_global(bad).passed()

    def test_randomized_mutations_all_caught(self, sp2_lift):
        ctx = sp2_lift.Lambda_exact.ctx
        rng = random.Random(20240817)
        for _ in range(20):
            i, j = rng.randrange(2), rng.randrange(2)
            idx = rng.randrange(ctx.count)
            delta = Fraction(rng.choice([1, -1, 2, 9]), rng.choice([1, 2]))
            rows = [[s for s in row] for row in sp2_lift.Lambda_exact.rows]
            rows[i][j] = rows[i][j] + Series(ctx, EXACT, {idx: delta})
            bad = GlobalLift(
                Lambda_exact=MatrixSeries(ctx, EXACT, rows), p=3,
                form=sp2_lift.form, D=4,
                certificate=sp2_lift.certificate, solver_result=sp2_lift.solver_result,
            )
            assert not certify_global(bad).passed()

    def test_uncorrected_power_map_fails_for_identity_form(self):
        # (1+T)^(p) entrywise is NOT the lift for q = 1, n = 2: off-diagonal
        # cross terms break identity (I) below degree p
        form = FormSpec(2, 1, ((1, 0), (0, 1)), kind="custom")
        params = LiftParams(p=3, K=8, D=2)
        result = solve_frobenius_lift(form, params)
        ctx = SeriesContext(2, 2)
        X = MatrixSeries.one_plus_T(ctx, EXACT).entrywise_pow(3)
        naive = GlobalLift(
            Lambda_exact=X, p=3, form=form, D=2,
            certificate=None, solver_result=result,
        )
        cert = certify_global(naive)
        assert not cert.identity_I_exact
        # while the true lift certifies
        assert reconstruct_global_lift(result).certificate.passed()


class TestEscalation:
    def test_solve_and_globalize_sp2(self):
        lift = solve_and_globalize(FormSpec.split_sp(2), LiftParams(p=5, K=16, D=4))
        assert lift.certificate.passed()


class TestSerialization:
    def test_coeff_str(self):
        assert coeff_str(Fraction(-3, 2)) == "-3/2"
        assert coeff_str(Fraction(4, 1)) == "4"
        assert coeff_str(7) == "7"

    def test_json_round_trip_shape(self, sp2_lift):
        doc = json.loads(global_lift_to_json(sp2_lift))
        assert doc["n"] == 2 and doc["D"] == 4 and doc["p"] == 3
        assert doc["certificate"]["passed"] is True
        entry = doc["entries"][0][0]
        assert entry[0]["exponents"] == [0, 0, 0, 0]
        assert entry[0]["coeff"] == "1"
        # graded-lex: degrees never decrease along the term list
        for row in doc["entries"]:
            for series in row:
                degs = [sum(t["exponents"]) for t in series]
                assert degs == sorted(degs)
